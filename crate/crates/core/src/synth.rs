//! Synthetic data: preferential-attachment graphs, edge reshuffling, and a
//! transaction generator with recorded anomaly injections.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{Datelike, Months, NaiveDate};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeSet, TemporalLayer};
use crate::ingest::{Amount, RiskLevel, RiskTable, Source, Transaction};

/// Directed Barabási–Albert graph with unit weights.
///
/// Nodes `0..m` start without edges. Node `m` links to all of them; every
/// later node picks `m` distinct targets with probability proportional to
/// their current total degree (uniform draws from the list of edge
/// endpoints, repeats redrawn). Edges point from the new node to the
/// targets, so the graph has exactly `m * (n - m)` edges.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<TemporalLayer> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!("barabasi_albert needs n > m >= 1, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m * (n - m));
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * (n - m));
    for t in 0..m {
        edges.push((m, t, 1.0));
        endpoints.extend([m, t]);
    }
    let mut chosen = Vec::with_capacity(m);
    for v in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((v, t, 1.0));
            endpoints.extend([v, t]);
        }
    }
    TemporalLayer::new("ba", NodeSet::range(n), edges)
}

const MAX_REDRAWS: usize = 10_000;

/// Redraws both endpoints of `floor(fraction * m)` uniformly chosen edges.
///
/// A redrawn edge is never a self-loop, never one of the original pairs
/// and never a pair already produced; it keeps its weight. All other edges
/// are copied unchanged.
pub fn reshuffle_edges(layer: &TemporalLayer, fraction: f64, seed: u64) -> Result<TemporalLayer> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let n = layer.node_count();
    let m = layer.edge_count();
    let k = (fraction * m as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, m, k).into_vec();
    picked.sort_unstable();

    let original: HashSet<(usize, usize)> = layer.edges().iter().map(|e| (e.src, e.dst)).collect();
    let mut used = original.clone();
    let mut rewire = vec![false; m];
    for &i in &picked {
        rewire[i] = true;
    }
    let mut out = Vec::with_capacity(m);
    for (i, e) in layer.edges().iter().enumerate() {
        if !rewire[i] {
            out.push((e.src, e.dst, e.weight));
            continue;
        }
        let mut placed = false;
        for _ in 0..MAX_REDRAWS {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v && used.insert((u, v)) {
                out.push((u, v, e.weight));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Rewire(format!(
                "no free pair found for edge {} -> {} after {MAX_REDRAWS} draws",
                layer.nodes().id(e.src),
                layer.nodes().id(e.dst)
            )));
        }
    }
    TemporalLayer::new(layer.label(), layer.nodes().clone(), out)
}

/// Kind of a planted anomaly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnomalyKind {
    /// Outgoing amounts of the month multiplied by `factor`.
    Spike { factor: f64 },
    /// The month's transfers go to fresh high-risk counterparties, with
    /// amounts multiplied by `factor`.
    Redirect { factor: f64 },
}

impl AnomalyKind {
    pub fn tag(&self) -> &'static str {
        match self {
            AnomalyKind::Spike { .. } => "spike",
            AnomalyKind::Redirect { .. } => "redirect",
        }
    }
}

impl fmt::Display for AnomalyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for AnomalyKind {
    type Err = String;
    /// `spike`, `spike:F`, `redirect` or `redirect:F`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, factor) = match s.split_once(':') {
            Some((a, b)) => (a, b.parse::<f64>().map_err(|_| format!("bad factor in `{s}`"))?),
            None => (s, 20.0),
        };
        match name.trim() {
            "spike" => Ok(AnomalyKind::Spike { factor }),
            "redirect" => Ok(AnomalyKind::Redirect { factor }),
            _ => Err(format!("unknown anomaly kind `{s}`")),
        }
    }
}

/// A planted anomaly on node index `node` in month `month` (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Injection {
    pub node: usize,
    pub month: usize,
    pub kind: AnomalyKind,
}

/// Shape of the generated activity.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionProfile {
    pub nodes: usize,
    pub months: usize,
    /// First day of the first month.
    pub start: NaiveDate,
    /// Regular counterparties per node.
    pub partners: usize,
    /// Probability that a node sends anything in a given month.
    pub activity: f64,
    /// Transfers per counterparty and month, drawn from `1..=max`; the
    /// monthly volume is split evenly over them.
    pub max_transfers: u32,
    /// Median monthly volume per counterparty of a node of unit size, in euros.
    pub base_amount: f64,
    /// Spread of the log-uniform month-to-month volume noise.
    pub noise: f64,
    /// Tail exponent of the node size distribution (Pareto).
    pub size_exponent: f64,
    /// Bank-country codes with their risk level; nodes are spread over
    /// them uniformly.
    pub countries: Vec<(String, RiskLevel)>,
}

impl Default for TransactionProfile {
    fn default() -> Self {
        // codes from the user-assigned X* range, not real countries
        let countries = [
            ("XA", RiskLevel::Low),
            ("XB", RiskLevel::Low),
            ("XC", RiskLevel::Low),
            ("XD", RiskLevel::Low),
            ("XE", RiskLevel::Medium),
            ("XF", RiskLevel::Medium),
            ("XG", RiskLevel::High),
            ("XH", RiskLevel::High),
        ];
        TransactionProfile {
            nodes: 200,
            months: 4,
            start: NaiveDate::from_ymd_opt(2022, 1, 1).expect("valid date"),
            partners: 4,
            activity: 1.0,
            max_transfers: 3,
            base_amount: 1_000.0,
            noise: 0.2,
            size_exponent: 1.5,
            countries: countries.iter().map(|(c, l)| (c.to_string(), *l)).collect(),
        }
    }
}

impl TransactionProfile {
    pub fn node_id(&self, node: usize) -> String {
        let (country, _) = &self.countries[node % self.countries.len()];
        format!("BK{node:04}{country}")
    }

    pub fn country_of(&self, node: usize) -> &str {
        &self.countries[node % self.countries.len()].0
    }

    pub fn risk_table(&self) -> RiskTable {
        self.countries
            .iter()
            .fold(RiskTable::new(RiskLevel::Low), |t, (c, l)| t.with(c.clone(), *l))
    }

    pub fn month_label(&self, month: usize) -> String {
        let d = self.start + Months::new(month as u32);
        format!("{:04}-{:02}", d.year(), d.month())
    }
}

/// One row of the ground-truth sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub node_id: String,
    pub month: String,
    pub kind: AnomalyKind,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub transactions: Vec<Transaction>,
    pub truth: Vec<GroundTruth>,
    /// Intended BIC-level edge weight per month: `(sender, receiver) -> sum`.
    pub intended: Vec<BTreeMap<(String, String), Amount>>,
}

/// `count` injections on distinct nodes, all in `month`, kinds alternating
/// spike / redirect.
pub fn plan_injections(profile: &TransactionProfile, count: usize, month: usize, factor: f64, seed: u64) -> Vec<Injection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = index::sample(&mut rng, profile.nodes, count.min(profile.nodes)).into_vec();
    nodes.sort_unstable();
    nodes
        .into_iter()
        .enumerate()
        .map(|(i, node)| Injection {
            node,
            month,
            kind: if i % 2 == 0 { AnomalyKind::Spike { factor } } else { AnomalyKind::Redirect { factor } },
        })
        .collect()
}

/// Generates a transaction stream in the default schema.
///
/// Every node has a Pareto-distributed size and a fixed set of regular
/// counterparties; each month an active node sends each of them a volume
/// proportional to its size, with mild noise, split into
/// `1..=max_transfers` transfers.
/// Injections alter the chosen node's outgoing transfers in their month
/// and are listed in the returned ground truth.
pub fn synth_transactions(profile: &TransactionProfile, injections: &[Injection], seed: u64) -> Result<SynthOutput> {
    let n = profile.nodes;
    if n < 2 || profile.months == 0 || profile.countries.is_empty() {
        return Err(Error::InvalidParameter("profile needs at least 2 nodes, 1 month and 1 country".into()));
    }
    if profile.partners == 0 || profile.partners >= n {
        return Err(Error::InvalidParameter(format!("partners must lie in 1..{n}")));
    }
    if !(0.0..=1.0).contains(&profile.activity) || profile.max_transfers == 0 || !(profile.noise >= 0.0) {
        return Err(Error::InvalidParameter("need activity in [0, 1], max_transfers >= 1 and noise >= 0".into()));
    }
    for inj in injections {
        if inj.node >= n || inj.month >= profile.months {
            return Err(Error::InvalidParameter(format!("injection {inj:?} outside the profile")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<String> = (0..n).map(|i| profile.node_id(i)).collect();
    let sizes: Vec<f64> = (0..n)
        .map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / profile.size_exponent))
        .collect();
    let partners: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut p: Vec<usize> = index::sample(&mut rng, n - 1, profile.partners)
                .into_iter()
                .map(|j| if j >= i { j + 1 } else { j })
                .collect();
            p.sort_unstable();
            p
        })
        .collect();
    let high_risk: Vec<usize> = (0..n)
        .filter(|&i| profile.countries[i % profile.countries.len()].1 == RiskLevel::High)
        .collect();

    let mut transactions = Vec::new();
    let mut intended = vec![BTreeMap::new(); profile.months];
    for month in 0..profile.months {
        let first = profile.start + Months::new(month as u32);
        let days = (first + Months::new(1) - first).num_days() as u32;
        let mut seq = 0usize;
        for sender in 0..n {
            let injection = injections.iter().find(|j| j.node == sender && j.month == month);
            if injection.is_none() && !rng.gen_bool(profile.activity) {
                continue;
            }
            let (targets, factor) = match injection.map(|j| j.kind) {
                None => (partners[sender].clone(), 1.0),
                Some(AnomalyKind::Spike { factor }) => (partners[sender].clone(), factor),
                Some(AnomalyKind::Redirect { factor }) => {
                    let pool: Vec<usize> = high_risk
                        .iter()
                        .copied()
                        .filter(|&h| h != sender && !partners[sender].contains(&h))
                        .collect();
                    let mut fresh: Vec<usize> = pool
                        .choose_multiple(&mut rng, profile.partners.min(pool.len()))
                        .copied()
                        .collect();
                    fresh.sort_unstable();
                    (fresh, factor)
                }
            };
            for &receiver in &targets {
                let noise = rng.gen_range(-profile.noise..=profile.noise).exp();
                let volume = profile.base_amount * sizes[sender] * noise * factor;
                let count = rng.gen_range(1..=profile.max_transfers);
                let cents = ((volume * 100.0 / count as f64).round() as i64).max(1);
                for _ in 0..count {
                    let amount = Amount::from_cents(cents);
                    let date = first + chrono::Days::new(rng.gen_range(0..days) as u64);
                    seq += 1;
                    let (sc, rc) = (profile.country_of(sender), profile.country_of(receiver));
                    let sepa = [sender, receiver]
                        .iter()
                        .all(|&x| profile.countries[x % profile.countries.len()].1 != RiskLevel::High);
                    transactions.push(Transaction {
                        date,
                        transaction_id: format!("T{:02}{seq:07}", month + 1),
                        sender_bic: ids[sender].clone(),
                        receiver_bic: ids[receiver].clone(),
                        sender_iban: Some(format!("{sc}00{sender:04}{:04}", receiver % 3)),
                        receiver_iban: Some(format!("{rc}00{receiver:04}{:04}", sender % 3)),
                        sender_country_residence: sc.to_string(),
                        receiver_country_residence: rc.to_string(),
                        sender_country_bank: sc.to_string(),
                        receiver_country_bank: rc.to_string(),
                        amount,
                        currency: "EUR".into(),
                        source: if sepa { Source::Sepa } else { Source::Swift },
                    });
                    *intended[month]
                        .entry((ids[sender].clone(), ids[receiver].clone()))
                        .or_insert(Amount::default()) += amount;
                }
            }
        }
    }
    transactions.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.transaction_id.cmp(&b.transaction_id)));

    let mut truth: Vec<GroundTruth> = injections
        .iter()
        .map(|j| GroundTruth {
            node_id: ids[j.node].clone(),
            month: profile.month_label(j.month),
            kind: j.kind,
        })
        .collect();
    truth.sort_by(|a, b| a.month.cmp(&b.month).then_with(|| a.node_id.cmp(&b.node_id)));
    Ok(SynthOutput {
        transactions,
        truth,
        intended,
    })
}

/// `node_id,month,anomaly_kind`
pub fn write_truth_csv<W: Write>(truth: &[GroundTruth], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "month", "anomaly_kind"])?;
    for t in truth {
        w.write_record([t.node_id.as_str(), t.month.as_str(), t.kind.tag()])?;
    }
    w.flush()?;
    Ok(())
}

/// `code,level` rows plus a `*` row for the default.
pub fn write_risk_table_csv<W: Write>(table: &RiskTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["code", "level"])?;
    for (code, level) in table.entries() {
        w.write_record([code, &level.to_string()])?;
    }
    w.write_record(["*", &table.default_level().to_string()])?;
    w.flush()?;
    Ok(())
}

/// Labels every node: injected ones relevant, the rest not relevant.
pub fn write_labels_csv<W: Write>(profile: &TransactionProfile, truth: &[GroundTruth], out: W) -> Result<()> {
    let planted: HashSet<&str> = truth.iter().map(|t| t.node_id.as_str()).collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "relevance"])?;
    for i in 0..profile.nodes {
        let id = profile.node_id(i);
        let flag = if planted.contains(id.as_str()) { "relevant" } else { "not-relevant" };
        w.write_record([id.as_str(), flag])?;
    }
    w.flush()?;
    Ok(())
}
