//! Ranked-retrieval scores for final outlier lists, and the distribution
//! diagnostics (degree, strength and amount histograms, Zipf fit).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::TemporalLayer;
use crate::ingest::LabelSet;

/// Annotation state of one list item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relevance {
    Relevant,
    NotRelevant,
    /// Never annotated; scored as not relevant but counted apart.
    Unlabeled,
}

impl Relevance {
    pub fn is_relevant(self) -> bool {
        self == Relevance::Relevant
    }
}

pub fn relevance_pattern<S: AsRef<str>>(list: &[S], labels: &LabelSet) -> Vec<Relevance> {
    list.iter()
        .map(|id| match labels.relevance(id.as_ref()) {
            Some(true) => Relevance::Relevant,
            Some(false) => Relevance::NotRelevant,
            None => Relevance::Unlabeled,
        })
        .collect()
}

fn hits_within(relevant: &[bool], k: usize) -> usize {
    relevant.iter().take(k).filter(|r| **r).count()
}

/// `tp@K / K`. A list shorter than `K` keeps the denominator `K`.
pub fn precision_at_k(relevant: &[bool], k: usize) -> f64 {
    assert!(k >= 1, "K must be at least 1");
    if relevant.is_empty() {
        warn!("precision@{k} of an empty list is reported as 0");
        return 0.0;
    }
    hits_within(relevant, k) as f64 / k as f64
}

/// Mean of `P@i` over the positions `i <= K` that hold a relevant item;
/// 0 when there is none.
pub fn avg_precision_at_k(relevant: &[bool], k: usize) -> f64 {
    assert!(k >= 1, "K must be at least 1");
    let mut tp = 0usize;
    let mut sum = 0.0;
    for (i, &r) in relevant.iter().take(k).enumerate() {
        if r {
            tp += 1;
            sum += tp as f64 / (i + 1) as f64;
        }
    }
    if tp == 0 {
        0.0
    } else {
        sum / tp as f64
    }
}

/// Relevant items within the first `cutoff` positions over `tp_star`;
/// `None` when `tp_star` is 0.
pub fn r_star(relevant: &[bool], cutoff: usize, tp_star: usize) -> Option<f64> {
    (tp_star > 0).then(|| hits_within(relevant, cutoff) as f64 / tp_star as f64)
}

/// Distinct relevant ids over the union of the lists.
pub fn tp_star<S: AsRef<str>>(lists: &[&[S]], labels: &LabelSet) -> usize {
    lists
        .iter()
        .flat_map(|l| l.iter())
        .map(AsRef::as_ref)
        .filter(|id| labels.is_relevant(id))
        .collect::<BTreeSet<&str>>()
        .len()
}

/// Cutoffs reported for every list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalSpec {
    pub precision: Vec<usize>,
    pub average: Vec<usize>,
    pub recall: Vec<usize>,
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec {
            precision: vec![1, 2, 5],
            average: vec![5, 10, 20, 30, 60],
            recall: vec![30, 60],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListEval {
    pub name: String,
    pub length: usize,
    /// Relevant items in the whole list.
    pub tp: usize,
    pub unlabeled: usize,
    pub precision: Vec<(usize, f64)>,
    pub average: Vec<(usize, f64)>,
    pub recall: Vec<(usize, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub spec: EvalSpec,
    pub tp_star: usize,
    pub lists: Vec<ListEval>,
}

/// Scores every named list. `tp_star` defaults to the relevant ids in the
/// union of the given lists.
pub fn evaluate(lists: &[(String, Vec<String>)], labels: &LabelSet, spec: &EvalSpec, tp_star_override: Option<usize>) -> EvalReport {
    let refs: Vec<&[String]> = lists.iter().map(|(_, l)| l.as_slice()).collect();
    let tp_star = tp_star_override.unwrap_or_else(|| tp_star(&refs, labels));
    if tp_star == 0 {
        warn!("no relevant item in the evaluated lists; R* is undefined");
    }
    let lists = lists
        .iter()
        .map(|(name, ids)| {
            let pattern = relevance_pattern(ids, labels);
            let rel: Vec<bool> = pattern.iter().map(|r| r.is_relevant()).collect();
            ListEval {
                name: name.clone(),
                length: ids.len(),
                tp: rel.iter().filter(|r| **r).count(),
                unlabeled: pattern.iter().filter(|r| **r == Relevance::Unlabeled).count(),
                precision: spec.precision.iter().map(|&k| (k, precision_at_k(&rel, k))).collect(),
                average: spec.average.iter().map(|&k| (k, avg_precision_at_k(&rel, k))).collect(),
                recall: spec.recall.iter().map(|&k| (k, r_star(&rel, k, tp_star))).collect(),
            }
        })
        .collect();
    EvalReport {
        spec: spec.clone(),
        tp_star,
        lists,
    }
}

impl EvalReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["list".to_string(), "length".into(), "tp".into(), "unlabeled".into()];
        h.extend(self.spec.precision.iter().map(|k| format!("p@{k}")));
        h.extend(self.spec.average.iter().map(|k| format!("avg p@{k}")));
        h.extend(self.spec.recall.iter().map(|k| format!("r* at {k}")));
        h
    }

    fn rows(&self, digits: Option<usize>) -> Vec<Vec<String>> {
        let f = |v: f64| match digits {
            Some(d) => format!("{v:.d$}"),
            None => v.to_string(),
        };
        self.lists
            .iter()
            .map(|l| {
                let mut row = vec![l.name.clone(), l.length.to_string(), l.tp.to_string(), l.unlabeled.to_string()];
                row.extend(l.precision.iter().map(|(_, v)| f(*v)));
                row.extend(l.average.iter().map(|(_, v)| f(*v)));
                row.extend(l.recall.iter().map(|(_, v)| v.map(f).unwrap_or_else(|| "undefined".into())));
                row
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in self.rows(None) {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Fixed-width text table, two decimals.
    pub fn to_table(&self) -> String {
        let header = self.header();
        let rows = self.rows(Some(2));
        let mut width: Vec<usize> = header.iter().map(String::len).collect();
        for row in &rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&width)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &header);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for row in &rows {
            line(&mut out, row);
        }
        let _ = writeln!(out, "tp* = {}", self.tp_star);
        out
    }
}

/// Zipf exponent of a strength sequence: the values are sorted
/// descending, and `alpha = -slope` of the least-squares line through
/// `(ln position, ln value)`. Non-positive values are ignored.
pub fn zipf_slope(strengths: &[f64]) -> Result<f64> {
    let mut v: Vec<f64> = strengths.iter().copied().filter(|s| *s > 0.0 && s.is_finite()).collect();
    let distinct = {
        let mut d = v.clone();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d.len()
    };
    if v.len() < 3 {
        return Err(Error::ZipfTooFewValues(v.len()));
    }
    if distinct == 1 {
        return Ok(0.0);
    }
    v.sort_by(|a, b| b.total_cmp(a));
    let n = v.len() as f64;
    let xs: Vec<f64> = (1..=v.len()).map(|p| (p as f64).ln()).collect();
    let ys: Vec<f64> = v.iter().map(|s| s.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(-sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning {
    /// Bins `[lo + i*width, lo + (i+1)*width)` starting at the floor of the
    /// smallest value.
    Linear { width: f64 },
    /// Bins with edges `10^(j / per_decade)`; zero values get their own
    /// `[0, 0]` bin.
    Log { per_decade: u32 },
}

impl Default for Binning {
    fn default() -> Self {
        Binning::Linear { width: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Occupied bins only, ascending.
pub fn histogram(values: &[f64], binning: Binning) -> Vec<Bin> {
    let mut counts: std::collections::BTreeMap<i64, usize> = Default::default();
    let mut zeros = 0usize;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min).floor();
    for &v in values {
        let key = match binning {
            Binning::Linear { width } => ((v - lo) / width).floor() as i64,
            Binning::Log { per_decade } => {
                if v <= 0.0 {
                    zeros += 1;
                    continue;
                }
                // a small nudge keeps exact powers of ten in their own bin
                (v.log10() * per_decade as f64 + 1e-9).floor() as i64
            }
        };
        *counts.entry(key).or_default() += 1;
    }
    let mut out = Vec::new();
    if zeros > 0 {
        out.push(Bin { lower: 0.0, upper: 0.0, count: zeros });
    }
    for (key, count) in counts {
        let (lower, upper) = match binning {
            Binning::Linear { width } => (lo + key as f64 * width, lo + (key + 1) as f64 * width),
            Binning::Log { per_decade } => {
                let d = per_decade as f64;
                (10f64.powf(key as f64 / d), 10f64.powf((key + 1) as f64 / d))
            }
        };
        out.push(Bin { lower, upper, count });
    }
    out
}

/// One histogram of a layer quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub interval: String,
    pub quantity: &'static str,
    pub bins: Vec<Bin>,
}

/// Degree counts distinct neighbours (in, out, either); strengths are
/// summed amounts; `amount` is the merged edge weight.
pub fn distribution_export(layer: &TemporalLayer, degree_binning: Binning, amount_binning: Binning) -> Vec<Distribution> {
    let n = layer.node_count();
    let indeg: Vec<f64> = (0..n).map(|i| layer.in_degree(i) as f64).collect();
    let outdeg: Vec<f64> = (0..n).map(|i| layer.out_degree(i) as f64).collect();
    let degree: Vec<f64> = (0..n)
        .map(|i| {
            let mut nb: Vec<usize> = layer.out_edges(i).iter().map(|e| e.dst).chain(layer.in_edges(i).map(|e| e.src)).collect();
            nb.sort_unstable();
            nb.dedup();
            nb.len() as f64
        })
        .collect();
    let amounts: Vec<f64> = layer.edges().iter().map(|e| e.weight).collect();
    let interval = layer.label().to_string();
    let d = |quantity, values: &[f64], b| Distribution {
        interval: interval.clone(),
        quantity,
        bins: histogram(values, b),
    };
    vec![
        d("in_degree", &indeg, degree_binning),
        d("out_degree", &outdeg, degree_binning),
        d("degree", &degree, degree_binning),
        d("in_strength", &layer.in_strengths(), amount_binning),
        d("out_strength", &layer.out_strengths(), amount_binning),
        d("strength", &layer.total_strengths(), amount_binning),
        d("amount", &amounts, amount_binning),
    ]
}

/// `interval,quantity,lower,upper,count`
pub fn write_distribution_csv<W: Write>(dists: &[Distribution], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["interval", "quantity", "lower", "upper", "count"])?;
    for d in dists {
        for b in &d.bins {
            w.write_record([
                d.interval.clone(),
                d.quantity.to_string(),
                b.lower.to_string(),
                b.upper.to_string(),
                b.count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
