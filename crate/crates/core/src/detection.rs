//! From rankings to outliers: the stability gate, rank residuals, top-K
//! selection, the risk-aware volume filter and the merged final lists.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::centrality::{compute_many, CentralityConfig, Metric};
use crate::error::{Error, Result};
use crate::graph::{NodeSet, TemporalLayer};
use crate::ingest::RiskLevel;
use crate::ranking::{kendall, rank_nodes, spearman, Correlation, Ranking, TiePolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    /// Validity threshold on the rank correlation, in `(0, 1)`.
    pub theta: f64,
    /// Shuffles per interval pair for the random baseline.
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        StabilityParams {
            theta: 0.5,
            repetitions: 20,
            seed: 42,
        }
    }
}

/// Correlations between two consecutive rankings of one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStability {
    pub from: String,
    pub to: String,
    pub rho: Correlation,
    pub tau: Correlation,
    /// "Nothing changed" baseline, always 1.
    pub equal_rho: f64,
    pub equal_tau: f64,
    /// Mean over shuffled rankings; `None` if every shuffle was undefined.
    pub random_rho: Option<f64>,
    pub random_tau: Option<f64>,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricStability {
    pub metric: Option<Metric>,
    pub pairs: Vec<PairStability>,
    /// Every pair has rho or tau above theta.
    pub valid: bool,
}

impl MetricStability {
    /// Smallest per-pair `max(rho, tau)`; `None` if some pair is undefined.
    pub fn weakest(&self) -> Option<f64> {
        self.pairs
            .iter()
            .map(|p| match (p.rho.value(), p.tau.value()) {
                (Some(r), Some(t)) => Some(r.max(t)),
                _ => None,
            })
            .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub params: StabilityParams,
    pub metrics: Vec<MetricStability>,
}

impl StabilityReport {
    pub fn valid_metrics(&self) -> Vec<Metric> {
        self.metrics.iter().filter(|m| m.valid).filter_map(|m| m.metric).collect()
    }

    pub fn all_failed(&self) -> bool {
        self.metrics.iter().all(|m| !m.valid)
    }

    pub fn get(&self, metric: Metric) -> Option<&MetricStability> {
        self.metrics.iter().find(|m| m.metric == Some(metric))
    }
}

fn metric_code(metric: Option<Metric>) -> u64 {
    metric.map(|m| Metric::ALL.iter().position(|x| *x == m).unwrap_or(0) as u64 + 1).unwrap_or(0)
}

/// Stability of one metric across a chronological sequence of rankings.
pub fn stability_from_rankings(rankings: &[Ranking], params: &StabilityParams) -> Result<MetricStability> {
    if rankings.len() < 2 {
        return Err(Error::TooFewLayers { needed: 2, got: rankings.len() });
    }
    if !(params.theta > 0.0 && params.theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {}", params.theta)));
    }
    let metric = rankings[0].metric;
    let mut pairs = Vec::with_capacity(rankings.len() - 1);
    for (k, w) in rankings.windows(2).enumerate() {
        let (x, y) = (&w[0], &w[1]);
        let rho = spearman(x, y)?;
        let tau = kendall(x, y)?;

        let stream = (metric_code(metric) << 32) | k as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(stream);
        let (mut rho_sum, mut rho_n, mut tau_sum, mut tau_n) = (0.0, 0usize, 0.0, 0usize);
        let mut positions: Vec<usize> = (1..=y.len()).collect();
        for _ in 0..params.repetitions {
            positions.shuffle(&mut rng);
            let shuffled = y.with_positions(positions.clone());
            if let Some(v) = spearman(x, &shuffled)?.value() {
                rho_sum += v;
                rho_n += 1;
            }
            if let Some(v) = kendall(x, &shuffled)?.value() {
                tau_sum += v;
                tau_n += 1;
            }
        }
        let mean = |s: f64, n: usize| (n > 0).then(|| s / n as f64);

        pairs.push(PairStability {
            from: x.interval.clone(),
            to: y.interval.clone(),
            rho,
            tau,
            equal_rho: 1.0,
            equal_tau: 1.0,
            random_rho: mean(rho_sum, rho_n),
            random_tau: mean(tau_sum, tau_n),
            valid: rho.exceeds(params.theta) || tau.exceeds(params.theta),
        });
    }
    let valid = pairs.iter().all(|p| p.valid);
    Ok(MetricStability { metric, pairs, valid })
}

/// Ranks every layer under every metric of the roster and checks that
/// consecutive rankings stay correlated.
pub fn stability_check(
    layers: &[TemporalLayer],
    roster: &[Metric],
    centrality: &CentralityConfig,
    ties: TiePolicy,
    params: &StabilityParams,
) -> Result<StabilityReport> {
    let rankings = rank_layers(layers, roster, centrality, ties)?;
    let metrics = roster
        .iter()
        .map(|m| stability_from_rankings(&rankings[m], params))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport { params: *params, metrics })
}

/// Rankings per metric, in layer order.
pub fn rank_layers(
    layers: &[TemporalLayer],
    roster: &[Metric],
    centrality: &CentralityConfig,
    ties: TiePolicy,
) -> Result<BTreeMap<Metric, Vec<Ranking>>> {
    let mut out: BTreeMap<Metric, Vec<Ranking>> = roster.iter().map(|m| (*m, Vec::new())).collect();
    for layer in layers {
        for v in compute_many(layer, roster, centrality)? {
            out.get_mut(&v.metric).expect("metric in roster").push(rank_nodes(&v, ties));
        }
    }
    Ok(out)
}

/// Rank change of one node between two intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Residual {
    pub node: usize,
    pub r_x: usize,
    pub r_y: usize,
    /// `r_x - r_y`; positive means the node moved up towards position 1.
    pub delta: i64,
    /// Cleared for nodes that carry no signal in either interval.
    pub eligible: bool,
}

#[derive(Debug, Clone)]
pub struct ResidualSet {
    pub metric: Option<Metric>,
    pub nodes: Arc<NodeSet>,
    pub entries: Vec<Residual>,
}

impl ResidualSet {
    /// Marks nodes as ineligible for selection.
    pub fn exclude(&mut self, mut excluded: impl FnMut(usize) -> bool) {
        for r in &mut self.entries {
            if excluded(r.node) {
                r.eligible = false;
            }
        }
    }

    pub fn deltas(&self) -> Vec<i64> {
        self.entries.iter().map(|r| r.delta).collect()
    }
}

/// `delta = r_x - r_y` for every node, from integer positions.
pub fn residuals(x: &Ranking, y: &Ranking) -> Result<ResidualSet> {
    if !(Arc::ptr_eq(x.nodes(), y.nodes()) || x.nodes() == y.nodes()) {
        return Err(Error::NodeSetMismatch);
    }
    let entries = x
        .positions()
        .iter()
        .zip(y.positions())
        .enumerate()
        .map(|(node, (&r_x, &r_y))| Residual {
            node,
            r_x,
            r_y,
            delta: r_x as i64 - r_y as i64,
            eligible: true,
        })
        .collect();
    Ok(ResidualSet {
        metric: x.metric.or(y.metric),
        nodes: x.nodes().clone(),
        entries,
    })
}

/// Nodes with no signal in either interval: singletons in both layers, or
/// zero score in both. Their residuals only reflect tie-breaking.
pub fn inactive_in_both(
    layer_x: &TemporalLayer,
    layer_y: &TemporalLayer,
    scores_x: &[f64],
    scores_y: &[f64],
) -> Vec<bool> {
    (0..layer_x.node_count())
        .map(|i| {
            (layer_x.is_singleton(i) && layer_y.is_singleton(i)) || (scores_x[i] == 0.0 && scores_y[i] == 0.0)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Gained,
    Lost,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Gained => "gained",
            Direction::Lost => "lost",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterStatus {
    #[default]
    NotFiltered,
    Kept,
    /// Kept because no risk level could be resolved for the node.
    UnresolvedRisk,
}

impl fmt::Display for FilterStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterStatus::NotFiltered => "not-filtered",
            FilterStatus::Kept => "kept",
            FilterStatus::UnresolvedRisk => "unresolved-risk",
        })
    }
}

/// One selected node.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierRecord {
    pub node: usize,
    pub node_id: String,
    pub metric: Option<Metric>,
    pub r_x: usize,
    pub r_y: usize,
    pub delta: i64,
    pub direction: Direction,
    pub filter: FilterStatus,
    pub delta_hra: Option<f64>,
    /// 1-based position in the list holding this record.
    pub final_position: Option<usize>,
}

impl OutlierRecord {
    fn from_residual(set: &ResidualSet, r: &Residual) -> Self {
        OutlierRecord {
            node: r.node,
            node_id: set.nodes.id(r.node).to_string(),
            metric: set.metric,
            r_x: r.r_x,
            r_y: r.r_y,
            delta: r.delta,
            direction: if r.delta > 0 { Direction::Gained } else { Direction::Lost },
            filter: FilterStatus::NotFiltered,
            delta_hra: None,
            final_position: None,
        }
    }

    pub fn abs_delta(&self) -> u64 {
        self.delta.unsigned_abs()
    }
}

fn number(list: &mut [OutlierRecord]) {
    for (i, r) in list.iter_mut().enumerate() {
        r.final_position = Some(i + 1);
    }
}

fn candidates(set: &ResidualSet) -> impl Iterator<Item = &Residual> {
    set.entries.iter().filter(|r| r.eligible && r.delta != 0)
}

/// Top-K by `|delta|`, ties by `delta` descending, then node id.
pub fn select_topk_abs(set: &ResidualSet, k: usize) -> Vec<OutlierRecord> {
    let mut pool: Vec<&Residual> = candidates(set).collect();
    pool.sort_by(|a, b| {
        b.delta
            .unsigned_abs()
            .cmp(&a.delta.unsigned_abs())
            .then(b.delta.cmp(&a.delta))
            .then(a.node.cmp(&b.node))
    });
    let mut out: Vec<OutlierRecord> = pool.into_iter().take(k).map(|r| OutlierRecord::from_residual(set, r)).collect();
    number(&mut out);
    out
}

/// The `k_pos` largest gains plus the `k_neg` largest losses. The two
/// sublists are merged by `|delta|` (gains first on equal magnitude), so
/// each keeps its internal order and list positions reflect magnitude.
pub fn select_topk_split(set: &ResidualSet, k_pos: usize, k_neg: usize) -> Vec<OutlierRecord> {
    let mut gains: Vec<&Residual> = candidates(set).filter(|r| r.delta > 0).collect();
    gains.sort_by(|a, b| b.delta.cmp(&a.delta).then(a.node.cmp(&b.node)));
    gains.truncate(k_pos);
    let mut losses: Vec<&Residual> = candidates(set).filter(|r| r.delta < 0).collect();
    losses.sort_by(|a, b| a.delta.cmp(&b.delta).then(a.node.cmp(&b.node)));
    losses.truncate(k_neg);

    let mut merged = Vec::with_capacity(gains.len() + losses.len());
    let (mut g, mut l) = (gains.into_iter().peekable(), losses.into_iter().peekable());
    loop {
        let take_gain = match (g.peek(), l.peek()) {
            (Some(a), Some(b)) => a.delta.unsigned_abs() >= b.delta.unsigned_abs(),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let next = if take_gain { g.next() } else { l.next() };
        merged.push(OutlierRecord::from_residual(set, next.expect("peeked")));
    }
    number(&mut merged);
    merged
}

/// How many outliers to pick per metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Absolute { k: usize },
    Split { k_pos: usize, k_neg: usize },
}

impl Selection {
    pub fn apply(&self, set: &ResidualSet) -> Vec<OutlierRecord> {
        match *self {
            Selection::Absolute { k } => select_topk_abs(set, k),
            Selection::Split { k_pos, k_neg } => select_topk_split(set, k_pos, k_neg),
        }
    }
}

/// A node dropped by the volume filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    pub node_id: String,
    pub metric: Option<Metric>,
    pub risk: RiskLevel,
    pub strength_x: f64,
    pub strength_y: f64,
    pub threshold: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub kept: Vec<OutlierRecord>,
    pub removed: Vec<Removal>,
}

/// Keeps a node if its total strength (in + out) exceeds the attention
/// threshold in at least one of the two intervals. The threshold is
/// `t_hr` for high-risk nodes and `multiplier * t_hr` otherwise. Nodes
/// whose risk cannot be resolved are kept and flagged.
pub fn threshold_filter(
    outliers: Vec<OutlierRecord>,
    layer_x: &TemporalLayer,
    layer_y: &TemporalLayer,
    node_risk: &[Option<RiskLevel>],
    t_hr: f64,
    multiplier: f64,
) -> Result<FilterOutcome> {
    if !(t_hr > 0.0) {
        return Err(Error::InvalidParameter(format!("T_hr must be positive, got {t_hr}")));
    }
    if !(multiplier >= 1.0) {
        return Err(Error::InvalidParameter(format!("multiplier must be >= 1, got {multiplier}")));
    }
    let sx = layer_x.total_strengths();
    let sy = layer_y.total_strengths();
    let mut out = FilterOutcome::default();
    for mut rec in outliers {
        let Some(risk) = node_risk.get(rec.node).copied().flatten() else {
            rec.filter = FilterStatus::UnresolvedRisk;
            out.kept.push(rec);
            continue;
        };
        let threshold = if risk == RiskLevel::High { t_hr } else { multiplier * t_hr };
        let (a, b) = (sx[rec.node], sy[rec.node]);
        if a > threshold || b > threshold {
            rec.filter = FilterStatus::Kept;
            out.kept.push(rec);
        } else {
            out.removed.push(Removal {
                node_id: rec.node_id.clone(),
                metric: rec.metric,
                risk,
                strength_x: a,
                strength_y: b,
                threshold,
                reason: format!("{risk}-risk node moved at most {} against threshold {threshold}", a.max(b)),
            });
        }
    }
    number(&mut out.kept);
    Ok(out)
}

/// Change in volume exchanged with high-risk counterparties, sent plus
/// received, from interval x to interval y. Self-loops are not counted.
/// Results are rounded to the micro-unit resolution of amounts.
pub fn delta_hra(layer_x: &TemporalLayer, layer_y: &TemporalLayer, high_risk: &[bool]) -> Vec<f64> {
    let volume = |layer: &TemporalLayer| {
        let mut v = vec![0.0; layer.node_count()];
        for e in layer.edges() {
            if e.src == e.dst {
                continue;
            }
            if high_risk[e.dst] {
                v[e.src] += e.weight;
            }
            if high_risk[e.src] {
                v[e.dst] += e.weight;
            }
        }
        v
    };
    volume(layer_y)
        .into_iter()
        .zip(volume(layer_x))
        .map(|(y, x)| ((y - x) * 1e6).round() / 1e6)
        .collect()
}

/// A node of a merged final list and every metric that selected it.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalEntry {
    pub record: OutlierRecord,
    pub metrics: Vec<Metric>,
}

fn sources(lists: &[Vec<OutlierRecord>]) -> BTreeMap<usize, Vec<Metric>> {
    let mut by_node: BTreeMap<usize, Vec<Metric>> = BTreeMap::new();
    for rec in lists.iter().flatten() {
        let e = by_node.entry(rec.node).or_default();
        if let Some(m) = rec.metric {
            if !e.contains(&m) {
                e.push(m);
            }
        }
    }
    for v in by_node.values_mut() {
        v.sort();
    }
    by_node
}

fn finish(ordered: Vec<&OutlierRecord>, lists: &[Vec<OutlierRecord>], hra: &[f64]) -> Vec<FinalEntry> {
    let by_node = sources(lists);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in ordered {
        if !seen.insert(rec.node) {
            continue;
        }
        let mut record = rec.clone();
        record.delta_hra = Some(hra[rec.node]);
        record.final_position = Some(out.len() + 1);
        out.push(FinalEntry {
            record,
            metrics: by_node[&rec.node].clone(),
        });
    }
    out
}

fn list_position(rec: &OutlierRecord, fallback: usize) -> usize {
    rec.final_position.unwrap_or(fallback)
}

/// Union of all lists, one entry per node, by ΔHRA descending (ties by
/// node id). A node's record is the one with the best list position.
pub fn mixed_sort(lists: &[Vec<OutlierRecord>], hra: &[f64]) -> Vec<FinalEntry> {
    let mut all: Vec<(usize, &OutlierRecord)> = lists
        .iter()
        .flat_map(|l| l.iter().enumerate().map(|(i, r)| (list_position(r, i + 1), r)))
        .collect();
    all.sort_by(|(pa, a), (pb, b)| {
        hra[b.node]
            .total_cmp(&hra[a.node])
            .then(a.node.cmp(&b.node))
            .then(pa.cmp(pb))
            .then(a.metric.cmp(&b.metric))
    });
    finish(all.into_iter().map(|(_, r)| r).collect(), lists, hra)
}

/// Stratified merge: stratum `p` holds the entries at position `p` of any
/// list; strata are concatenated in ascending `p`, each sorted by ΔHRA
/// descending (ties by node id), and repeated nodes keep their first
/// occurrence.
pub fn stratified_sort(lists: &[Vec<OutlierRecord>], hra: &[f64]) -> Vec<FinalEntry> {
    let mut all: Vec<(usize, &OutlierRecord)> = lists
        .iter()
        .flat_map(|l| l.iter().enumerate().map(|(i, r)| (i + 1, r)))
        .collect();
    all.sort_by(|(pa, a), (pb, b)| {
        pa.cmp(pb)
            .then(hra[b.node].total_cmp(&hra[a.node]))
            .then(a.node.cmp(&b.node))
            .then(a.metric.cmp(&b.metric))
    });
    finish(all.into_iter().map(|(_, r)| r).collect(), lists, hra)
}

/// How the per-metric lists are turned into final output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortStrategy {
    PerMetric,
    Mixed,
    Stratified,
}

impl FromStr for SortStrategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "per-metric" | "per_metric" => Ok(SortStrategy::PerMetric),
            "mixed" => Ok(SortStrategy::Mixed),
            "stratified" => Ok(SortStrategy::Stratified),
            other => Err(format!("unknown sort strategy `{other}`")),
        }
    }
}

impl fmt::Display for SortStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortStrategy::PerMetric => "per-metric",
            SortStrategy::Mixed => "mixed",
            SortStrategy::Stratified => "stratified",
        })
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const OUTLIER_HEADER: [&str; 8] = ["node_id", "metric", "r_x", "r_y", "delta", "direction", "delta_hra", "final_position"];

fn outlier_row(r: &OutlierRecord) -> [String; 8] {
    [
        r.node_id.clone(),
        r.metric.map(|m| m.tag().to_string()).unwrap_or_default(),
        r.r_x.to_string(),
        r.r_y.to_string(),
        r.delta.to_string(),
        r.direction.to_string(),
        fmt_opt(r.delta_hra),
        r.final_position.map(|p| p.to_string()).unwrap_or_default(),
    ]
}

/// `node_id,metric,r_x,r_y,delta,direction,delta_hra,final_position`
pub fn write_outliers_csv<W: Write>(records: &[OutlierRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(OUTLIER_HEADER)?;
    for r in records {
        w.write_record(outlier_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Final lists use the outlier layout; `metric` is the metric whose record
/// was kept for the node.
pub fn write_final_csv<W: Write>(entries: &[FinalEntry], out: W) -> Result<()> {
    let records: Vec<OutlierRecord> = entries.iter().map(|e| e.record.clone()).collect();
    write_outliers_csv(&records, out)
}

pub fn write_removals_csv<W: Write>(removed: &[Removal], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "metric", "risk", "strength_x", "strength_y", "threshold", "reason"])?;
    for r in removed {
        w.write_record([
            r.node_id.clone(),
            r.metric.map(|m| m.tag().to_string()).unwrap_or_default(),
            r.risk.to_string(),
            r.strength_x.to_string(),
            r.strength_y.to_string(),
            r.threshold.to_string(),
            r.reason.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per metric and consecutive interval pair.
pub fn write_stability_csv<W: Write>(report: &StabilityReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "metric",
        "interval_from",
        "interval_to",
        "rho",
        "tau",
        "all_equal_rho",
        "all_equal_tau",
        "random_rho",
        "random_tau",
        "pair_valid",
        "metric_valid",
        "theta",
        "repetitions",
        "seed",
    ])?;
    for m in &report.metrics {
        for p in &m.pairs {
            w.write_record([
                m.metric.map(|x| x.tag().to_string()).unwrap_or_default(),
                p.from.clone(),
                p.to.clone(),
                p.rho.to_string(),
                p.tau.to_string(),
                p.equal_rho.to_string(),
                p.equal_tau.to_string(),
                fmt_opt(p.random_rho),
                fmt_opt(p.random_tau),
                p.valid.to_string(),
                m.valid.to_string(),
                report.params.theta.to_string(),
                report.params.repetitions.to_string(),
                report.params.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
