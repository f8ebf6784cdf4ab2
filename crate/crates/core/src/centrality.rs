//! Node centralities on a single layer.
//!
//! Degree and strength measures are exact counts and sums. Closeness and
//! betweenness use unweighted directed shortest paths (BFS). PageRank and
//! HITS are power iterations over the layer's sparse adjacency.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeSet, TemporalLayer};

/// Below this many nodes the sparse products run sequentially.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Indegree,
    Outdegree,
    Degree,
    Instrength,
    Outstrength,
    Strength,
    Closeness,
    HarmonicCloseness,
    Betweenness,
    Pagerank,
    Hub,
    Authority,
}

impl Metric {
    pub const ALL: [Metric; 12] = [
        Metric::Indegree,
        Metric::Outdegree,
        Metric::Degree,
        Metric::Instrength,
        Metric::Outstrength,
        Metric::Strength,
        Metric::Closeness,
        Metric::HarmonicCloseness,
        Metric::Betweenness,
        Metric::Pagerank,
        Metric::Hub,
        Metric::Authority,
    ];

    /// Roster used at country and BIC level: path-based measures are left
    /// out because bridges carry little meaning in payment networks.
    pub const DEFAULT_ROSTER: [Metric; 5] = [
        Metric::Instrength,
        Metric::Outstrength,
        Metric::Pagerank,
        Metric::Hub,
        Metric::Authority,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Metric::Indegree => "indegree",
            Metric::Outdegree => "outdegree",
            Metric::Degree => "degree",
            Metric::Instrength => "instrength",
            Metric::Outstrength => "outstrength",
            Metric::Strength => "strength",
            Metric::Closeness => "closeness",
            Metric::HarmonicCloseness => "harmonic-closeness",
            Metric::Betweenness => "betweenness",
            Metric::Pagerank => "pagerank",
            Metric::Hub => "hub",
            Metric::Authority => "authority",
        }
    }

    pub fn parse_roster(s: &str) -> std::result::Result<Vec<Metric>, String> {
        match s.trim() {
            "all" => Ok(Metric::ALL.to_vec()),
            "default" => Ok(Metric::DEFAULT_ROSTER.to_vec()),
            list => list
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Metric::ALL
            .iter()
            .copied()
            .find(|m| m.tag() == norm)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    /// Damping factor in `(0, 1)`.
    pub alpha: f64,
    /// Stop when the L1 change between iterates drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Split a node's rank over its out-edges in proportion to weight
    /// instead of uniformly.
    pub weighted: bool,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            alpha: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
            weighted: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsParams {
    /// Stop when the max-norm change of both vectors drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for HitsParams {
    fn default() -> Self {
        HitsParams {
            tolerance: 1e-12,
            max_iterations: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CentralityConfig {
    pub pagerank: PageRankParams,
    pub hits: HitsParams,
    /// Divide strengths by the layer's total weight.
    pub normalize_strength: bool,
}

/// Parameters that produced a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamRecord {
    pub alpha: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub iterations: Option<usize>,
    pub weighted: bool,
}

/// Scores of one metric on one layer, indexed like the layer's node set.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub metric: Metric,
    pub interval: String,
    pub nodes: Arc<NodeSet>,
    pub scores: Vec<f64>,
    pub params: ParamRecord,
}

impl CentralityVector {
    fn new(metric: Metric, layer: &TemporalLayer, scores: Vec<f64>, params: ParamRecord) -> Self {
        CentralityVector {
            metric,
            interval: layer.label().to_string(),
            nodes: layer.nodes().clone(),
            scores,
            params,
        }
    }

    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.nodes.index_of(id).map(|i| self.scores[i])
    }
}

/// Computes one metric. Hub and authority each run a full HITS iteration;
/// use [`compute_many`] to share it.
pub fn compute(layer: &TemporalLayer, metric: Metric, config: &CentralityConfig) -> Result<CentralityVector> {
    Ok(compute_many(layer, &[metric], config)?.remove(0))
}

/// Computes several metrics on one layer, in the order given.
pub fn compute_many(layer: &TemporalLayer, metrics: &[Metric], config: &CentralityConfig) -> Result<Vec<CentralityVector>> {
    let mut hits_cache: Option<(CentralityVector, CentralityVector)> = None;
    let mut out = Vec::with_capacity(metrics.len());
    for &m in metrics {
        let v = match m {
            Metric::Indegree => degree_centralities(layer).0,
            Metric::Outdegree => degree_centralities(layer).1,
            Metric::Degree => degree_centralities(layer).2,
            Metric::Instrength => strength_centralities(layer, config.normalize_strength).0,
            Metric::Outstrength => strength_centralities(layer, config.normalize_strength).1,
            Metric::Strength => strength_centralities(layer, config.normalize_strength).2,
            Metric::Closeness => closeness(layer, false),
            Metric::HarmonicCloseness => closeness(layer, true),
            Metric::Betweenness => betweenness(layer),
            Metric::Pagerank => pagerank(layer, &config.pagerank)?,
            Metric::Hub | Metric::Authority => {
                if hits_cache.is_none() {
                    hits_cache = Some(hits(layer, &config.hits)?);
                }
                let (h, a) = hits_cache.as_ref().expect("filled above");
                if m == Metric::Hub { h.clone() } else { a.clone() }
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// In-, out- and total degree centralities, `k / n`, where `k` counts
/// distinct predecessors, successors, and their union.
pub fn degree_centralities(layer: &TemporalLayer) -> (CentralityVector, CentralityVector, CentralityVector) {
    let n = layer.node_count();
    let nf = n.max(1) as f64;
    let mut kin = vec![0.0; n];
    let mut kout = vec![0.0; n];
    let mut k = vec![0.0; n];
    for i in 0..n {
        kin[i] = layer.in_degree(i) as f64 / nf;
        kout[i] = layer.out_degree(i) as f64 / nf;
        let mut nbrs: Vec<usize> = layer
            .out_edges(i)
            .iter()
            .map(|e| e.dst)
            .chain(layer.in_edges(i).map(|e| e.src))
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        k[i] = nbrs.len() as f64 / nf;
    }
    let p = ParamRecord::default();
    (
        CentralityVector::new(Metric::Indegree, layer, kin, p),
        CentralityVector::new(Metric::Outdegree, layer, kout, p),
        CentralityVector::new(Metric::Degree, layer, k, p),
    )
}

/// In-, out- and total strength; optionally divided by the total weight.
pub fn strength_centralities(layer: &TemporalLayer, normalize: bool) -> (CentralityVector, CentralityVector, CentralityVector) {
    let sin = layer.in_strengths();
    let sout = layer.out_strengths();
    let mut s: Vec<f64> = sin.iter().zip(&sout).map(|(a, b)| a + b).collect();
    let (mut sin, mut sout) = (sin, sout);
    if normalize {
        let total = layer.total_weight();
        if total > 0.0 {
            for v in sin.iter_mut().chain(sout.iter_mut()).chain(s.iter_mut()) {
                *v /= total;
            }
        }
    }
    let p = ParamRecord::default();
    (
        CentralityVector::new(Metric::Instrength, layer, sin, p),
        CentralityVector::new(Metric::Outstrength, layer, sout, p),
        CentralityVector::new(Metric::Strength, layer, s, p),
    )
}

fn bfs_out(layer: &TemporalLayer, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
    dist.fill(usize::MAX);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for e in layer.out_edges(v) {
            if dist[e.dst] == usize::MAX {
                dist[e.dst] = dist[v] + 1;
                queue.push_back(e.dst);
            }
        }
    }
}

/// Closeness from outgoing hop distances.
///
/// Harmonic: `sum 1/l_ij` over reachable `j != i`. Classic: `r / sum l_ij`
/// over the `r` nodes reachable from `i`, scaled by `r / (n - 1)`; on a
/// strongly connected layer this is `(n - 1) / sum l_ij`. Nodes reaching
/// nobody score 0.
pub fn closeness(layer: &TemporalLayer, harmonic: bool) -> CentralityVector {
    let n = layer.node_count();
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; n], VecDeque::new()),
            |(dist, queue), s| {
                bfs_out(layer, s, dist, queue);
                let mut reach = 0usize;
                let mut total = 0usize;
                let mut harm = 0.0;
                for (j, &d) in dist.iter().enumerate() {
                    if j != s && d != usize::MAX {
                        reach += 1;
                        total += d;
                        harm += 1.0 / d as f64;
                    }
                }
                if harmonic {
                    harm
                } else if reach == 0 {
                    0.0
                } else {
                    (reach as f64 / total as f64) * (reach as f64 / (n - 1) as f64)
                }
            },
        )
        .collect();
    let metric = if harmonic { Metric::HarmonicCloseness } else { Metric::Closeness };
    CentralityVector::new(metric, layer, scores, ParamRecord::default())
}

/// Unnormalized shortest-path betweenness over ordered pairs `s != t`,
/// unweighted and directed (Brandes accumulation).
///
/// Sources are processed in fixed chunks and the partial sums added in
/// chunk order, so the result does not depend on thread scheduling.
pub fn betweenness(layer: &TemporalLayer) -> CentralityVector {
    let n = layer.node_count();
    let chunk = 64usize;
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(chunk)
        .map(|block| {
            let mut acc = vec![0.0; n];
            let mut state = BrandesState::new(n);
            for &s in block {
                state.accumulate(layer, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut scores = vec![0.0; n];
    for part in partials {
        for (a, b) in scores.iter_mut().zip(part) {
            *a += b;
        }
    }
    CentralityVector::new(Metric::Betweenness, layer, scores, ParamRecord::default())
}

struct BrandesState {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    stack: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesState {
    fn new(n: usize) -> Self {
        BrandesState {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, layer: &TemporalLayer, s: usize, acc: &mut [f64]) {
        self.dist.fill(-1);
        self.sigma.fill(0.0);
        self.delta.fill(0.0);
        for p in &mut self.preds {
            p.clear();
        }
        self.stack.clear();
        self.queue.clear();

        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for e in layer.out_edges(v) {
                let w = e.dst;
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        while let Some(w) = self.stack.pop() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// PageRank by power iteration on
/// `pr(i) = alpha * sum_j pr(j) * t(j -> i) + (1 - alpha) / n`,
/// where `t(j -> i)` is `1 / k+(j)` (or `w_ji / s+(j)` when weighted) and
/// the rank of nodes without out-edges is spread uniformly over all nodes.
pub fn pagerank(layer: &TemporalLayer, params: &PageRankParams) -> Result<CentralityVector> {
    check_unit_interval("alpha", params.alpha)?;
    let n = layer.node_count();
    if n == 0 {
        return Err(Error::EmptyLayer(layer.label().to_string()));
    }
    let nf = n as f64;
    let alpha = params.alpha;
    // per-source scale: 1/k+ or 1/s+, zero marks a dangling node
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let out = layer.out_edges(j);
            if out.is_empty() {
                0.0
            } else if params.weighted {
                1.0 / out.iter().map(|e| e.weight).sum::<f64>()
            } else {
                1.0 / out.len() as f64
            }
        })
        .collect();
    let weighted = params.weighted;
    let pull = |i: usize, pr: &[f64]| -> f64 {
        layer
            .in_edges(i)
            .map(|e| pr[e.src] * scale[e.src] * if weighted { e.weight } else { 1.0 })
            .sum::<f64>()
    };

    let mut pr = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=params.max_iterations {
        let dangling: f64 = (0..n).filter(|&j| scale[j] == 0.0).map(|j| pr[j]).sum();
        let base = alpha * dangling / nf + (1.0 - alpha) / nf;
        if n >= PARALLEL_THRESHOLD {
            next.par_iter_mut().enumerate().for_each(|(i, x)| *x = alpha * pull(i, &pr) + base);
        } else {
            for (i, x) in next.iter_mut().enumerate() {
                *x = alpha * pull(i, &pr) + base;
            }
        }
        residual = pr.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pr, &mut next);
        if residual < params.tolerance {
            let total: f64 = pr.iter().sum();
            for x in &mut pr {
                *x /= total;
            }
            let record = ParamRecord {
                alpha: Some(alpha),
                tolerance: Some(params.tolerance),
                max_iterations: Some(params.max_iterations),
                iterations: Some(iter),
                weighted: params.weighted,
            };
            return Ok(CentralityVector::new(Metric::Pagerank, layer, pr, record));
        }
    }
    Err(Error::NotConverged {
        algorithm: "pagerank",
        iterations: params.max_iterations,
        residual,
        last: pr,
    })
}

fn normalize_l2(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Hub and authority scores: `a <- W^T h`, `h <- W a`, each renormalized
/// to unit Euclidean length, starting from the uniform hub vector.
/// Iterates stay nonnegative, so the nonnegative dominant eigenvector of
/// `W^T W` (resp. `W W^T`) is returned.
pub fn hits(layer: &TemporalLayer, params: &HitsParams) -> Result<(CentralityVector, CentralityVector)> {
    let n = layer.node_count();
    if layer.edge_count() == 0 {
        return Err(Error::ZeroIterate("hits"));
    }
    let mut hub = vec![1.0 / (n as f64).sqrt(); n];
    let mut auth = vec![0.0; n];
    let mut next_hub = vec![0.0; n];
    let mut next_auth = vec![0.0; n];
    let par = n >= PARALLEL_THRESHOLD;
    let mut residual = f64::INFINITY;

    for iter in 1..=params.max_iterations {
        let collect_auth = |i: usize| layer.in_edges(i).map(|e| e.weight * hub[e.src]).sum::<f64>();
        if par {
            next_auth.par_iter_mut().enumerate().for_each(|(i, x)| *x = collect_auth(i));
        } else {
            for (i, x) in next_auth.iter_mut().enumerate() {
                *x = collect_auth(i);
            }
        }
        if normalize_l2(&mut next_auth) == 0.0 {
            return Err(Error::ZeroIterate("hits"));
        }
        let collect_hub = |i: usize| layer.out_edges(i).iter().map(|e| e.weight * next_auth[e.dst]).sum::<f64>();
        if par {
            next_hub.par_iter_mut().enumerate().for_each(|(i, x)| *x = collect_hub(i));
        } else {
            for (i, x) in next_hub.iter_mut().enumerate() {
                *x = collect_hub(i);
            }
        }
        if normalize_l2(&mut next_hub) == 0.0 {
            return Err(Error::ZeroIterate("hits"));
        }
        let change = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        residual = change(&auth, &next_auth).max(change(&hub, &next_hub));
        std::mem::swap(&mut auth, &mut next_auth);
        std::mem::swap(&mut hub, &mut next_hub);
        if residual < params.tolerance {
            let record = ParamRecord {
                alpha: None,
                tolerance: Some(params.tolerance),
                max_iterations: Some(params.max_iterations),
                iterations: Some(iter),
                weighted: true,
            };
            return Ok((
                CentralityVector::new(Metric::Hub, layer, hub, record),
                CentralityVector::new(Metric::Authority, layer, auth, record),
            ));
        }
    }
    let mut last = hub;
    last.extend(auth);
    Err(Error::NotConverged {
        algorithm: "hits",
        iterations: params.max_iterations,
        residual,
        last,
    })
}

/// Dumps score vectors as `node_id,metric,score,interval`.
pub fn write_centrality_csv<W: Write>(vectors: &[CentralityVector], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "metric", "score", "interval"])?;
    for v in vectors {
        for (i, s) in v.scores.iter().enumerate() {
            w.write_record([v.nodes.id(i), v.metric.tag(), &s.to_string(), &v.interval])?;
        }
    }
    w.flush()?;
    Ok(())
}
