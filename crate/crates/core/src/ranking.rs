//! Node rankings and rank correlation.
//!
//! A [`Ranking`] carries two views of the same order: unique integer
//! positions (ties broken by node id) for residuals and charts, and
//! tie-averaged fractional ranks for the correlation coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::sync::Arc;

use crate::centrality::{CentralityVector, Metric};
use crate::error::{Error, Result};
use crate::graph::NodeSet;

/// When two scores count as tied.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TiePolicy {
    /// Only bit-equal scores tie.
    #[default]
    Exact,
    /// Neighbouring sorted scores within this relative distance tie;
    /// groups are formed by chaining.
    Relative(f64),
}

impl TiePolicy {
    fn ties(&self, a: f64, b: f64) -> bool {
        match *self {
            TiePolicy::Exact => a == b,
            TiePolicy::Relative(eps) => a == b || (a - b).abs() <= eps * a.abs().max(b.abs()),
        }
    }
}

/// A total order of the nodes of a layer, position 1 = highest score.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub metric: Option<Metric>,
    pub interval: String,
    nodes: Arc<NodeSet>,
    positions: Vec<usize>,
    fractional: Vec<f64>,
    order: Vec<usize>,
    tie_groups: Vec<Range<usize>>,
}

impl Ranking {
    pub fn nodes(&self) -> &Arc<NodeSet> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Integer position (1-based) of every node, indexed by node.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Tie-averaged rank of every node, indexed by node.
    pub fn fractional(&self) -> &[f64] {
        &self.fractional
    }

    /// Nodes by position: `order()[p - 1]` holds position `p`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position ranges (0-based, half-open) of groups with more than one node.
    pub fn tie_groups(&self) -> &[Range<usize>] {
        &self.tie_groups
    }

    pub fn position_of(&self, id: &str) -> Option<usize> {
        self.nodes.index_of(id).map(|i| self.positions[i])
    }

    /// A ranking from explicit, distinct 1-based positions (node `i` holds
    /// `positions[i]`).
    pub fn from_positions(nodes: Arc<NodeSet>, positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        if nodes.len() != n {
            return Err(Error::NodeSetMismatch);
        }
        let mut order = vec![usize::MAX; n];
        for (i, &p) in positions.iter().enumerate() {
            if p == 0 || p > n || order[p - 1] != usize::MAX {
                return Err(Error::InvalidParameter(format!("positions are not a permutation of 1..{n}")));
            }
            order[p - 1] = i;
        }
        Ok(Ranking {
            metric: None,
            interval: String::new(),
            nodes,
            fractional: positions.iter().map(|&p| p as f64).collect(),
            positions,
            order,
            tie_groups: Vec::new(),
        })
    }

    /// Same order with positions from a shuffled assignment; used for the
    /// random baseline of the stability check.
    pub(crate) fn with_positions(&self, positions: Vec<usize>) -> Self {
        let mut r = Ranking::from_positions(self.nodes.clone(), positions).expect("permutation");
        r.metric = self.metric;
        r.interval = self.interval.clone();
        r
    }
}

/// Ranks scores in descending order.
pub fn rank_nodes(scores: &CentralityVector, policy: TiePolicy) -> Ranking {
    let mut r = rank_scores(scores.nodes.clone(), &scores.scores, policy);
    r.metric = Some(scores.metric);
    r.interval = scores.interval.clone();
    r
}

/// Ranks a raw score slice indexed like `nodes`.
pub fn rank_scores(nodes: Arc<NodeSet>, scores: &[f64], policy: TiePolicy) -> Ranking {
    let n = scores.len();
    assert_eq!(nodes.len(), n, "score vector and node set differ in length");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut positions = vec![0usize; n];
    let mut fractional = vec![0.0; n];
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && policy.ties(scores[order[end - 1]], scores[order[end]]) {
            end += 1;
        }
        // within a group, integer positions follow node id
        order[start..end].sort_unstable();
        let avg = (start + 1 + end) as f64 / 2.0;
        for (p, &node) in order[start..end].iter().enumerate() {
            positions[node] = start + p + 1;
            fractional[node] = avg;
        }
        if end - start > 1 {
            tie_groups.push(start..end);
        }
        start = end;
    }
    Ranking {
        metric: None,
        interval: String::new(),
        nodes,
        positions,
        fractional,
        order,
        tie_groups,
    }
}

/// A correlation coefficient, or the explicit statement that it does not
/// exist because one side has zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Defined(f64),
    Undefined,
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(v) => Some(v),
            Correlation::Undefined => None,
        }
    }

    pub fn exceeds(self, threshold: f64) -> bool {
        self.value().is_some_and(|v| v > threshold)
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correlation::Defined(v) => write!(f, "{v}"),
            Correlation::Undefined => f.write_str("undefined"),
        }
    }
}

fn check_same_nodes(x: &Ranking, y: &Ranking) -> Result<()> {
    if Arc::ptr_eq(&x.nodes, &y.nodes) || x.nodes == y.nodes {
        Ok(())
    } else {
        Err(Error::NodeSetMismatch)
    }
}

/// Spearman's rho: Pearson correlation of the fractional ranks.
pub fn spearman(x: &Ranking, y: &Ranking) -> Result<Correlation> {
    check_same_nodes(x, y)?;
    Ok(pearson_of_ranks(&x.fractional, &y.fractional))
}

/// Kendall's tau-b on the fractional ranks.
pub fn kendall(x: &Ranking, y: &Ranking) -> Result<Correlation> {
    check_same_nodes(x, y)?;
    Ok(kendall_tau_b(&x.fractional, &y.fractional))
}

/// Spearman's rho of two paired samples (values or ranks), with
/// tie-averaged ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Correlation {
    assert_eq!(x.len(), y.len(), "paired samples differ in length");
    pearson_of_ranks(&average_ranks(x), &average_ranks(y))
}

/// Pearson correlation of tie-averaged ranks. Such ranks are multiples of
/// one half, so all sums are taken exactly in integers; only the final
/// ratio is rounded.
fn pearson_of_ranks(x: &[f64], y: &[f64]) -> Correlation {
    let n = x.len() as i128;
    if n < 2 {
        return Correlation::Undefined;
    }
    let twice = |v: &f64| -> Option<i128> {
        let t = v * 2.0;
        (t.fract() == 0.0 && t.abs() < 1e15).then_some(t as i128)
    };
    let (Some(xi), Some(yi)) = (
        x.iter().map(twice).collect::<Option<Vec<_>>>(),
        y.iter().map(twice).collect::<Option<Vec<_>>>(),
    ) else {
        return pearson(x, y);
    };
    let (sx, sy): (i128, i128) = (xi.iter().sum(), yi.iter().sum());
    let sxy: i128 = xi.iter().zip(&yi).map(|(a, b)| a * b).sum();
    let sxx: i128 = xi.iter().map(|a| a * a).sum();
    let syy: i128 = yi.iter().map(|b| b * b).sum();
    let num = n * sxy - sx * sy;
    let dx = n * sxx - sx * sx;
    let dy = n * syy - sy * sy;
    if dx == 0 || dy == 0 {
        return Correlation::Undefined;
    }
    let r = if dx == dy {
        num as f64 / dx as f64
    } else {
        num as f64 / (dx as f64).sqrt() / (dy as f64).sqrt()
    };
    Correlation::Defined(r.clamp(-1.0, 1.0))
}

/// Ascending ranks, 1-based, ties averaged.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Pearson correlation; `Undefined` when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Correlation {
    let n = x.len();
    if n < 2 {
        return Correlation::Undefined;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Correlation::Undefined;
    }
    Correlation::Defined((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Kendall's tau-b in `O(n log n)` (Knight's merge-sort method).
///
/// `tau_b = (n0 - n1 - n2 + n3 - 2 * swaps) / sqrt((n0 - n1) (n0 - n2))`
/// with `n0` all pairs, `n1`/`n2` pairs tied in x / in y, `n3` pairs tied
/// in both, and `swaps` the discordant pairs counted while merge-sorting
/// by y.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Correlation {
    assert_eq!(x.len(), y.len(), "paired samples differ in length");
    let n = x.len();
    if n < 2 {
        return Correlation::Undefined;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let pairs = |t: u64| t * (t.saturating_sub(1)) / 2;
    let n0 = pairs(n as u64);
    let (mut n1, mut n3) = (0u64, 0u64);
    let (mut tx, mut txy) = (1u64, 1u64);
    for w in 1..n {
        let (a, b) = (idx[w - 1], idx[w]);
        if x[a] == x[b] {
            tx += 1;
            if y[a] == y[b] {
                txy += 1;
            } else {
                n3 += pairs(txy);
                txy = 1;
            }
        } else {
            n1 += pairs(tx);
            n3 += pairs(txy);
            tx = 1;
            txy = 1;
        }
    }
    n1 += pairs(tx);
    n3 += pairs(txy);

    let mut buf = vec![0usize; n];
    let swaps = merge_count(&mut idx, &mut buf, y);

    let mut n2 = 0u64;
    let mut ty = 1u64;
    for w in 1..n {
        if y[idx[w - 1]] == y[idx[w]] {
            ty += 1;
        } else {
            n2 += pairs(ty);
            ty = 1;
        }
    }
    n2 += pairs(ty);

    if n0 == n1 || n0 == n2 {
        return Correlation::Undefined;
    }
    let num = n0 as f64 - n1 as f64 - n2 as f64 + n3 as f64 - 2.0 * swaps as f64;
    let den = if n1 == n2 {
        (n0 - n1) as f64
    } else {
        ((n0 - n1) as f64).sqrt() * ((n0 - n2) as f64).sqrt()
    };
    Correlation::Defined((num / den).clamp(-1.0, 1.0))
}

/// Stable merge sort of `idx` by `key`, returning the number of inversions
/// (strictly greater elements moved past smaller ones).
fn merge_count(idx: &mut [usize], buf: &mut [usize], key: &[f64]) -> u64 {
    let n = idx.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = idx.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl, key) + merge_count(r, br, key)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if key[idx[j]].total_cmp(&key[idx[i]]) == Ordering::Less {
            buf[k] = idx[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = idx[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&idx[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&idx[j..n]);
    idx.copy_from_slice(&buf[..n]);
    swaps
}

/// Dumps rankings as `node_id,metric,interval,position,fractional_rank`.
pub fn write_rankings_csv<W: Write>(rankings: &[&Ranking], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "metric", "interval", "position", "fractional_rank"])?;
    for r in rankings {
        let metric = r.metric.map(|m| m.tag()).unwrap_or("");
        for &node in r.order() {
            w.write_record([
                r.nodes.id(node),
                metric,
                &r.interval,
                &r.positions[node].to_string(),
                &r.fractional[node].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
