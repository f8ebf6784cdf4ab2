//! Brute-force reference implementations shared by the test targets.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankshift::graph::{NodeSet, TemporalLayer};

/// Every labeled simple digraph (no self-loops) on `n` nodes, unit weights.
pub fn all_digraphs(n: usize) -> Vec<TemporalLayer> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let nodes = NodeSet::range(n);
    (0u64..1 << slots.len())
        .map(|mask| {
            let edges = slots
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &(i, j))| (i, j, 1.0));
            TemporalLayer::new(format!("g{n}-{mask}"), nodes.clone(), edges).unwrap()
        })
        .collect()
}

/// Erdős–Rényi digraph with weights in `[0.5, 5)`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> TemporalLayer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                edges.push((i, j, rng.gen_range(0.5..5.0)));
            }
        }
    }
    TemporalLayer::new(format!("r{seed}"), NodeSet::range(n), edges).unwrap()
}

pub fn adjacency(layer: &TemporalLayer) -> Vec<Vec<bool>> {
    let n = layer.node_count();
    let mut a = vec![vec![false; n]; n];
    for e in layer.edges() {
        a[e.src][e.dst] = true;
    }
    a
}

/// All-pairs hop distances by Floyd–Warshall; `None` = unreachable.
pub fn hop_distances(layer: &TemporalLayer) -> Vec<Vec<Option<usize>>> {
    let n = layer.node_count();
    let a = adjacency(layer);
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if a[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn closeness_oracle(layer: &TemporalLayer, harmonic: bool) -> Vec<f64> {
    let n = layer.node_count();
    let d = hop_distances(layer);
    (0..n)
        .map(|i| {
            let reach: Vec<usize> = (0..n).filter(|&j| j != i).filter_map(|j| d[i][j]).collect();
            if harmonic {
                reach.iter().map(|&x| 1.0 / x as f64).sum()
            } else if reach.is_empty() {
                0.0
            } else {
                let r = reach.len() as f64;
                r / reach.iter().sum::<usize>() as f64 * r / (n - 1) as f64
            }
        })
        .collect()
}

/// Every shortest path from `s` to `t`, enumerated explicitly.
fn shortest_paths(a: &[Vec<bool>], d: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let Some(len) = d[s][t] else { return Vec::new() };
    let mut out = Vec::new();
    let mut path = vec![s];
    fn walk(a: &[Vec<bool>], d: &[Vec<Option<usize>>], t: usize, len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if path.len() - 1 == len {
            if v == t {
                out.push(path.clone());
            }
            return;
        }
        for w in 0..a.len() {
            // stay on geodesics: each step must shrink the distance to t by one
            if a[v][w] && d[w][t] == Some(len - path.len()) {
                path.push(w);
                walk(a, d, t, len, path, out);
                path.pop();
            }
        }
    }
    walk(a, d, t, len, &mut path, &mut out);
    out
}

/// Betweenness as the sum over ordered pairs of the share of shortest
/// paths through each interior node.
pub fn betweenness_oracle(layer: &TemporalLayer) -> Vec<f64> {
    let n = layer.node_count();
    let a = adjacency(layer);
    let d = hop_distances(layer);
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let paths = shortest_paths(&a, &d, s, t);
            if paths.is_empty() {
                continue;
            }
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                b[v] += through[v] as f64 / paths.len() as f64;
            }
        }
    }
    b
}

/// PageRank from the linear system
/// `(I - alpha T^T - alpha/n 1 d^T) pr = (1 - alpha)/n 1`,
/// `d` marking nodes without out-edges.
pub fn pagerank_oracle(layer: &TemporalLayer, alpha: f64, weighted: bool) -> Vec<f64> {
    let n = layer.node_count();
    let nf = n as f64;
    let out_w = layer.out_strengths();
    let mut m = DMatrix::<f64>::identity(n, n);
    for e in layer.edges() {
        let t = if weighted { e.weight / out_w[e.src] } else { 1.0 / layer.out_degree(e.src) as f64 };
        m[(e.dst, e.src)] -= alpha * t;
    }
    for j in 0..n {
        if layer.out_degree(j) == 0 {
            for i in 0..n {
                m[(i, j)] -= alpha / nf;
            }
        }
    }
    let rhs = DVector::from_element(n, (1.0 - alpha) / nf);
    m.lu().solve(&rhs).expect("nonsingular").iter().copied().collect()
}

pub struct Dominant {
    pub value: f64,
    pub second: f64,
    /// Unit, nonnegative eigenvector when the top eigenvalue is simple.
    pub vector: Option<Vec<f64>>,
    pub matrix: DMatrix<f64>,
}

/// Dominant eigenpair of `W^T W` (authority side).
pub fn authority_oracle(layer: &TemporalLayer) -> Dominant {
    let n = layer.node_count();
    let mut w = DMatrix::<f64>::zeros(n, n);
    for e in layer.edges() {
        w[(e.src, e.dst)] = e.weight;
    }
    let ata = w.transpose() * &w;
    let eig = SymmetricEigen::new(ata.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];
    let second = if n > 1 { eig.eigenvalues[order[1]] } else { f64::NEG_INFINITY };
    let vector = (top - second > 1e-9 * top.max(1.0)).then(|| {
        let col = eig.eigenvectors.column(order[0]);
        let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
        col.iter().map(|x| sign * x).collect()
    });
    Dominant { value: top, second: second.max(0.0), vector, matrix: ata }
}

/// Definitional Spearman: Pearson correlation of the given ranks, naive sums.
pub fn spearman_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

/// Definitional tau-b over all pairs.
pub fn kendall_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let sx = (x[i] - x[j]).signum() as i64 * (x[i] != x[j]) as i64;
            let sy = (y[i] - y[j]).signum() as i64 * (y[i] != y[j]) as i64;
            if sx == 0 {
                tx += 1;
            }
            if sy == 0 {
                ty += 1;
            }
            match sx * sy {
                1 => c += 1,
                -1 => d += 1,
                _ => {}
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let den = ((n0 - tx) as f64 * (n0 - ty) as f64).sqrt();
    (den > 0.0).then(|| (c - d) as f64 / den)
}

/// Tie-averaged ranks computed by counting: rank = 1 + #smaller + (#equal - 1) / 2.
pub fn fractional_ranks_oracle(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let smaller = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

/// All permutations of `1..=n` as rank vectors.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (1..=n).collect(), &mut out);
    out
}

/// `P@K` by definition.
pub fn precision_oracle(rel: &[bool], k: usize) -> f64 {
    (0..k).filter(|&i| rel.get(i) == Some(&true)).count() as f64 / k as f64
}

/// Average P@K enumerated position by position.
pub fn avg_precision_oracle(rel: &[bool], k: usize) -> f64 {
    let hits: Vec<f64> = (1..=k.min(rel.len()))
        .filter(|&i| rel[i - 1])
        .map(|i| precision_oracle(rel, i))
        .collect();
    if hits.is_empty() {
        0.0
    } else {
        hits.iter().sum::<f64>() / hits.len() as f64
    }
}

fn close(name: &str, layer: &TemporalLayer, got: &[f64], want: &[f64], tol: f64) -> Result<(), String> {
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if (g - w).abs() > tol {
            return Err(format!("{}: {name}[{i}] = {g}, oracle {w}", layer.label()));
        }
    }
    Ok(())
}

/// Compares every centrality of `layer` against its oracle.
pub fn check_layer(layer: &TemporalLayer) -> Result<(), String> {
    use rankshift::centrality::{self, HitsParams, PageRankParams};
    let n = layer.node_count();

    let a = adjacency(layer);
    let outdeg: Vec<f64> = (0..n).map(|i| (0..n).filter(|&j| a[i][j]).count() as f64 / n as f64).collect();
    let indeg: Vec<f64> = (0..n).map(|i| (0..n).filter(|&j| a[j][i]).count() as f64 / n as f64).collect();
    let (cin, cout, _) = centrality::degree_centralities(layer);
    close("indegree", layer, &cin.scores, &indeg, 0.0)?;
    close("outdegree", layer, &cout.scores, &outdeg, 0.0)?;

    close("closeness", layer, &centrality::closeness(layer, false).scores, &closeness_oracle(layer, false), 1e-12)?;
    close("harmonic", layer, &centrality::closeness(layer, true).scores, &closeness_oracle(layer, true), 1e-12)?;
    close("betweenness", layer, &centrality::betweenness(layer).scores, &betweenness_oracle(layer), 1e-12)?;

    for weighted in [true, false] {
        let params = PageRankParams { weighted, ..Default::default() };
        let pr = centrality::pagerank(layer, &params).map_err(|e| format!("{}: pagerank {e}", layer.label()))?;
        close("pagerank", layer, &pr.scores, &pagerank_oracle(layer, 0.85, weighted), 1e-8)?;
    }

    let dom = authority_oracle(layer);
    let mut result = centrality::hits(layer, &HitsParams::default());
    if let Err(rankshift::Error::NotConverged { .. }) = result {
        // only acceptable when the spectral gap makes 1000 steps too few
        let ratio = dom.second / dom.value;
        if ratio.powi(2000) < 1e-12 {
            return Err(format!("{}: hits stalled with gap ratio {ratio}", layer.label()));
        }
        result = centrality::hits(layer, &HitsParams { max_iterations: 1_000_000, ..Default::default() });
    }
    match result {
        Err(rankshift::Error::ZeroIterate(_)) if layer.edge_count() == 0 => {}
        Err(e) => return Err(format!("{}: hits {e}", layer.label())),
        Ok((_, auth)) => {
            match &dom.vector {
                Some(v) => close("authority", layer, &auth.scores, v, 1e-6)?,
                None => {
                    // repeated top eigenvalue: any unit vector of the eigenspace
                    let x = DVector::from_column_slice(&auth.scores);
                    let r = (&dom.matrix * &x - dom.value * &x).norm();
                    if r > 1e-6 || (x.norm() - 1.0).abs() > 1e-9 {
                        return Err(format!("{}: authority not in the dominant eigenspace (residual {r})", layer.label()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The two-interval, five-node in-degree example.
pub fn toy_layers() -> Vec<TemporalLayer> {
    let nodes = NodeSet::new(["1", "2", "3", "4", "5"]);
    let t0 = [("2", "1"), ("1", "3"), ("2", "3"), ("4", "3"), ("1", "4"), ("3", "4"), ("1", "5"), ("2", "5"), ("3", "5"), ("4", "5")];
    let t1 = [("4", "1"), ("1", "2"), ("3", "2"), ("1", "3"), ("2", "3"), ("4", "3"), ("1", "5"), ("2", "5"), ("3", "5"), ("4", "5")];
    let mk = |label: &str, e: &[(&str, &str)]| TemporalLayer::from_id_edges(label, nodes.clone(), e.iter().map(|(a, b)| (*a, *b, 1.0))).unwrap();
    vec![mk("T0", &t0), mk("T1", &t1)]
}

pub fn write_layers(path: &std::path::Path, layers: &[TemporalLayer]) {
    rankshift::graph::write_layers_csv(layers, std::fs::File::create(path).unwrap()).unwrap();
}

/// First column of a CSV file, header skipped.
pub fn first_column(path: &std::path::Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap()[0].to_string()).collect()
}
