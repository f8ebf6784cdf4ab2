//! Temporal layers: one directed weighted snapshot per time interval.
//!
//! Every layer produced for a run shares one [`NodeSet`], so node `i` means the
//! same entity in every interval and nodes inactive in an interval show up as
//! singletons. Edges are stored sorted by `(src, dst)` with parallel edges
//! merged; the in-adjacency is an index over the same edge array.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Orders node ids so that purely numeric ids sort numerically and come first.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// The universal, ordered set of node ids of a run.
///
/// Dense indices follow [`compare_ids`] order, so comparing indices is the
/// same as comparing external ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl NodeSet {
    pub fn new<I, S>(ids: I) -> Arc<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        ids.sort_by(|a, b| compare_ids(a, b));
        ids.dedup();
        let lookup = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Arc::new(NodeSet { ids, lookup })
    }

    /// Node set `0..n` with decimal ids.
    pub fn range(n: usize) -> Arc<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// A directed weighted graph for one interval.
#[derive(Debug, Clone)]
pub struct TemporalLayer {
    label: String,
    nodes: Arc<NodeSet>,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_index: Vec<usize>,
}

impl TemporalLayer {
    /// Builds a layer over `nodes`. Parallel edges are merged by summing
    /// their weights; weights must be finite and strictly positive.
    pub fn new<I>(label: impl Into<String>, nodes: Arc<NodeSet>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = nodes.len();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (src, dst, weight) in edges {
            if src >= n || dst >= n {
                return Err(Error::InvalidEdge {
                    src: src.to_string(),
                    dst: dst.to_string(),
                    reason: format!("index out of range for {n} nodes"),
                });
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::InvalidEdge {
                    src: nodes.id(src).to_string(),
                    dst: nodes.id(dst).to_string(),
                    reason: format!("weight {weight} is not finite and positive"),
                });
            }
            *merged.entry((src, dst)).or_insert(0.0) += weight;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.src + 1] += 1;
            in_offsets[e.dst + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut in_index = vec![0usize; edges.len()];
        let mut cursor = in_offsets.clone();
        // edges are sorted by (src, dst), so each in-list comes out sorted by src
        for (k, e) in edges.iter().enumerate() {
            in_index[cursor[e.dst]] = k;
            cursor[e.dst] += 1;
        }

        Ok(TemporalLayer {
            label: label.into(),
            nodes,
            edges,
            out_offsets,
            in_offsets,
            in_index,
        })
    }

    /// Builds a layer from edges named by external id.
    pub fn from_id_edges<'a, I>(label: impl Into<String>, nodes: Arc<NodeSet>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let mut indexed = Vec::new();
        for (s, d, w) in edges {
            indexed.push((nodes.require(s)?, nodes.require(d)?, w));
        }
        Self::new(label, nodes, indexed)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn nodes(&self) -> &Arc<NodeSet> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, node: usize) -> &[Edge] {
        &self.edges[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    pub fn in_edges(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.in_index[self.in_offsets[node]..self.in_offsets[node + 1]]
            .iter()
            .map(move |&k| &self.edges[k])
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_offsets[node + 1] - self.out_offsets[node]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_offsets[node + 1] - self.in_offsets[node]
    }

    /// A node with neither incoming nor outgoing edges.
    pub fn is_singleton(&self, node: usize) -> bool {
        self.out_degree(node) == 0 && self.in_degree(node) == 0
    }

    pub fn out_strengths(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| self.out_edges(i).iter().map(|e| e.weight).sum())
            .collect()
    }

    pub fn in_strengths(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| self.in_edges(i).map(|e| e.weight).sum())
            .collect()
    }

    /// In-strength plus out-strength per node.
    pub fn total_strengths(&self) -> Vec<f64> {
        self.in_strengths()
            .into_iter()
            .zip(self.out_strengths())
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Copy of this layer under another label.
    pub fn relabeled(&self, label: impl Into<String>) -> Self {
        TemporalLayer {
            label: label.into(),
            ..self.clone()
        }
    }

    /// Sorted, deduplicated neighbor lists of the undirected projection,
    /// self-loops dropped.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in &self.edges {
            if e.src != e.dst {
                adj[e.src].push(e.dst);
                adj[e.dst].push(e.src);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Descriptive statistics of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub interval: String,
    pub nodes: usize,
    /// Directed edges, self-loops excluded.
    pub edges: usize,
    pub density: f64,
    /// `2m / n` over the declared node set.
    pub avg_degree: f64,
    pub avg_strength: f64,
    pub avg_clustering: f64,
    /// Hop diameter of the largest weakly connected component.
    pub diameter: usize,
    pub avg_path_length: f64,
}

/// Density, degree, strength, clustering and path statistics of a layer.
///
/// Clustering and path metrics use the undirected projection; path metrics
/// are restricted to the largest weakly connected component.
pub fn layer_stats(layer: &TemporalLayer) -> Result<GraphStats> {
    let n = layer.node_count();
    if n < 2 {
        return Err(Error::EmptyLayer(layer.label().to_string()));
    }
    let m = layer.edges().iter().filter(|e| e.src != e.dst).count();
    let nf = n as f64;
    let adj = layer.undirected_adjacency();

    // per-node values in parallel, summed in node order for reproducible bits
    let local: Vec<f64> = adj.par_iter().map(|nbrs| local_clustering(&adj, nbrs)).collect();
    let avg_clustering = local.iter().sum::<f64>() / nf;

    let component = largest_component(&adj);
    let mut in_component = vec![false; n];
    for &v in &component {
        in_component[v] = true;
    }
    let (diameter, total_dist) = component
        .par_iter()
        .map(|&s| {
            let dist = bfs_undirected(&adj, s);
            dist.iter()
                .filter(|d| **d != usize::MAX)
                .fold((0usize, 0u64), |(mx, sum), &d| (mx.max(d), sum + d as u64))
        })
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    let c = component.len() as f64;
    let avg_path_length = if component.len() > 1 {
        total_dist as f64 / (c * (c - 1.0))
    } else {
        0.0
    };

    Ok(GraphStats {
        interval: layer.label().to_string(),
        nodes: n,
        edges: m,
        density: m as f64 / (nf * (nf - 1.0)),
        avg_degree: 2.0 * m as f64 / nf,
        avg_strength: 2.0 * layer.total_weight() / nf,
        avg_clustering,
        diameter,
        avg_path_length,
    })
}

fn local_clustering(adj: &[Vec<usize>], nbrs: &[usize]) -> f64 {
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        let a_adj = &adj[a];
        for &b in &nbrs[i + 1..] {
            if a_adj.binary_search(&b).is_ok() {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

fn bfs_undirected(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Largest connected component; ties go to the component holding the
/// smallest node index.
fn largest_component(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best.sort_unstable();
    best
}

/// A subnetwork grown around a seed group, with the ring each node was
/// reached in (0 = seed, 1 = first ring, 2 = second ring).
#[derive(Debug, Clone)]
pub struct Subnetwork {
    pub layer: TemporalLayer,
    pub rings: Vec<u8>,
}

/// Two-ring expansion around a seed group, per layer:
///
/// 1. take the seed nodes,
/// 2. keep the edges among them,
/// 3. follow every edge leaving or entering a seed; new endpoints form ring 1,
/// 4. keep the edges among ring-1 nodes,
/// 5. follow every edge leaving or entering a ring-1 node; new endpoints form
///    ring 2. Edges among ring-2 nodes are not added.
pub fn expand_subnetwork(layers: &[TemporalLayer], seeds: &[&str]) -> Result<Vec<Subnetwork>> {
    if seeds.is_empty() {
        return Err(Error::EmptySeed);
    }
    layers.iter().map(|layer| expand_layer(layer, seeds)).collect()
}

fn expand_layer(layer: &TemporalLayer, seeds: &[&str]) -> Result<Subnetwork> {
    const OUT: u8 = u8::MAX;
    let nodes = layer.nodes();
    let mut ring = vec![OUT; layer.node_count()];
    for s in seeds {
        ring[nodes.require(s)?] = 0;
    }
    let mut kept: BTreeSet<(usize, usize)> = BTreeSet::new();

    // step 2
    for e in layer.edges() {
        if ring[e.src] == 0 && ring[e.dst] == 0 {
            kept.insert((e.src, e.dst));
        }
    }
    // steps 3 and 5 differ only in the ring they grow from
    let grow = |from: u8, ring: &mut Vec<u8>, kept: &mut BTreeSet<(usize, usize)>| {
        let frontier: Vec<usize> = (0..ring.len()).filter(|&v| ring[v] == from).collect();
        for v in frontier {
            let incident = layer
                .out_edges(v)
                .iter()
                .map(|e| (e.src, e.dst, e.dst))
                .chain(layer.in_edges(v).map(|e| (e.src, e.dst, e.src)));
            for (s, d, other) in incident {
                kept.insert((s, d));
                if ring[other] == OUT {
                    ring[other] = from + 1;
                }
            }
        }
    };
    grow(0, &mut ring, &mut kept);
    // step 4
    for e in layer.edges() {
        if ring[e.src] == 1 && ring[e.dst] == 1 {
            kept.insert((e.src, e.dst));
        }
    }
    grow(1, &mut ring, &mut kept);

    let members: Vec<usize> = (0..ring.len()).filter(|&v| ring[v] != OUT).collect();
    let sub_nodes = NodeSet::new(members.iter().map(|&v| nodes.id(v).to_string()));
    let rings = sub_nodes
        .ids()
        .iter()
        .map(|id| ring[nodes.index_of(id).expect("member of parent set")])
        .collect();
    let weight: HashMap<(usize, usize), f64> = layer
        .edges()
        .iter()
        .map(|e| ((e.src, e.dst), e.weight))
        .collect();
    let sub_edges = kept
        .iter()
        .map(|&(s, d)| {
            (
                sub_nodes.index_of(nodes.id(s)).expect("member"),
                sub_nodes.index_of(nodes.id(d)).expect("member"),
                weight[&(s, d)],
            )
        })
        .collect::<Vec<_>>();
    Ok(Subnetwork {
        layer: TemporalLayer::new(layer.label(), sub_nodes, sub_edges)?,
        rings,
    })
}

/// Writes layers as `interval,src,dst,weight`. Nodes that touch no edge in
/// any written layer get a declaration row with empty `dst` and `weight`,
/// so the node set survives a round trip.
pub fn write_layers_csv<W: Write>(layers: &[TemporalLayer], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["interval", "src", "dst", "weight"])?;
    let Some(first) = layers.first() else {
        w.flush()?;
        return Ok(());
    };
    let nodes = first.nodes();
    let mut touched = vec![false; nodes.len()];
    for layer in layers {
        for e in layer.edges() {
            touched[e.src] = true;
            touched[e.dst] = true;
            w.write_record([
                layer.label(),
                nodes.id(e.src),
                nodes.id(e.dst),
                &e.weight.to_string(),
            ])?;
        }
    }
    for (i, t) in touched.iter().enumerate() {
        if !t {
            w.write_record([first.label(), nodes.id(i), "", ""])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads layers written by [`write_layers_csv`]. Intervals come back in
/// lexicographic label order over one shared node set.
pub fn read_layers_csv<R: Read>(input: R) -> Result<Vec<TemporalLayer>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut ids: BTreeSet<String> = BTreeSet::new();
    let mut by_interval: BTreeMap<String, Vec<(String, String, f64)>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| rec.get(i).unwrap_or("").to_string();
        let (interval, src, dst, weight) = (field(0), field(1), field(2), field(3));
        if src.is_empty() {
            return Err(Error::InvalidEdge { src, dst, reason: format!("empty src at line {line}") });
        }
        ids.insert(src.clone());
        let edges = by_interval.entry(interval).or_default();
        if dst.is_empty() {
            continue;
        }
        ids.insert(dst.clone());
        let w: f64 = weight.parse().map_err(|_| Error::InvalidEdge {
            src: src.clone(),
            dst: dst.clone(),
            reason: format!("bad weight `{weight}` at line {line}"),
        })?;
        edges.push((src, dst, w));
    }
    let nodes = NodeSet::new(ids);
    by_interval
        .into_iter()
        .map(|(label, edges)| {
            TemporalLayer::from_id_edges(
                label,
                nodes.clone(),
                edges.iter().map(|(s, d, w)| (s.as_str(), d.as_str(), *w)),
            )
        })
        .collect()
}

/// One CSV row per layer.
pub fn write_stats_csv<W: Write>(stats: &[GraphStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "interval",
        "nodes",
        "edges",
        "density",
        "avg_degree",
        "avg_strength",
        "avg_clustering",
        "diameter",
        "avg_path_length",
    ])?;
    for s in stats {
        w.write_record([
            s.interval.clone(),
            s.nodes.to_string(),
            s.edges.to_string(),
            s.density.to_string(),
            s.avg_degree.to_string(),
            s.avg_strength.to_string(),
            s.avg_clustering.to_string(),
            s.diameter.to_string(),
            s.avg_path_length.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(ids: &[&str], edges: &[(&str, &str, f64)]) -> TemporalLayer {
        TemporalLayer::from_id_edges("T", NodeSet::new(ids.iter().copied()), edges.iter().copied()).unwrap()
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let set = NodeSet::new(["10", "2", "b", "1", "a"]);
        assert_eq!(set.ids(), &["1", "2", "10", "a", "b"]);
    }

    #[test]
    fn parallel_edges_merge() {
        let l = layer(&["i", "j"], &[("i", "j", 100.0), ("i", "j", 50.0)]);
        assert_eq!(l.edge_count(), 1);
        assert_eq!(l.edges()[0].weight, 150.0);
    }

    #[test]
    fn rejects_non_positive_weight() {
        let nodes = NodeSet::new(["a", "b"]);
        assert!(TemporalLayer::new("T", nodes.clone(), [(0, 1, 0.0)]).is_err());
        assert!(TemporalLayer::new("T", nodes, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn in_and_out_views_agree() {
        let l = layer(
            &["a", "b", "c"],
            &[("a", "b", 1.0), ("c", "b", 2.0), ("b", "a", 3.0), ("a", "c", 4.0)],
        );
        let ins: Vec<(usize, usize)> = (0..3).flat_map(|v| l.in_edges(v).map(|e| (e.src, e.dst)).collect::<Vec<_>>()).collect();
        assert_eq!(ins.len(), l.edge_count());
        for (s, d) in ins {
            assert!(l.out_edges(s).iter().any(|e| e.dst == d));
        }
        let total = l.total_weight();
        assert_eq!(l.in_strengths().iter().sum::<f64>(), total);
        assert_eq!(l.out_strengths().iter().sum::<f64>(), total);
    }

    #[test]
    fn complete_digraph_stats() {
        let ids = ["a", "b", "c"];
        let mut edges = Vec::new();
        for s in ids {
            for d in ids {
                if s != d {
                    edges.push((s, d, 1.0));
                }
            }
        }
        let st = layer_stats(&layer(&ids, &edges)).unwrap();
        assert_eq!(st.density, 1.0);
        assert_eq!(st.diameter, 1);
        assert_eq!(st.avg_clustering, 1.0);
    }

    #[test]
    fn path_stats() {
        let st = layer_stats(&layer(&["a", "b", "c"], &[("a", "b", 1.0), ("b", "c", 1.0)])).unwrap();
        assert_eq!(st.diameter, 2);
        assert!((st.avg_path_length - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(st.edges, 2);
        assert!((st.avg_degree - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_plus_isolated_clustering() {
        let st = layer_stats(&layer(
            &["a", "b", "c", "z"],
            &[("a", "b", 1.0), ("b", "c", 1.0), ("c", "a", 1.0)],
        ))
        .unwrap();
        assert!((st.avg_clustering - 0.75).abs() < 1e-12);
        assert_eq!(st.diameter, 1);
    }

    #[test]
    fn stats_need_two_nodes() {
        assert!(layer_stats(&layer(&["a"], &[])).is_err());
    }

    #[test]
    fn expansion_on_chain() {
        let l = layer(
            &["s", "a", "b", "c"],
            &[("s", "a", 1.0), ("a", "b", 1.0), ("b", "c", 1.0)],
        );
        let sub = expand_subnetwork(&[l], &["s"]).unwrap().remove(0);
        let ids = sub.layer.nodes().ids().to_vec();
        assert_eq!(ids, vec!["a", "b", "s"]);
        assert_eq!(sub.rings, vec![1, 2, 0]);
        assert_eq!(sub.layer.edge_count(), 2);
    }

    #[test]
    fn expansion_of_isolated_seed() {
        let l = layer(&["s", "a", "b"], &[("a", "b", 1.0)]);
        let sub = expand_subnetwork(&[l], &["s"]).unwrap().remove(0);
        assert_eq!(sub.layer.nodes().ids(), &["s"]);
        assert_eq!(sub.layer.edge_count(), 0);
    }

    #[test]
    fn expansion_internal_edge_only() {
        let l = layer(&["s", "t", "x", "y"], &[("s", "t", 2.0), ("x", "y", 1.0)]);
        let sub = expand_subnetwork(&[l], &["s", "t"]).unwrap().remove(0);
        assert_eq!(sub.layer.nodes().ids(), &["s", "t"]);
        assert_eq!(sub.layer.edges(), &[Edge { src: 0, dst: 1, weight: 2.0 }]);
    }

    #[test]
    fn expansion_excludes_ring_two_internal_edges() {
        // s - a - {b, c}, with b -> c between two ring-2 nodes
        let l = layer(
            &["s", "a", "b", "c"],
            &[("s", "a", 1.0), ("a", "b", 1.0), ("c", "a", 1.0), ("b", "c", 1.0)],
        );
        let sub = expand_subnetwork(&[l], &["s"]).unwrap().remove(0);
        assert_eq!(sub.layer.node_count(), 4);
        assert_eq!(sub.layer.edge_count(), 3);
    }

    #[test]
    fn empty_seed_is_an_error() {
        let l = layer(&["s"], &[]);
        assert!(matches!(expand_subnetwork(&[l], &[]), Err(Error::EmptySeed)));
    }

    #[test]
    fn layer_csv_round_trip_keeps_isolated_nodes() {
        let nodes = NodeSet::new(["a", "b", "c", "lonely"]);
        let l1 = TemporalLayer::from_id_edges("2022-01", nodes.clone(), [("a", "b", 1.5)]).unwrap();
        let l2 = TemporalLayer::from_id_edges("2022-02", nodes, [("b", "c", 2.0)]).unwrap();
        let mut buf = Vec::new();
        write_layers_csv(&[l1, l2], &mut buf).unwrap();
        let back = read_layers_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].node_count(), 4);
        assert_eq!(back[1].label(), "2022-02");
        assert_eq!(back[1].edges()[0].weight, 2.0);
    }
}
