//! The five-node toy: in-degree rankings in two intervals, their
//! correlation, the residuals and the two nodes that moved.
//!
//! cargo run --example toy_walkthrough

use std::collections::HashSet;

use rankshift::centrality::{compute, CentralityConfig, Metric};
use rankshift::detection::{residuals, select_topk_abs, select_topk_split};
use rankshift::graph::{NodeSet, TemporalLayer};
use rankshift::ranking::{kendall, rank_nodes, spearman, TiePolicy};
use rankshift::rec::{rec_points, rec_svg};

fn main() -> rankshift::Result<()> {
    let nodes = NodeSet::new(["1", "2", "3", "4", "5"]);
    let t0 = [("2", "1"), ("1", "3"), ("2", "3"), ("4", "3"), ("1", "4"), ("3", "4"), ("1", "5"), ("2", "5"), ("3", "5"), ("4", "5")];
    let t1 = [("4", "1"), ("1", "2"), ("3", "2"), ("1", "3"), ("2", "3"), ("4", "3"), ("1", "5"), ("2", "5"), ("3", "5"), ("4", "5")];
    let layer = |label: &str, edges: &[(&str, &str)]| {
        TemporalLayer::from_id_edges(label, nodes.clone(), edges.iter().map(|&(a, b)| (a, b, 1.0)))
    };
    let (l0, l1) = (layer("T0", &t0)?, layer("T1", &t1)?);

    let cfg = CentralityConfig::default();
    let (s0, s1) = (compute(&l0, Metric::Indegree, &cfg)?, compute(&l1, Metric::Indegree, &cfg)?);
    println!("indegree T0 {:?}", s0.scores);
    println!("indegree T1 {:?}", s1.scores);

    let (r0, r1) = (rank_nodes(&s0, TiePolicy::Exact), rank_nodes(&s1, TiePolicy::Exact));
    println!("ranks T0    {:?}", r0.positions());
    println!("ranks T1    {:?}", r1.positions());
    println!("rho = {}, tau = {}", spearman(&r0, &r1)?, kendall(&r0, &r1)?);

    let set = residuals(&r0, &r1)?;
    println!("residuals   {:?}", set.deltas());

    let by_abs = select_topk_abs(&set, 2);
    let split = select_topk_split(&set, 1, 1);
    for (name, list) in [("abs, K=2", &by_abs), ("split, 1+1", &split)] {
        let ids: Vec<String> = list.iter().map(|r| format!("{} ({:+})", r.node_id, r.delta)).collect();
        println!("{name:<11} {}", ids.join(", "));
    }

    let flagged: HashSet<usize> = by_abs.iter().map(|r| r.node).collect();
    let svg = rec_svg(&rec_points(&r0, &r1, &flagged)?, "indegree: T0 -> T1", "rank in T0", "rank in T1");
    let path = std::env::temp_dir().join("toy_rec.svg");
    std::fs::write(&path, svg)?;
    println!("chart written to {}", path.display());
    Ok(())
}
