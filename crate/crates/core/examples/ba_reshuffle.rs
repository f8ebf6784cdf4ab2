//! A 5000-node preferential-attachment graph against a copy with 10% of
//! its edges rewired: PageRank rankings stay correlated, and the two
//! selection strategies pick largely the same 30 outliers.
//!
//! cargo run --release --example ba_reshuffle

use std::collections::HashSet;
use std::time::Instant;

use rankshift::centrality::{pagerank, PageRankParams};
use rankshift::detection::{residuals, select_topk_abs, select_topk_split};
use rankshift::ranking::{kendall, rank_nodes, spearman, TiePolicy};
use rankshift::synth::{barabasi_albert, reshuffle_edges};

fn main() -> rankshift::Result<()> {
    let start = Instant::now();
    let before = barabasi_albert(5000, 5, 1)?.relabeled("before");
    let after = reshuffle_edges(&before, 0.10, 2)?.relabeled("after");
    println!("{} nodes, {} edges, {} rewired", before.node_count(), before.edge_count(), before.edge_count() / 10);

    let params = PageRankParams { weighted: false, ..Default::default() };
    let ties = TiePolicy::Relative(1e-9);
    let rx = rank_nodes(&pagerank(&before, &params)?, ties);
    let ry = rank_nodes(&pagerank(&after, &params)?, ties);
    println!("rho = {:.4}, tau = {:.4}", spearman(&rx, &ry)?.value().unwrap_or(f64::NAN), kendall(&rx, &ry)?.value().unwrap_or(f64::NAN));

    let set = residuals(&rx, &ry)?;
    let abs = select_topk_abs(&set, 30);
    let split = select_topk_split(&set, 15, 15);
    let a: HashSet<usize> = abs.iter().map(|r| r.node).collect();
    let b: HashSet<usize> = split.iter().map(|r| r.node).collect();
    println!(
        "top-30 by |delta|: {} ({} gained); top-15 + top-15: {}; shared: {}",
        abs.len(),
        abs.iter().filter(|r| r.delta > 0).count(),
        split.len(),
        a.intersection(&b).count()
    );
    for r in abs.iter().take(5) {
        println!("  node {:>5}: {:>5} -> {:>5} ({:+})", r.node_id, r.r_x, r.r_y, r.delta);
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
