//! The stability gate: rankings that persist over time pass, independent
//! random rankings do not.
//!
//! cargo run --example stability_gate

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankshift::centrality::{CentralityConfig, Metric};
use rankshift::detection::{stability_check, stability_from_rankings, StabilityParams};
use rankshift::graph::NodeSet;
use rankshift::ranking::{Ranking, TiePolicy};
use rankshift::synth::{barabasi_albert, reshuffle_edges};

fn main() -> rankshift::Result<()> {
    let params = StabilityParams::default();

    // a graph observed three times with light rewiring in between
    let g0 = barabasi_albert(1000, 3, 5)?.relabeled("T0");
    let g1 = reshuffle_edges(&g0, 0.05, 6)?.relabeled("T1");
    let g2 = reshuffle_edges(&g1, 0.05, 7)?.relabeled("T2");
    let roster = [Metric::Indegree, Metric::Pagerank, Metric::Authority, Metric::Betweenness];
    let report = stability_check(&[g0, g1, g2], &roster, &CentralityConfig::default(), TiePolicy::Relative(1e-9), &params)?;
    println!("{:<12} {:<9} {:>8} {:>8} {:>10} {:>10}", "metric", "pair", "rho", "tau", "rand rho", "rand tau");
    for m in &report.metrics {
        for p in &m.pairs {
            println!(
                "{:<12} {:<9} {:>8.4} {:>8.4} {:>10.4} {:>10.4}",
                m.metric.map(|x| x.tag()).unwrap_or(""),
                format!("{}>{}", p.from, p.to),
                p.rho.value().unwrap_or(f64::NAN),
                p.tau.value().unwrap_or(f64::NAN),
                p.random_rho.unwrap_or(f64::NAN),
                p.random_tau.unwrap_or(f64::NAN),
            );
        }
        println!("{:<12} valid = {}", "", m.valid);
    }

    // the null model: four unrelated permutations
    let nodes = NodeSet::range(500);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rankings: Vec<Ranking> = (0..4)
        .map(|_| {
            let mut p: Vec<usize> = (1..=500).collect();
            p.shuffle(&mut rng);
            Ranking::from_positions(nodes.clone(), p)
        })
        .collect::<rankshift::Result<_>>()?;
    let null = stability_from_rankings(&rankings, &params)?;
    println!("\nrandom rankings: valid = {}, weakest max(rho, tau) = {:?}", null.valid, null.weakest());
    Ok(())
}
