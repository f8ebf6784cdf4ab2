//! Spearman's rho and Kendall's tau-b on rankings, with and without ties.
//!
//! cargo run --example rank_correlation

use rankshift::graph::NodeSet;
use rankshift::ranking::{kendall, kendall_tau_b, rank_scores, spearman, spearman_rho, Ranking, TiePolicy};

fn main() -> rankshift::Result<()> {
    let nodes = NodeSet::range(5);
    let pairs = [
        ([3, 2, 4, 1, 5], [2, 3, 4, 1, 5]),
        ([1, 2, 3, 4, 5], [3, 4, 5, 2, 1]),
        ([4, 5, 2, 3, 1], [4, 3, 2, 5, 1]),
    ];
    for (x, y) in pairs {
        let rx = Ranking::from_positions(nodes.clone(), x.to_vec())?;
        let ry = Ranking::from_positions(nodes.clone(), y.to_vec())?;
        println!("{x:?} vs {y:?}: rho = {}, tau = {}", spearman(&rx, &ry)?, kendall(&rx, &ry)?);
    }

    // tied scores share the average of their positions
    let scores = [0.5, 0.2, 0.2, 0.0, 0.0];
    let r = rank_scores(nodes.clone(), &scores, TiePolicy::Exact);
    println!("\nscores {scores:?}");
    println!("positions  {:?}", r.positions());
    println!("fractional {:?}", r.fractional());

    let other = [0.1, 0.3, 0.2, 0.0, 0.4];
    println!("rho = {}, tau-b = {}", spearman_rho(&scores, &other), kendall_tau_b(&scores, &other));
    // a constant side has no variance, so there is no coefficient
    println!("constant side: {}", spearman_rho(&[1.0; 5], &other));
    Ok(())
}
