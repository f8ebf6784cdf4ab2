//! Every centrality of the roster on a small weighted digraph.
//!
//! cargo run --example centralities

use rankshift::centrality::{compute_many, CentralityConfig, Metric};
use rankshift::graph::{NodeSet, TemporalLayer};

fn main() -> rankshift::Result<()> {
    let nodes = NodeSet::new(["a", "b", "c", "d", "e"]);
    let edges = [
        ("a", "b", 3.0),
        ("b", "c", 1.0),
        ("c", "a", 2.0),
        ("c", "d", 5.0),
        ("d", "e", 1.0),
        ("e", "c", 1.0),
        ("a", "d", 0.5),
    ];
    let layer = TemporalLayer::from_id_edges("T", nodes, edges)?;
    let vectors = compute_many(&layer, &Metric::ALL, &CentralityConfig::default())?;

    print!("{:<20}", "metric");
    for id in layer.nodes().ids() {
        print!("{id:>9}");
    }
    println!();
    for v in &vectors {
        print!("{:<20}", v.metric.tag());
        for s in &v.scores {
            print!("{s:>9.4}");
        }
        println!();
    }
    Ok(())
}
