//! Two-ring expansion of an account-level network around a seed group.
//!
//! cargo run --example subnetwork_expansion

use rankshift::graph::{expand_subnetwork, NodeSet, TemporalLayer};

fn main() -> rankshift::Result<()> {
    let ids = ["s1", "s2", "a", "b", "c", "d", "e", "f"];
    let nodes = NodeSet::new(ids);
    let edges = [
        ("s1", "s2", 10.0),
        ("s1", "a", 5.0),
        ("b", "s2", 7.0),
        ("a", "b", 1.0),
        ("a", "c", 2.0),
        ("d", "b", 3.0),
        ("c", "e", 4.0),
        ("e", "f", 9.0),
    ];
    let layer = TemporalLayer::from_id_edges("2022-03", nodes, edges)?;
    for sub in expand_subnetwork(&[layer], &["s1", "s2"])? {
        println!("{}: {} nodes, {} edges", sub.layer.label(), sub.layer.node_count(), sub.layer.edge_count());
        for (i, ring) in sub.rings.iter().enumerate() {
            println!("  {:<3} ring {ring}", sub.layer.nodes().id(i));
        }
        for e in sub.layer.edges() {
            println!("  {} -> {} ({})", sub.layer.nodes().id(e.src), sub.layer.nodes().id(e.dst), e.weight);
        }
    }
    Ok(())
}
