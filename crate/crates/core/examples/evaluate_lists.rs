//! Precision at K, average precision and R* for two final lists.
//!
//! cargo run --example evaluate_lists

use rankshift::eval::{avg_precision_at_k, evaluate, precision_at_k, EvalSpec};
use rankshift::ingest::LabelSet;

fn main() {
    let pattern = [true, false, true, true, false];
    println!("P@5 = {}", precision_at_k(&pattern, 5));
    println!("avg P@5 = {:.4}", avg_precision_at_k(&pattern, 5));

    let labels = LabelSet::new()
        .with("n1", true)
        .with("n2", false)
        .with("n3", true)
        .with("n4", true)
        .with("n5", false);
    let lists = vec![
        ("mixed".to_string(), ["n1", "n2", "n3", "n6", "n4"].map(String::from).to_vec()),
        ("stratified".to_string(), ["n3", "n4", "n1", "n5"].map(String::from).to_vec()),
    ];
    let spec = EvalSpec {
        precision: vec![1, 2, 5],
        average: vec![3, 5],
        recall: vec![3, 5],
    };
    // n6 carries no label: scored as not relevant, counted as unlabeled
    print!("\n{}", evaluate(&lists, &labels, &spec, None).to_table());
}
