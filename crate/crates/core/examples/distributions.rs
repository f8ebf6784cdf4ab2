//! Degree and amount histograms of a preferential-attachment graph and a
//! Zipf fit of a strength sequence.
//!
//! cargo run --release --example distributions

use rankshift::eval::{distribution_export, zipf_slope, Binning};
use rankshift::synth::barabasi_albert;

fn main() -> rankshift::Result<()> {
    let g = barabasi_albert(1000, 5, 4)?;
    for d in distribution_export(&g, Binning::Log { per_decade: 5 }, Binning::default()) {
        if d.quantity != "in_degree" {
            continue;
        }
        println!("in-degree, log bins:");
        for b in &d.bins {
            println!("  [{:>7.2}, {:>7.2}) {:>4} {}", b.lower, b.upper, b.count, "#".repeat((b.count as f64).sqrt() as usize));
        }
    }

    let exact: Vec<f64> = (1..=500).map(|r| 1e6 * (r as f64).powf(-1.5)).collect();
    println!("\nzipf exponent of an exact x^-1.5 series: {:.9}", zipf_slope(&exact)?);
    let strengths: Vec<f64> = (0..g.node_count()).map(|i| (g.in_degree(i) + g.out_degree(i)) as f64).collect();
    println!("zipf exponent of the BA total degrees:   {:.4}", zipf_slope(&strengths)?);
    Ok(())
}
