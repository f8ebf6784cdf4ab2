//! Synthetic transactions with planted anomalies, run through the whole
//! pipeline; prints the stability verdicts, the top of the stratified list
//! and the evaluation against the planted ground truth.
//!
//! cargo run --release --example synthetic_pipeline

use std::fs::File;
use std::io::BufWriter;

use rankshift::config::Config;
use rankshift::ingest::write_transactions_csv;
use rankshift::pipeline::run_pipeline;
use rankshift::synth::{plan_injections, synth_transactions, write_labels_csv, write_risk_table_csv, TransactionProfile};

fn main() -> rankshift::Result<()> {
    let dir = std::env::temp_dir().join("rankshift-synthetic");
    std::fs::create_dir_all(&dir)?;
    let profile = TransactionProfile::default();
    let plan = plan_injections(&profile, 5, profile.months - 1, 20.0, 8);
    let data = synth_transactions(&profile, &plan, 7)?;
    write_transactions_csv(&data.transactions, BufWriter::new(File::create(dir.join("transactions.csv"))?))?;
    write_risk_table_csv(&profile.risk_table(), BufWriter::new(File::create(dir.join("risk.csv"))?))?;
    write_labels_csv(&profile, &data.truth, BufWriter::new(File::create(dir.join("labels.csv"))?))?;
    for t in &data.truth {
        println!("planted {} in {} ({})", t.node_id, t.month, t.kind);
    }

    let config = Config::parse(&format!(
        "[input]\ntransactions = {0}/transactions.csv\nrisk_table = {0}/risk.csv\nlabels = {0}/labels.csv\n\
         [detection]\nk_pos = 5\nk_neg = 5\nt_hr = 1000\n\
         [run]\noutput = {0}/out\n",
        dir.display()
    ))?;
    let outcome = run_pipeline(&config)?;
    println!("\nstatus {:?}, pair {} -> {}", outcome.status, outcome.interval_x, outcome.interval_y);
    for m in &outcome.stability.metrics {
        println!("  {:<12} valid = {}", m.metric.map(|x| x.tag()).unwrap_or(""), m.valid);
    }
    println!("\nstratified list, first 8:");
    for e in outcome.stratified.iter().take(8) {
        let r = &e.record;
        println!("  {:>2}. {} {:+} via {} (delta HRA {:+})", r.final_position.unwrap_or(0), r.node_id, r.delta, e.metrics[0], r.delta_hra.unwrap_or(0.0));
    }
    if let Some(report) = &outcome.eval {
        print!("\n{}", report.to_table());
    }
    println!("\n{} artifacts under {}", outcome.manifest.len(), outcome.output.display());
    Ok(())
}
