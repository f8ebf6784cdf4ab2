//! Volume filtering by country risk, the change in high-risk volume, and
//! the mixed and stratified merges of per-metric outlier lists.
//!
//! cargo run --example risk_filter_and_sorting

use rankshift::centrality::{compute_many, CentralityConfig, Metric};
use rankshift::detection::{delta_hra, mixed_sort, residuals, select_topk_split, stratified_sort, threshold_filter};
use rankshift::graph::{NodeSet, TemporalLayer};
use rankshift::ingest::{RiskLevel, RiskTable};
use rankshift::ranking::{rank_nodes, TiePolicy};

fn main() -> rankshift::Result<()> {
    // country-level layers: node ids are the country codes
    let nodes = NodeSet::new(["XA", "XB", "XC", "XG", "XH"]);
    let feb = [("XA", "XB", 9000.0), ("XB", "XC", 4000.0), ("XC", "XA", 3000.0), ("XA", "XG", 800.0), ("XH", "XB", 300.0)];
    let mar = [("XA", "XB", 8500.0), ("XB", "XC", 1000.0), ("XC", "XG", 6000.0), ("XA", "XG", 2500.0), ("XH", "XB", 1500.0), ("XG", "XH", 700.0)];
    let lx = TemporalLayer::from_id_edges("2022-02", nodes.clone(), feb)?;
    let ly = TemporalLayer::from_id_edges("2022-03", nodes.clone(), mar)?;

    let risk = RiskTable::new(RiskLevel::Low).with("XG", RiskLevel::High).with("XH", RiskLevel::High).with("XC", RiskLevel::Medium);
    let node_risk: Vec<Option<RiskLevel>> = nodes.ids().iter().map(|id| Some(risk.lookup(id))).collect();
    let high: Vec<bool> = node_risk.iter().map(|r| *r == Some(RiskLevel::High)).collect();
    let hra = delta_hra(&lx, &ly, &high);
    for (id, v) in nodes.ids().iter().zip(&hra) {
        println!("delta HRA {id}: {v:+}");
    }

    let roster = [Metric::Instrength, Metric::Outstrength, Metric::Pagerank];
    let cfg = CentralityConfig::default();
    let (vx, vy) = (compute_many(&lx, &roster, &cfg)?, compute_many(&ly, &roster, &cfg)?);
    let mut lists = Vec::new();
    for (a, b) in vx.iter().zip(&vy) {
        let set = residuals(&rank_nodes(a, TiePolicy::Exact), &rank_nodes(b, TiePolicy::Exact))?;
        let picked = select_topk_split(&set, 2, 2);
        let outcome = threshold_filter(picked, &lx, &ly, &node_risk, 2000.0, 5.0)?;
        let kept: Vec<&str> = outcome.kept.iter().map(|r| r.node_id.as_str()).collect();
        println!("\n{}: kept {kept:?}", a.metric);
        for r in &outcome.removed {
            println!("  removed {}: {}", r.node_id, r.reason);
        }
        lists.push(outcome.kept);
    }

    for (name, merged) in [("mixed", mixed_sort(&lists, &hra)), ("stratified", stratified_sort(&lists, &hra))] {
        let ids: Vec<String> = merged
            .iter()
            .map(|e| format!("{} [{}]", e.record.node_id, e.metrics.iter().map(|m| m.tag()).collect::<Vec<_>>().join("+")))
            .collect();
        println!("\n{name}: {}", ids.join(", "));
    }
    Ok(())
}
