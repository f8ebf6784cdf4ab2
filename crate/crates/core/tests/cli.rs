mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::*;
use rankshift::graph::{NodeSet, TemporalLayer};

fn rankshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankshift")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = rankshift(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn toy_run_flags_nodes_2_and_4() {
    let dir = tempfile::tempdir().unwrap();
    let layers = dir.path().join("toy.csv");
    write_layers(&layers, &toy_layers());
    let out = dir.path().join("out");
    ok(&["run", "--layers", s(&layers), "--output", s(&out), "--metrics", "indegree", "--set", "detection.k_pos=1", "--set", "detection.k_neg=1"]);
    let mut ids = first_column(&out.join("final_mixed.csv"));
    ids.sort();
    assert_eq!(ids, ["2", "4"]);
    for f in first_column(&out.join("manifest.csv")) {
        assert!(out.join(&f).exists(), "{f} listed but missing");
    }
}

#[test]
fn independent_layers_fail_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let layers: Vec<TemporalLayer> = (0..3)
        .map(|t| random_digraph(300, 0.02, 100 + t).relabeled(format!("T{t}")))
        .collect();
    let path = dir.path().join("random.csv");
    write_layers(&path, &layers);
    let out = dir.path().join("out");
    let res = rankshift(&["run", "--layers", s(&path), "--output", s(&out), "--metrics", "indegree,pagerank"]);
    assert_eq!(res.status.code(), Some(2), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("stability.csv").exists());
    assert!(!out.join("final_mixed.csv").exists());
}

#[test]
fn errors_exit_with_one() {
    let res = rankshift(&["run", "--layers", "/nonexistent/layers.csv", "--output", "/tmp/never"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("error"));
    let res = rankshift(&["run", "--set", "stability.theta=2", "--layers", "x.csv"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn synthetic_run_is_deterministic_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    ok(&["synth", "transactions", "--nodes", "120", "--months", "3", "--injections", "4", "--seed", "5", "--out", s(&data)]);
    for f in ["transactions.csv", "truth.csv", "risk.csv", "labels.csv"] {
        assert!(data.join(f).exists());
    }
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&[
            "run",
            "--transactions",
            s(&data.join("transactions.csv")),
            "--output",
            s(&out),
            "--set",
            &format!("input.risk_table={}", s(&data.join("risk.csv"))),
            "--set",
            &format!("input.labels={}", s(&data.join("labels.csv"))),
            "--set",
            "input.level=iban",
        ]);
        out
    };
    let (a, b) = (run("a"), run("b"));
    let files = first_column(&a.join("manifest.csv"));
    assert!(files.iter().any(|f| f.starts_with("outliers/")));
    assert!(files.contains(&"eval.csv".to_string()));
    for f in files.iter().filter(|f| f.ends_with(".csv") || f.ends_with(".svg")) {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs between runs");
    }

    let report = dir.path().join("eval.csv");
    let out = ok(&["eval", "--list", s(&a.join("final_stratified.csv")), "--labels", s(&data.join("labels.csv")), "--out", s(&report)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("final_stratified"));
    assert!(fs::read_to_string(&report).unwrap().starts_with("list,length,tp,unlabeled,p@1"));
}

#[test]
fn ingest_stats_and_expand() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    ok(&["synth", "transactions", "--nodes", "40", "--months", "2", "--injections", "1", "--out", s(&data)]);
    let tx = data.join("transactions.csv");
    let stats = dir.path().join("stats");
    let out = ok(&["ingest-stats", "--transactions", s(&tx), "--level", "iban", "--out", s(&stats)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("clustering"));
    for f in ["layers.csv", "stats.csv", "distributions.csv", "rejections.csv"] {
        assert!(stats.join(f).exists(), "{f}");
    }
    let seed = csv::Reader::from_path(stats.join("layers.csv")).unwrap().records().next().unwrap().unwrap()[1].to_string();
    let exp = dir.path().join("expand");
    ok(&["expand", "--layers", s(&stats.join("layers.csv")), "--seeds", &seed, "--out", s(&exp)]);
    assert!(exp.join("rings.csv").exists());
    let subs = fs::read_dir(&exp).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("subnetwork_")).count();
    assert_eq!(subs, 2);
}

#[test]
fn ba_reshuffle_and_rec_chart() {
    let dir = tempfile::tempdir().unwrap();
    let layers = dir.path().join("ba.csv");
    ok(&["synth", "ba", "--n", "300", "--m", "3", "--reshuffle", "0.1", "--out", s(&layers)]);
    let read = rankshift::graph::read_layers_csv(fs::File::open(&layers).unwrap()).unwrap();
    assert_eq!(read.len(), 2);
    assert_eq!(read[0].edge_count(), 3 * 297);
    assert_eq!(read[1].edge_count(), 3 * 297);

    let stem = dir.path().join("chart");
    ok(&["rec", "--layers", s(&layers), "--metric", "pagerank", "--unweighted", "--out", s(&stem)]);
    let svg = fs::read_to_string(stem.with_extension("svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let flagged = doc.descendants().filter(|n| n.attribute("fill") == Some("#f5a04a")).count();
    assert_eq!(flagged, 30);
    assert_eq!(first_column(&stem.with_extension("csv")).len(), 300);
}

#[test]
fn isolated_nodes_survive_the_layer_file() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = NodeSet::new(["a", "b", "c", "lonely"]);
    let l = TemporalLayer::from_id_edges("T0", nodes, [("a", "b", 2.0), ("b", "c", 1.0)]).unwrap();
    let path = dir.path().join("l.csv");
    write_layers(&path, std::slice::from_ref(&l));
    let back = rankshift::graph::read_layers_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back[0].node_count(), 4);
    assert_eq!(back[0].edges(), l.edges());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let layers = dir.path().join("ba.csv");
    ok(&["synth", "ba", "--n", "5000", "--m", "3", "--reshuffle", "0.05", "--out", s(&layers)]);
    let run = |threads: &str| {
        let out = dir.path().join(format!("t{threads}"));
        ok(&["run", "--layers", s(&layers), "--output", s(&out), "--metrics", "all", "--threads", threads]);
        out
    };
    let (a, b) = (run("1"), run("4"));
    for f in first_column(&a.join("manifest.csv")).iter().filter(|f| *f != "config.ini") {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} depends on the thread count");
    }
}
