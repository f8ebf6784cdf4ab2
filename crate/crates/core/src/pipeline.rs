//! End-to-end run: layers, centralities, rankings, stability gate,
//! residuals, selection, filtering, final lists and evaluation, written
//! to an artifact directory with a manifest.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use log::{info, warn};
use rayon::prelude::*;

use crate::centrality::{compute_many, write_centrality_csv, CentralityConfig, CentralityVector, Metric};
use crate::config::Config;
use crate::detection::{
    delta_hra, inactive_in_both, mixed_sort, residuals, stability_from_rankings, stratified_sort, threshold_filter,
    write_final_csv, write_outliers_csv, write_removals_csv, write_stability_csv, FinalEntry, MetricStability,
    OutlierRecord, Removal, Selection, SortStrategy, StabilityParams, StabilityReport,
};
use crate::error::{create_file, open_file, Error, Result};
use crate::eval::{evaluate, EvalReport, EvalSpec};
use crate::graph::{layer_stats, read_layers_csv, write_layers_csv, write_stats_csv, TemporalLayer};
use crate::ingest::{
    aggregate, filter_dates, load_labels, load_risk_table, node_countries, parse_transactions, AggregationLevel,
    IntervalSpec, LabelSet, RiskLevel, RiskTable, Schema, Transaction,
};
use crate::ranking::{rank_nodes, write_rankings_csv, Ranking, TiePolicy};
use crate::rec::{rec_points, rec_svg, write_rec_csv};

/// Where the layers come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Transactions(PathBuf),
    Layers(PathBuf),
}

/// Every setting of a run, resolved from a [`Config`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub schema: Schema,
    pub level: AggregationLevel,
    pub intervals: IntervalSpec,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
    pub risk_table: Option<PathBuf>,
    pub default_risk: RiskLevel,
    pub labels: Option<PathBuf>,
    pub roster: Vec<Metric>,
    pub centrality: CentralityConfig,
    pub ties: TiePolicy,
    pub stability: StabilityParams,
    /// `(T_x, T_y)`; the last two layers when unset.
    pub interval_pair: Option<(String, String)>,
    pub selection: Selection,
    /// Volume filter threshold; no filtering when unset.
    pub t_hr: Option<f64>,
    pub multiplier: f64,
    pub strategies: Vec<SortStrategy>,
    pub eval: EvalSpec,
    pub tp_star: Option<usize>,
    pub output: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

const KNOWN_KEYS: &[(&str, &str)] = &[
    ("input", "transactions"),
    ("input", "layers"),
    ("input", "level"),
    ("input", "interval"),
    ("input", "from"),
    ("input", "to"),
    ("input", "risk_table"),
    ("input", "default_risk"),
    ("input", "labels"),
    ("schema", "*"),
    ("centrality", "metrics"),
    ("centrality", "pagerank_alpha"),
    ("centrality", "pagerank_tolerance"),
    ("centrality", "pagerank_max_iterations"),
    ("centrality", "pagerank_weighted"),
    ("centrality", "hits_tolerance"),
    ("centrality", "hits_max_iterations"),
    ("centrality", "normalize_strength"),
    ("centrality", "ties"),
    ("stability", "theta"),
    ("stability", "repetitions"),
    ("stability", "seed"),
    ("detection", "interval_x"),
    ("detection", "interval_y"),
    ("detection", "selection"),
    ("detection", "k"),
    ("detection", "k_pos"),
    ("detection", "k_neg"),
    ("detection", "t_hr"),
    ("detection", "multiplier"),
    ("detection", "sort"),
    ("eval", "precision"),
    ("eval", "average"),
    ("eval", "recall"),
    ("eval", "tp_star"),
    ("run", "output"),
    ("run", "threads"),
];

fn cfg_err(message: String) -> Error {
    Error::Config { line: 0, message }
}

fn usize_list(cfg: &Config, section: &str, key: &str, default: Vec<usize>) -> Result<Vec<usize>> {
    let Some(v) = cfg.get(section, key) else { return Ok(default) };
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(cfg_err(format!("{section}.{key}: `{t}` is not a positive integer"))),
        })
        .collect()
}

fn parse_ties(v: &str) -> std::result::Result<TiePolicy, String> {
    match v.trim() {
        "exact" => Ok(TiePolicy::Exact),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|e| *e >= 0.0 && e.is_finite())
            .map(|e| if e == 0.0 { TiePolicy::Exact } else { TiePolicy::Relative(e) })
            .ok_or_else(|| format!("ties must be `exact` or a non-negative number, got `{other}`")),
    }
}

impl PipelineConfig {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        cfg.check_keys(KNOWN_KEYS)?;
        let input = match (cfg.get("input", "transactions"), cfg.get("input", "layers")) {
            (Some(t), None) => InputSource::Transactions(t.into()),
            (None, Some(l)) => InputSource::Layers(l.into()),
            (Some(_), Some(_)) => return Err(cfg_err("set only one of input.transactions and input.layers".into())),
            (None, None) => return Err(cfg_err("no input: set input.transactions or input.layers".into())),
        };
        let schema = Schema::default().apply(cfg.section("schema")).map_err(cfg_err)?;
        let level: AggregationLevel = cfg.parse_or("input", "level", AggregationLevel::Bic)?;
        let roster = cfg
            .get("centrality", "metrics")
            .map(Metric::parse_roster)
            .transpose()
            .map_err(cfg_err)?
            .unwrap_or_else(|| Metric::DEFAULT_ROSTER.to_vec());
        if roster.is_empty() {
            return Err(cfg_err("centrality.metrics is empty".into()));
        }

        let mut centrality = CentralityConfig::default();
        let pr = &mut centrality.pagerank;
        pr.alpha = cfg.parse_or("centrality", "pagerank_alpha", pr.alpha)?;
        pr.tolerance = cfg.parse_or("centrality", "pagerank_tolerance", pr.tolerance)?;
        pr.max_iterations = cfg.parse_or("centrality", "pagerank_max_iterations", pr.max_iterations)?;
        pr.weighted = cfg.parse_or("centrality", "pagerank_weighted", pr.weighted)?;
        let h = &mut centrality.hits;
        h.tolerance = cfg.parse_or("centrality", "hits_tolerance", h.tolerance)?;
        h.max_iterations = cfg.parse_or("centrality", "hits_max_iterations", h.max_iterations)?;
        centrality.normalize_strength = cfg.parse_or("centrality", "normalize_strength", false)?;
        let ties = cfg
            .get("centrality", "ties")
            .map(parse_ties)
            .transpose()
            .map_err(cfg_err)?
            .unwrap_or(TiePolicy::Relative(1e-9));

        let defaults = StabilityParams::default();
        let stability = StabilityParams {
            theta: cfg.parse_or("stability", "theta", defaults.theta)?,
            repetitions: cfg.parse_or("stability", "repetitions", defaults.repetitions)?,
            seed: cfg.parse_or("stability", "seed", defaults.seed)?,
        };
        if !(stability.theta > 0.0 && stability.theta < 1.0) {
            return Err(cfg_err(format!("stability.theta must lie in (0, 1), got {}", stability.theta)));
        }

        let interval_pair = match (cfg.get("detection", "interval_x"), cfg.get("detection", "interval_y")) {
            (Some(x), Some(y)) => Some((x.to_string(), y.to_string())),
            (None, None) => None,
            _ => return Err(cfg_err("set both detection.interval_x and detection.interval_y, or neither".into())),
        };
        // 10 + 10 at country level, 30 + 30 below
        let default_k = if level == AggregationLevel::Country { 10 } else { 30 };
        let selection = match cfg.get("detection", "selection").unwrap_or("split") {
            "split" => Selection::Split {
                k_pos: cfg.parse_or("detection", "k_pos", default_k)?,
                k_neg: cfg.parse_or("detection", "k_neg", default_k)?,
            },
            "abs" | "absolute" => Selection::Absolute {
                k: cfg.parse_or("detection", "k", 2 * default_k)?,
            },
            other => return Err(cfg_err(format!("detection.selection must be `split` or `abs`, got `{other}`"))),
        };
        let k_ok = match selection {
            Selection::Absolute { k } => k >= 1,
            Selection::Split { k_pos, k_neg } => k_pos + k_neg >= 1,
        };
        if !k_ok {
            return Err(cfg_err("K must be at least 1".into()));
        }
        let t_hr: Option<f64> = cfg.parse_opt("detection", "t_hr")?;
        let multiplier = cfg.parse_or("detection", "multiplier", 5.0)?;
        if !(multiplier >= 1.0) {
            return Err(cfg_err(format!("detection.multiplier must be >= 1, got {multiplier}")));
        }
        if t_hr.is_some_and(|t| !(t > 0.0)) {
            return Err(cfg_err("detection.t_hr must be positive".into()));
        }
        if t_hr.is_some() && cfg.get("input", "risk_table").is_none() {
            return Err(cfg_err("detection.t_hr needs input.risk_table to tell high-risk nodes apart".into()));
        }
        let strategies = cfg
            .get("detection", "sort")
            .unwrap_or("mixed,stratified")
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse::<SortStrategy>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(cfg_err)?;

        let d = EvalSpec::default();
        let eval = EvalSpec {
            precision: usize_list(cfg, "eval", "precision", d.precision)?,
            average: usize_list(cfg, "eval", "average", d.average)?,
            recall: usize_list(cfg, "eval", "recall", d.recall)?,
        };

        Ok(PipelineConfig {
            input,
            schema,
            level,
            intervals: cfg.parse_or("input", "interval", IntervalSpec::Monthly)?,
            date_from: cfg.parse_opt("input", "from")?,
            date_to: cfg.parse_opt("input", "to")?,
            risk_table: cfg.get("input", "risk_table").map(PathBuf::from),
            default_risk: cfg.parse_or("input", "default_risk", RiskLevel::Low)?,
            labels: cfg.get("input", "labels").map(PathBuf::from),
            roster,
            centrality,
            ties,
            stability,
            interval_pair,
            selection,
            t_hr,
            multiplier,
            strategies,
            eval,
            tp_star: cfg.parse_opt("eval", "tp_star")?,
            output: cfg.get("run", "output").unwrap_or("rankshift-out").into(),
            threads: cfg.parse_or("run", "threads", 0)?,
        })
    }
}

/// Loaded layers and the side information the later steps need.
#[derive(Debug, Clone)]
pub struct PipelineInput {
    pub layers: Vec<TemporalLayer>,
    /// Risk level per node index; `None` where it cannot be resolved.
    pub node_risk: Vec<Option<RiskLevel>>,
    pub labels: Option<LabelSet>,
    pub transactions: Option<crate::ingest::ParseReport>,
}

pub fn read_transactions(path: &Path, schema: &Schema) -> Result<crate::ingest::ParseReport> {
    let report = parse_transactions(BufReader::new(open_file(path)?), schema)?;
    if !report.rejections.is_empty() {
        warn!("{}: {} of {} rows rejected", path.display(), report.rejections.len(), report.rows);
    }
    Ok(report)
}

pub fn read_risk_table(path: &Path, default: RiskLevel) -> Result<RiskTable> {
    Ok(load_risk_table(BufReader::new(open_file(path)?), default)?.value)
}

pub fn read_labels(path: &Path) -> Result<LabelSet> {
    Ok(load_labels(BufReader::new(open_file(path)?))?.value)
}

/// Reads the configured input and side files.
pub fn load_input(cfg: &PipelineConfig) -> Result<PipelineInput> {
    let risk = cfg.risk_table.as_deref().map(|p| read_risk_table(p, cfg.default_risk)).transpose()?;
    let labels = cfg.labels.as_deref().map(read_labels).transpose()?;
    let (layers, countries, report) = match &cfg.input {
        InputSource::Transactions(path) => {
            let mut report = read_transactions(path, &cfg.schema)?;
            let txs: Vec<Transaction> = filter_dates(std::mem::take(&mut report.transactions), cfg.date_from, cfg.date_to);
            let layers = aggregate(&txs, cfg.level, &cfg.intervals)?;
            let countries = node_countries(&txs, cfg.level, risk.as_ref());
            report.transactions = txs;
            (layers, Some(countries), Some(report))
        }
        InputSource::Layers(path) => (read_layers_csv(BufReader::new(open_file(path)?))?, None, None),
    };
    let nodes = layers.first().ok_or(Error::TooFewLayers { needed: 2, got: 0 })?.nodes().clone();
    let node_risk = nodes
        .ids()
        .iter()
        .map(|id| {
            let table = risk.as_ref()?;
            match &countries {
                Some(c) => c.get(id).map(|code| table.lookup(code)),
                // a layer file only names countries directly at country level
                None if cfg.level == AggregationLevel::Country => Some(table.lookup(id)),
                None => None,
            }
        })
        .collect();
    Ok(PipelineInput {
        layers,
        node_risk,
        labels,
        transactions: report,
    })
}

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// Every metric failed the stability gate; nothing after the stability
    /// report was produced.
    StabilityFailed,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::StabilityFailed => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub step: &'static str,
    pub description: String,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub status: RunStatus,
    pub output: PathBuf,
    pub interval_x: String,
    pub interval_y: String,
    pub stability: StabilityReport,
    /// Selected (and, when configured, filtered) outliers per valid metric.
    pub outliers: BTreeMap<Metric, Vec<OutlierRecord>>,
    pub removed: Vec<Removal>,
    pub mixed: Vec<FinalEntry>,
    pub stratified: Vec<FinalEntry>,
    pub eval: Option<EvalReport>,
    pub manifest: Vec<ManifestEntry>,
}

struct Artifacts {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl Artifacts {
    fn write(
        &mut self,
        file: &str,
        step: &'static str,
        description: impl Into<String>,
        body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
    ) -> Result<()> {
        let mut w = BufWriter::new(create_file(&self.root.join(file))?);
        body(&mut w)?;
        w.flush()?;
        self.entries.push(ManifestEntry {
            file: file.to_string(),
            step,
            description: description.into(),
        });
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<ManifestEntry>> {
        self.entries.push(ManifestEntry {
            file: "manifest.csv".into(),
            step: "manifest",
            description: "this file".into(),
        });
        let mut w = csv::Writer::from_writer(BufWriter::new(create_file(&self.root.join("manifest.csv"))?));
        w.write_record(["file", "step", "description"])?;
        for e in &self.entries {
            w.write_record([e.file.as_str(), e.step, e.description.as_str()])?;
        }
        w.flush()?;
        Ok(self.entries)
    }
}

/// Resolves and runs a configuration.
pub fn run_pipeline(config: &Config) -> Result<PipelineOutcome> {
    let cfg = PipelineConfig::from_config(config)?;
    let input = load_input(&cfg)?;
    execute(&cfg, input, config)
}

fn pick_pair(layers: &[TemporalLayer], pair: &Option<(String, String)>) -> Result<(usize, usize)> {
    let find = |label: &str| {
        layers
            .iter()
            .position(|l| l.label() == label)
            .ok_or_else(|| Error::UnknownInterval(label.to_string()))
    };
    match pair {
        Some((x, y)) => Ok((find(x)?, find(y)?)),
        None => Ok((layers.len() - 2, layers.len() - 1)),
    }
}

/// Scores of every roster metric on one layer; a metric whose iteration
/// fails is reported as `None`.
fn score_layer(layer: &TemporalLayer, roster: &[Metric], cfg: &CentralityConfig) -> Vec<Option<CentralityVector>> {
    match compute_many(layer, roster, cfg) {
        Ok(v) => v.into_iter().map(Some).collect(),
        Err(_) => roster
            .iter()
            .map(|&m| match compute_many(layer, &[m], cfg) {
                Ok(mut v) => Some(v.remove(0)),
                Err(e) => {
                    warn!("{m} on layer {}: {e}", layer.label());
                    None
                }
            })
            .collect(),
    }
}

/// Runs the pipeline on loaded input, writing artifacts under
/// `cfg.output`. `snapshot` is recorded as the run's configuration.
pub fn execute(cfg: &PipelineConfig, input: PipelineInput, snapshot: &Config) -> Result<PipelineOutcome> {
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| execute_inner(cfg, input, snapshot))
    } else {
        execute_inner(cfg, input, snapshot)
    }
}

fn execute_inner(cfg: &PipelineConfig, input: PipelineInput, snapshot: &Config) -> Result<PipelineOutcome> {
    let layers = &input.layers;
    if layers.len() < 2 {
        return Err(Error::TooFewLayers { needed: 2, got: layers.len() });
    }
    let (ix, iy) = pick_pair(layers, &cfg.interval_pair)?;
    let mut art = Artifacts {
        root: cfg.output.clone(),
        entries: Vec::new(),
    };
    std::fs::create_dir_all(&art.root)?;
    art.write("config.ini", "config", "configuration snapshot of this run", |w| {
        write!(w, "{snapshot}")?;
        Ok(())
    })?;

    // steps 1-2: layers and their statistics
    if let Some(report) = &input.transactions {
        art.write("rejections.csv", "ingest", "rejected input rows", |w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["line", "reason"])?;
            for r in &report.rejections {
                c.write_record([r.line.to_string(), r.reason.clone()])?;
            }
            c.flush()?;
            Ok(())
        })?;
        art.write("layers.csv", "aggregate", format!("temporal layers at {} level", cfg.level), |w| {
            write_layers_csv(layers, w)
        })?;
    }
    let stats = layers.par_iter().map(layer_stats).collect::<Result<Vec<_>>>()?;
    art.write("stats.csv", "stats", "per-layer graph statistics", |w| write_stats_csv(&stats, w))?;

    // step 3: centralities and rankings
    let scored: Vec<Vec<Option<CentralityVector>>> = layers
        .par_iter()
        .map(|l| score_layer(l, &cfg.roster, &cfg.centrality))
        .collect();
    let computable: Vec<bool> = (0..cfg.roster.len())
        .map(|k| scored.iter().all(|per_layer| per_layer[k].is_some()))
        .collect();
    let vectors: Vec<CentralityVector> = scored.iter().flatten().flatten().cloned().collect();
    art.write("centrality.csv", "centrality", "scores per node, metric and interval", |w| {
        write_centrality_csv(&vectors, w)
    })?;
    let rankings: BTreeMap<Metric, Vec<Ranking>> = cfg
        .roster
        .iter()
        .enumerate()
        .filter(|(k, _)| computable[*k])
        .map(|(k, &m)| {
            let rs = scored
                .iter()
                .map(|per_layer| rank_nodes(per_layer[k].as_ref().expect("computable"), cfg.ties))
                .collect();
            (m, rs)
        })
        .collect();
    let all_rankings: Vec<&Ranking> = rankings.values().flatten().collect();
    art.write("rankings.csv", "ranking", "positions and fractional ranks", |w| {
        write_rankings_csv(&all_rankings, w)
    })?;

    // step 5: stability gate
    let metrics = cfg
        .roster
        .iter()
        .map(|m| match rankings.get(m) {
            Some(rs) => stability_from_rankings(rs, &cfg.stability),
            None => Ok(MetricStability {
                metric: Some(*m),
                pairs: Vec::new(),
                valid: false,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    let stability = StabilityReport {
        params: cfg.stability,
        metrics,
    };
    art.write("stability.csv", "stability", "rank correlations, baselines and verdicts", |w| {
        write_stability_csv(&stability, w)
    })?;
    let (label_x, label_y) = (layers[ix].label().to_string(), layers[iy].label().to_string());
    if stability.all_failed() {
        warn!("every metric failed the stability gate (theta = {})", cfg.stability.theta);
        let manifest = art.finish()?;
        return Ok(PipelineOutcome {
            status: RunStatus::StabilityFailed,
            output: cfg.output.clone(),
            interval_x: label_x,
            interval_y: label_y,
            stability,
            outliers: BTreeMap::new(),
            removed: Vec::new(),
            mixed: Vec::new(),
            stratified: Vec::new(),
            eval: None,
            manifest,
        });
    }
    let valid: Vec<Metric> = cfg
        .roster
        .iter()
        .copied()
        .filter(|m| stability.get(*m).is_some_and(|s| s.valid))
        .collect();
    for m in &cfg.roster {
        if !valid.contains(m) {
            warn!("{m} failed the stability gate and is skipped");
        }
    }

    // steps 6-7: residuals and selection, per metric
    let (lx, ly) = (&layers[ix], &layers[iy]);
    let index_of = |m: Metric| cfg.roster.iter().position(|x| *x == m).expect("in roster");
    let selected: Vec<(Metric, Vec<OutlierRecord>, Vec<crate::rec::RecPoint>)> = valid
        .par_iter()
        .map(|&m| {
            let rs = &rankings[&m];
            let mut set = residuals(&rs[ix], &rs[iy])?;
            let k = index_of(m);
            let sx = &scored[ix][k].as_ref().expect("computable").scores;
            let sy = &scored[iy][k].as_ref().expect("computable").scores;
            let inactive = inactive_in_both(lx, ly, sx, sy);
            set.exclude(|i| inactive[i]);
            let picked = cfg.selection.apply(&set);
            let flagged: HashSet<usize> = picked.iter().map(|r| r.node).collect();
            let points = rec_points(&rs[ix], &rs[iy], &flagged)?;
            Ok((m, picked, points))
        })
        .collect::<Result<Vec<_>>>()?;
    for (m, picked, points) in &selected {
        let title = format!("{m}: {label_x} -> {label_y}");
        art.write(&format!("rec/{m}.csv"), "rec", format!("ranking evolution data for {m}"), |w| {
            write_rec_csv(points, w)
        })?;
        art.write(&format!("rec/{m}.svg"), "rec", format!("ranking evolution chart for {m}"), |w| {
            w.write_all(rec_svg(points, &title, &format!("rank in {label_x}"), &format!("rank in {label_y}")).as_bytes())?;
            Ok(())
        })?;
        art.write(&format!("outliers/{m}.csv"), "select", format!("top-K outliers for {m}"), |w| {
            write_outliers_csv(picked, w)
        })?;
    }

    // step 8: filter and final lists
    let mut outliers: BTreeMap<Metric, Vec<OutlierRecord>> = BTreeMap::new();
    let mut removed = Vec::new();
    match cfg.t_hr {
        Some(t_hr) => {
            if cfg.risk_table.is_none() {
                return Err(Error::InvalidParameter("the volume filter needs input.risk_table".into()));
            }
            for (m, picked, _) in &selected {
                let outcome = threshold_filter(picked.clone(), lx, ly, &input.node_risk, t_hr, cfg.multiplier)?;
                art.write(&format!("filtered/{m}.csv"), "filter", format!("outliers for {m} after the volume filter"), |w| {
                    write_outliers_csv(&outcome.kept, w)
                })?;
                outliers.insert(*m, outcome.kept);
                removed.extend(outcome.removed);
            }
            art.write("removals.csv", "filter", "nodes dropped by the volume filter", |w| {
                write_removals_csv(&removed, w)
            })?;
        }
        None => {
            for (m, picked, _) in &selected {
                outliers.insert(*m, picked.clone());
            }
        }
    }

    let high_risk: Vec<bool> = input.node_risk.iter().map(|r| *r == Some(RiskLevel::High)).collect();
    let hra = delta_hra(lx, ly, &high_risk);
    let lists: Vec<Vec<OutlierRecord>> = outliers.values().cloned().collect();
    let mixed = mixed_sort(&lists, &hra);
    let stratified = stratified_sort(&lists, &hra);
    let mut eval_lists: Vec<(String, Vec<String>)> = outliers
        .iter()
        .map(|(m, l)| (m.tag().to_string(), l.iter().map(|r| r.node_id.clone()).collect()))
        .collect();
    for s in &cfg.strategies {
        let entries = match s {
            SortStrategy::Mixed => &mixed,
            SortStrategy::Stratified => &stratified,
            SortStrategy::PerMetric => continue,
        };
        art.write(&format!("final_{s}.csv"), "sort", format!("final list, {s} strategy"), |w| {
            write_final_csv(entries, w)
        })?;
        eval_lists.push((s.to_string(), entries.iter().map(|e| e.record.node_id.clone()).collect()));
    }

    let eval = match &input.labels {
        Some(labels) => {
            let report = evaluate(&eval_lists, labels, &cfg.eval, cfg.tp_star);
            art.write("eval.csv", "eval", "precision and recall of the output lists", |w| report.write_csv(w))?;
            art.write("eval.txt", "eval", "the same scores as a text table", |w| {
                w.write_all(report.to_table().as_bytes())?;
                Ok(())
            })?;
            Some(report)
        }
        None => None,
    };
    info!(
        "{} metric(s) passed the gate; {} node(s) in the final lists",
        valid.len(),
        mixed.len()
    );
    let manifest = art.finish()?;
    Ok(PipelineOutcome {
        status: RunStatus::Completed,
        output: cfg.output.clone(),
        interval_x: label_x,
        interval_y: label_y,
        stability,
        outliers,
        removed,
        mixed,
        stratified,
        eval,
        manifest,
    })
}
