use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use rankshift::centrality::{compute_many, CentralityConfig, Metric};
use rankshift::config::Config;
use rankshift::detection::{inactive_in_both, residuals, Selection};
use rankshift::eval::{distribution_export, evaluate, write_distribution_csv, Binning, EvalSpec};
use rankshift::graph::{expand_subnetwork, layer_stats, read_layers_csv, write_layers_csv, write_stats_csv, TemporalLayer};
use rankshift::ingest::{aggregate, filter_dates, write_transactions_csv, AggregationLevel, IntervalSpec, Schema};
use rankshift::pipeline::{read_labels, read_transactions, run_pipeline, RunStatus};
use rankshift::ranking::{rank_nodes, TiePolicy};
use rankshift::rec::{rec_points, rec_svg, write_rec_csv};
use rankshift::synth::{
    barabasi_albert, plan_injections, reshuffle_edges, synth_transactions, write_labels_csv, write_risk_table_csv,
    write_truth_csv, TransactionProfile,
};
use rankshift::{Error, Result};

#[derive(Parser)]
#[command(name = "rankshift", version, about = "Anomalous nodes from centrality ranking shifts in temporal networks")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse transactions, aggregate them into layers and report statistics.
    IngestStats(IngestArgs),
    /// Generate synthetic graphs or transactions.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Run the full detection pipeline.
    Run(RunArgs),
    /// Ranking evolution chart for one metric and interval pair.
    Rec(RecArgs),
    /// Score outlier lists against relevance labels.
    Eval(EvalArgs),
    /// Two-ring subnetwork around a group of seed nodes.
    Expand(ExpandArgs),
}

#[derive(Args)]
struct TxInput {
    /// Transaction CSV.
    #[arg(long)]
    transactions: PathBuf,
    /// country, bic or iban.
    #[arg(long, default_value = "bic")]
    level: AggregationLevel,
    /// `month` or `days:N`.
    #[arg(long, default_value = "month")]
    interval: IntervalSpec,
    /// Column mapping `role=header`, or `delimiter=;`.
    #[arg(long = "schema", value_name = "ROLE=HEADER")]
    schema: Vec<String>,
    #[arg(long)]
    from: Option<chrono::NaiveDate>,
    #[arg(long)]
    to: Option<chrono::NaiveDate>,
}

impl TxInput {
    fn layers(&self) -> Result<(Vec<TemporalLayer>, rankshift::ingest::ParseReport)> {
        let pairs: Vec<(&str, &str)> = self
            .schema
            .iter()
            .map(|s| s.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("bad schema mapping `{s}`"))))
            .collect::<Result<_>>()?;
        let schema = Schema::default().apply(pairs).map_err(Error::InvalidParameter)?;
        let mut report = read_transactions(&self.transactions, &schema)?;
        report.transactions = filter_dates(std::mem::take(&mut report.transactions), self.from, self.to);
        let layers = aggregate(&report.transactions, self.level, &self.interval)?;
        Ok((layers, report))
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: TxInput,
    /// Output directory.
    #[arg(long, default_value = "ingest-out")]
    out: PathBuf,
    /// Logarithmic bins per decade for strength and amount histograms.
    #[arg(long, default_value_t = 4)]
    bins_per_decade: u32,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Barabási–Albert layer, optionally followed by a reshuffled copy.
    Ba {
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fraction of edges to rewire into a second layer.
        #[arg(long)]
        reshuffle: Option<f64>,
        #[arg(long, default_value_t = 2)]
        reshuffle_seed: u64,
        /// Layer CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Transaction stream with planted anomalies.
    Transactions {
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        months: usize,
        #[arg(long, default_value_t = 5)]
        injections: usize,
        /// Month (1-based) of the injections; the last month by default.
        #[arg(long)]
        injection_month: Option<usize>,
        #[arg(long, default_value_t = 20.0)]
        factor: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory for transactions.csv, truth.csv, risk.csv and labels.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (`[section]` / `key = value`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override `section.key=value`; repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set input.transactions=...
    #[arg(long)]
    transactions: Option<PathBuf>,
    /// Shorthand for --set input.layers=...
    #[arg(long)]
    layers: Option<PathBuf>,
    /// Shorthand for --set run.output=...
    #[arg(long)]
    output: Option<PathBuf>,
    /// Shorthand for --set centrality.metrics=...
    #[arg(long)]
    metrics: Option<String>,
    /// Shorthand for --set run.threads=...
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RecArgs {
    /// Layer CSV.
    #[arg(long)]
    layers: PathBuf,
    #[arg(long, default_value = "pagerank")]
    metric: Metric,
    /// Earlier interval; defaults to the second-to-last layer.
    #[arg(long)]
    interval_x: Option<String>,
    /// Later interval; defaults to the last layer.
    #[arg(long)]
    interval_y: Option<String>,
    /// Gainers to flag.
    #[arg(long, default_value_t = 15)]
    k_pos: usize,
    /// Losers to flag.
    #[arg(long, default_value_t = 15)]
    k_neg: usize,
    /// Unweighted PageRank transitions.
    #[arg(long)]
    unweighted: bool,
    /// Output stem: writes STEM.csv and STEM.svg.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Outlier or final list CSV with a `node_id` column; repeatable.
    #[arg(long = "list", required = true)]
    lists: Vec<PathBuf>,
    /// Labels CSV (`id,relevant|not-relevant`).
    #[arg(long)]
    labels: PathBuf,
    /// Total relevant items; defaults to the relevant ids in the lists.
    #[arg(long)]
    tp_star: Option<usize>,
    /// Write the report as CSV here as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Layer CSV; alternatively pass transactions.
    #[arg(long, conflicts_with = "transactions")]
    layers: Option<PathBuf>,
    #[arg(long)]
    transactions: Option<PathBuf>,
    #[arg(long, default_value = "iban")]
    level: AggregationLevel,
    /// Comma-separated seed node ids.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn writer(path: &Path) -> Result<BufWriter<File>> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(p)?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })?))
}

fn read_layers(path: &Path) -> Result<Vec<TemporalLayer>> {
    let f = File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })?;
    read_layers_csv(BufReader::new(f))
}

fn ingest_stats(args: IngestArgs) -> Result<RunStatus> {
    let (layers, report) = args.input.layers()?;
    fs::create_dir_all(&args.out)?;
    write_layers_csv(&layers, writer(&args.out.join("layers.csv"))?)?;
    let stats = layers.iter().map(layer_stats).collect::<Result<Vec<_>>>()?;
    write_stats_csv(&stats, writer(&args.out.join("stats.csv"))?)?;
    let log = Binning::Log { per_decade: args.bins_per_decade };
    let dists: Vec<_> = layers
        .iter()
        .flat_map(|l| distribution_export(l, Binning::default(), log))
        .collect();
    write_distribution_csv(&dists, writer(&args.out.join("distributions.csv"))?)?;
    let mut rej = csv::Writer::from_writer(writer(&args.out.join("rejections.csv"))?);
    rej.write_record(["line", "reason"])?;
    for r in &report.rejections {
        rej.write_record([r.line.to_string(), r.reason.clone()])?;
    }
    rej.flush()?;

    println!(
        "{} rows, {} accepted, {} rejected, {} layers over {} nodes",
        report.rows,
        report.transactions.len(),
        report.rejections.len(),
        layers.len(),
        layers.first().map_or(0, |l| l.node_count())
    );
    println!("{:<12} {:>8} {:>8} {:>10} {:>10} {:>8}", "interval", "edges", "density", "avg_deg", "clustering", "diameter");
    for s in &stats {
        println!(
            "{:<12} {:>8} {:>8.5} {:>10.3} {:>10.4} {:>8}",
            s.interval, s.edges, s.density, s.avg_degree, s.avg_clustering, s.diameter
        );
    }
    Ok(RunStatus::Completed)
}

fn synth(cmd: SynthCommand) -> Result<RunStatus> {
    match cmd {
        SynthCommand::Ba { n, m, seed, reshuffle, reshuffle_seed, out } => {
            let g = barabasi_albert(n, m, seed)?.relabeled("T0");
            let mut layers = vec![g];
            if let Some(f) = reshuffle {
                layers.push(reshuffle_edges(&layers[0], f, reshuffle_seed)?.relabeled("T1"));
            }
            write_layers_csv(&layers, writer(&out)?)?;
            println!("wrote {} layer(s), {} edges each, to {}", layers.len(), layers[0].edge_count(), out.display());
        }
        SynthCommand::Transactions { nodes, months, injections, injection_month, factor, seed, out } => {
            let profile = TransactionProfile { nodes, months, ..Default::default() };
            let month = injection_month.unwrap_or(months).checked_sub(1).ok_or_else(|| {
                Error::InvalidParameter("injection month is 1-based".into())
            })?;
            let plan = plan_injections(&profile, injections, month, factor, seed.wrapping_add(1));
            let data = synth_transactions(&profile, &plan, seed)?;
            fs::create_dir_all(&out)?;
            write_transactions_csv(&data.transactions, writer(&out.join("transactions.csv"))?)?;
            write_truth_csv(&data.truth, writer(&out.join("truth.csv"))?)?;
            write_risk_table_csv(&profile.risk_table(), writer(&out.join("risk.csv"))?)?;
            write_labels_csv(&profile, &data.truth, writer(&out.join("labels.csv"))?)?;
            println!("wrote {} transactions and {} injections to {}", data.transactions.len(), data.truth.len(), out.display());
        }
    }
    Ok(RunStatus::Completed)
}

fn run(args: RunArgs) -> Result<RunStatus> {
    let mut config = match &args.config {
        Some(p) => Config::parse(&fs::read_to_string(p).map_err(|source| Error::Open { path: p.clone(), source })?)?,
        None => Config::new(),
    };
    let shorthands = [
        ("input.transactions", args.transactions.map(|p| p.display().to_string())),
        ("input.layers", args.layers.map(|p| p.display().to_string())),
        ("run.output", args.output.map(|p| p.display().to_string())),
        ("centrality.metrics", args.metrics),
        ("run.threads", args.threads.map(|t| t.to_string())),
    ];
    for (key, value) in shorthands {
        if let Some(v) = value {
            config.set(&format!("{key}={v}"))?;
        }
    }
    for s in &args.set {
        config.set(s)?;
    }
    let outcome = run_pipeline(&config)?;
    for m in &outcome.stability.metrics {
        let tag = m.metric.map(|x| x.tag()).unwrap_or("?");
        let weakest = m.weakest().map_or("undefined".to_string(), |w| format!("{w:.4}"));
        println!("{tag:<20} {:<8} weakest max(rho, tau) = {weakest}", if m.valid { "valid" } else { "invalid" });
    }
    match outcome.status {
        RunStatus::StabilityFailed => eprintln!("stability gate failed for every metric; stopping after the stability report"),
        RunStatus::Completed => {
            println!(
                "{} -> {}: {} node(s) in the final lists, artifacts in {}",
                outcome.interval_x,
                outcome.interval_y,
                outcome.mixed.len(),
                outcome.output.display()
            );
            if let Some(report) = &outcome.eval {
                print!("{}", report.to_table());
            }
        }
    }
    Ok(outcome.status)
}

fn rec(args: RecArgs) -> Result<RunStatus> {
    let layers = read_layers(&args.layers)?;
    if layers.len() < 2 {
        return Err(Error::TooFewLayers { needed: 2, got: layers.len() });
    }
    let find = |label: &Option<String>, default: usize| match label {
        Some(l) => layers.iter().position(|x| x.label() == l).ok_or_else(|| Error::UnknownInterval(l.clone())),
        None => Ok(default),
    };
    let ix = find(&args.interval_x, layers.len() - 2)?;
    let iy = find(&args.interval_y, layers.len() - 1)?;
    let mut cfg = CentralityConfig::default();
    cfg.pagerank.weighted = !args.unweighted;
    let vx = compute_many(&layers[ix], &[args.metric], &cfg)?.remove(0);
    let vy = compute_many(&layers[iy], &[args.metric], &cfg)?.remove(0);
    let ties = TiePolicy::Relative(1e-9);
    let (rx, ry) = (rank_nodes(&vx, ties), rank_nodes(&vy, ties));
    let mut set = residuals(&rx, &ry)?;
    let inactive = inactive_in_both(&layers[ix], &layers[iy], &vx.scores, &vy.scores);
    set.exclude(|i| inactive[i]);
    let picked = Selection::Split { k_pos: args.k_pos, k_neg: args.k_neg }.apply(&set);
    let flagged: HashSet<usize> = picked.iter().map(|r| r.node).collect();
    let points = rec_points(&rx, &ry, &flagged)?;
    let (lx, ly) = (layers[ix].label(), layers[iy].label());
    write_rec_csv(&points, writer(&args.out.with_extension("csv"))?)?;
    let svg = rec_svg(&points, &format!("{}: {lx} -> {ly}", args.metric), &format!("rank in {lx}"), &format!("rank in {ly}"));
    writer(&args.out.with_extension("svg"))?.write_all(svg.as_bytes())?;
    println!("{} points, {} flagged", points.len(), flagged.len());
    Ok(RunStatus::Completed)
}

fn eval(args: EvalArgs) -> Result<RunStatus> {
    let labels = read_labels(&args.labels)?;
    let mut lists = Vec::new();
    for path in &args.lists {
        let f = File::open(path).map_err(|source| Error::Open { path: path.clone(), source })?;
        let mut r = csv::Reader::from_reader(BufReader::new(f));
        let col = r
            .headers()?
            .iter()
            .position(|h| h == "node_id" || h == "node")
            .ok_or_else(|| Error::MissingColumn { role: "node_id", column: "node_id".into() })?;
        let ids = r
            .records()
            .map(|rec| Ok(rec?.get(col).unwrap_or_default().to_string()))
            .collect::<Result<Vec<String>>>()?;
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        lists.push((name, ids));
    }
    let report = evaluate(&lists, &labels, &EvalSpec::default(), args.tp_star);
    print!("{}", report.to_table());
    if let Some(out) = &args.out {
        report.write_csv(writer(out)?)?;
    }
    Ok(RunStatus::Completed)
}

fn expand(args: ExpandArgs) -> Result<RunStatus> {
    let layers = match (&args.layers, &args.transactions) {
        (Some(p), _) => read_layers(p)?,
        (None, Some(t)) => {
            let report = read_transactions(t, &Schema::default())?;
            aggregate(&report.transactions, args.level, &IntervalSpec::Monthly)?
        }
        (None, None) => return Err(Error::InvalidParameter("pass --layers or --transactions".into())),
    };
    let seeds: Vec<&str> = args.seeds.iter().map(String::as_str).collect();
    let subs = expand_subnetwork(&layers, &seeds)?;
    fs::create_dir_all(&args.out)?;
    let mut rings = csv::Writer::from_writer(writer(&args.out.join("rings.csv"))?);
    rings.write_record(["interval", "node_id", "ring"])?;
    for s in &subs {
        for (i, r) in s.rings.iter().enumerate() {
            rings.write_record([s.layer.label(), s.layer.nodes().id(i), &r.to_string()])?;
        }
        let name = format!("subnetwork_{}.csv", s.layer.label());
        write_layers_csv(std::slice::from_ref(&s.layer), writer(&args.out.join(name))?)?;
        info!("{}: {} nodes, {} edges", s.layer.label(), s.layer.node_count(), s.layer.edge_count());
        println!("{:<12} {:>6} nodes {:>6} edges", s.layer.label(), s.layer.node_count(), s.layer.edge_count());
    }
    rings.flush()?;
    Ok(RunStatus::Completed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::IngestStats(a) => ingest_stats(a),
        Command::Synth(c) => synth(c),
        Command::Run(a) => run(a),
        Command::Rec(a) => rec(a),
        Command::Eval(a) => eval(a),
        Command::Expand(a) => expand(a),
    };
    match result {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
