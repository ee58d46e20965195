use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use graphon::completion::{complete, completion_sweep, CompletionConfig, Radius};
use graphon::cutmetric::{cut_distance, cut_distance_labeled_with, CutOptions, DistanceMode, EXACT_RELABEL_LIMIT};
use graphon::density::{hom_density, subgraph_density_empirical, Motif};
use graphon::estimation::{
    consistency_sweep, default_bins, estimate_blockmodel_with_restarts, estimate_histogram, estimate_usvt,
    strictly_decreasing, DensityRule, Estimator,
};
use graphon::graph::lcm;
use graphon::graphons::{empirical_graphon, StepGraphon};
use graphon::io::{self, SampleSidecar};
use graphon::samplers::{BlockModel, GraphonSource, ModelSpec};
use graphon::{Error, LabeledGraph, Result};

#[derive(Parser)]
#[command(name = "graphon", version, about = "Graphon sampling, metrics, estimation and network completion")]
struct Cli {
    /// Seed for every random choice of the command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Format of tables and matrices written to disk and of printed reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random graph; writes <name>.edges and <name>.json.
    Sample(SampleArgs),
    /// Cut distance between two graphs, or labeled distance with grids.
    Distance(DistanceArgs),
    /// Homomorphism density of a motif in a graph or grid.
    Density(DensityArgs),
    /// Estimate edge probabilities of an observed graph.
    Estimate(EstimateArgs),
    /// Complete a partially observed network.
    Complete(CompleteArgs),
    /// Consistency or completion sweep.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Dense,
    Sparse,
    Sbm,
    Graphex,
}

#[derive(Args)]
struct Source {
    /// Named kernel: const:<c>, product, halfplane, halfgraph, expdecay, powerlaw:<a>.
    #[arg(long, conflicts_with = "grid")]
    kernel: Option<String>,
    /// Step graphon grid JSON.
    #[arg(long)]
    grid: Option<PathBuf>,
}

impl Source {
    fn resolve(&self) -> Result<GraphonSource> {
        match (&self.kernel, &self.grid) {
            (Some(k), None) => Ok(GraphonSource::Kernel(k.clone())),
            (None, Some(p)) => Ok(GraphonSource::Grid(io::read_grid(p)?)),
            _ => Err(usage("give exactly one of --kernel or --grid")),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(value_enum)]
    model: ModelKind,
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Species proportions.
    #[arg(long, value_delimiter = ',')]
    pi: Vec<f64>,
    /// Connection probabilities, row-major.
    #[arg(long = "B", value_delimiter = ',')]
    b: Vec<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long, default_value = "sample")]
    name: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exact,
    Heuristic,
}

#[derive(Args)]
struct DistanceArgs {
    /// Edge list, or grid JSON (`.json`) with --labeled.
    first: PathBuf,
    second: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Cut norm of the difference without relabeling.
    #[arg(long)]
    labeled: bool,
}

#[derive(Args)]
struct DensityArgs {
    /// Edge list or grid JSON (`.json`).
    input: PathBuf,
    /// edge, triangle, k<m>, cycle<m>, path<m>.
    #[arg(long, default_value = "triangle")]
    motif: String,
    /// Sampled vertex maps for motifs without a closed form.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Histogram,
    Blockmodel,
    Usvt,
}

#[derive(Args)]
struct EstimateArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Histogram groups; defaults to ceil(n^(1/3)).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Extra random starts for the blockmodel fit.
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    /// Sample metadata JSON; prints the MSE against its probabilities.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value = "estimate")]
    name: String,
}

#[derive(Args)]
struct CompleteArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    q: f64,
    /// `auto` or a fixed radius.
    #[arg(long, default_value = "auto")]
    radius: String,
    #[arg(long, default_value_t = 5)]
    min_overlap: usize,
    #[arg(long, default_value = "completed")]
    name: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Consistency,
    Completion,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_enum)]
    kind: SweepKind,
    #[command(flatten)]
    source: Source,
    /// Graph sizes (consistency).
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    /// Sparsity rule: dense, const:<rho>, or log:<c> for c ln(n)/n.
    #[arg(long, default_value = "dense")]
    rule: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Histogram)]
    method: MethodArg,
    /// Graph size (completion).
    #[arg(long)]
    n: Option<usize>,
    /// Observation probabilities (completion).
    #[arg(long, value_delimiter = ',')]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    #[arg(long, default_value_t = 0.2)]
    q: f64,
    #[arg(long, default_value = "auto")]
    radius: String,
    #[arg(long, default_value_t = 5)]
    min_overlap: usize,
    #[arg(long, default_value = "sweep")]
    name: String,
}

/// Record of the invocation, written next to outputs.
#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    args: Vec<String>,
    seed: u64,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) => 2,
        Error::SizeLimit(_) => 4,
        Error::NoData(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    fs::create_dir_all(&cli.out_dir)?;
    match &cli.cmd {
        Command::Sample(a) => cmd_sample(cli, a),
        Command::Distance(a) => cmd_distance(cli, a),
        Command::Density(a) => cmd_density(cli, a),
        Command::Estimate(a) => cmd_estimate(cli, a),
        Command::Complete(a) => cmd_complete(cli, a),
        Command::Sweep(a) => cmd_sweep(cli, a),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

fn write_record(cli: &Cli, name: &str, command: &str) -> Result<()> {
    let record = RunRecord {
        command,
        args: std::env::args().skip(1).collect(),
        seed: cli.seed,
    };
    fs::write(cli.out_dir.join(format!("{name}.run.json")), io::to_json(&record)?)?;
    Ok(())
}

fn write_matrix(cli: &Cli, stem: &str, m: &nalgebra::DMatrix<f64>) -> Result<PathBuf> {
    let path = match cli.format {
        Format::Csv => {
            let p = cli.out_dir.join(format!("{stem}.csv"));
            io::write_matrix_csv(&p, m)?;
            p
        }
        Format::Json => {
            let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
            let p = cli.out_dir.join(format!("{stem}.json"));
            fs::write(&p, io::to_json(&rows)?)?;
            p
        }
    };
    Ok(path)
}

/// Prints `key=value` lines, or one JSON object.
fn report<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    match cli.format {
        Format::Json => print!("{}", io::to_json(value)?),
        Format::Csv => {
            if let serde_json::Value::Object(map) = serde_json::to_value(value)? {
                for (k, v) in map {
                    match v {
                        serde_json::Value::String(s) => println!("{k}={s}"),
                        other => println!("{k}={other}"),
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_sample(cli: &Cli, a: &SampleArgs) -> Result<()> {
    let spec = match a.model {
        ModelKind::Dense => ModelSpec::Dense {
            graphon: a.source.resolve()?,
            n: need(a.n, "n")?,
        },
        ModelKind::Sparse => ModelSpec::Sparse {
            graphon: a.source.resolve()?,
            n: need(a.n, "n")?,
            rho: need(a.rho, "rho")?,
        },
        ModelKind::Sbm => {
            let k = a.pi.len();
            if a.b.len() != k * k {
                return Err(usage(format!("--B needs {} values for {k} species", k * k)));
            }
            let b = a.b.chunks(k.max(1)).map(<[f64]>::to_vec).collect();
            ModelSpec::Sbm {
                model: BlockModel::new(a.pi.clone(), b)?,
                n: need(a.n, "n")?,
            }
        }
        ModelKind::Graphex => ModelSpec::Graphex {
            graphon: a.source.resolve()?,
            lambda: need(a.lambda, "lambda")?,
            t_end: need(a.t_end, "T")?,
            x_max: need(a.xmax, "xmax")?,
        },
    };
    let trace = spec.sample(cli.seed)?;
    let g = &trace.graph;
    io::write_edge_list(&cli.out_dir.join(format!("{}.edges", a.name)), g)?;
    let side = SampleSidecar::new(spec, cli.seed, &trace.latents);
    fs::write(cli.out_dir.join(format!("{}.json", a.name)), io::to_json(&side)?)?;
    #[derive(Serialize)]
    struct Summary {
        n: usize,
        edges: usize,
        density: f64,
    }
    report(
        cli,
        &Summary {
            n: g.n(),
            edges: g.edge_count(),
            density: if g.n() == 0 { 0.0 } else { g.edge_density() },
        },
    )
}

fn is_grid(p: &Path) -> bool {
    p.extension().is_some_and(|e| e == "json")
}

fn load_step(p: &Path) -> Result<StepGraphon> {
    if is_grid(p) {
        io::read_grid(p)
    } else {
        empirical_graphon(&io::read_edge_list(p)?)
    }
}

fn cmd_distance(cli: &Cli, a: &DistanceArgs) -> Result<()> {
    #[derive(Serialize)]
    struct Report {
        distance: f64,
        mode: DistanceMode,
        size: usize,
        witness_s: usize,
        witness_t: usize,
    }
    let rep = if a.labeled {
        let (w1, w2) = (load_step(&a.first)?, load_step(&a.second)?);
        let res = cut_distance_labeled_with(&w1, &w2, CutOptions { restarts: 20, seed: cli.seed })?;
        Report {
            distance: res.value,
            mode: if res.exact { DistanceMode::Exact } else { DistanceMode::Heuristic },
            size: lcm(w1.k(), w2.k()),
            witness_s: res.witness_s.len(),
            witness_t: res.witness_t.len(),
        }
    } else {
        if is_grid(&a.first) || is_grid(&a.second) {
            return Err(usage("grids are only compared with --labeled"));
        }
        let (g1, g2) = (io::read_edge_list(&a.first)?, io::read_edge_list(&a.second)?);
        let mode = match a.mode {
            ModeArg::Exact => DistanceMode::Exact,
            ModeArg::Heuristic => DistanceMode::Heuristic,
            ModeArg::Auto if lcm(g1.n().max(1), g2.n().max(1)) <= EXACT_RELABEL_LIMIT => DistanceMode::Exact,
            ModeArg::Auto => DistanceMode::Heuristic,
        };
        let d = cut_distance(&g1, &g2, mode, cli.seed)?;
        Report {
            distance: d.value,
            mode: d.mode,
            size: d.size,
            witness_s: d.cut.witness_s.len(),
            witness_t: d.cut.witness_t.len(),
        }
    };
    report(cli, &rep)
}

fn cmd_density(cli: &Cli, a: &DensityArgs) -> Result<()> {
    let motif = Motif::named(&a.motif)?;
    let value = if is_grid(&a.input) {
        hom_density(&motif, &io::read_grid(&a.input)?)?
    } else {
        subgraph_density_empirical(&io::read_edge_list(&a.input)?, &motif, a.samples, cli.seed)?
    };
    #[derive(Serialize)]
    struct Report<'a> {
        motif: &'a str,
        density: f64,
    }
    report(cli, &Report { motif: &a.motif, density: value })
}

fn cmd_estimate(cli: &Cli, a: &EstimateArgs) -> Result<()> {
    let g: LabeledGraph = io::read_edge_list(&a.input)?;
    let mut rep = match a.method {
        MethodArg::Histogram => estimate_histogram(&g, a.b.unwrap_or_else(|| default_bins(g.n())))?,
        MethodArg::Blockmodel => estimate_blockmodel_with_restarts(&g, a.k, a.iters, a.restarts, cli.seed)?,
        MethodArg::Usvt => estimate_usvt(&g, a.eta)?,
    };
    if let Some(path) = &a.truth {
        let side = io::read_sidecar(path)?;
        let truth = side.model.prob_matrix(&side.latents()?)?;
        rep = rep.with_truth(&truth)?;
    }
    write_matrix(cli, &format!("{}.p_hat", a.name), rep.p_hat.as_matrix())?;
    if let Some(w) = &rep.w_hat {
        io::write_grid(&cli.out_dir.join(format!("{}.w_hat.json", a.name)), w)?;
    }
    write_record(cli, &a.name, "estimate")?;
    #[derive(Serialize)]
    struct Report {
        method: &'static str,
        n: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        mse: Option<f64>,
    }
    report(
        cli,
        &Report {
            method: rep.method,
            n: g.n(),
            mse: rep.mse,
        },
    )
}

fn parse_radius(s: &str) -> Result<Radius> {
    if s == "auto" {
        return Ok(Radius::Auto);
    }
    s.parse()
        .map(Radius::Fixed)
        .map_err(|_| usage(format!("--radius must be `auto` or a positive integer, got `{s}`")))
}

fn cmd_complete(cli: &Cli, a: &CompleteArgs) -> Result<()> {
    let obs = io::read_observations(&a.input)?;
    let cfg = CompletionConfig {
        radius: parse_radius(&a.radius)?,
        q: a.q,
        min_overlap: a.min_overlap,
        seed: cli.seed,
    };
    let done = complete(&obs, &cfg)?;
    write_matrix(cli, &a.name, done.p_hat.as_matrix())?;
    fs::write(cli.out_dir.join(format!("{}.meta.json", a.name)), io::to_json(&done.meta())?)?;
    write_record(cli, &a.name, "complete")?;
    if done.warning {
        eprintln!("warning: no radius up to the cap reached the overlap target; using r = {}", done.r);
    }
    report(cli, &done.meta())
}

fn parse_rule(s: &str) -> Result<DensityRule> {
    let num = |v: &str| v.parse::<f64>().map_err(|_| usage(format!("bad number in --rule `{s}`")));
    match s.split_once(':') {
        None if s == "dense" => Ok(DensityRule::Dense),
        Some(("const", v)) => Ok(DensityRule::Constant { rho: num(v)? }),
        Some(("log", v)) => Ok(DensityRule::LogOverN { c: num(v)? }),
        _ => Err(usage(format!("unknown --rule `{s}`"))),
    }
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let source = a.source.resolve()?;
    let w = source.build()?;
    let (text, json, column) = match a.kind {
        SweepKind::Consistency => {
            if a.n_list.is_empty() {
                return Err(usage("consistency sweeps need --n-list"));
            }
            let method = match a.method {
                MethodArg::Histogram => Estimator::Histogram { b: None },
                MethodArg::Blockmodel => Estimator::from_tag("blockmodel")?,
                MethodArg::Usvt => Estimator::Usvt { eta: 0.01 },
            };
            let rows = consistency_sweep(w.as_ref(), &a.n_list, parse_rule(&a.rule)?, method, a.seeds, cli.seed)?;
            let col: Vec<f64> = rows.iter().map(|r| r.mse_mean).collect();
            (io::format_sweep_csv(&rows), io::to_json(&rows)?, col)
        }
        SweepKind::Completion => {
            if a.p_list.is_empty() {
                return Err(usage("completion sweeps need --p-list"));
            }
            let cfg = CompletionConfig {
                radius: parse_radius(&a.radius)?,
                q: a.q,
                min_overlap: a.min_overlap,
                seed: cli.seed,
            };
            let rows = completion_sweep(w.as_ref(), need(a.n, "n")?, &a.p_list, &cfg, a.seeds, cli.seed)?;
            let col: Vec<f64> = rows.iter().map(|r| r.mse_complete).collect();
            (io::format_completion_csv(&rows), io::to_json(&rows)?, col)
        }
    };
    let (path, body) = match cli.format {
        Format::Csv => (cli.out_dir.join(format!("{}.csv", a.name)), text.clone()),
        Format::Json => (cli.out_dir.join(format!("{}.json", a.name)), json),
    };
    fs::write(path, body)?;
    write_record(cli, &a.name, "sweep")?;
    print!("{text}");
    println!(
        "monotone-decreasing: {}",
        if strictly_decreasing(&column) { "yes" } else { "no" }
    );
    Ok(())
}
