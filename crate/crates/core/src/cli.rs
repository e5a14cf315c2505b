//! `ccq` command-line front end: `generate`, `solve`, `experiment`.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 runtime failure.

use crate::datagen::{
    self, apply_noise, generate_planted, Family, FamilySpec, NoiseModel, NoiseSpec,
};
use crate::exact::{ExactConfig, DEFAULT_NODE_BUDGET};
use crate::experiment::{
    run_experiment, run_single, summary_path, AlgorithmSpec, ExperimentConfig, Instance, Optimum,
    OracleRegime, RunSettings,
};
use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "ccq", version, about = "Query-assisted correlation clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a planted instance and write `<out>.graph` and `<out>.truth`.
    Generate(GenerateArgs),
    /// Cluster one graph and print a result line.
    Solve(SolveArgs),
    /// Run a batch experiment from a config file and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    /// N, S, D, skew, or sqrtn
    #[arg(long)]
    family: String,
    /// I, II, III, or none
    #[arg(long, default_value = "none")]
    noise: String,
    /// Flip budget; defaults to 100, or 10% of all pairs for skew/sqrtn
    #[arg(long = "L")]
    flips: Option<u64>,
    /// Vertex count for skew/sqrtn
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, env = "CCQ_SEED", default_value_t = 0)]
    seed: u64,
    /// Output path prefix
    #[arg(long, default_value = "instance")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgArg {
    Qp,
    Rqp,
    Acn,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    Opt,
    Truth,
    Noisy,
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    /// Signed graph file
    #[arg(
        long,
        required_unless_present = "weighted",
        conflicts_with = "weighted"
    )]
    graph: Option<PathBuf>,
    /// Weighted graph file, rounded at 1/2
    #[arg(long)]
    weighted: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "qp")]
    alg: AlgArg,
    #[arg(long, value_enum, default_value = "opt")]
    oracle: OracleArg,
    /// Ground-truth clustering file (truth and noisy oracles)
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Per-answer error rate of the noisy oracle
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    /// Votes per noisy answer (odd)
    #[arg(long, default_value_t = 5)]
    votes: u32,
    /// Engagement probability for rqp
    #[arg(long, default_value_t = 0.25)]
    p: f64,
    #[arg(long, env = "CCQ_SEED", default_value_t = 0)]
    seed: u64,
    /// Crowd seed for the noisy oracle; defaults to --seed
    #[arg(long)]
    crowd_seed: Option<u64>,
    /// Exact-solver node budget
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Write the clustering here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ExperimentArgs {
    config: PathBuf,
    /// CSV output; overrides the config's `output`, `-` for stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing reports
/// to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{}", e.render()).map_err(runtime)
                }
                _ => Err(CliError::Usage(e.render().to_string())),
            };
        }
    };
    match cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Experiment(a) => experiment(a, out),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let family = Family::by_name(&a.family, a.n).map_err(usage)?;
    let noise: Option<NoiseModel> = match a.noise.as_str() {
        "none" => None,
        s => Some(s.parse().map_err(usage)?),
    };
    let large = family.is_large();
    let (planted, truth) = generate_planted(&FamilySpec::new(family, a.seed)).map_err(usage)?;
    let graph = match noise {
        None => planted,
        Some(model) => {
            let mut spec = if large {
                NoiseSpec::large(model, planted.n(), a.seed)
            } else {
                NoiseSpec::small(model, a.seed)
            };
            if let Some(l) = a.flips {
                spec.flips = l;
            }
            apply_noise(&planted, &truth, &spec).map_err(runtime)?
        }
    };
    let graph_path = with_suffix(&a.out, ".graph");
    let truth_path = with_suffix(&a.out, ".truth");
    datagen::write_graph(&graph, &graph_path).map_err(runtime)?;
    datagen::write_clustering(&truth, &truth_path).map_err(runtime)?;
    writeln!(
        out,
        "wrote {} ({} vertices, {} + edges) and {}",
        graph_path.display(),
        graph.n(),
        graph.plus_edge_count(),
        truth_path.display()
    )
    .map_err(runtime)
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let algorithm = match a.alg {
        AlgArg::Qp => AlgorithmSpec::QueryPivot,
        AlgArg::Rqp => {
            if !(0.0..=1.0).contains(&a.p) {
                return Err(usage(format!("--p must lie in [0, 1], got {}", a.p)));
            }
            AlgorithmSpec::RandomQueryPivot { p: a.p }
        }
        AlgArg::Acn => AlgorithmSpec::Acn,
        AlgArg::Exact => AlgorithmSpec::Exact,
    };
    let oracle = match a.oracle {
        OracleArg::Opt => OracleRegime::Optimal,
        OracleArg::Truth => OracleRegime::Truth,
        OracleArg::Noisy => {
            if a.votes.is_multiple_of(2) {
                return Err(usage(format!("--votes must be odd, got {}", a.votes)));
            }
            if !(0.0..=1.0).contains(&a.rate) {
                return Err(usage(format!("--rate must lie in [0, 1], got {}", a.rate)));
            }
            OracleRegime::Noisy {
                rate: a.rate,
                votes: a.votes,
            }
        }
    };
    if !oracle.measures_against_graph() && a.truth.is_none() {
        return Err(usage(format!("--oracle {} needs --truth", oracle.name())));
    }
    let (path, graph) = match (&a.graph, &a.weighted) {
        (Some(p), _) => (p, datagen::read_graph(p).map_err(runtime)?),
        (None, Some(p)) => (p, datagen::read_weighted(p).map_err(runtime)?),
        (None, None) => return Err(usage("one of --graph or --weighted is required")),
    };
    let truth = match &a.truth {
        Some(p) => {
            let c = datagen::read_clustering(p).map_err(runtime)?;
            if c.n() != graph.n() {
                return Err(runtime(format!(
                    "{}: truth covers {} vertices, graph has {}",
                    p.display(),
                    c.n(),
                    graph.n()
                )));
            }
            Some(c)
        }
        None => None,
    };
    let needs_optimum = matches!(oracle, OracleRegime::Optimal) && algorithm != AlgorithmSpec::Acn
        || algorithm == AlgorithmSpec::Exact;
    let optimum =
        needs_optimum.then(|| Optimum::solve(&graph, &ExactConfig::with_budget(a.budget)));
    if let Some(Err(e)) = optimum.as_ref().map(|o| &o.result) {
        return Err(CliError::Runtime(e.clone()));
    }
    let instance = Instance {
        id: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        family: "file".to_string(),
        noise: "file".to_string(),
        graph,
        truth,
    };
    let settings = RunSettings {
        oracle,
        crowd_seed: a.crowd_seed,
    };
    let (record, clustering) =
        run_single(&instance, algorithm, &settings, a.seed, optimum.as_ref());
    if let Some(e) = record.error {
        return Err(CliError::Runtime(e));
    }
    writeln!(
        out,
        "instance={} algorithm={} params={} oracle={} seed={} mistakes={} queries={} elapsed_ms={:.3}",
        record.instance_id,
        record.algorithm,
        if record.params.is_empty() { "-" } else { &record.params },
        record.oracle,
        record.trial_seed,
        record.mistakes.unwrap_or_default(),
        record.queries.unwrap_or_default(),
        record.elapsed_ms
    )
    .map_err(runtime)?;
    if let (Some(p), Some(c)) = (&a.out, clustering) {
        datagen::write_clustering(&c.canonicalize(), p).map_err(runtime)?;
    }
    Ok(())
}

fn experiment(a: ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = ExperimentConfig::from_file(&a.config).map_err(|e| match e {
        crate::experiment::ConfigError::Io { .. } => runtime(e),
        other => usage(other),
    })?;
    let report = run_experiment(&config).map_err(runtime)?;
    let csv = report.to_csv().map_err(runtime)?;
    let summary = report.summary_csv().map_err(runtime)?;
    let target = a.out.or_else(|| config.output.clone());
    match target.as_deref() {
        Some(p) if p != Path::new("-") => {
            let write = |path: &Path, text: &str| {
                std::fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
            };
            write(p, &csv)?;
            write(&summary_path(p), &summary)?;
            for row in &report.summary {
                writeln!(out, "{row}").map_err(runtime)?;
            }
        }
        _ => {
            write!(out, "{csv}").map_err(runtime)?;
            writeln!(out).map_err(runtime)?;
            write!(out, "{summary}").map_err(runtime)?;
        }
    }
    match report.failures() {
        0 => Ok(()),
        k => Err(CliError::Runtime(format!(
            "{k} of {} runs failed; see the error column",
            report.records.len()
        ))),
    }
}
