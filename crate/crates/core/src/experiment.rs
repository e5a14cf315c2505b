//! Batch experiments: instances × algorithms × trials, reported as CSV.
//!
//! A config is a flat `key = value` file:
//!
//! ```text
//! # instances: cross product of families and noise models
//! family = N, S, D
//! noise = I, II, III
//! instances = 1
//! seed = 7
//! # or: graph = a.graph, b.graph / truth = a.truth, b.truth
//! algorithms = qp, rqp:0.25, acn, exact
//! trials = 3
//! oracle = opt            # opt | truth | noisy
//! crowd_error_rate = 0.1  # noisy only
//! votes = 5               # noisy only
//! output = results.csv
//! ```
//!
//! Mistakes are counted against the graph when the oracle is `opt` and
//! against the ground-truth clustering otherwise.

use crate::algorithms::{acn_pivot, query_pivot, random_query_pivot, RunOutcome};
use crate::datagen::{
    self, apply_noise, generate_planted, Family, FamilySpec, NoiseModel, NoiseSpec,
};
use crate::exact::{solve_exact, ExactConfig, ExactResult, DEFAULT_NODE_BUDGET};
use crate::graph::{Clustering, SignedGraph};
use crate::oracle::{
    make_truth_oracle, AnyOracle, ClusteringOracle, NoisyOracle, NoisyOracleSpec, OracleKind,
};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const CSV_HEADER: [&str; 11] = [
    "instance_id",
    "family",
    "noise",
    "algorithm",
    "params",
    "oracle",
    "trial_seed",
    "mistakes",
    "queries",
    "elapsed_ms",
    "error",
];

pub const SUMMARY_HEADER: [&str; 9] = [
    "family",
    "noise",
    "algorithm",
    "params",
    "oracle",
    "runs",
    "mean_mistakes",
    "mean_queries",
    "mean_elapsed_ms",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(message.into())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    QueryPivot,
    RandomQueryPivot { p: f64 },
    Acn,
    Exact,
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::QueryPivot => "qp",
            AlgorithmSpec::RandomQueryPivot { .. } => "rqp",
            AlgorithmSpec::Acn => "acn",
            AlgorithmSpec::Exact => "exact",
        }
    }

    pub fn params(&self) -> String {
        match self {
            AlgorithmSpec::RandomQueryPivot { p } => format!("p={p}"),
            _ => String::new(),
        }
    }

    pub fn randomized(&self) -> bool {
        matches!(
            self,
            AlgorithmSpec::RandomQueryPivot { .. } | AlgorithmSpec::Acn
        )
    }

    /// Accepts `qp`, `rqp` (p = 0.25), `rqp:<p>`, `acn`, `exact`.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let spec = match (name, arg) {
            ("qp", None) => AlgorithmSpec::QueryPivot,
            ("acn", None) => AlgorithmSpec::Acn,
            ("exact", None) => AlgorithmSpec::Exact,
            ("rqp", None) => AlgorithmSpec::RandomQueryPivot { p: 0.25 },
            ("rqp", Some(p)) => {
                let p = p.strip_prefix("p=").unwrap_or(p);
                let p: f64 = p
                    .parse()
                    .map_err(|_| invalid(format!("rqp probability `{p}` is not a number")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("rqp probability {p} outside [0, 1]")));
                }
                AlgorithmSpec::RandomQueryPivot { p }
            }
            _ => return Err(invalid(format!("unknown algorithm `{s}`"))),
        };
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleRegime {
    Optimal,
    Truth,
    Noisy { rate: f64, votes: u32 },
}

impl OracleRegime {
    pub fn name(&self) -> &'static str {
        match self {
            OracleRegime::Optimal => "opt",
            OracleRegime::Truth => "truth",
            OracleRegime::Noisy { .. } => "noisy",
        }
    }

    pub fn label(&self) -> String {
        match self {
            OracleRegime::Noisy { rate, votes } => format!("noisy(rate={rate};votes={votes})"),
            other => other.name().to_string(),
        }
    }

    pub fn measures_against_graph(&self) -> bool {
        matches!(self, OracleRegime::Optimal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Synthetic {
        families: Vec<String>,
        /// `None` means the noiseless planted graph.
        noises: Vec<Option<NoiseModel>>,
        n: Option<usize>,
        flips: Option<u64>,
        instances: u32,
    },
    Files {
        graphs: Vec<PathBuf>,
        truths: Vec<PathBuf>,
        weighted: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: InstanceSource,
    pub algorithms: Vec<AlgorithmSpec>,
    pub oracle: OracleRegime,
    pub trials: u32,
    pub seed: u64,
    /// Fixed crowd seed; when absent each trial draws a fresh crowd.
    pub crowd_seed: Option<u64>,
    pub budget: u64,
    pub output: Option<PathBuf>,
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| invalid(format!("`{key}` has invalid value `{value}`")))
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config = Self::parse(&text)?;
        // relative instance paths resolve against the config's directory
        if let (Some(dir), InstanceSource::Files { graphs, truths, .. }) =
            (path.parent(), &mut config.source)
        {
            for p in graphs.iter_mut().chain(truths.iter_mut()) {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: "expected `key = value`".to_string(),
            })?;
            let key = key.trim().to_string();
            if kv
                .insert(key.clone(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        let mut take = |key: &str| kv.remove(key).map(|(_, v)| v);

        let algorithms = take("algorithms")
            .map(|v| split_list(&v))
            .unwrap_or_default()
            .iter()
            .map(|a| AlgorithmSpec::parse(a))
            .collect::<Result<Vec<_>, _>>()?;
        if algorithms.is_empty() {
            return Err(invalid("`algorithms` must list at least one algorithm"));
        }

        let oracle = match take("oracle").as_deref().unwrap_or("opt") {
            "opt" => OracleRegime::Optimal,
            "truth" => OracleRegime::Truth,
            "noisy" => {
                let rate = take("crowd_error_rate")
                    .map(|v| parse_num::<f64>("crowd_error_rate", &v))
                    .transpose()?
                    .unwrap_or(0.1);
                let votes = take("votes")
                    .map(|v| parse_num::<u32>("votes", &v))
                    .transpose()?
                    .unwrap_or(5);
                if votes % 2 == 0 {
                    return Err(invalid(format!("`votes` must be odd, got {votes}")));
                }
                if !(0.0..=1.0).contains(&rate) {
                    return Err(invalid(format!("`crowd_error_rate` {rate} outside [0, 1]")));
                }
                OracleRegime::Noisy { rate, votes }
            }
            other => return Err(invalid(format!("unknown oracle `{other}`"))),
        };

        let graphs = take("graph").map(|v| split_list(&v)).unwrap_or_default();
        let weighted = take("weighted").map(|v| split_list(&v)).unwrap_or_default();
        let truths: Vec<PathBuf> = take("truth")
            .map(|v| split_list(&v))
            .unwrap_or_default()
            .into_iter()
            .map(PathBuf::from)
            .collect();
        let family = take("family");
        let noise = take("noise");
        let n = take("n").map(|v| parse_num::<usize>("n", &v)).transpose()?;
        let flips = take("L").map(|v| parse_num::<u64>("L", &v)).transpose()?;
        let instances = take("instances")
            .map(|v| parse_num::<u32>("instances", &v))
            .transpose()?
            .unwrap_or(1);

        let source = match (family, graphs.is_empty(), weighted.is_empty()) {
            (Some(family), true, true) => {
                let families = split_list(&family);
                for f in &families {
                    Family::by_name(f, n).map_err(|e| invalid(e.to_string()))?;
                }
                let noises = match noise {
                    None => vec![None],
                    Some(v) => split_list(&v)
                        .iter()
                        .map(|s| match s.as_str() {
                            "none" => Ok(None),
                            s => s
                                .parse()
                                .map(Some)
                                .map_err(|e: datagen::DatagenError| invalid(e.to_string())),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                };
                if families.is_empty() || noises.is_empty() {
                    return Err(invalid("`family` and `noise` must not be empty"));
                }
                if instances == 0 {
                    return Err(invalid("`instances` must be positive"));
                }
                InstanceSource::Synthetic {
                    families,
                    noises,
                    n,
                    flips,
                    instances,
                }
            }
            (None, false, true) | (None, true, false) => {
                let is_weighted = graphs.is_empty();
                let graphs: Vec<PathBuf> = graphs
                    .into_iter()
                    .chain(weighted)
                    .map(PathBuf::from)
                    .collect();
                if !truths.is_empty() && truths.len() != graphs.len() {
                    return Err(invalid("`truth` must list one file per graph"));
                }
                InstanceSource::Files {
                    graphs,
                    truths: truths.clone(),
                    weighted: is_weighted,
                }
            }
            (None, true, true) => {
                return Err(invalid("no instance source: set `family` or `graph`"))
            }
            _ => return Err(invalid("set exactly one of `family`, `graph`, `weighted`")),
        };
        if let InstanceSource::Files { truths, .. } = &source {
            if truths.is_empty() && !matches!(oracle, OracleRegime::Optimal) {
                return Err(invalid(format!(
                    "oracle `{}` needs `truth` files",
                    oracle.name()
                )));
            }
        }

        let trials = take("trials")
            .map(|v| parse_num::<u32>("trials", &v))
            .transpose()?
            .unwrap_or(3);
        if trials == 0 {
            return Err(invalid("`trials` must be positive"));
        }
        let seed = take("seed")
            .map(|v| parse_num::<u64>("seed", &v))
            .transpose()?
            .unwrap_or_else(|| crate::rng::env_seed(0));
        let crowd_seed = take("crowd_seed")
            .map(|v| parse_num::<u64>("crowd_seed", &v))
            .transpose()?;
        let budget = take("budget")
            .map(|v| parse_num::<u64>("budget", &v))
            .transpose()?
            .unwrap_or(DEFAULT_NODE_BUDGET);
        let output = take("output").map(PathBuf::from);

        if let Some((key, (line, _))) = kv.into_iter().next() {
            return Err(ConfigError::Syntax {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        Ok(ExperimentConfig {
            source,
            algorithms,
            oracle,
            trials,
            seed,
            crowd_seed,
            budget,
            output,
        })
    }
}

/// One graph with its optional ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub family: String,
    pub noise: String,
    pub graph: SignedGraph,
    pub truth: Option<Clustering>,
}

/// Builds every instance the config describes, in config order.
pub fn build_instances(config: &ExperimentConfig) -> Result<Vec<Instance>, String> {
    match &config.source {
        InstanceSource::Synthetic {
            families,
            noises,
            n,
            flips,
            instances,
        } => {
            let mut out = Vec::new();
            for family in families {
                for noise in noises {
                    for i in 0..*instances {
                        let seed = config.seed.wrapping_add(i as u64);
                        let fam = Family::by_name(family, *n).map_err(|e| e.to_string())?;
                        let large = fam.is_large();
                        let (planted, truth) = generate_planted(&FamilySpec::new(fam, seed))
                            .map_err(|e| e.to_string())?;
                        let graph = match noise {
                            None => planted,
                            Some(model) => {
                                let mut spec = if large {
                                    NoiseSpec::large(*model, planted.n(), seed)
                                } else {
                                    NoiseSpec::small(*model, seed)
                                };
                                if let Some(l) = flips {
                                    spec.flips = *l;
                                }
                                apply_noise(&planted, &truth, &spec).map_err(|e| e.to_string())?
                            }
                        };
                        let noise_name = noise.map_or("none", NoiseModel::name).to_string();
                        out.push(Instance {
                            id: format!("{family}-{noise_name}-{i}"),
                            family: family.clone(),
                            noise: noise_name,
                            graph,
                            truth: Some(truth),
                        });
                    }
                }
            }
            Ok(out)
        }
        InstanceSource::Files {
            graphs,
            truths,
            weighted,
        } => {
            let mut out = Vec::new();
            for (i, path) in graphs.iter().enumerate() {
                let graph = if *weighted {
                    datagen::read_weighted(path)
                } else {
                    datagen::read_graph(path)
                }
                .map_err(|e| format!("{}: {e}", path.display()))?;
                let truth = match truths.get(i) {
                    Some(t) => {
                        let c = datagen::read_clustering(t)
                            .map_err(|e| format!("{}: {e}", t.display()))?;
                        if c.n() != graph.n() {
                            return Err(format!(
                                "{}: truth covers {} vertices, graph has {}",
                                t.display(),
                                c.n(),
                                graph.n()
                            ));
                        }
                        Some(c)
                    }
                    None => None,
                };
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| format!("file{i}"));
                out.push(Instance {
                    id,
                    family: "file".to_string(),
                    noise: "file".to_string(),
                    graph,
                    truth,
                });
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance_id: String,
    pub family: String,
    pub noise: String,
    pub algorithm: String,
    pub params: String,
    pub oracle: String,
    pub trial_seed: u64,
    pub mistakes: Option<u64>,
    pub queries: Option<u64>,
    pub elapsed_ms: f64,
    pub error: Option<String>,
}

impl RunRecord {
    fn fields(&self) -> [String; 11] {
        [
            self.instance_id.clone(),
            self.family.clone(),
            self.noise.clone(),
            self.algorithm.clone(),
            self.params.clone(),
            self.oracle.clone(),
            self.trial_seed.to_string(),
            self.mistakes.map(|m| m.to_string()).unwrap_or_default(),
            self.queries.map(|q| q.to_string()).unwrap_or_default(),
            format!("{:.3}", self.elapsed_ms),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: String,
    pub noise: String,
    pub algorithm: String,
    pub params: String,
    pub oracle: String,
    pub runs: usize,
    pub mean_mistakes: f64,
    pub mean_queries: f64,
    pub mean_elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record(r.fields())?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }

    pub fn summary_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SUMMARY_HEADER)?;
        for s in &self.summary {
            w.write_record([
                s.family.clone(),
                s.noise.clone(),
                s.algorithm.clone(),
                s.params.clone(),
                s.oracle.clone(),
                s.runs.to_string(),
                format!("{:.3}", s.mean_mistakes),
                format!("{:.3}", s.mean_queries),
                format!("{:.3}", s.mean_elapsed_ms),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }
}

/// Companion path for the summary table: `results.csv` → `results.summary.csv`.
pub fn summary_path(output: &Path) -> PathBuf {
    output.with_extension("summary.csv")
}

struct Job<'a> {
    instance_index: usize,
    instance: &'a Instance,
    algorithm_index: usize,
    algorithm: AlgorithmSpec,
    trial_seed: u64,
    optimum: Option<&'a Optimum>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, String> {
    let instances = build_instances(config)?;
    Ok(run_on_instances(config, &instances))
}

pub fn run_on_instances(config: &ExperimentConfig, instances: &[Instance]) -> ExperimentReport {
    let exact_config = ExactConfig::with_budget(config.budget);
    let needs_optimum = matches!(config.oracle, OracleRegime::Optimal)
        || config.algorithms.contains(&AlgorithmSpec::Exact);
    let optima: Vec<Option<Optimum>> = instances
        .par_iter()
        .map(|inst| needs_optimum.then(|| Optimum::solve(&inst.graph, &exact_config)))
        .collect();

    let mut jobs = Vec::new();
    for (ii, inst) in instances.iter().enumerate() {
        for (ai, &alg) in config.algorithms.iter().enumerate() {
            let repeat = alg.randomized()
                || matches!(config.oracle, OracleRegime::Noisy { .. })
                    && config.crowd_seed.is_none();
            let trials = if repeat && alg != AlgorithmSpec::Exact {
                config.trials
            } else {
                1
            };
            for t in 0..trials {
                jobs.push(Job {
                    instance_index: ii,
                    instance: inst,
                    algorithm_index: ai,
                    algorithm: alg,
                    trial_seed: config.seed.wrapping_add(t as u64),
                    optimum: optima[ii].as_ref(),
                });
            }
        }
    }

    let mut keyed: Vec<((usize, usize, u64), RunRecord)> = jobs
        .par_iter()
        .map(|job| {
            (
                (job.instance_index, job.algorithm_index, job.trial_seed),
                run_job(config, job),
            )
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    let records: Vec<RunRecord> = keyed.into_iter().map(|(_, r)| r).collect();
    let summary = summarize(&records);
    ExperimentReport { records, summary }
}

fn run_job(config: &ExperimentConfig, job: &Job<'_>) -> RunRecord {
    let settings = RunSettings {
        oracle: config.oracle,
        crowd_seed: config.crowd_seed,
    };
    run_single(
        job.instance,
        job.algorithm,
        &settings,
        job.trial_seed,
        job.optimum,
    )
    .0
}

/// Oracle regime and crowd seed shared by every run of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub oracle: OracleRegime,
    pub crowd_seed: Option<u64>,
}

/// Runs one algorithm once. `optimum` must be supplied for the `opt` regime
/// and for the exact algorithm, whose elapsed time includes the solve. The clustering is returned on success.
pub fn run_single(
    inst: &Instance,
    algorithm: AlgorithmSpec,
    settings: &RunSettings,
    trial_seed: u64,
    optimum: Option<&Optimum>,
) -> (RunRecord, Option<Clustering>) {
    let mut record = RunRecord {
        instance_id: inst.id.clone(),
        family: inst.family.clone(),
        noise: inst.noise.clone(),
        algorithm: algorithm.name().to_string(),
        params: algorithm.params(),
        oracle: settings.oracle.label(),
        trial_seed,
        mistakes: None,
        queries: None,
        elapsed_ms: 0.0,
        error: None,
    };
    let start = Instant::now();
    let result = execute(inst, algorithm, settings, trial_seed, optimum);
    record.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if algorithm == AlgorithmSpec::Exact {
        record.elapsed_ms += optimum.map_or(0.0, |o| o.elapsed_ms);
    }
    let clustering = match result {
        Ok((clustering, queries)) => {
            let mistakes = if settings.oracle.measures_against_graph() {
                crate::graph::count_disagreements(&inst.graph, &clustering)
                    .map_err(|e| e.to_string())
            } else {
                match inst.truth.as_ref() {
                    Some(truth) => truth.pair_distance(&clustering).map_err(|e| e.to_string()),
                    None => Err("mistakes against truth need a truth clustering".to_string()),
                }
            };
            match mistakes {
                Ok(m) => {
                    record.mistakes = Some(m);
                    record.queries = Some(queries);
                    Some(clustering)
                }
                Err(e) => {
                    record.error = Some(e);
                    None
                }
            }
        }
        Err(e) => {
            record.error = Some(e);
            None
        }
    };
    (record, clustering)
}

/// An exact solve shared by every run on one instance.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub result: Result<ExactResult, String>,
    pub elapsed_ms: f64,
}

impl Optimum {
    pub fn solve(g: &SignedGraph, config: &ExactConfig) -> Self {
        let start = Instant::now();
        let result = solve_exact(g, config).map_err(|e| e.to_string());
        Optimum {
            result,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

fn optimum_of(optimum: Option<&Optimum>) -> Result<&ExactResult, String> {
    optimum
        .ok_or_else(|| "exact optimum not computed".to_string())?
        .result
        .as_ref()
        .map_err(Clone::clone)
}

fn build_oracle(
    inst: &Instance,
    settings: &RunSettings,
    trial_seed: u64,
    optimum: Option<&Optimum>,
) -> Result<AnyOracle, String> {
    match settings.oracle {
        OracleRegime::Optimal => Ok(AnyOracle::Clustering(ClusteringOracle::new(
            optimum_of(optimum)?.clustering.clone(),
            OracleKind::Optimal,
        ))),
        OracleRegime::Truth => {
            let truth = inst
                .truth
                .clone()
                .ok_or("truth oracle needs a truth clustering")?;
            Ok(AnyOracle::Clustering(make_truth_oracle(truth)))
        }
        OracleRegime::Noisy { rate, votes } => {
            let truth = inst
                .truth
                .clone()
                .ok_or("noisy oracle needs a truth clustering")?;
            let noisy = NoisyOracle::new(NoisyOracleSpec {
                base: truth,
                per_answer_error_rate: rate,
                votes,
                seed: settings.crowd_seed.unwrap_or(trial_seed),
            })
            .map_err(|e| e.to_string())?;
            Ok(AnyOracle::Noisy(noisy))
        }
    }
}

fn execute(
    inst: &Instance,
    algorithm: AlgorithmSpec,
    settings: &RunSettings,
    trial_seed: u64,
    optimum: Option<&Optimum>,
) -> Result<(Clustering, u64), String> {
    let g = &inst.graph;
    let outcome: RunOutcome = match algorithm {
        AlgorithmSpec::Exact => return Ok((optimum_of(optimum)?.clustering.clone(), 0)),
        AlgorithmSpec::Acn => acn_pivot(g, trial_seed),
        AlgorithmSpec::QueryPivot => {
            let mut oracle = build_oracle(inst, settings, trial_seed, optimum)?;
            query_pivot(g, &mut oracle).map_err(|e| e.to_string())?
        }
        AlgorithmSpec::RandomQueryPivot { p } => {
            let mut oracle = build_oracle(inst, settings, trial_seed, optimum)?;
            random_query_pivot(g, &mut oracle, p, trial_seed).map_err(|e| e.to_string())?
        }
    };
    Ok((outcome.clustering, outcome.queries))
}

fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    // first-appearance order of cells
    let mut order: Vec<(String, String, String, String, String)> = Vec::new();
    let mut acc: BTreeMap<(String, String, String, String, String), (usize, f64, f64, f64)> =
        BTreeMap::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        let key = (
            r.family.clone(),
            r.noise.clone(),
            r.algorithm.clone(),
            r.params.clone(),
            r.oracle.clone(),
        );
        let e = acc.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (0, 0.0, 0.0, 0.0)
        });
        e.0 += 1;
        e.1 += r.mistakes.unwrap_or(0) as f64;
        e.2 += r.queries.unwrap_or(0) as f64;
        e.3 += r.elapsed_ms;
    }
    order
        .into_iter()
        .map(|key| {
            let (runs, m, q, t) = acc[&key];
            let k = runs as f64;
            SummaryRow {
                family: key.0,
                noise: key.1,
                algorithm: key.2,
                params: key.3,
                oracle: key.4,
                runs,
                mean_mistakes: m / k,
                mean_queries: q / k,
                mean_elapsed_ms: t / k,
            }
        })
        .collect()
}

impl fmt::Display for SummaryRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<6} {:<5} {:<6} {:<8} {:<24} runs={:<4} mistakes={:<10.3} queries={:<10.3} ms={:.3}",
            self.family,
            self.noise,
            self.algorithm,
            self.params,
            self.oracle,
            self.runs,
            self.mean_mistakes,
            self.mean_queries,
            self.mean_elapsed_ms
        )
    }
}
