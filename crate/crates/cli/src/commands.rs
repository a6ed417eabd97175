use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use infocov::coverage::{sample_coverage, EnumerationCap, ExactOracle};
use infocov::generate::{self, FIXTURE_NAMES};
use infocov::selection::SelectionError;
use infocov::{
    baseline_out_degree, baseline_random, effective_degree_rank, exhaustive_optimal, lazy_greedy,
    plain_greedy, CoverageConfig, DirectedGraph, Evaluator, Model, SeedSet, SelectionResult,
    WeightScheme,
};
use serde::Serialize;
use sha1::{Digest, Sha1};

use crate::output::{self, Estimate, Row};
use crate::{
    Algorithm, BenchmarkArgs, EstimatorArgs, EvaluateArgs, EvaluatorArg, GenerateArgs,
    GeneratorKind, GraphArgs, SelectArgs,
};

pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub sha1: String,
}

#[derive(Serialize)]
pub struct GraphInfo {
    path: String,
    /// Git blob hash of the file contents.
    sha1: String,
    nodes: usize,
    edges: usize,
}

/// Same digest `git hash-object` prints.
fn git_blob_sha1(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

fn parse_weights(spec: &str, seed: u64) -> Result<WeightScheme> {
    if spec == "trivalency" {
        return Ok(WeightScheme::Trivalency { seed });
    }
    spec.parse()
        .with_context(|| format!("--weights: `{spec}` is not uniform:<p>, trivalency or wc"))
}

pub fn load_graph(args: &GraphArgs, seed: u64) -> Result<LoadedGraph> {
    let path = &args.graph;
    let bytes =
        fs::read(path).with_context(|| format!("--graph: cannot read {}", path.display()))?;
    let mut graph =
        DirectedGraph::load(&bytes[..]).with_context(|| format!("--graph: {}", path.display()))?;
    if let Some(spec) = &args.weights {
        graph = graph.assign_weights(parse_weights(spec, seed)?)?;
    }
    let model: Model = args.model.into();
    infocov::coverage::check_model_parameters(&graph, model)
        .with_context(|| format!("--weights: parameters missing or invalid for --model {model}"))?;
    Ok(LoadedGraph {
        graph,
        sha1: git_blob_sha1(&bytes),
    })
}

fn graph_info(args: &GraphArgs, loaded: &LoadedGraph) -> GraphInfo {
    GraphInfo {
        path: args.graph.display().to_string(),
        sha1: loaded.sha1.clone(),
        nodes: loaded.graph.node_count(),
        edges: loaded.graph.edge_count(),
    }
}

pub fn coverage_config(est: &EstimatorArgs) -> Result<CoverageConfig> {
    if !(0.0..=1.0).contains(&est.lambda) {
        bail!("--lambda: {} is outside [0, 1]", est.lambda);
    }
    if est.replications == 0 {
        bail!("--replications: must be at least 1");
    }
    Ok(CoverageConfig::new(est.lambda, est.replications, est.seed)?)
}

fn evaluator(arg: EvaluatorArg) -> Evaluator {
    match arg {
        EvaluatorArg::Mc => Evaluator::MonteCarlo,
        EvaluatorArg::Exact => Evaluator::Exact(EnumerationCap::default()),
    }
}

fn run_selector(
    g: &DirectedGraph,
    model: Model,
    algorithm: Algorithm,
    k: usize,
    cfg: &CoverageConfig,
    evaluator: Evaluator,
) -> Result<SelectionResult, SelectionError> {
    match algorithm {
        Algorithm::LazyGreedy => lazy_greedy(g, model, k, cfg, evaluator),
        Algorithm::PlainGreedy => plain_greedy(g, model, k, cfg, evaluator),
        Algorithm::EffectiveDegree => effective_degree_rank(g, k),
        Algorithm::OutDegree => baseline_out_degree(g, k),
        Algorithm::Random => baseline_random(g, k, cfg.master_seed),
        Algorithm::Exhaustive => exhaustive_optimal(g, model, k, cfg.lambda),
    }
}

/// Objective and its `E|A|`, `E|L|` split for a seed set.
pub struct Evaluation {
    pub objective: Estimate,
    pub active: Estimate,
    pub informed: Estimate,
    pub replications: usize,
}

pub fn evaluate_seeds(
    g: &DirectedGraph,
    model: Model,
    seeds: &SeedSet,
    cfg: &CoverageConfig,
    exact: bool,
) -> Result<Evaluation> {
    if exact {
        let d = ExactOracle::new(g, model)?.decomposition(seeds.as_slice());
        return Ok(Evaluation {
            objective: Estimate::exact(d.coverage(cfg.lambda)),
            active: Estimate::exact(d.active),
            informed: Estimate::exact(d.informed),
            replications: 0,
        });
    }
    let sample = sample_coverage(g, seeds, model, cfg.replications, cfg.master_seed)?;
    Ok(Evaluation {
        objective: sample.estimate(cfg.lambda).into(),
        active: sample.active().into(),
        informed: sample.informed().into(),
        replications: cfg.replications,
    })
}

#[derive(Serialize)]
struct RunConfig<'a> {
    model: String,
    weights: Option<&'a str>,
    algorithms: Vec<&'static str>,
    k: &'a [usize],
    lambda: f64,
    replications: usize,
    seed: u64,
    heldout_seed: u64,
    evaluator: &'static str,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    config: RunConfig<'a>,
    graph: GraphInfo,
    rows: Vec<Row>,
}

fn selection_rows(args: &SelectArgs, loaded: &LoadedGraph) -> Result<Vec<Row>> {
    let g = &loaded.graph;
    let model: Model = args.graph.model.into();
    let cfg = coverage_config(&args.estimator)?;
    let held_out = cfg.with_seed(cfg.master_seed.wrapping_add(1));
    let exact = args.evaluator == EvaluatorArg::Exact;
    let evaluator = evaluator(args.evaluator);
    let mut rows = Vec::new();
    for &algorithm in &args.algorithms {
        for &k in &args.k {
            let started = Instant::now();
            let result =
                run_selector(g, model, algorithm, k, &cfg, evaluator).map_err(|e| match e {
                    SelectionError::KTooLarge { .. } => anyhow::anyhow!("--k: {e}"),
                    other => anyhow::anyhow!("--algo {}: {other}", algorithm.name()),
                })?;
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let seeds = SeedSet::new(g, result.seeds.iter().copied())?;
            let eval = evaluate_seeds(g, model, &seeds, &held_out, exact)?;
            rows.push(Row {
                algorithm: algorithm.name(),
                k,
                lambda: cfg.lambda,
                seeds: result
                    .seeds
                    .iter()
                    .map(|&v| g.label(v).to_string())
                    .collect(),
                objective: eval.objective.mean,
                std_error: eval.objective.std_error,
                active: eval.active.mean,
                active_std_error: eval.active.std_error,
                informed: eval.informed.mean,
                informed_std_error: eval.informed.std_error,
                evaluations: result.total_evaluations(),
                beta: result.beta(),
                wall_ms: args.timings.then_some(wall_ms),
            });
        }
    }
    Ok(rows)
}

fn report<'a>(
    command: &'static str,
    args: &'a SelectArgs,
    loaded: &LoadedGraph,
    rows: Vec<Row>,
) -> Report<'a> {
    Report {
        command,
        config: RunConfig {
            model: Model::from(args.graph.model).to_string(),
            weights: args.graph.weights.as_deref(),
            algorithms: args.algorithms.iter().map(|a| a.name()).collect(),
            k: &args.k,
            lambda: args.estimator.lambda,
            replications: args.estimator.replications,
            seed: args.estimator.seed,
            heldout_seed: args.estimator.seed.wrapping_add(1),
            evaluator: match args.evaluator {
                EvaluatorArg::Mc => "mc",
                EvaluatorArg::Exact => "exact",
            },
        },
        graph: graph_info(&args.graph, loaded),
        rows,
    }
}

pub fn select(args: &SelectArgs) -> Result<()> {
    let loaded = load_graph(&args.graph, args.estimator.seed)?;
    let rows = selection_rows(args, &loaded)?;
    match args.output.format {
        crate::Format::Csv => output::write_csv(
            args.output.out.as_deref(),
            &rows,
            output::SELECT_COLUMNS,
            args.timings,
        ),
        crate::Format::Json => output::write_json(
            args.output.out.as_deref(),
            &report("select", args, &loaded, rows),
        ),
    }
}

pub fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    let select = &args.select;
    if select.algorithms.is_empty() {
        bail!("--algo: benchmark needs at least one algorithm");
    }
    let loaded = load_graph(&select.graph, select.estimator.seed)?;
    let rows = selection_rows(select, &loaded)?;
    match select.output.format {
        crate::Format::Csv => output::write_csv(
            select.output.out.as_deref(),
            &rows,
            output::BENCHMARK_COLUMNS,
            select.timings,
        )?,
        crate::Format::Json => output::write_json(
            select.output.out.as_deref(),
            &report("benchmark", select, &loaded, rows.clone()),
        )?,
    }
    if let Some(path) = &args.summary {
        output::write_json(Some(path), &report("benchmark", select, &loaded, rows))?;
    }
    Ok(())
}

fn read_seed_labels(path: &Path, g: &DirectedGraph) -> Result<SeedSet> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("--seeds: cannot read {}", path.display()))?;
    let mut nodes = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for label in line.split_whitespace() {
            let v = g
                .node_by_label(label)
                .with_context(|| format!("--seeds: unknown node label `{label}`"))?;
            nodes.push(v);
        }
    }
    SeedSet::new(g, nodes).context("--seeds")
}

#[derive(Serialize)]
struct EvaluateReport<'a> {
    command: &'static str,
    model: String,
    weights: Option<&'a str>,
    lambda: f64,
    replications: usize,
    seed: u64,
    graph: GraphInfo,
    seeds: Vec<String>,
    objective: Estimate,
    active: Estimate,
    informed: Estimate,
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let loaded = load_graph(&args.graph, args.estimator.seed)?;
    let g = &loaded.graph;
    let model: Model = args.graph.model.into();
    let cfg = coverage_config(&args.estimator)?;
    let seeds = read_seed_labels(&args.seeds, g)?;
    let eval = evaluate_seeds(g, model, &seeds, &cfg, false)?;
    match args.output.format {
        crate::Format::Csv => output::write_evaluation_csv(args.output.out.as_deref(), &eval),
        crate::Format::Json => output::write_json(
            args.output.out.as_deref(),
            &EvaluateReport {
                command: "evaluate",
                model: model.to_string(),
                weights: args.graph.weights.as_deref(),
                lambda: cfg.lambda,
                replications: cfg.replications,
                seed: cfg.master_seed,
                graph: graph_info(&args.graph, &loaded),
                seeds: seeds
                    .as_slice()
                    .iter()
                    .map(|&v| g.label(v).to_string())
                    .collect(),
                objective: eval.objective,
                active: eval.active,
                informed: eval.informed,
            },
        ),
    }
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let graph = match args.kind {
        GeneratorKind::ErdosRenyi => {
            let n = args.n.context("--n: required for erdos-renyi")?;
            let p = args.p.context("--p: required for erdos-renyi")?;
            generate::erdos_renyi(n, p, args.seed).context("--p")?
        }
        GeneratorKind::ScaleFree => {
            let n = args.n.context("--n: required for scale-free")?;
            let m0 = args.m0.context("--m0: required for scale-free")?;
            generate::scale_free(n, m0, args.seed).context("--m0")?
        }
        GeneratorKind::Fixture => {
            let name = args.name.as_deref().with_context(|| {
                format!(
                    "--name: required for fixture (one of {})",
                    FIXTURE_NAMES.join(", ")
                )
            })?;
            generate::fixture(name)
                .with_context(|| format!("--name: expected one of {}", FIXTURE_NAMES.join(", ")))?
        }
    };
    output::write_with(args.out.as_deref(), |w| Ok(graph.write_edge_list(w)?))
}
