//! Seed selection.
//!
//! [`lazy_greedy`] is the lazy-forward greedy: marginal gains cached from an
//! earlier iteration are upper bounds on the current ones, so only the node at
//! the top of the queue is ever recomputed. [`effective_degree_rank`] is the
//! model-free heuristic that discounts out-neighbours already covered by the
//! chosen seeds. The remaining selectors are baselines and test oracles.
//!
//! Ties are broken towards the smallest [`NodeId`] everywhere. Gains are
//! compared after rounding to [`GAIN_RESOLUTION`] so that two mathematically
//! equal gains computed along different floating-point paths still tie.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use itertools::Itertools;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coverage::{
    check_model_parameters, sample_unchecked, CoverageConfig, CoverageError, EnumerationCap,
    ExactOracle,
};
use crate::diffusion::{check_lambda, Model};
use crate::graph::{DirectedGraph, NodeId};

/// Gains closer than this compare as equal.
pub const GAIN_RESOLUTION: f64 = 1e-9;

/// Default limit on the number of subsets [`exhaustive_optimal`] will score.
pub const DEFAULT_SUBSET_CAP: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("k = {k} exceeds the number of nodes ({n})")]
    KTooLarge { k: usize, n: usize },
    #[error("exhaustive search over {subsets:.3e} subsets exceeds the cap of {cap}")]
    TooManySubsets { subsets: f64, cap: u64 },
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

/// Set function evaluated by the greedy selectors.
pub trait Objective {
    fn node_count(&self) -> usize;
    fn evaluate(&self, seeds: &[NodeId]) -> f64;
}

/// How the greedy selectors evaluate the objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluator {
    /// Monte Carlo with the replication count and seed of the config. Every
    /// evaluation reuses the same streams.
    MonteCarlo,
    /// Live-arc enumeration; only `lambda` is taken from the config.
    Exact(EnumerationCap),
}

impl Evaluator {
    pub fn exact() -> Self {
        Evaluator::Exact(EnumerationCap::default())
    }
}

pub struct MonteCarloObjective<'g> {
    g: &'g DirectedGraph,
    model: Model,
    cfg: CoverageConfig,
}

impl<'g> MonteCarloObjective<'g> {
    pub fn new(
        g: &'g DirectedGraph,
        model: Model,
        cfg: CoverageConfig,
    ) -> Result<Self, CoverageError> {
        cfg.validate()?;
        check_model_parameters(g, model)?;
        Ok(MonteCarloObjective { g, model, cfg })
    }
}

impl Objective for MonteCarloObjective<'_> {
    fn node_count(&self) -> usize {
        self.g.node_count()
    }

    fn evaluate(&self, seeds: &[NodeId]) -> f64 {
        sample_unchecked(
            self.g,
            seeds,
            self.model,
            self.cfg.replications,
            self.cfg.master_seed,
        )
        .estimate(self.cfg.lambda)
        .mean
    }
}

pub struct ExactObjective<'g> {
    oracle: ExactOracle<'g>,
    lambda: f64,
}

impl<'g> ExactObjective<'g> {
    pub fn new(
        g: &'g DirectedGraph,
        model: Model,
        lambda: f64,
        cap: EnumerationCap,
    ) -> Result<Self, CoverageError> {
        check_lambda(lambda)?;
        Ok(ExactObjective {
            oracle: ExactOracle::with_cap(g, model, cap)?,
            lambda,
        })
    }
}

impl Objective for ExactObjective<'_> {
    fn node_count(&self) -> usize {
        self.oracle.graph().node_count()
    }

    fn evaluate(&self, seeds: &[NodeId]) -> f64 {
        self.oracle.decomposition(seeds).coverage(self.lambda)
    }
}

fn objective_for<'g>(
    g: &'g DirectedGraph,
    model: Model,
    cfg: &CoverageConfig,
    evaluator: Evaluator,
) -> Result<Box<dyn Objective + 'g>, CoverageError> {
    Ok(match evaluator {
        Evaluator::MonteCarlo => Box::new(MonteCarloObjective::new(g, model, *cfg)?),
        Evaluator::Exact(cap) => Box::new(ExactObjective::new(g, model, cfg.lambda, cap)?),
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelectionResult {
    /// Seeds in the order they were chosen.
    pub seeds: Vec<NodeId>,
    /// Gain credited to each seed when it was chosen. The degree heuristics
    /// report the (effective) degree here.
    pub marginal_gains: Vec<f64>,
    /// Objective evaluations made before the first step.
    pub initial_evaluations: usize,
    /// Objective evaluations made during each step.
    pub evaluations_per_step: Vec<usize>,
    /// Objective value of the final seed set, when the selector computes one.
    pub objective_value: Option<f64>,
}

impl SelectionResult {
    pub fn total_evaluations(&self) -> usize {
        self.initial_evaluations + self.evaluations_per_step.iter().sum::<usize>()
    }

    /// Average number of evaluations per step.
    pub fn beta(&self) -> f64 {
        if self.evaluations_per_step.is_empty() {
            return 0.0;
        }
        self.evaluations_per_step.iter().sum::<usize>() as f64
            / self.evaluations_per_step.len() as f64
    }
}

fn check_k(g: &DirectedGraph, k: usize) -> Result<(), SelectionError> {
    if k > g.node_count() {
        return Err(SelectionError::KTooLarge {
            k,
            n: g.node_count(),
        });
    }
    Ok(())
}

#[inline]
fn quantize(gain: f64) -> i64 {
    (gain / GAIN_RESOLUTION).round() as i64
}

/// Cached marginal gain of a node, computed when the seed set had `stamp`
/// members.
#[derive(Clone, Copy, Debug)]
pub struct LazyQueueEntry {
    pub node: NodeId,
    pub gain: f64,
    /// Objective value of the seed set at `stamp` plus `node`.
    pub value: f64,
    pub stamp: usize,
}

impl LazyQueueEntry {
    fn key(&self) -> (i64, Reverse<NodeId>) {
        (quantize(self.gain), Reverse(self.node))
    }
}

impl PartialEq for LazyQueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for LazyQueueEntry {}

impl PartialOrd for LazyQueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LazyQueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Lazy-forward greedy over an arbitrary objective with `f(∅) = 0`.
pub fn lazy_greedy_with<O: Objective + ?Sized>(objective: &O, k: usize) -> SelectionResult {
    let n = objective.node_count();
    assert!(k <= n, "k = {k} exceeds node count {n}");
    let mut result = SelectionResult {
        evaluations_per_step: vec![0; k],
        ..Default::default()
    };
    if k == 0 {
        result.objective_value = Some(0.0);
        return result;
    }

    let mut heap: BinaryHeap<LazyQueueEntry> = (0..n)
        .map(|i| {
            let node = NodeId::from(i);
            let value = objective.evaluate(&[node]);
            LazyQueueEntry {
                node,
                gain: value,
                value,
                stamp: 0,
            }
        })
        .collect();
    result.initial_evaluations = n;

    let mut current = 0.0;
    let mut scratch: Vec<NodeId> = Vec::with_capacity(k);
    while result.seeds.len() < k {
        let top = heap.pop().expect("k <= n leaves candidates in the queue");
        let size = result.seeds.len();
        if top.stamp == size {
            result.seeds.push(top.node);
            result.marginal_gains.push(top.gain);
            current = top.value;
        } else {
            scratch.clear();
            scratch.extend_from_slice(&result.seeds);
            scratch.push(top.node);
            let value = objective.evaluate(&scratch);
            result.evaluations_per_step[size] += 1;
            heap.push(LazyQueueEntry {
                node: top.node,
                gain: value - current,
                value,
                stamp: size,
            });
        }
    }
    result.objective_value = Some(current);
    result
}

/// Non-lazy greedy: every remaining node is re-evaluated at every step.
pub fn plain_greedy_with<O: Objective + ?Sized>(objective: &O, k: usize) -> SelectionResult {
    let n = objective.node_count();
    assert!(k <= n, "k = {k} exceeds node count {n}");
    let mut result = SelectionResult {
        evaluations_per_step: vec![0; k],
        ..Default::default()
    };
    let mut chosen = vec![false; n];
    let mut current = 0.0;
    let mut scratch: Vec<NodeId> = Vec::with_capacity(k);
    for step in 0..k {
        let mut best: Option<LazyQueueEntry> = None;
        for i in (0..n).filter(|&i| !chosen[i]) {
            let node = NodeId::from(i);
            scratch.clear();
            scratch.extend_from_slice(&result.seeds);
            scratch.push(node);
            let value = objective.evaluate(&scratch);
            let entry = LazyQueueEntry {
                node,
                gain: value - current,
                value,
                stamp: step,
            };
            if best.is_none_or(|b| entry > b) {
                best = Some(entry);
            }
        }
        let evaluated = n - step;
        if step == 0 {
            result.initial_evaluations = evaluated;
        } else {
            result.evaluations_per_step[step] = evaluated;
        }
        let best = best.expect("k <= n leaves a candidate");
        chosen[best.node.index()] = true;
        result.seeds.push(best.node);
        result.marginal_gains.push(best.gain);
        current = best.value;
    }
    result.objective_value = Some(current);
    result
}

/// Lazy-forward greedy seed selection for weighted information coverage.
pub fn lazy_greedy(
    g: &DirectedGraph,
    model: Model,
    k: usize,
    cfg: &CoverageConfig,
    evaluator: Evaluator,
) -> Result<SelectionResult, SelectionError> {
    check_k(g, k)?;
    let objective = objective_for(g, model, cfg, evaluator)?;
    Ok(lazy_greedy_with(objective.as_ref(), k))
}

/// Plain greedy with the same objective and tie-breaking as [`lazy_greedy`].
pub fn plain_greedy(
    g: &DirectedGraph,
    model: Model,
    k: usize,
    cfg: &CoverageConfig,
    evaluator: Evaluator,
) -> Result<SelectionResult, SelectionError> {
    check_k(g, k)?;
    let objective = objective_for(g, model, cfg, evaluator)?;
    Ok(plain_greedy_with(objective.as_ref(), k))
}

fn degree_result(seeds: Vec<NodeId>, degrees: Vec<f64>) -> SelectionResult {
    let k = seeds.len();
    SelectionResult {
        seeds,
        marginal_gains: degrees,
        initial_evaluations: 0,
        evaluations_per_step: vec![0; k],
        objective_value: None,
    }
}

/// Effective degree rank.
///
/// The covered set `C` collects the out-neighbours of chosen seeds, and a
/// node's effective degree is its out-degree minus its out-neighbours in `C`.
/// When a node joins `C` only its in-neighbours change, so the update costs
/// the in-degree of newly covered nodes and the whole run is `O(k·n + m)`.
pub fn effective_degree_rank(
    g: &DirectedGraph,
    k: usize,
) -> Result<SelectionResult, SelectionError> {
    check_k(g, k)?;
    let n = g.node_count();
    let mut effective: Vec<usize> = g.nodes().map(|v| g.out_degree(v)).collect();
    let mut covered = vec![false; n];
    let mut selected = vec![false; n];
    let mut seeds = Vec::with_capacity(k);
    let mut degrees = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if !selected[v] && best.is_none_or(|b| effective[v] > effective[b]) {
                best = Some(v);
            }
        }
        let v = best.expect("k <= n leaves a candidate");
        selected[v] = true;
        seeds.push(NodeId::from(v));
        degrees.push(effective[v] as f64);
        for &w in g.out_neighbors(NodeId::from(v)) {
            if !covered[w.index()] {
                covered[w.index()] = true;
                for u in g.in_neighbors(w) {
                    effective[u.index()] -= 1;
                }
            }
        }
    }
    Ok(degree_result(seeds, degrees))
}

/// Top-k nodes by raw out-degree.
pub fn baseline_out_degree(g: &DirectedGraph, k: usize) -> Result<SelectionResult, SelectionError> {
    check_k(g, k)?;
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|&v| (Reverse(g.out_degree(v)), v));
    order.truncate(k);
    let degrees = order.iter().map(|&v| g.out_degree(v) as f64).collect();
    Ok(degree_result(order, degrees))
}

/// Uniform k-subset without replacement.
pub fn baseline_random(
    g: &DirectedGraph,
    k: usize,
    seed: u64,
) -> Result<SelectionResult, SelectionError> {
    check_k(g, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<NodeId> = index::sample(&mut rng, g.node_count(), k)
        .into_iter()
        .map(NodeId::from)
        .collect();
    let k = seeds.len();
    Ok(SelectionResult {
        seeds,
        marginal_gains: Vec::new(),
        initial_evaluations: 0,
        evaluations_per_step: vec![0; k],
        objective_value: None,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// True optimum over all k-subsets by exact enumeration, ties going to the
/// lexicographically smallest set.
pub fn exhaustive_optimal(
    g: &DirectedGraph,
    model: Model,
    k: usize,
    lambda: f64,
) -> Result<SelectionResult, SelectionError> {
    exhaustive_optimal_with_caps(
        g,
        model,
        k,
        lambda,
        EnumerationCap::default(),
        DEFAULT_SUBSET_CAP,
    )
}

pub fn exhaustive_optimal_with_caps(
    g: &DirectedGraph,
    model: Model,
    k: usize,
    lambda: f64,
    cap: EnumerationCap,
    subset_cap: u64,
) -> Result<SelectionResult, SelectionError> {
    check_k(g, k)?;
    let subsets = binomial(g.node_count(), k).round();
    if subsets > subset_cap as f64 {
        return Err(SelectionError::TooManySubsets {
            subsets,
            cap: subset_cap,
        });
    }
    let objective = ExactObjective::new(g, model, lambda, cap)?;
    Ok(exhaustive_with(&objective, k))
}

/// Exhaustive search over an arbitrary objective.
pub fn exhaustive_with<O: Objective + ?Sized>(objective: &O, k: usize) -> SelectionResult {
    let n = objective.node_count();
    let mut best: Option<(i64, Vec<NodeId>, f64)> = None;
    let mut count = 0;
    for subset in (0..n).map(NodeId::from).combinations(k) {
        let value = objective.evaluate(&subset);
        count += 1;
        let q = quantize(value);
        if best.as_ref().is_none_or(|(bq, _, _)| q > *bq) {
            best = Some((q, subset, value));
        }
    }
    let (_, seeds, value) = best.expect("at least one subset");
    let mut marginal_gains = Vec::with_capacity(k);
    let mut prev = 0.0;
    for i in 1..=seeds.len() {
        let v = if i == seeds.len() {
            value
        } else {
            objective.evaluate(&seeds[..i])
        };
        marginal_gains.push(v - prev);
        prev = v;
    }
    SelectionResult {
        seeds,
        marginal_gains,
        initial_evaluations: count,
        evaluations_per_step: vec![0; k],
        objective_value: Some(value),
    }
}
