//! Estimating `W(S) = E|A| + λ·E|L|`.
//!
//! Two routes share one definition of a cascade outcome:
//!
//! * [`estimate_coverage`] averages `R` simulated cascades. Each replication
//!   reduces to the integer pair `(|A|, |L|)`, and only integer moments are
//!   accumulated, so the estimate is bit-identical for any thread count and
//!   any `λ` can be read off the same sample.
//! * [`exact_coverage`] sums `Prob(G_L) · C_{G_L}(S)` over every live-arc
//!   graph. It is exponential and capped, and exists to check the estimator
//!   and the selection algorithms on small instances.

use rayon::prelude::*;
use thiserror::Error;

use crate::diffusion::{check_lambda, DiffusionError, LiveArcGraph, Model, SeedSet, Simulator};
use crate::graph::{DirectedGraph, NodeId};
use crate::rng::ReplicationStream;

pub const DEFAULT_REPLICATIONS: usize = 10_000;

// Replications per parallel work unit. Results do not depend on it.
const BLOCK: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverageError {
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error("replication count must be at least 1")]
    NoReplications,
    #[error("the {model} model needs `{field}` on every edge")]
    MissingParameters { model: Model, field: &'static str },
    #[error("incoming LT weights of node {node} sum to {sum}, above 1")]
    InvalidLtWeights { node: NodeId, sum: f64 },
    #[error("exact enumeration needs about {worlds:.3e} live-arc graphs, above the cap of {cap}")]
    EnumerationTooLarge { worlds: f64, cap: f64 },
}

/// Weight of informed nodes, replication count and master seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageConfig {
    pub lambda: f64,
    pub replications: usize,
    pub master_seed: u64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            lambda: 1.0,
            replications: DEFAULT_REPLICATIONS,
            master_seed: 0,
        }
    }
}

impl CoverageConfig {
    pub fn new(lambda: f64, replications: usize, master_seed: u64) -> Result<Self, CoverageError> {
        let cfg = CoverageConfig {
            lambda,
            replications,
            master_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CoverageError> {
        check_lambda(self.lambda)?;
        if self.replications == 0 {
            return Err(CoverageError::NoReplications);
        }
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        CoverageConfig { lambda, ..self }
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        CoverageConfig {
            master_seed,
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(replications)`.
    pub std_error: f64,
    pub replications: usize,
}

/// Integer moments of `(|A|, |L|)` over a run of replications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CoverageSample {
    pub replications: usize,
    pub sum_active: u128,
    pub sum_informed: u128,
    pub sum_active_sq: u128,
    pub sum_informed_sq: u128,
    pub sum_cross: u128,
}

impl CoverageSample {
    fn push(&mut self, active: usize, informed: usize) {
        let (a, l) = (active as u128, informed as u128);
        self.replications += 1;
        self.sum_active += a;
        self.sum_informed += l;
        self.sum_active_sq += a * a;
        self.sum_informed_sq += l * l;
        self.sum_cross += a * l;
    }

    fn merge(mut self, other: CoverageSample) -> CoverageSample {
        self.replications += other.replications;
        self.sum_active += other.sum_active;
        self.sum_informed += other.sum_informed;
        self.sum_active_sq += other.sum_active_sq;
        self.sum_informed_sq += other.sum_informed_sq;
        self.sum_cross += other.sum_cross;
        self
    }

    /// Estimate of `E|A| + λ·E|L|` from this sample.
    pub fn estimate(&self, lambda: f64) -> CoverageEstimate {
        let r = self.replications;
        if r == 0 {
            return CoverageEstimate {
                mean: 0.0,
                std_error: 0.0,
                replications: 0,
            };
        }
        let rf = r as f64;
        let mean = (self.sum_active as f64 + lambda * self.sum_informed as f64) / rf;
        let std_error = if r < 2 {
            0.0
        } else {
            // R·Σx² − (Σx)² expanded over x = a + λl; each bracket is exact.
            let ri = r as i128;
            let (sa, sl) = (self.sum_active as i128, self.sum_informed as i128);
            let d_aa = ri * self.sum_active_sq as i128 - sa * sa;
            let d_al = ri * self.sum_cross as i128 - sa * sl;
            let d_ll = ri * self.sum_informed_sq as i128 - sl * sl;
            let num = d_aa as f64 + 2.0 * lambda * d_al as f64 + lambda * lambda * d_ll as f64;
            (num.max(0.0) / (rf * rf * (rf - 1.0))).sqrt()
        };
        CoverageEstimate {
            mean,
            std_error,
            replications: r,
        }
    }

    /// Estimate of `E|A|` alone.
    pub fn active(&self) -> CoverageEstimate {
        self.estimate(0.0)
    }

    /// Estimate of `E|L|` alone.
    pub fn informed(&self) -> CoverageEstimate {
        let swapped = CoverageSample {
            sum_active: self.sum_informed,
            sum_active_sq: self.sum_informed_sq,
            sum_informed: 0,
            sum_informed_sq: 0,
            sum_cross: 0,
            ..*self
        };
        swapped.estimate(0.0)
    }
}

/// Checks that `g` carries valid parameters for `model`.
pub fn check_model_parameters(g: &DirectedGraph, model: Model) -> Result<(), CoverageError> {
    match model {
        Model::Ic => {
            if !g.has_ic_probs() {
                return Err(CoverageError::MissingParameters {
                    model,
                    field: "ic_prob",
                });
            }
        }
        Model::Lt => {
            if !g.has_lt_weights() {
                return Err(CoverageError::MissingParameters {
                    model,
                    field: "lt_weight",
                });
            }
            if let Some(v) = g.validate_lt().first() {
                return Err(CoverageError::InvalidLtWeights {
                    node: v.node,
                    sum: v.sum,
                });
            }
        }
    }
    Ok(())
}

/// Runs `replications` cascades with streams `(master_seed, 0..replications)`.
pub fn sample_coverage(
    g: &DirectedGraph,
    seeds: &SeedSet,
    model: Model,
    replications: usize,
    master_seed: u64,
) -> Result<CoverageSample, CoverageError> {
    if replications == 0 {
        return Err(CoverageError::NoReplications);
    }
    check_model_parameters(g, model)?;
    Ok(sample_unchecked(
        g,
        seeds.as_slice(),
        model,
        replications,
        master_seed,
    ))
}

pub(crate) fn sample_unchecked(
    g: &DirectedGraph,
    seeds: &[NodeId],
    model: Model,
    replications: usize,
    master_seed: u64,
) -> CoverageSample {
    if seeds.is_empty() {
        return CoverageSample {
            replications,
            ..Default::default()
        };
    }
    let blocks = replications.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut sim = Simulator::new(g);
            let mut sample = CoverageSample::default();
            for i in b * BLOCK..((b + 1) * BLOCK).min(replications) {
                let (a, l) = sim.run(model, seeds, ReplicationStream::new(master_seed, i as u64));
                sample.push(a, l);
            }
            sample
        })
        .reduce(CoverageSample::default, CoverageSample::merge)
}

/// Monte Carlo estimate of the weighted information coverage of `seeds`.
pub fn estimate_coverage(
    g: &DirectedGraph,
    seeds: &SeedSet,
    model: Model,
    cfg: &CoverageConfig,
) -> Result<CoverageEstimate, CoverageError> {
    cfg.validate()?;
    let sample = sample_coverage(g, seeds, model, cfg.replications, cfg.master_seed)?;
    Ok(sample.estimate(cfg.lambda))
}

/// Limits on exhaustive live-arc enumeration.
///
/// Edges with probability 0 or 1 and nodes with a single possible in-edge
/// choice do not multiply the work, so only genuinely random choices count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumerationCap {
    /// IC: at most this many edges with probability strictly in (0, 1).
    pub max_ic_edges: u32,
    /// LT: at most this many combinations of per-node in-edge choices.
    pub max_lt_worlds: u64,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap {
            max_ic_edges: 20,
            max_lt_worlds: 1 << 20,
        }
    }
}

/// Expected `(|A|, |L|)` by enumeration of live-arc graphs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactDecomposition {
    pub active: f64,
    pub informed: f64,
}

impl ExactDecomposition {
    pub fn coverage(&self, lambda: f64) -> f64 {
        self.active + lambda * self.informed
    }
}

enum Worlds {
    Ic {
        fixed_live: Vec<bool>,
        uncertain: Vec<(usize, f64)>,
    },
    Lt {
        fixed_live: Vec<bool>,
        // Per node with more than one choice: (edge or none, probability).
        choices: Vec<Vec<(Option<usize>, f64)>>,
    },
}

/// Exhaustive evaluator over all live-arc graphs of a small instance.
pub struct ExactOracle<'g> {
    g: &'g DirectedGraph,
    model: Model,
    worlds: Worlds,
}

impl<'g> ExactOracle<'g> {
    pub fn new(g: &'g DirectedGraph, model: Model) -> Result<Self, CoverageError> {
        Self::with_cap(g, model, EnumerationCap::default())
    }

    pub fn with_cap(
        g: &'g DirectedGraph,
        model: Model,
        cap: EnumerationCap,
    ) -> Result<Self, CoverageError> {
        check_model_parameters(g, model)?;
        let m = g.edge_count();
        let worlds = match model {
            Model::Ic => {
                let mut fixed_live = vec![false; m];
                let mut uncertain = Vec::new();
                for (e, live) in fixed_live.iter_mut().enumerate() {
                    let p = g.ic_or_zero(e);
                    if p >= 1.0 {
                        *live = true;
                    } else if p > 0.0 {
                        uncertain.push((e, p));
                    }
                }
                if uncertain.len() > cap.max_ic_edges as usize {
                    return Err(CoverageError::EnumerationTooLarge {
                        worlds: 2f64.powi(uncertain.len() as i32),
                        cap: 2f64.powi(cap.max_ic_edges as i32),
                    });
                }
                Worlds::Ic {
                    fixed_live,
                    uncertain,
                }
            }
            Model::Lt => {
                let mut fixed_live = vec![false; m];
                let mut choices = Vec::new();
                let mut total = 1f64;
                for v in g.nodes() {
                    let mut opts: Vec<(Option<usize>, f64)> = g
                        .in_edge_ids(v)
                        .iter()
                        .map(|&e| (Some(e), g.lt_or_zero(e)))
                        .filter(|&(_, w)| w > 0.0)
                        .collect();
                    let rest = 1.0 - opts.iter().map(|&(_, w)| w).sum::<f64>();
                    if rest > 0.0 {
                        opts.push((None, rest));
                    }
                    match opts.len() {
                        0 => {}
                        1 => {
                            if let (Some(e), _) = opts[0] {
                                fixed_live[e] = true;
                            }
                        }
                        k => {
                            total *= k as f64;
                            choices.push(opts);
                        }
                    }
                }
                if total > cap.max_lt_worlds as f64 {
                    return Err(CoverageError::EnumerationTooLarge {
                        worlds: total,
                        cap: cap.max_lt_worlds as f64,
                    });
                }
                Worlds::Lt {
                    fixed_live,
                    choices,
                }
            }
        };
        Ok(ExactOracle { g, model, worlds })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.g
    }

    /// Number of live-arc graphs with nonzero probability.
    pub fn world_count(&self) -> u64 {
        match &self.worlds {
            Worlds::Ic { uncertain, .. } => 1u64 << uncertain.len(),
            Worlds::Lt { choices, .. } => choices.iter().map(|c| c.len() as u64).product(),
        }
    }

    /// Calls `f` on every live-arc graph with its probability, in a fixed order.
    pub fn for_each_world(&self, mut f: impl FnMut(f64, &LiveArcGraph)) {
        match &self.worlds {
            Worlds::Ic {
                fixed_live,
                uncertain,
            } => {
                let mut la = LiveArcGraph::from_mask(Model::Ic, fixed_live.clone());
                for mask in 0u64..(1u64 << uncertain.len()) {
                    let mut prob = 1.0;
                    let live = la.mask_mut();
                    for (bit, &(e, p)) in uncertain.iter().enumerate() {
                        let on = mask >> bit & 1 == 1;
                        live[e] = on;
                        prob *= if on { p } else { 1.0 - p };
                    }
                    f(prob, &la);
                }
            }
            Worlds::Lt {
                fixed_live,
                choices,
            } => {
                let mut la = LiveArcGraph::from_mask(Model::Lt, fixed_live.clone());
                let mut digits = vec![0usize; choices.len()];
                loop {
                    let mut prob = 1.0;
                    let live = la.mask_mut();
                    for (opts, &d) in choices.iter().zip(&digits) {
                        for &(e, _) in opts {
                            if let Some(e) = e {
                                live[e] = false;
                            }
                        }
                        let (e, w) = opts[d];
                        if let Some(e) = e {
                            live[e] = true;
                        }
                        prob *= w;
                    }
                    f(prob, &la);
                    // Mixed-radix increment.
                    let mut i = 0;
                    while i < digits.len() {
                        digits[i] += 1;
                        if digits[i] < choices[i].len() {
                            break;
                        }
                        digits[i] = 0;
                        i += 1;
                    }
                    if i == digits.len() {
                        break;
                    }
                }
            }
        }
    }

    pub fn decomposition(&self, seeds: &[NodeId]) -> ExactDecomposition {
        if seeds.is_empty() {
            return ExactDecomposition {
                active: 0.0,
                informed: 0.0,
            };
        }
        let mut sim = Simulator::new(self.g);
        let (mut ea, mut el) = (0.0, 0.0);
        self.for_each_world(|prob, la| {
            let (a, l) = sim.run_live(seeds, la.mask());
            ea += prob * a as f64;
            el += prob * l as f64;
        });
        ExactDecomposition {
            active: ea,
            informed: el,
        }
    }

    pub fn coverage(&self, seeds: &SeedSet, lambda: f64) -> Result<f64, CoverageError> {
        check_lambda(lambda)?;
        Ok(self.decomposition(seeds.as_slice()).coverage(lambda))
    }
}

/// Exact weighted information coverage under the default enumeration cap.
pub fn exact_coverage(
    g: &DirectedGraph,
    seeds: &SeedSet,
    model: Model,
    lambda: f64,
) -> Result<f64, CoverageError> {
    ExactOracle::new(g, model)?.coverage(seeds, lambda)
}
