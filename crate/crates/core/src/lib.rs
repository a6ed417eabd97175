//! Information coverage: the expected number of active plus informed nodes
//! after an IC or LT cascade, and seed selection algorithms that maximize it.
//!
//! A node is *informed* when it ends the cascade inactive but has at least one
//! active in-neighbour. The weighted objective is `E|A| + λ·E|L|`, which is the
//! classic influence spread at `λ = 0` and the full coverage at `λ = 1`.
//!
//! Computing the objective exactly is #P-hard, so [`coverage`] offers both a
//! Monte Carlo estimator for real graphs and an exhaustive live-arc oracle for
//! graphs small enough to enumerate.

pub mod coverage;
pub mod diffusion;
pub mod generate;
pub mod graph;
pub mod rng;
pub mod selection;

pub use coverage::{
    estimate_coverage, exact_coverage, CoverageConfig, CoverageError, CoverageEstimate,
    EnumerationCap,
};
pub use diffusion::{
    coverage_of_outcome, sample_live_arc, simulate, simulate_ic, simulate_lt, CascadeOutcome,
    LiveArcGraph, Model, SeedSet,
};
pub use graph::{DirectedGraph, GraphBuilder, GraphError, LtViolation, NodeId, WeightScheme};
pub use rng::ReplicationStream;
pub use selection::{
    baseline_out_degree, baseline_random, effective_degree_rank, exhaustive_optimal, lazy_greedy,
    plain_greedy, Evaluator, SelectionError, SelectionResult,
};
