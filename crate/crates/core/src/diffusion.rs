//! IC and LT cascade simulation, live-arc sampling and per-outcome coverage.
//!
//! A cascade ends with an active set `A`. The informed set is then read off
//! the final `A` against the original edges: every inactive out-neighbour of
//! an active node is informed. This is an end-state classification, so a node
//! that heard about the information early and was activated later counts as
//! active only.
//!
//! IC edge coins are keyed by edge id, which couples [`simulate_ic`] and
//! [`sample_live_arc`]: for the same stream, the IC active set is exactly the
//! set reachable from the seeds over the sampled live arcs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};
use crate::rng::{Domain, ReplicationStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Independent cascade, reading `ic_prob`.
    Ic,
    /// Linear threshold, reading `lt_weight`.
    Lt,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Ic => "ic",
            Model::Lt => "lt",
        })
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(Model::Ic),
            "lt" => Ok(Model::Lt),
            _ => Err(format!("unknown diffusion model `{s}` (expected ic or lt)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffusionError {
    #[error("seed node {node} is out of range for a graph with {n} nodes")]
    SeedOutOfRange { node: NodeId, n: usize },
    #[error("seed node {0} listed more than once")]
    DuplicateSeed(NodeId),
    #[error("lambda {0} is outside [0, 1]")]
    LambdaOutOfRange(f64),
}

pub(crate) fn check_lambda(lambda: f64) -> Result<(), DiffusionError> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(DiffusionError::LambdaOutOfRange(lambda))
    }
}

/// A validated set of seed nodes, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SeedSet {
    nodes: Vec<NodeId>,
}

impl SeedSet {
    pub fn new<I>(g: &DirectedGraph, nodes: I) -> Result<Self, DiffusionError>
    where
        I: IntoIterator<Item = NodeId>,
    {
        let n = g.node_count();
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        if let Some(&node) = nodes.iter().find(|v| v.index() >= n) {
            return Err(DiffusionError::SeedOutOfRange { node, n });
        }
        nodes.sort_unstable();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(DiffusionError::DuplicateSeed(w[0]));
        }
        Ok(SeedSet { nodes })
    }

    pub fn empty() -> Self {
        SeedSet::default()
    }

    /// Seed set from node indices; panics on invalid input.
    pub fn from_indices(g: &DirectedGraph, nodes: &[usize]) -> Self {
        Self::new(g, nodes.iter().map(|&i| NodeId::from(i))).expect("valid seed indices")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// This set plus `v`. Adding a member returns an unchanged copy.
    pub fn with(&self, v: NodeId) -> SeedSet {
        let mut nodes = self.nodes.clone();
        if let Err(pos) = nodes.binary_search(&v) {
            nodes.insert(pos, v);
        }
        SeedSet { nodes }
    }
}

/// End state of one cascade: active set `A` and informed set `L`, both sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeOutcome {
    pub active: Vec<NodeId>,
    pub informed: Vec<NodeId>,
}

impl CascadeOutcome {
    /// `|A| + λ·|L|`.
    pub fn coverage(&self, lambda: f64) -> Result<f64, DiffusionError> {
        check_lambda(lambda)?;
        Ok(self.active.len() as f64 + lambda * self.informed.len() as f64)
    }
}

pub fn coverage_of_outcome(outcome: &CascadeOutcome, lambda: f64) -> Result<f64, DiffusionError> {
    outcome.coverage(lambda)
}

/// A sampled deterministic subgraph. Reachability from the seeds over live
/// arcs reproduces one draw of the cascade's active set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveArcGraph {
    model: Model,
    live: Vec<bool>,
}

impl LiveArcGraph {
    pub(crate) fn from_mask(model: Model, live: Vec<bool>) -> Self {
        LiveArcGraph { model, live }
    }

    pub(crate) fn mask(&self) -> &[bool] {
        &self.live
    }

    pub(crate) fn mask_mut(&mut self) -> &mut [bool] {
        &mut self.live
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn is_live(&self, edge: usize) -> bool {
        self.live[edge]
    }

    pub fn live_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, &l)| l)
            .map(|(e, _)| e)
    }

    pub fn live_edge_count(&self) -> usize {
        self.live.iter().filter(|&&l| l).count()
    }

    /// Active set = live-arc reachable set; informed set uses all edges of
    /// `g`, live or not.
    pub fn outcome(&self, g: &DirectedGraph, seeds: &SeedSet) -> CascadeOutcome {
        let mut sim = Simulator::new(g);
        sim.run_live(seeds.as_slice(), &self.live);
        sim.outcome()
    }

    pub fn coverage(
        &self,
        g: &DirectedGraph,
        seeds: &SeedSet,
        lambda: f64,
    ) -> Result<f64, DiffusionError> {
        check_lambda(lambda)?;
        let mut sim = Simulator::new(g);
        let (a, l) = sim.run_live(seeds.as_slice(), &self.live);
        Ok(a as f64 + lambda * l as f64)
    }
}

/// Draws a live-arc graph.
///
/// IC keeps each edge independently with its probability. LT lets every node
/// keep at most one incoming edge, `(u, v)` with probability `lt_weight(u, v)`
/// and none with the leftover mass.
pub fn sample_live_arc(g: &DirectedGraph, model: Model, stream: ReplicationStream) -> LiveArcGraph {
    let mut live = vec![false; g.edge_count()];
    match model {
        Model::Ic => {
            let coin = stream.domain_key(Domain::EdgeCoin);
            for (e, slot) in live.iter_mut().enumerate() {
                *slot = coin.uniform(e as u64) < g.ic_or_zero(e);
            }
        }
        Model::Lt => {
            let choice = stream.domain_key(Domain::InEdgeChoice);
            for v in g.nodes() {
                let u = choice.uniform(v.0 as u64);
                let mut cum = 0.0;
                for &e in g.in_edge_ids(v) {
                    cum += g.lt_or_zero(e);
                    if u < cum {
                        live[e] = true;
                        break;
                    }
                }
            }
        }
    }
    LiveArcGraph { model, live }
}

pub fn simulate_ic(
    g: &DirectedGraph,
    seeds: &SeedSet,
    stream: ReplicationStream,
) -> CascadeOutcome {
    simulate(g, Model::Ic, seeds, stream)
}

pub fn simulate_lt(
    g: &DirectedGraph,
    seeds: &SeedSet,
    stream: ReplicationStream,
) -> CascadeOutcome {
    simulate(g, Model::Lt, seeds, stream)
}

pub fn simulate(
    g: &DirectedGraph,
    model: Model,
    seeds: &SeedSet,
    stream: ReplicationStream,
) -> CascadeOutcome {
    let mut sim = Simulator::new(g);
    sim.run(model, seeds.as_slice(), stream);
    sim.outcome()
}

/// Reusable cascade state over one graph.
///
/// Node marks are epoch stamps so a run costs time proportional to the nodes
/// and edges it touches, not to `n`.
pub(crate) struct Simulator<'g> {
    g: &'g DirectedGraph,
    epoch: u32,
    active: Vec<u32>,
    informed: Vec<u32>,
    touched: Vec<u32>,
    weight: Vec<f64>,
    threshold: Vec<f64>,
    active_list: Vec<NodeId>,
    informed_list: Vec<NodeId>,
}

impl<'g> Simulator<'g> {
    pub(crate) fn new(g: &'g DirectedGraph) -> Self {
        let n = g.node_count();
        Simulator {
            g,
            epoch: 0,
            active: vec![0; n],
            informed: vec![0; n],
            touched: vec![0; n],
            weight: vec![0.0; n],
            threshold: vec![0.0; n],
            active_list: Vec::new(),
            informed_list: Vec::new(),
        }
    }

    fn begin(&mut self, seeds: &[NodeId]) {
        if self.epoch == u32::MAX {
            self.active.fill(0);
            self.informed.fill(0);
            self.touched.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.active_list.clear();
        self.informed_list.clear();
        for &s in seeds {
            self.active[s.index()] = self.epoch;
            self.active_list.push(s);
        }
        self.active_list.sort_unstable();
    }

    #[inline]
    fn is_active(&self, v: NodeId) -> bool {
        self.active[v.index()] == self.epoch
    }

    /// Runs one cascade and returns `(|A|, |L|)`.
    pub(crate) fn run(
        &mut self,
        model: Model,
        seeds: &[NodeId],
        stream: ReplicationStream,
    ) -> (usize, usize) {
        match model {
            Model::Ic => {
                let coin = stream.domain_key(Domain::EdgeCoin);
                let g = self.g;
                self.spread(seeds, |e| coin.uniform(e as u64) < g.ic_or_zero(e));
            }
            Model::Lt => self.spread_lt(seeds, stream),
        }
        self.finish()
    }

    pub(crate) fn run_live(&mut self, seeds: &[NodeId], live: &[bool]) -> (usize, usize) {
        self.spread(seeds, |e| live[e]);
        self.finish()
    }

    /// Breadth-first spread in rounds; each round is processed in ascending
    /// node order and an edge is tried at most once.
    fn spread(&mut self, seeds: &[NodeId], mut passes: impl FnMut(usize) -> bool) {
        self.begin(seeds);
        let g = self.g;
        let mut start = 0;
        while start < self.active_list.len() {
            let end = self.active_list.len();
            for i in start..end {
                let u = self.active_list[i];
                for e in g.out_edge_ids(u) {
                    let v = g.edge_target(e);
                    if !self.is_active(v) && passes(e) {
                        self.active[v.index()] = self.epoch;
                        self.active_list.push(v);
                    }
                }
            }
            self.active_list[end..].sort_unstable();
            start = end;
        }
    }

    fn spread_lt(&mut self, seeds: &[NodeId], stream: ReplicationStream) {
        self.begin(seeds);
        let g = self.g;
        let thresholds = stream.domain_key(Domain::Threshold);
        let epoch = self.epoch;
        let mut start = 0;
        while start < self.active_list.len() {
            let end = self.active_list.len();
            for i in start..end {
                let u = self.active_list[i];
                for e in g.out_edge_ids(u) {
                    let v = g.edge_target(e).index();
                    if self.active[v] == epoch {
                        continue;
                    }
                    if self.touched[v] != epoch {
                        self.touched[v] = epoch;
                        self.weight[v] = 0.0;
                        // Thresholds live in (0, 1] so zero incoming weight
                        // never activates and weight 1 always does.
                        self.threshold[v] = 1.0 - thresholds.uniform(v as u64);
                    }
                    self.weight[v] += g.lt_or_zero(e);
                    if self.weight[v] >= self.threshold[v] {
                        self.active[v] = epoch;
                        self.active_list.push(NodeId(v as u32));
                    }
                }
            }
            self.active_list[end..].sort_unstable();
            start = end;
        }
    }

    fn finish(&mut self) -> (usize, usize) {
        let g = self.g;
        let epoch = self.epoch;
        for &a in &self.active_list {
            for &v in g.out_neighbors(a) {
                let i = v.index();
                if self.active[i] != epoch && self.informed[i] != epoch {
                    self.informed[i] = epoch;
                    self.informed_list.push(v);
                }
            }
        }
        (self.active_list.len(), self.informed_list.len())
    }

    pub(crate) fn outcome(&self) -> CascadeOutcome {
        let mut active = self.active_list.clone();
        let mut informed = self.informed_list.clone();
        active.sort_unstable();
        informed.sort_unstable();
        CascadeOutcome { active, informed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, WeightScheme};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn single_edge(p: f64, w: f64) -> DirectedGraph {
        let mut b = GraphBuilder::with_nodes(2);
        b.add_edge_between(0, 1, Some(p), Some(w)).unwrap();
        b.build()
    }

    fn stream(i: u64) -> ReplicationStream {
        ReplicationStream::new(2024, i)
    }

    #[test]
    fn empty_seed_set_gives_empty_outcome() {
        let g = single_edge(1.0, 1.0);
        for model in [Model::Ic, Model::Lt] {
            let out = simulate(&g, model, &SeedSet::empty(), stream(0));
            assert!(out.active.is_empty() && out.informed.is_empty());
        }
    }

    #[test]
    fn certain_ic_edge_activates() {
        let g = single_edge(1.0, 0.0);
        let seeds = SeedSet::from_indices(&g, &[0]);
        let out = simulate_ic(&g, &seeds, stream(3));
        assert_eq!(out.active, vec![NodeId(0), NodeId(1)]);
        assert!(out.informed.is_empty());
    }

    #[test]
    fn half_probability_edge_is_bernoulli() {
        let g = single_edge(0.5, 0.0);
        let seeds = SeedSet::from_indices(&g, &[0]);
        let mut hits = 0;
        for i in 0..10_000 {
            let out = simulate_ic(&g, &seeds, stream(i));
            let v = NodeId(1);
            assert!(out.active.contains(&v) ^ out.informed.contains(&v));
            hits += out.active.contains(&v) as usize;
        }
        let frac = hits as f64 / 10_000.0;
        assert!((frac - 0.5).abs() <= 0.02, "fraction {frac}");
    }

    #[test]
    fn full_lt_weight_always_activates() {
        let g = single_edge(0.0, 1.0);
        let seeds = SeedSet::from_indices(&g, &[0]);
        for i in 0..1000 {
            assert_eq!(simulate_lt(&g, &seeds, stream(i)).active.len(), 2);
        }
    }

    #[test]
    fn lt_half_weight_activates_half_the_time() {
        let mut b = GraphBuilder::with_nodes(3);
        b.add_edge_between(0, 2, None, Some(0.5)).unwrap();
        b.add_edge_between(1, 2, None, Some(0.5)).unwrap();
        let g = b.build();
        let seeds = SeedSet::from_indices(&g, &[0]);
        let hits = (0..10_000)
            .filter(|&i| {
                simulate_lt(&g, &seeds, stream(i))
                    .active
                    .contains(&NodeId(2))
            })
            .count();
        let frac = hits as f64 / 10_000.0;
        assert!((frac - 0.5).abs() <= 0.02, "fraction {frac}");
    }

    #[test]
    fn live_arc_extremes() {
        let text = "0 1\n1 2\n2 0\n0 2\n";
        let g = DirectedGraph::parse(text).unwrap();
        let all = g
            .clone()
            .assign_weights(WeightScheme::UniformIc(1.0))
            .unwrap();
        let none = g.assign_weights(WeightScheme::UniformIc(0.0)).unwrap();
        let la = sample_live_arc(&all, Model::Ic, stream(1));
        assert_eq!(la.live_edge_count(), all.edge_count());
        let ln = sample_live_arc(&none, Model::Ic, stream(1));
        assert_eq!(ln.live_edge_count(), 0);
    }

    #[test]
    fn lt_live_arc_is_categorical() {
        let mut b = GraphBuilder::with_nodes(3);
        b.add_edge_between(0, 2, None, Some(0.3)).unwrap();
        b.add_edge_between(1, 2, None, Some(0.2)).unwrap();
        let g = b.build();
        let e0 = g.find_edge(NodeId(0), NodeId(2)).unwrap();
        let e1 = g.find_edge(NodeId(1), NodeId(2)).unwrap();
        let mut counts = [0usize; 3];
        for i in 0..10_000 {
            let la = sample_live_arc(&g, Model::Lt, stream(i));
            assert!(la.live_edge_count() <= 1);
            match (la.is_live(e0), la.is_live(e1)) {
                (true, false) => counts[0] += 1,
                (false, true) => counts[1] += 1,
                (false, false) => counts[2] += 1,
                _ => unreachable!(),
            }
        }
        for (got, want) in counts.iter().zip([3000, 2000, 5000]) {
            assert!((*got as i64 - want).abs() <= 150, "{counts:?}");
        }
    }

    #[test]
    fn coverage_arithmetic() {
        let out = CascadeOutcome {
            active: vec![NodeId(0)],
            informed: vec![NodeId(1)],
        };
        assert_eq!(coverage_of_outcome(&out, 1.0).unwrap(), 2.0);
        assert_eq!(coverage_of_outcome(&out, 0.0).unwrap(), 1.0);
        let out = CascadeOutcome {
            active: vec![NodeId(0), NodeId(1)],
            informed: vec![NodeId(2), NodeId(3), NodeId(4)],
        };
        assert_eq!(coverage_of_outcome(&out, 0.5).unwrap(), 3.5);
        assert!(coverage_of_outcome(&out, 1.5).is_err());
        assert!(coverage_of_outcome(&out, -0.1).is_err());
    }

    #[test]
    fn seed_set_validation() {
        let g = single_edge(0.5, 0.5);
        assert!(matches!(
            SeedSet::new(&g, [NodeId(2)]),
            Err(DiffusionError::SeedOutOfRange { .. })
        ));
        assert!(matches!(
            SeedSet::new(&g, [NodeId(1), NodeId(1)]),
            Err(DiffusionError::DuplicateSeed(_))
        ));
        let s = SeedSet::new(&g, [NodeId(1), NodeId(0)]).unwrap();
        assert_eq!(s.as_slice(), &[NodeId(0), NodeId(1)]);
    }

    fn arb_weighted_graph() -> impl Strategy<Value = DirectedGraph> {
        (2usize..10)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec((0..n, 0..n, 0.0f64..=1.0), 0..25),
                )
            })
            .prop_map(|(n, raw)| {
                let mut b = GraphBuilder::with_nodes(n);
                for (u, v, p) in raw {
                    let _ = b.add_edge_between(u, v, Some(p), None);
                }
                with_wc_lt_weights(b.build())
            })
    }

    // Keeps the random IC probabilities and takes LT weights from weighted cascade.
    fn with_wc_lt_weights(g: DirectedGraph) -> DirectedGraph {
        let ic: Vec<f64> = g.edges().map(|e| e.ic_prob.unwrap()).collect();
        let wc = g.assign_weights(WeightScheme::WeightedCascade).unwrap();
        let mut b = GraphBuilder::with_nodes(wc.node_count());
        for e in wc.edges() {
            b.add_edge_between(
                e.source.index(),
                e.target.index(),
                Some(ic[e.id]),
                e.lt_weight,
            )
            .unwrap();
        }
        b.build()
    }

    fn reachable(
        g: &DirectedGraph,
        seeds: &[NodeId],
        live: impl Fn(usize) -> bool,
    ) -> BTreeSet<NodeId> {
        let mut seen: BTreeSet<NodeId> = seeds.iter().copied().collect();
        let mut stack: Vec<NodeId> = seeds.to_vec();
        while let Some(u) = stack.pop() {
            for e in g.out_edge_ids(u) {
                let v = g.edge_target(e);
                if live(e) && seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn brute_informed(g: &DirectedGraph, active: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
        g.edges()
            .filter(|e| active.contains(&e.source) && !active.contains(&e.target))
            .map(|e| e.target)
            .collect()
    }

    proptest! {
        #[test]
        fn outcome_invariants(g in arb_weighted_graph(), seed_mask in 0u32..1024, rep in 0u64..1000) {
            let seeds: Vec<usize> = (0..g.node_count()).filter(|i| seed_mask >> i & 1 == 1).collect();
            let seeds = SeedSet::from_indices(&g, &seeds);
            for model in [Model::Ic, Model::Lt] {
                let out = simulate(&g, model, &seeds, stream(rep));
                let active: BTreeSet<_> = out.active.iter().copied().collect();
                let informed: BTreeSet<_> = out.informed.iter().copied().collect();
                prop_assert_eq!(active.len(), out.active.len());
                prop_assert!(seeds.as_slice().iter().all(|s| active.contains(s)));
                prop_assert!(active.is_disjoint(&informed));
                prop_assert_eq!(&informed, &brute_informed(&g, &active));
                let c = out.coverage(1.0).unwrap();
                prop_assert!(c >= seeds.len() as f64 && c <= g.node_count() as f64);
                // Same stream, same outcome.
                prop_assert_eq!(&out, &simulate(&g, model, &seeds, stream(rep)));
            }
        }

        #[test]
        fn ic_matches_live_arc_reachability(g in arb_weighted_graph(), seed_mask in 1u32..1024, rep in 0u64..1000) {
            let seeds: Vec<usize> = (0..g.node_count()).filter(|i| seed_mask >> i & 1 == 1).collect();
            let seeds = SeedSet::from_indices(&g, &seeds);
            let la = sample_live_arc(&g, Model::Ic, stream(rep));
            let out = simulate_ic(&g, &seeds, stream(rep));
            let reach = reachable(&g, seeds.as_slice(), |e| la.is_live(e));
            prop_assert_eq!(out.active.iter().copied().collect::<BTreeSet<_>>(), reach);
            prop_assert_eq!(&out, &la.outcome(&g, &seeds));
        }

        #[test]
        fn certain_edges_reach_everything_reachable(g in arb_weighted_graph(), seed_mask in 1u32..1024) {
            let g = g.assign_weights(WeightScheme::UniformIc(1.0)).unwrap();
            let seeds: Vec<usize> = (0..g.node_count()).filter(|i| seed_mask >> i & 1 == 1).collect();
            let seeds = SeedSet::from_indices(&g, &seeds);
            let out = simulate_ic(&g, &seeds, stream(0));
            let reach = reachable(&g, seeds.as_slice(), |_| true);
            prop_assert_eq!(out.active.iter().copied().collect::<BTreeSet<_>>(), reach);
            prop_assert!(out.informed.is_empty());
        }
    }
}
