#![allow(dead_code)]

use std::collections::BTreeSet;

use infocov::{DirectedGraph, GraphBuilder, NodeId, WeightScheme};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random graph with `n <= max_n` and `m <= max_m`, both parameters set on
/// every edge. IC probabilities come from a scheme picked by `seed`; LT
/// weights are random with incoming sums at most one.
pub fn random_small_graph(seed: u64, max_n: usize, max_m: usize) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_n);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(&mut rng);
    let m = rng.gen_range(1..=max_m.min(pairs.len()));
    pairs.truncate(m);

    let mut b = GraphBuilder::with_nodes(n);
    for &(u, v) in &pairs {
        b.add_edge_between(u, v, None, None).unwrap();
    }
    let scheme = match seed % 4 {
        0 => WeightScheme::UniformIc([0.1, 0.3, 0.5, 0.7][rng.gen_range(0..4)]),
        1 => WeightScheme::Trivalency { seed },
        2 => WeightScheme::WeightedCascade,
        _ => WeightScheme::UniformIc(rng.gen_range(0.05..0.95)),
    };
    let base = b.build().assign_weights(scheme).unwrap();

    // Random LT weights: each node splits a random budget in [0, 1] over its
    // in-edges, unless weighted cascade already set them.
    let mut lt = vec![0.0; base.edge_count()];
    for v in base.nodes() {
        let ids = base.in_edge_ids(v);
        if ids.is_empty() {
            continue;
        }
        let raw: Vec<f64> = ids.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
        let budget: f64 = rng.gen_range(0.2..=1.0);
        let total: f64 = raw.iter().sum();
        for (&e, r) in ids.iter().zip(raw) {
            lt[e] = base.lt_weight(e).unwrap_or(r / total * budget);
        }
    }
    let mut b = GraphBuilder::with_nodes(n);
    for e in base.edges() {
        b.add_edge_between(
            e.source.index(),
            e.target.index(),
            e.ic_prob,
            Some(lt[e.id]),
        )
        .unwrap();
    }
    b.build()
}

pub fn subset(mask: u64, n: usize) -> Vec<NodeId> {
    (0..n)
        .filter(|i| mask >> i & 1 == 1)
        .map(NodeId::from)
        .collect()
}

/// Exact IC coverage by direct enumeration of all 2^m edge subsets with a
/// plain set-based reachability search. Shares no code with the library.
pub fn brute_force_ic(g: &DirectedGraph, seeds: &[NodeId], lambda: f64) -> f64 {
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .map(|e| (e.source.index(), e.target.index(), e.ic_prob.unwrap()))
        .collect();
    let m = edges.len();
    assert!(m <= 20);
    let mut total = 0.0;
    for mask in 0u64..(1 << m) {
        let mut prob = 1.0;
        for (i, &(_, _, p)) in edges.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
        }
        if prob == 0.0 {
            continue;
        }
        let mut active: BTreeSet<usize> = seeds.iter().map(|s| s.index()).collect();
        loop {
            let before = active.len();
            for (i, &(u, v, _)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 && active.contains(&u) {
                    active.insert(v);
                }
            }
            if active.len() == before {
                break;
            }
        }
        let informed: BTreeSet<usize> = edges
            .iter()
            .filter(|&&(u, v, _)| active.contains(&u) && !active.contains(&v))
            .map(|&(_, v, _)| v)
            .collect();
        total += prob * (active.len() as f64 + lambda * informed.len() as f64);
    }
    total
}
