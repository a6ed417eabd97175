//! Synthetic graphs for benchmarks and tests.
//!
//! Generated graphs label their nodes `0..n` so node ids equal labels. Edge
//! parameters are left unset.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

/// Directed G(n, p): every ordered pair `(u, v)`, `u != v`, is an edge with
/// probability `p`. Runs in time proportional to the edges produced.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<DirectedGraph, GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::InvalidParameter(format!(
            "p = {p} is outside [0, 1]"
        )));
    }
    let mut b = GraphBuilder::with_nodes(n);
    if n < 2 || p == 0.0 {
        return Ok(b.build());
    }
    let pairs = (n * (n - 1)) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let push = |idx: u64, b: &mut GraphBuilder| {
        let u = (idx / (n as u64 - 1)) as usize;
        let mut v = (idx % (n as u64 - 1)) as usize;
        if v >= u {
            v += 1;
        }
        b.add_edge_between(u, v, None, None)
            .expect("pair indices are distinct and visited once");
    };
    if p == 1.0 {
        for idx in 0..pairs {
            push(idx, &mut b);
        }
        return Ok(b.build());
    }
    // Geometric skips between successive included pairs.
    let mut idx: i64 = -1;
    loop {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        idx += skip + 1;
        if idx as u64 >= pairs {
            break;
        }
        push(idx as u64, &mut b);
    }
    Ok(b.build())
}

/// Preferential attachment with `m0` initial nodes; every later node receives
/// `m0` edges from distinct earlier nodes chosen proportionally to degree
/// (initial nodes start with weight one). The edge count is exactly
/// `(n - m0) * m0`. Edges point from the established node to the newcomer, so
/// hubs have large out-degree.
pub fn scale_free(n: usize, m0: usize, seed: u64) -> Result<DirectedGraph, GenerateError> {
    if m0 == 0 || m0 >= n {
        return Err(GenerateError::InvalidParameter(format!(
            "scale-free needs 1 <= m0 < n, got m0 = {m0}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::with_nodes(n);
    let mut pool: Vec<usize> = (0..m0).collect();
    let mut picked: Vec<usize> = Vec::with_capacity(m0);
    let mut seen: HashSet<usize> = HashSet::with_capacity(m0);
    for t in m0..n {
        picked.clear();
        seen.clear();
        while picked.len() < m0 {
            let u = pool[rng.gen_range(0..pool.len())];
            if seen.insert(u) {
                picked.push(u);
            }
        }
        for &u in &picked {
            b.add_edge_between(u, t, None, None)
                .expect("targets are new, sources distinct");
            pool.push(u);
            pool.push(t);
        }
    }
    Ok(b.build())
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 6] = [
    "single-edge",
    "path3",
    "star3",
    "two-stars",
    "overlap",
    "diamond",
];

/// Tiny named graphs with known answers.
///
/// * `single-edge`: `u → v`.
/// * `path3`: `a → b → c`.
/// * `star3`: `c → {l1, l2, l3}`.
/// * `two-stars`: `c1 → {a1, a2, a3}` and `c2 → {b1, b2}`.
/// * `overlap`: `b → {x, y, w, v}`, `a → {x, y, z}`, `c → {p, q}`.
/// * `diamond`: `s → {l, r}`, `{l, r} → t`.
pub fn fixture(name: &str) -> Result<DirectedGraph, GenerateError> {
    let edges: &[(&str, &str)] = match name {
        "single-edge" => &[("u", "v")],
        "path3" => &[("a", "b"), ("b", "c")],
        "star3" => &[("c", "l1"), ("c", "l2"), ("c", "l3")],
        "two-stars" => &[
            ("c1", "a1"),
            ("c1", "a2"),
            ("c1", "a3"),
            ("c2", "b1"),
            ("c2", "b2"),
        ],
        "overlap" => &[
            ("b", "x"),
            ("b", "y"),
            ("b", "w"),
            ("b", "v"),
            ("a", "x"),
            ("a", "y"),
            ("a", "z"),
            ("c", "p"),
            ("c", "q"),
        ],
        "diamond" => &[("s", "l"), ("s", "r"), ("l", "t"), ("r", "t")],
        _ => return Err(GenerateError::UnknownFixture(name.to_string())),
    };
    let mut b = GraphBuilder::new();
    for (u, v) in edges {
        b.add_edge(u, v, None, None).expect("fixtures are valid");
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    #[test]
    fn erdos_renyi_is_deterministic() {
        let a = erdos_renyi(100, 0.05, 7).unwrap().to_edge_list();
        let b = erdos_renyi(100, 0.05, 7).unwrap().to_edge_list();
        assert_eq!(a, b);
        assert_ne!(a, erdos_renyi(100, 0.05, 8).unwrap().to_edge_list());
    }

    #[test]
    fn erdos_renyi_density() {
        let g = erdos_renyi(300, 0.02, 1).unwrap();
        let expected = 300.0 * 299.0 * 0.02;
        // sd is about sqrt(expected) ≈ 42.
        assert!(
            (g.edge_count() as f64 - expected).abs() < 200.0,
            "{}",
            g.edge_count()
        );
        assert_eq!(g.node_count(), 300);
        assert_eq!(erdos_renyi(5, 1.0, 0).unwrap().edge_count(), 20);
        assert_eq!(erdos_renyi(5, 0.0, 0).unwrap().edge_count(), 0);
        assert!(erdos_renyi(5, 1.5, 0).is_err());
    }

    #[test]
    fn scale_free_edge_count() {
        let g = scale_free(1000, 3, 3).unwrap();
        assert_eq!(g.edge_count(), (1000 - 3) * 3);
        assert_eq!(g.node_count(), 1000);
        for v in 3..1000 {
            assert_eq!(g.in_degree(NodeId::from(v)), 3);
        }
        // Preferential attachment produces hubs.
        let max_out = g.nodes().map(|v| g.out_degree(v)).max().unwrap();
        assert!(max_out > 30, "max out-degree {max_out}");
        assert!(scale_free(3, 3, 0).is_err());
        assert!(scale_free(3, 0, 0).is_err());
    }

    #[test]
    fn fixtures_exist() {
        for name in FIXTURE_NAMES {
            assert!(fixture(name).unwrap().edge_count() > 0);
        }
        let g = fixture("two-stars").unwrap();
        assert_eq!(g.out_degree(g.node_by_label("c1").unwrap()), 3);
        assert!(fixture("nope").is_err());
    }
}
