//! Directed graph storage, edge-list ingestion and diffusion parameters.
//!
//! Every edge carries two parameters: an IC activation probability and an LT
//! influence weight. Each diffusion model reads only its own field, so a graph
//! can be loaded once and evaluated under either model. Either parameter may
//! be unset after loading; [`DirectedGraph::assign_weights`] fills it in.
//!
//! Adjacency is stored in CSR form. Edge ids are positions in the outgoing
//! CSR arrays, ordered by `(source, target)`, and the incoming index refers
//! back to the same ids so both directions always describe one edge set.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::ops::Range;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Slack allowed when checking that incoming LT weights sum to at most one.
pub const LT_TOLERANCE: f64 = 1e-9;

/// Probabilities drawn by the trivalency scheme.
pub const TRIVALENCY_LEVELS: [f64; 3] = [0.1, 0.01, 0.001];

/// Dense node index in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: malformed input: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: self-loop on node {label}")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: duplicate edge {src} -> {dst} (first seen at line {first})")]
    DuplicateEdge {
        line: usize,
        first: usize,
        src: String,
        dst: String,
    },
    #[error("line {line}: {what} {value} is outside [0, 1]")]
    OutOfRange {
        line: usize,
        what: &'static str,
        value: f64,
    },
    #[error("invalid weight scheme: {0}")]
    InvalidScheme(String),
}

/// A read-only view of one edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub source: NodeId,
    pub target: NodeId,
    pub ic_prob: Option<f64>,
    pub lt_weight: Option<f64>,
}

/// A node whose incoming LT weights sum to more than one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LtViolation {
    pub node: NodeId,
    pub sum: f64,
}

/// Parameterization applied by [`DirectedGraph::assign_weights`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightScheme {
    /// Every IC probability set to `p`.
    UniformIc(f64),
    /// Every IC probability drawn uniformly from [`TRIVALENCY_LEVELS`].
    Trivalency { seed: u64 },
    /// IC probability and LT weight of `(u, v)` both set to `1 / in_degree(v)`.
    WeightedCascade,
}

impl FromStr for WeightScheme {
    type Err = GraphError;

    /// Accepts `uniform:<p>`, `trivalency`, `trivalency:<seed>` and `wc`
    /// (or `weighted-cascade`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidScheme(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        match (name, arg) {
            ("uniform", Some(p)) => {
                let p: f64 = p.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(WeightScheme::UniformIc(p))
            }
            ("trivalency", None) => Ok(WeightScheme::Trivalency { seed: 0 }),
            ("trivalency", Some(seed)) => Ok(WeightScheme::Trivalency {
                seed: seed.parse().map_err(|_| bad())?,
            }),
            ("wc" | "weighted-cascade", None) => Ok(WeightScheme::WeightedCascade),
            _ => Err(bad()),
        }
    }
}

/// Immutable directed graph with per-edge IC probabilities and LT weights.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    out_offsets: Vec<usize>,
    sources: Vec<NodeId>,
    targets: Vec<NodeId>,
    // NaN marks an unset parameter.
    ic: Vec<f64>,
    lt: Vec<f64>,
    in_offsets: Vec<usize>,
    in_edges: Vec<usize>,
}

impl DirectedGraph {
    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        let i = v.index();
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        let i = v.index();
        self.in_offsets[i + 1] - self.in_offsets[i]
    }

    /// Ids of the edges leaving `v`, in ascending target order.
    #[inline]
    pub fn out_edge_ids(&self, v: NodeId) -> Range<usize> {
        let i = v.index();
        self.out_offsets[i]..self.out_offsets[i + 1]
    }

    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.out_edge_ids(v)]
    }

    /// Ids of the edges entering `v`, in ascending source order.
    #[inline]
    pub fn in_edge_ids(&self, v: NodeId) -> &[usize] {
        let i = v.index();
        &self.in_edges[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    pub fn in_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.in_edge_ids(v).iter().map(|&e| self.sources[e])
    }

    #[inline]
    pub fn edge_source(&self, e: usize) -> NodeId {
        self.sources[e]
    }

    #[inline]
    pub fn edge_target(&self, e: usize) -> NodeId {
        self.targets[e]
    }

    pub fn ic_prob(&self, e: usize) -> Option<f64> {
        let p = self.ic[e];
        (!p.is_nan()).then_some(p)
    }

    pub fn lt_weight(&self, e: usize) -> Option<f64> {
        let w = self.lt[e];
        (!w.is_nan()).then_some(w)
    }

    /// IC probability with unset treated as zero.
    #[inline]
    pub(crate) fn ic_or_zero(&self, e: usize) -> f64 {
        let p = self.ic[e];
        if p.is_nan() {
            0.0
        } else {
            p
        }
    }

    /// LT weight with unset treated as zero.
    #[inline]
    pub(crate) fn lt_or_zero(&self, e: usize) -> f64 {
        let w = self.lt[e];
        if w.is_nan() {
            0.0
        } else {
            w
        }
    }

    /// True when every edge has an IC probability.
    pub fn has_ic_probs(&self) -> bool {
        self.ic.iter().all(|p| !p.is_nan())
    }

    /// True when every edge has an LT weight.
    pub fn has_lt_weights(&self) -> bool {
        self.lt.iter().all(|w| !w.is_nan())
    }

    pub fn edge(&self, e: usize) -> Edge {
        Edge {
            id: e,
            source: self.sources[e],
            target: self.targets[e],
            ic_prob: self.ic_prob(e),
            lt_weight: self.lt_weight(e),
        }
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = Edge> + '_ {
        (0..self.edge_count()).map(|e| self.edge(e))
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let range = self.out_edge_ids(u);
        let start = range.start;
        self.targets[range]
            .binary_search(&v)
            .ok()
            .map(|i| start + i)
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Loads an edge list.
    ///
    /// Each non-comment line is `src dst [ic_prob [lt_weight]]`. A `-` in
    /// a parameter column leaves it unset, and a line with a single label
    /// declares a node without edges. Lines starting with `#` are ignored.
    pub fn load<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match fields.as_slice() {
                [label] => {
                    builder.add_node(label);
                }
                [src, dst, rest @ ..] if rest.len() <= 2 => {
                    let ic = parse_param(rest.first().copied(), line_no)?;
                    let lt = parse_param(rest.get(1).copied(), line_no)?;
                    builder.add_edge_at(line_no, src, dst, ic, lt)?;
                }
                _ => {
                    return Err(GraphError::Malformed {
                        line: line_no,
                        reason: format!("expected 1 to 4 fields, found {}", fields.len()),
                    })
                }
            }
        }
        Ok(builder.build())
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        Self::load(text.as_bytes())
    }

    /// Writes the graph as `src dst ic_prob lt_weight` lines under a
    /// `# n=<n> m=<m>` header. Isolated nodes are written as bare labels.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# n={} m={}", self.node_count(), self.edge_count())?;
        for v in self.nodes() {
            if self.out_degree(v) == 0 && self.in_degree(v) == 0 {
                writeln!(w, "{}", self.label(v))?;
            }
        }
        for e in self.edges() {
            writeln!(
                w,
                "{} {} {} {}",
                self.label(e.source),
                self.label(e.target),
                fmt_param(e.ic_prob),
                fmt_param(e.lt_weight)
            )?;
        }
        Ok(())
    }

    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("labels are valid utf-8")
    }

    /// Returns a copy of the graph with parameters set by `scheme`.
    ///
    /// Weighted cascade leaves nodes without in-edges untouched since there is
    /// nothing to assign.
    pub fn assign_weights(mut self, scheme: WeightScheme) -> Result<Self, GraphError> {
        match scheme {
            WeightScheme::UniformIc(p) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(GraphError::InvalidScheme(format!("uniform:{p}")));
                }
                self.ic.iter_mut().for_each(|x| *x = p);
            }
            WeightScheme::Trivalency { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for x in self.ic.iter_mut() {
                    *x = TRIVALENCY_LEVELS[rng.gen_range(0..TRIVALENCY_LEVELS.len())];
                }
            }
            WeightScheme::WeightedCascade => {
                for v in 0..self.node_count() {
                    let ids = &self.in_edges[self.in_offsets[v]..self.in_offsets[v + 1]];
                    if ids.is_empty() {
                        continue;
                    }
                    let w = 1.0 / ids.len() as f64;
                    for &e in ids {
                        self.ic[e] = w;
                        self.lt[e] = w;
                    }
                }
            }
        }
        Ok(self)
    }

    /// Sum of incoming LT weights of `v`, unset weights counting as zero.
    pub fn incoming_lt_sum(&self, v: NodeId) -> f64 {
        self.in_edge_ids(v)
            .iter()
            .map(|&e| self.lt_or_zero(e))
            .sum()
    }

    /// Nodes whose incoming LT weights sum to more than `1 + LT_TOLERANCE`.
    pub fn validate_lt(&self) -> Vec<LtViolation> {
        self.nodes()
            .filter_map(|v| {
                let sum = self.incoming_lt_sum(v);
                (sum > 1.0 + LT_TOLERANCE).then_some(LtViolation { node: v, sum })
            })
            .collect()
    }
}

fn parse_param(field: Option<&str>, line: usize) -> Result<Option<f64>, GraphError> {
    let Some(field) = field else { return Ok(None) };
    if field == "-" {
        return Ok(None);
    }
    let value: f64 = field.parse().map_err(|_| GraphError::Malformed {
        line,
        reason: format!("`{field}` is not a number"),
    })?;
    if !(0.0..=1.0).contains(&value) {
        return Err(GraphError::OutOfRange {
            line,
            what: "edge parameter",
            value,
        });
    }
    Ok(Some(value))
}

fn fmt_param(p: Option<f64>) -> String {
    match p {
        // `{}` on f64 prints the shortest string that parses back exactly.
        Some(x) => format!("{x}"),
        None => "-".to_string(),
    }
}

#[derive(Clone, Debug)]
struct PendingEdge {
    src: u32,
    dst: u32,
    ic: Option<f64>,
    lt: Option<f64>,
}

/// Incremental constructor for [`DirectedGraph`].
///
/// Labels are mapped to dense ids when the graph is built. If every label is
/// a non-negative integer the ids follow numeric order, otherwise they follow
/// order of first appearance.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    edges: Vec<PendingEdge>,
    seen: HashMap<(u32, u32), usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// A builder with nodes labelled `0..n` already declared.
    pub fn with_nodes(n: usize) -> Self {
        let mut b = Self::new();
        for i in 0..n {
            b.add_node(&i.to_string());
        }
        b
    }

    pub fn add_node(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    /// Adds an edge between two labels. Errors report the edge's 1-based
    /// insertion ordinal as the line number.
    pub fn add_edge(
        &mut self,
        src: &str,
        dst: &str,
        ic_prob: Option<f64>,
        lt_weight: Option<f64>,
    ) -> Result<(), GraphError> {
        let line = self.edges.len() + 1;
        self.add_edge_at(line, src, dst, ic_prob, lt_weight)
    }

    /// Adds an edge between the nodes labelled `src` and `dst` as integers.
    pub fn add_edge_between(
        &mut self,
        src: usize,
        dst: usize,
        ic_prob: Option<f64>,
        lt_weight: Option<f64>,
    ) -> Result<(), GraphError> {
        self.add_edge(&src.to_string(), &dst.to_string(), ic_prob, lt_weight)
    }

    fn add_edge_at(
        &mut self,
        line: usize,
        src: &str,
        dst: &str,
        ic: Option<f64>,
        lt: Option<f64>,
    ) -> Result<(), GraphError> {
        if src == dst {
            return Err(GraphError::SelfLoop {
                line,
                label: src.to_string(),
            });
        }
        for (what, value) in [("ic_prob", ic), ("lt_weight", lt)] {
            if let Some(value) = value {
                if !(0.0..=1.0).contains(&value) {
                    return Err(GraphError::OutOfRange { line, what, value });
                }
            }
        }
        let s = self.add_node(src);
        let d = self.add_node(dst);
        if let Some(&first) = self.seen.get(&(s, d)) {
            return Err(GraphError::DuplicateEdge {
                line,
                first,
                src: src.to_string(),
                dst: dst.to_string(),
            });
        }
        self.seen.insert((s, d), line);
        self.edges.push(PendingEdge {
            src: s,
            dst: d,
            ic,
            lt,
        });
        Ok(())
    }

    pub fn build(self) -> DirectedGraph {
        let n = self.labels.len();
        let numeric: Option<Vec<u64>> = self.labels.iter().map(|l| l.parse().ok()).collect();
        let remap: Vec<u32> = match numeric {
            Some(values) => {
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_by_key(|&i| values[i as usize]);
                let mut remap = vec![0u32; n];
                for (rank, &old) in order.iter().enumerate() {
                    remap[old as usize] = rank as u32;
                }
                remap
            }
            None => (0..n as u32).collect(),
        };
        let mut labels = vec![String::new(); n];
        for (old, label) in self.labels.into_iter().enumerate() {
            labels[remap[old] as usize] = label;
        }
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), NodeId(i as u32)))
            .collect();

        let mut edges: Vec<PendingEdge> = self
            .edges
            .into_iter()
            .map(|e| PendingEdge {
                src: remap[e.src as usize],
                dst: remap[e.dst as usize],
                ..e
            })
            .collect();
        edges.sort_by_key(|e| (e.src, e.dst));

        let m = edges.len();
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.src as usize + 1] += 1;
            in_offsets[e.dst as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let sources: Vec<NodeId> = edges.iter().map(|e| NodeId(e.src)).collect();
        let targets: Vec<NodeId> = edges.iter().map(|e| NodeId(e.dst)).collect();
        let ic = edges.iter().map(|e| e.ic.unwrap_or(f64::NAN)).collect();
        let lt = edges.iter().map(|e| e.lt.unwrap_or(f64::NAN)).collect();

        // Edges are sorted by source, so filling the incoming lists in edge
        // order leaves each one sorted by source as well.
        let mut in_edges = vec![0usize; m];
        let mut cursor = in_offsets.clone();
        for (id, e) in edges.iter().enumerate() {
            let slot = &mut cursor[e.dst as usize];
            in_edges[*slot] = id;
            *slot += 1;
        }

        DirectedGraph {
            labels,
            label_index,
            out_offsets,
            sources,
            targets,
            ic,
            lt,
            in_offsets,
            in_edges,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loads_plain_edge_list() {
        let g = DirectedGraph::parse("0 1\n0 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.out_degree(NodeId(0)), 2);
        assert!(!g.has_ic_probs());
        assert_eq!(g.ic_prob(0), None);
    }

    #[test]
    fn loads_ic_probability_column() {
        let g = DirectedGraph::parse("0 1 0.5\n").unwrap();
        let e = g.find_edge(NodeId(0), NodeId(1)).unwrap();
        assert_eq!(g.ic_prob(e), Some(0.5));
        assert_eq!(g.lt_weight(e), None);
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        let err = DirectedGraph::parse("3 3\n").unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop { line: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = DirectedGraph::parse("# header\n0 1\n1 2\n0 1 0.3\n").unwrap_err();
        match err {
            GraphError::DuplicateEdge { line, first, .. } => {
                assert_eq!(line, 4);
                assert_eq!(first, 2);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_malformed_lines() {
        for text in [
            "0 1 abc\n",
            "0 1 0.1 0.2 0.3\n",
            "0 1 1.5\n",
            "0 1 0.1 -0.2\n",
        ] {
            assert!(DirectedGraph::parse(text).is_err(), "{text:?} should fail");
        }
    }

    #[test]
    fn numeric_labels_map_in_numeric_order() {
        let g = DirectedGraph::parse("10 2\n2 7\n").unwrap();
        assert_eq!(g.label(NodeId(0)), "2");
        assert_eq!(g.label(NodeId(1)), "7");
        assert_eq!(g.label(NodeId(2)), "10");
        assert_eq!(g.node_by_label("10"), Some(NodeId(2)));
    }

    #[test]
    fn string_labels_map_in_appearance_order() {
        let g = DirectedGraph::parse("bob alice\nalice carol\n").unwrap();
        assert_eq!(g.node_by_label("bob"), Some(NodeId(0)));
        assert_eq!(g.node_by_label("alice"), Some(NodeId(1)));
        assert_eq!(g.node_by_label("carol"), Some(NodeId(2)));
    }

    #[test]
    fn weighted_cascade_star() {
        let g = DirectedGraph::parse("1 0\n2 0\n3 0\n4 0\n")
            .unwrap()
            .assign_weights(WeightScheme::WeightedCascade)
            .unwrap();
        for e in g.in_edge_ids(NodeId(0)) {
            assert_eq!(g.lt_weight(*e), Some(0.25));
            assert_eq!(g.ic_prob(*e), Some(0.25));
        }
        assert!(g.validate_lt().is_empty());
    }

    #[test]
    fn uniform_ic_sets_every_edge() {
        let g = DirectedGraph::parse("0 1\n1 2\n2 0\n")
            .unwrap()
            .assign_weights(WeightScheme::UniformIc(1.0))
            .unwrap();
        assert!(g.edges().all(|e| e.ic_prob == Some(1.0)));
        assert!(DirectedGraph::parse("0 1\n")
            .unwrap()
            .assign_weights(WeightScheme::UniformIc(1.5))
            .is_err());
    }

    #[test]
    fn trivalency_draws_from_levels_deterministically() {
        let text: String = (0..50).map(|i| format!("{} {}\n", i, i + 1)).collect();
        let a = DirectedGraph::parse(&text)
            .unwrap()
            .assign_weights(WeightScheme::Trivalency { seed: 9 })
            .unwrap();
        let b = DirectedGraph::parse(&text)
            .unwrap()
            .assign_weights(WeightScheme::Trivalency { seed: 9 })
            .unwrap();
        let pa: Vec<_> = a.edges().map(|e| e.ic_prob.unwrap()).collect();
        let pb: Vec<_> = b.edges().map(|e| e.ic_prob.unwrap()).collect();
        assert_eq!(pa, pb);
        assert!(pa.iter().all(|p| TRIVALENCY_LEVELS.contains(p)));
        for level in TRIVALENCY_LEVELS {
            assert!(pa.contains(&level));
        }
    }

    #[test]
    fn validate_lt_reports_overweight_node() {
        let g = DirectedGraph::parse("a v 0 0.7\nb v 0 0.7\n").unwrap();
        let v = g.node_by_label("v").unwrap();
        let violations = g.validate_lt();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].node, v);
        assert!((violations[0].sum - 1.4).abs() < 1e-12);
        assert!(DirectedGraph::parse("").unwrap().validate_lt().is_empty());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!(
            "uniform:0.1".parse::<WeightScheme>().unwrap(),
            WeightScheme::UniformIc(0.1)
        );
        assert_eq!(
            "wc".parse::<WeightScheme>().unwrap(),
            WeightScheme::WeightedCascade
        );
        assert_eq!(
            "trivalency:4".parse::<WeightScheme>().unwrap(),
            WeightScheme::Trivalency { seed: 4 }
        );
        assert!("uniform".parse::<WeightScheme>().is_err());
        assert!("uniform:2".parse::<WeightScheme>().is_err());
        assert!("bogus".parse::<WeightScheme>().is_err());
    }

    #[test]
    fn isolated_nodes_survive_serialization() {
        let g = DirectedGraph::parse("5\n0 1 0.5 0.25\n").unwrap();
        assert_eq!(g.node_count(), 3);
        let text = g.to_edge_list();
        assert!(text.starts_with("# n=3 m=1\n"));
        let h = DirectedGraph::parse(&text).unwrap();
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.to_edge_list(), text);
    }

    fn arb_graph() -> impl Strategy<Value = DirectedGraph> {
        let param = prop_oneof![Just(None), (0.0f64..=1.0).prop_map(Some)];
        (2usize..12)
            .prop_flat_map(move |n| {
                proptest::collection::vec((0..n, 0..n, param.clone(), param.clone()), 0..40)
                    .prop_map(move |raw| (n, raw))
            })
            .prop_map(|(n, raw)| {
                let mut b = GraphBuilder::with_nodes(n);
                for (u, v, ic, lt) in raw {
                    // Dropping self-loops and repeats keeps only valid edges.
                    let _ = b.add_edge_between(u, v, ic, lt);
                }
                b.build()
            })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(g in arb_graph()) {
            let h = DirectedGraph::parse(&g.to_edge_list()).unwrap();
            prop_assert_eq!(g.node_count(), h.node_count());
            let ea: Vec<_> = g.edges().map(|e| (g.label(e.source).to_string(), g.label(e.target).to_string(), e.ic_prob, e.lt_weight)).collect();
            let eb: Vec<_> = h.edges().map(|e| (h.label(e.source).to_string(), h.label(e.target).to_string(), e.ic_prob, e.lt_weight)).collect();
            prop_assert_eq!(ea, eb);
        }

        #[test]
        fn in_adjacency_is_transpose(g in arb_graph()) {
            let mut from_out = Vec::new();
            for u in g.nodes() {
                for e in g.out_edge_ids(u) {
                    prop_assert_eq!(g.edge_source(e), u);
                    from_out.push((u, g.edge_target(e), e));
                }
            }
            let mut from_in = Vec::new();
            for v in g.nodes() {
                for &e in g.in_edge_ids(v) {
                    prop_assert_eq!(g.edge_target(e), v);
                    from_in.push((g.edge_source(e), v, e));
                }
            }
            from_out.sort();
            from_in.sort();
            prop_assert_eq!(from_out, from_in);
            prop_assert!(g.edges().all(|e| e.source != e.target));
        }

        #[test]
        fn weighted_cascade_is_lt_valid(g in arb_graph()) {
            let g = g.assign_weights(WeightScheme::WeightedCascade).unwrap();
            prop_assert!(g.validate_lt().is_empty());
            for v in g.nodes() {
                let sum = g.incoming_lt_sum(v);
                if g.in_degree(v) == 0 {
                    prop_assert_eq!(sum, 0.0);
                } else {
                    prop_assert!((sum - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
