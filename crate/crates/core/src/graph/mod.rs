//! Base graphs, stochastic annotations and realizations.

mod generate;
mod io;

pub(crate) use generate::shuffled;
pub use generate::{generate, GeneratorKind, ProbModel};
pub use io::{from_text, load, save, to_text};

use rand::Rng;
use thiserror::Error;

use crate::rng::{self, StreamRng};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("edge {edge}: probability out of range (0, 1]: {p}")]
    ProbabilityOutOfRange { edge: EdgeId, p: f64 },
    #[error("expected {expected} probabilities, got {got}")]
    ProbabilityCount { expected: usize, got: usize },
    #[error("edge {0}-{1} does not cross the bipartition")]
    NotBipartite(VertexId, VertexId),
    #[error("bipartition covers {got} vertices, graph has {n}")]
    BipartitionSize { got: usize, n: usize },
    #[error("realization has {got} bits, graph has {m} edges")]
    RealizationSize { got: usize, m: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// A simple undirected graph with stable edge ids.
///
/// Edges are stored as `(u, v)` with `u < v`; edge ids are positions in the
/// edge list and never change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl BaseGraph {
    /// Builds a graph, normalizing each pair to `u < v`. Rejects self-loops,
    /// parallel edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self, GraphError> {
        let mut g = BaseGraph::empty(n);
        let mut seen = std::collections::HashSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            let id = g.edges.len();
            g.edges.push((u, v));
            g.adj[u].push((v, id));
            g.adj[v].push((u, id));
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Self {
        BaseGraph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        debug_assert!(a == v || b == v);
        if a == v {
            b
        } else {
            a
        }
    }

    /// Incident `(neighbor, edge)` pairs in edge-id order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    /// Spanning subgraph keeping the edges selected by `keep`. Returns the
    /// subgraph and, for each of its edges, the id of the original edge.
    pub fn subgraph(&self, mut keep: impl FnMut(EdgeId) -> bool) -> (BaseGraph, Vec<EdgeId>) {
        let mut g = BaseGraph::empty(self.n);
        let mut map = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if keep(id) {
                let nid = g.edges.len();
                g.edges.push((u, v));
                g.adj[u].push((v, nid));
                g.adj[v].push((u, nid));
                map.push(id);
            }
        }
        (g, map)
    }

    /// Two-colors the graph by BFS from the lowest uncolored vertex, if
    /// possible.
    pub fn bipartition(&self) -> Option<Bipartition> {
        let mut side: Vec<Option<Side>> = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(Side::Left);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &(w, _) in &self.adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(su.flip());
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(Bipartition {
            side: side.into_iter().map(Option::unwrap).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Per-vertex side labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub side: Vec<Side>,
}

impl Bipartition {
    pub fn from_left(n: usize, left: impl IntoIterator<Item = VertexId>) -> Result<Self, GraphError> {
        let mut side = vec![Side::Right; n];
        for v in left {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            side[v] = Side::Left;
        }
        Ok(Bipartition { side })
    }

    pub fn is_left(&self, v: VertexId) -> bool {
        self.side[v] == Side::Left
    }

    pub fn left(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.side
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Side::Left)
            .map(|(v, _)| v)
    }

    /// Checks that every edge of `g` joins the two sides.
    pub fn validate(&self, g: &BaseGraph) -> Result<(), GraphError> {
        if self.side.len() != g.n() {
            return Err(GraphError::BipartitionSize {
                got: self.side.len(),
                n: g.n(),
            });
        }
        for &(u, v) in g.edges() {
            if self.side[u] == self.side[v] {
                return Err(GraphError::NotBipartite(u, v));
            }
        }
        Ok(())
    }
}

/// A base graph with a realization probability on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticGraph {
    graph: BaseGraph,
    prob: Vec<f64>,
    bipartition: Option<Bipartition>,
}

impl StochasticGraph {
    /// Every `p_e` must be finite and in `(0, 1]`.
    pub fn new(graph: BaseGraph, prob: Vec<f64>) -> Result<Self, GraphError> {
        if prob.len() != graph.m() {
            return Err(GraphError::ProbabilityCount {
                expected: graph.m(),
                got: prob.len(),
            });
        }
        for (edge, &p) in prob.iter().enumerate() {
            if !(p.is_finite() && p > 0.0 && p <= 1.0) {
                return Err(GraphError::ProbabilityOutOfRange { edge, p });
            }
        }
        Ok(StochasticGraph {
            graph,
            prob,
            bipartition: None,
        })
    }

    /// Convenience constructor from `(u, v, p)` triples.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self, GraphError> {
        let (pairs, prob): (Vec<_>, Vec<_>) = edges.into_iter().map(|(u, v, p)| ((u, v), p)).unzip();
        StochasticGraph::new(BaseGraph::new(n, pairs)?, prob)
    }

    pub fn with_bipartition(mut self, b: Bipartition) -> Result<Self, GraphError> {
        b.validate(&self.graph)?;
        self.bipartition = Some(b);
        Ok(self)
    }

    pub fn graph(&self) -> &BaseGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn p(&self, e: EdgeId) -> f64 {
        self.prob[e]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.prob
    }

    pub fn bipartition(&self) -> Option<&Bipartition> {
        self.bipartition.as_ref()
    }

    /// The common edge probability, if all edges share one.
    pub fn uniform_probability(&self) -> Option<f64> {
        let first = *self.prob.first()?;
        self.prob.iter().all(|&p| p == first).then_some(first)
    }

    /// `E[deg_{G*}(v)] = sum of p_e over edges at v`.
    pub fn expected_degrees(&self) -> Vec<f64> {
        (0..self.n())
            .map(|v| self.graph.neighbors(v).iter().map(|&(_, e)| self.prob[e]).sum())
            .collect()
    }

    /// The maximum expected realized degree; 0 for an edgeless graph.
    pub fn max_expected_degree(&self) -> f64 {
        self.expected_degrees().into_iter().fold(0.0, f64::max)
    }
}

/// One bit per base edge: whether the edge exists in `G*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Realization {
    present: Vec<bool>,
}

impl Realization {
    pub fn from_bits(g: &BaseGraph, present: Vec<bool>) -> Result<Self, GraphError> {
        if present.len() != g.m() {
            return Err(GraphError::RealizationSize {
                got: present.len(),
                m: g.m(),
            });
        }
        Ok(Realization { present })
    }

    /// Every base edge present.
    pub fn full(g: &BaseGraph) -> Self {
        Realization {
            present: vec![true; g.m()],
        }
    }

    pub fn is_present(&self, e: EdgeId) -> bool {
        self.present[e]
    }

    pub fn bits(&self) -> &[bool] {
        &self.present
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }

    /// Number of realized edges.
    pub fn count(&self) -> usize {
        self.present.iter().filter(|&&b| b).count()
    }

    pub fn realized_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.present.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| e)
    }

    /// Realized `(neighbor, edge)` pairs at `v`.
    pub fn realized_neighbors<'a>(
        &'a self,
        g: &'a BaseGraph,
        v: VertexId,
    ) -> impl Iterator<Item = (VertexId, EdgeId)> + 'a {
        g.neighbors(v).iter().copied().filter(|&(_, e)| self.present[e])
    }

    pub fn realized_degree(&self, g: &BaseGraph, v: VertexId) -> usize {
        self.realized_neighbors(g, v).count()
    }

    /// `G*` as a graph on the same vertex set, with the map from its edge ids
    /// back to base edge ids.
    pub fn realized_graph(&self, g: &BaseGraph) -> (BaseGraph, Vec<EdgeId>) {
        g.subgraph(|e| self.present[e])
    }
}

/// Samples every edge independently with probability `p_e` from the stream
/// seeded by `seed`. Exactly one uniform draw is consumed per edge.
pub fn sample_realization(sg: &StochasticGraph, seed: u64) -> Realization {
    let mut rng = rng::from_seed(seed);
    sample_with(sg, &mut rng, None)
}

/// Like [`sample_realization`] but using a caller-owned stream, optionally
/// forcing one edge to be present. The forced edge still consumes its draw so
/// the remaining edges see the same stream positions.
pub fn sample_with(sg: &StochasticGraph, rng: &mut StreamRng, forced: Option<EdgeId>) -> Realization {
    let present = sg
        .prob
        .iter()
        .enumerate()
        .map(|(e, &p)| {
            let u: f64 = rng.random();
            u < p || forced == Some(e)
        })
        .collect();
    Realization { present }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(p: f64) -> StochasticGraph {
        StochasticGraph::from_edges(3, [(0, 1, p), (1, 2, p), (0, 2, p)]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(BaseGraph::new(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            BaseGraph::new(3, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            BaseGraph::new(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn rejects_bad_probabilities() {
        let g = BaseGraph::new(2, [(0, 1)]).unwrap();
        for p in [0.0, -0.1, 1.5, f64::NAN, f64::INFINITY] {
            assert!(StochasticGraph::new(g.clone(), vec![p]).is_err(), "p = {p}");
        }
        assert!(StochasticGraph::new(g, vec![1.0]).is_ok());
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = BaseGraph::new(4, [(2, 0), (1, 2), (3, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2), (1, 3)]);
        assert_eq!(g.neighbors(2), &[(0, 0), (1, 1)]);
        assert_eq!(g.find_edge(3, 1), Some(2));
        assert_eq!(g.find_edge(0, 3), None);
        assert_eq!(g.other(1, 2), 1);
    }

    #[test]
    fn expected_degree_examples() {
        let t = triangle(0.5);
        assert_eq!(t.expected_degrees(), vec![1.0, 1.0, 1.0]);
        assert_eq!(t.max_expected_degree(), 1.0);

        let iso = StochasticGraph::new(BaseGraph::empty(1), vec![]).unwrap();
        assert_eq!(iso.expected_degrees(), vec![0.0]);
        assert_eq!(iso.max_expected_degree(), 0.0);

        let path = StochasticGraph::from_edges(3, [(0, 1, 0.3), (1, 2, 0.9)]).unwrap();
        assert!((path.max_expected_degree() - 1.2).abs() < 1e-15);
        assert!((path.expected_degrees()[1] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn probability_one_edges_always_present() {
        let t = triangle(1.0);
        for seed in 0..50 {
            assert_eq!(sample_realization(&t, seed).count(), 3);
        }
    }

    #[test]
    fn empty_graph_gives_empty_realization() {
        let sg = StochasticGraph::new(BaseGraph::empty(4), vec![]).unwrap();
        assert!(sample_realization(&sg, 9).is_empty());
    }

    #[test]
    fn same_seed_same_realization() {
        let t = triangle(0.5);
        assert_eq!(sample_realization(&t, 42), sample_realization(&t, 42));
    }

    #[test]
    fn forced_edge_is_present() {
        let t = triangle(1e-9);
        let mut r = rng::from_seed(1);
        let real = sample_with(&t, &mut r, Some(2));
        assert!(real.is_present(2));
    }

    #[test]
    fn bipartition_detection() {
        let c4 = BaseGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let b = c4.bipartition().unwrap();
        b.validate(&c4).unwrap();
        let c3 = BaseGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(c3.bipartition().is_none());
        let bad = Bipartition::from_left(3, [0, 1]).unwrap();
        assert!(matches!(bad.validate(&c3), Err(GraphError::NotBipartite(..))));
    }

    #[test]
    fn realized_graph_maps_back() {
        let t = triangle(1.0);
        let r = Realization::from_bits(t.graph(), vec![true, false, true]).unwrap();
        let (h, map) = r.realized_graph(t.graph());
        assert_eq!(h.m(), 2);
        assert_eq!(map, vec![0, 2]);
        assert_eq!(h.edges(), &[(0, 1), (0, 2)]);
    }
}
