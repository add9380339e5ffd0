//! Dependency graphs and cascade models.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Dense index of a target in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TargetId(pub usize);

impl TargetId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directedness {
    Directed,
    Undirected,
}

impl Directedness {
    pub fn is_directed(self) -> bool {
        matches!(self, Directedness::Directed)
    }
}

/// A dependency edge. A failure at `source` may cascade to `dest` with
/// probability `prob` (both ways for undirected graphs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub dest: usize,
    pub prob: f64,
}

/// Targets with intrinsic worths joined by probabilistic dependency edges.
///
/// Edges are kept sorted by `(source, dest)`; undirected edges are stored once
/// with `source < dest`. The graph is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyGraph {
    n: usize,
    directedness: Directedness,
    worths: Vec<f64>,
    attacker_worths: Vec<f64>,
    edges: Vec<Edge>,
    // CSR adjacency: for each node the outgoing (neighbor, edge index) pairs.
    adj_offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl DependencyGraph {
    /// Builds a graph with all worths set to zero.
    pub fn new(n: usize, directedness: Directedness, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("graph needs at least one target"));
        }
        let mut edges = edges;
        for (i, e) in edges.iter_mut().enumerate() {
            if e.source >= n || e.dest >= n {
                return Err(Error::InvalidGraph(alloc::format!(
                    "edge {i} ({}, {}) references a target outside [0, {n})",
                    e.source,
                    e.dest
                )));
            }
            if e.source == e.dest {
                return Err(Error::InvalidGraph(alloc::format!(
                    "edge {i} is a self-loop on {}",
                    e.source
                )));
            }
            if !(0.0..=1.0).contains(&e.prob) {
                return Err(Error::InvalidGraph(alloc::format!(
                    "edge {i} has cascade probability {} outside [0, 1]",
                    e.prob
                )));
            }
            if !directedness.is_directed() && e.source > e.dest {
                core::mem::swap(&mut e.source, &mut e.dest);
            }
        }
        edges.sort_by_key(|a| (a.source, a.dest));
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].source, w[0].dest) == (w[1].source, w[1].dest))
        {
            return Err(Error::InvalidGraph(alloc::format!(
                "duplicate edge ({}, {})",
                w[0].source,
                w[0].dest
            )));
        }

        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.source] += 1;
            if !directedness.is_directed() {
                degree[e.dest] += 1;
            }
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for d in &degree {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let mut fill = adj_offsets[..n].to_vec();
        let mut adj = vec![(0, 0); adj_offsets[n]];
        for (i, e) in edges.iter().enumerate() {
            adj[fill[e.source]] = (e.dest, i);
            fill[e.source] += 1;
            if !directedness.is_directed() {
                adj[fill[e.dest]] = (e.source, i);
                fill[e.dest] += 1;
            }
        }

        Ok(DependencyGraph {
            n,
            directedness,
            worths: vec![0.0; n],
            attacker_worths: vec![0.0; n],
            edges,
            adj_offsets,
            adj,
        })
    }

    /// Builds an undirected graph from `(a, b, prob)` triples.
    pub fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(n, Directedness::Undirected, to_edges(edges))
    }

    /// Builds a directed graph from `(source, dest, prob)` triples.
    pub fn directed(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(n, Directedness::Directed, to_edges(edges))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness.is_directed()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn worths(&self) -> &[f64] {
        &self.worths
    }

    pub fn attacker_worths(&self) -> &[f64] {
        &self.attacker_worths
    }

    /// True when attacker worths equal defender worths, i.e. the game is zero-sum.
    pub fn is_zero_sum(&self) -> bool {
        self.worths == self.attacker_worths
    }

    /// Sets defender worths; attacker worths follow them unless given.
    pub fn with_worths(mut self, worths: Vec<f64>, attacker: Option<Vec<f64>>) -> Result<Self> {
        check_worths(self.n, &worths, "worths")?;
        let attacker = match attacker {
            Some(a) => {
                check_worths(self.n, &a, "attacker worths")?;
                a
            }
            None => worths.clone(),
        };
        self.worths = worths;
        self.attacker_worths = attacker;
        Ok(self)
    }

    /// Outgoing neighbors of `t` with the index of the connecting edge.
    pub fn neighbors(&self, t: usize) -> &[(usize, usize)] {
        &self.adj[self.adj_offsets[t]..self.adj_offsets[t + 1]]
    }

    /// Number of incident edges (out-degree for directed graphs).
    pub fn degree(&self, t: usize) -> usize {
        self.adj_offsets[t + 1] - self.adj_offsets[t]
    }

    /// Cascade probability from `s` to `d`, zero for unlisted pairs.
    pub fn prob(&self, s: usize, d: usize) -> f64 {
        self.neighbors(s)
            .iter()
            .find(|(v, _)| *v == d)
            .map_or(0.0, |&(_, e)| self.edges[e].prob)
    }

    /// Returns a copy with every edge probability replaced by `prob`.
    pub fn with_uniform_prob(&self, prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prob) {
            return Err(invalid!("cascade probability {prob} outside [0, 1]"));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.prob = prob;
        }
        Ok(g)
    }
}

fn to_edges(edges: &[(usize, usize, f64)]) -> Vec<Edge> {
    edges
        .iter()
        .map(|&(source, dest, prob)| Edge { source, dest, prob })
        .collect()
}

fn check_worths(n: usize, worths: &[f64], what: &str) -> Result<()> {
    if worths.len() != n {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{what}: expected {n} values, got {}",
            worths.len()
        )));
    }
    if let Some((t, w)) = worths
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
    {
        return Err(invalid!("{what}: target {t} has invalid worth {w}"));
    }
    Ok(())
}

/// Pairwise cascade probabilities for every ordered pair of targets.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseModel {
    graph: DependencyGraph,
    probs: Vec<f64>,
}

impl DenseModel {
    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    pub fn prob(&self, s: usize, d: usize) -> f64 {
        self.probs[s * self.graph.n + d]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        let n = self.graph.n;
        &self.probs[s * n..(s + 1) * n]
    }
}

/// The graph over which cascades are evaluated: either the sparse edge list
/// (unlisted pairs never cascade) or a dense matrix produced by the edge-noise
/// transform.
#[derive(Debug, Clone, PartialEq)]
pub enum CascadeModel {
    Sparse(DependencyGraph),
    Dense(DenseModel),
}

impl CascadeModel {
    pub fn graph(&self) -> &DependencyGraph {
        match self {
            CascadeModel::Sparse(g) => g,
            CascadeModel::Dense(d) => &d.graph,
        }
    }

    pub fn n(&self) -> usize {
        self.graph().n
    }

    pub fn is_directed(&self) -> bool {
        self.graph().is_directed()
    }

    pub fn prob(&self, s: usize, d: usize) -> f64 {
        match self {
            CascadeModel::Sparse(g) => g.prob(s, d),
            CascadeModel::Dense(m) => m.prob(s, d),
        }
    }

    /// Calls `f(a, b, p)` for every potential live edge with `p > 0`, in a
    /// fixed canonical order: sorted `(a, b)` with `a < b` when undirected.
    ///
    /// Sparse and dense models with equal probabilities enumerate the same
    /// sequence, so samplers consume identical random streams on both.
    pub fn for_each_candidate_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        match self {
            CascadeModel::Sparse(g) => {
                for e in &g.edges {
                    if e.prob > 0.0 {
                        f(e.source, e.dest, e.prob);
                    }
                }
            }
            CascadeModel::Dense(m) => {
                let n = m.graph.n;
                let directed = m.graph.is_directed();
                for a in 0..n {
                    let row = m.row(a);
                    let start = if directed { 0 } else { a + 1 };
                    for (b, &p) in row.iter().enumerate().skip(start) {
                        if p > 0.0 && a != b {
                            f(a, b, p);
                        }
                    }
                }
            }
        }
    }

    /// Calls `f(neighbor, p)` for every target `s` may cascade to with `p > 0`.
    pub fn for_each_out_neighbor(&self, s: usize, mut f: impl FnMut(usize, f64)) {
        match self {
            CascadeModel::Sparse(g) => {
                for &(v, e) in g.neighbors(s) {
                    let p = g.edges[e].prob;
                    if p > 0.0 {
                        f(v, p);
                    }
                }
            }
            CascadeModel::Dense(m) => {
                for (v, &p) in m.row(s).iter().enumerate() {
                    if p > 0.0 && v != s {
                        f(v, p);
                    }
                }
            }
        }
    }

    /// Dense copy of this model (a no-op for dense models).
    pub fn to_dense(&self) -> DenseModel {
        match self {
            CascadeModel::Dense(d) => d.clone(),
            CascadeModel::Sparse(g) => {
                let n = g.n;
                let mut probs = vec![0.0; n * n];
                for e in &g.edges {
                    probs[e.source * n + e.dest] = e.prob;
                    if !g.is_directed() {
                        probs[e.dest * n + e.source] = e.prob;
                    }
                }
                DenseModel {
                    graph: g.clone(),
                    probs,
                }
            }
        }
    }
}

impl From<DependencyGraph> for CascadeModel {
    fn from(g: DependencyGraph) -> Self {
        CascadeModel::Sparse(g)
    }
}

/// Models uncertainty about the observed graph. Each observed edge is real
/// with probability `1 - epsilon`; each unobserved pair is a real edge with
/// probability `epsilon` and then cascades with probability `base_p`.
pub fn apply_edge_noise(
    graph: &DependencyGraph,
    epsilon: f64,
    base_p: f64,
) -> Result<CascadeModel> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid!("epsilon {epsilon} outside [0, 1]"));
    }
    if !(0.0..=1.0).contains(&base_p) {
        return Err(invalid!("base probability {base_p} outside [0, 1]"));
    }
    let n = graph.n;
    let unobserved = base_p * epsilon;
    let mut probs = vec![unobserved; n * n];
    for t in 0..n {
        probs[t * n + t] = 0.0;
    }
    for e in &graph.edges {
        let p = e.prob * (1.0 - epsilon);
        probs[e.source * n + e.dest] = p;
        if !graph.is_directed() {
            probs[e.dest * n + e.source] = p;
        }
    }
    Ok(CascadeModel::Dense(DenseModel {
        graph: graph.clone(),
        probs,
    }))
}
