//! Directed graph model, random generation and structural queries.

pub mod io;

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{self, SpectralError};
use crate::ComplexMatrix;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge ({src}, {dst}) references a node outside 0..{n}")]
    NodeOutOfRange { src: usize, dst: usize, n: usize },
    #[error("edge ({src}, {dst}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { src: usize, dst: usize, weight: f64 },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("spectral radius {radius:e} is below the tolerance {tolerance:e}; the operator is nilpotent")]
    ZeroSpectralRadius { radius: f64, tolerance: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a generated graph was sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Weighted directed graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiGraph {
    n: usize,
    edges: Vec<Edge>,
    provenance: Option<Provenance>,
}

impl DiGraph {
    /// Validates node range, weights and uniqueness of `(src, dst)` pairs.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(GraphError::NodeOutOfRange { src: e.src, dst: e.dst, n });
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(GraphError::InvalidWeight { src: e.src, dst: e.dst, weight: e.weight });
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(GraphError::DuplicateEdge { src: e.src, dst: e.dst });
            }
        }
        Ok(Self { n, edges, provenance: None })
    }

    /// Unweighted graph from `(src, dst)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(n, pairs.iter().map(|&(src, dst)| Edge { src, dst, weight: 1.0 }).collect())
    }

    /// Directed cycle `0 → 1 → … → n−1 → 0`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).filter(|(a, b)| a != b).collect();
        Self::from_pairs(n, &pairs)
    }

    /// Directed path `0 → 1 → … → n−1`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_pairs(n, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.src] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.dst] += 1;
        }
        d
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.src].push(e.dst);
        }
        adj
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.dst].push(e.src);
        }
        adj
    }
}

/// Dense adjacency matrix, entry `(i, j)` = weight of edge `i → j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix(DMatrix<f64>);

impl AdjacencyMatrix {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        spectral::to_complex(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    StronglyConnected,
    WeaklyConnected,
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityClass {
    pub class: Connectivity,
    /// Nodes with out-degree 0.
    pub sinks: Vec<usize>,
    /// Nodes with in-degree 0.
    pub sources: Vec<usize>,
}

/// Erdős–Rényi digraph: every ordered pair `(i, j)`, `i ≠ j`, is an edge of
/// weight 1 with probability `p`.
///
/// The stream contract is fixed: a ChaCha8 generator seeded with
/// `seed_from_u64(seed)` draws exactly one uniform `f64` in `[0, 1)` per pair,
/// visiting pairs row-major (`i` outer, `j` inner, skipping `j == i`); the pair
/// is kept when the draw is below `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<DiGraph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for src in 0..n {
        for dst in 0..n {
            if src == dst {
                continue;
            }
            let u: f64 = rng.gen();
            if u < p {
                edges.push(Edge { src, dst, weight: 1.0 });
            }
        }
    }
    Ok(DiGraph { n, edges, provenance: Some(Provenance { seed, p }) })
}

pub fn adjacency(g: &DiGraph) -> AdjacencyMatrix {
    let mut m = DMatrix::zeros(g.n, g.n);
    for e in &g.edges {
        m[(e.src, e.dst)] = e.weight;
    }
    AdjacencyMatrix(m)
}

/// `diag(A·1)`: out-degrees for a directed graph.
pub fn degree_matrix(a: &AdjacencyMatrix) -> DMatrix<f64> {
    let n = a.n();
    let sums: Vec<f64> = (0..n).map(|i| a.0.row(i).sum()).collect();
    DMatrix::from_fn(n, n, |i, j| if i == j { sums[i] } else { 0.0 })
}

fn reach_all(adj: &[Vec<usize>], start: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == adj.len()
}

pub fn connectivity_class(g: &DiGraph) -> ConnectivityClass {
    let sinks = g.out_degrees().iter().enumerate().filter(|(_, &d)| d == 0).map(|(i, _)| i).collect();
    let sources = g.in_degrees().iter().enumerate().filter(|(_, &d)| d == 0).map(|(i, _)| i).collect();
    let succ = g.successors();
    let pred = g.predecessors();
    let class = if reach_all(&succ, 0) && reach_all(&pred, 0) {
        Connectivity::StronglyConnected
    } else {
        let undirected: Vec<Vec<usize>> = succ.iter().zip(&pred).map(|(s, p)| s.iter().chain(p).copied().collect()).collect();
        if reach_all(&undirected, 0) {
            Connectivity::WeaklyConnected
        } else {
            Connectivity::Disconnected
        }
    };
    ConnectivityClass { class, sinks, sources }
}

/// True when the graph has no directed cycle (Kahn's algorithm).
pub fn is_dag(g: &DiGraph) -> bool {
    let succ = g.successors();
    let mut indeg = g.in_degrees();
    let mut queue: VecDeque<usize> = (0..g.n).filter(|&i| indeg[i] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop_front() {
        removed += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    removed == g.n
}

/// Adjacency operator scaled so that its spectral radius is 1.
#[derive(Debug, Clone)]
pub struct NormalizedOperator {
    matrix: DMatrix<f64>,
    spectral_radius: f64,
}

impl NormalizedOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Spectral radius of the matrix before scaling.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        spectral::to_complex(&self.matrix)
    }
}

/// `A / ρ(A)`, with `ρ` taken from the full eigenvalue set.
///
/// Fails with [`GraphError::ZeroSpectralRadius`] when `ρ ≤ 1e−10·n`, which is
/// the case for every DAG.
pub fn normalize(a: &AdjacencyMatrix) -> Result<NormalizedOperator, GraphError> {
    let n = a.n();
    let radius = spectral::eigenvalues(&a.to_complex())?.spectral_radius();
    let tolerance = 1e-10 * n as f64;
    if radius <= tolerance {
        return Err(GraphError::ZeroSpectralRadius { radius, tolerance });
    }
    Ok(NormalizedOperator { matrix: &a.0 / radius, spectral_radius: radius })
}
