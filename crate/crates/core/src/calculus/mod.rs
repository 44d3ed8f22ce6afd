//! Discrete calculus on graphs: flows, gradients, divergence, weighted
//! Laplacians, SPD solves and isoperimetric constants.

mod isoperimetric;
mod sparse;

pub use isoperimetric::{elliptic_ratio, isoperimetric_constant, IsoMode, EXHAUSTIVE_LIMIT};
pub use sparse::{solve_spd, SparseSym, SpdOptions};

/// Undirected simple graph with numbered edges stored as `[low, high]`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<[usize; 2]>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph; each pair is normalized so that `low < high`.
    pub fn new(n: usize, edges: Vec<[usize; 2]>) -> Self {
        let edges: Vec<[usize; 2]> = edges
            .into_iter()
            .map(|[a, b]| if a < b { [a, b] } else { [b, a] })
            .collect();
        let mut adjacency = vec![Vec::new(); n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }
        Graph { n, edges, adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// `(neighbor, edge)` pairs around `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// Connectivity over vertices that have at least one edge, or over all
    /// vertices when `include_isolated` is set.
    pub fn is_connected(&self, include_isolated: bool) -> bool {
        let active: Vec<usize> = (0..self.n)
            .filter(|&v| include_isolated || !self.adjacency[v].is_empty())
            .collect();
        let Some(&start) = active.first() else {
            return true;
        };
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == active.len()
    }
}

/// Symmetric weight per undirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeight(pub Vec<f64>);

/// Antisymmetric function on oriented edges, stored once per edge in the
/// low-to-high orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow(pub Vec<f64>);

impl Flow {
    /// Value on the oriented edge `from -> to`.
    pub fn along(&self, graph: &Graph, e: usize, from: usize) -> f64 {
        if graph.edges[e][0] == from {
            self.0[e]
        } else {
            -self.0[e]
        }
    }
}

/// `(∇x)_ij = η_ij (x_j − x_i)`, stored on the low-to-high orientation.
pub fn gradient(graph: &Graph, weight: &EdgeWeight, x: &[f64]) -> Flow {
    Flow(
        graph
            .edges
            .iter()
            .zip(&weight.0)
            .map(|(&[i, j], &w)| w * (x[j] - x[i]))
            .collect(),
    )
}

/// `div(x)_i = Σ_{j~i} x_ij`.
pub fn divergence(graph: &Graph, flow: &Flow) -> Vec<f64> {
    let mut out = vec![0.0; graph.n];
    for (&[i, j], &f) in graph.edges.iter().zip(&flow.0) {
        out[i] += f;
        out[j] -= f;
    }
    out
}

/// Weighted graph Laplacian `(Δx)_i = Σ_{j~i} η_ij (x_j − x_i)`.
#[derive(Debug, Clone, Copy)]
pub struct Laplacian<'a> {
    graph: &'a Graph,
    weight: &'a EdgeWeight,
}

impl<'a> Laplacian<'a> {
    pub fn new(graph: &'a Graph, weight: &'a EdgeWeight) -> Self {
        Laplacian { graph, weight }
    }

    /// Matrix-free application; evaluates exactly the same expression as
    /// `divergence(gradient(x))`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.graph.n];
        for (&[i, j], &w) in self.graph.edges.iter().zip(&self.weight.0) {
            let f = w * (x[j] - x[i]);
            out[i] += f;
            out[j] -= f;
        }
        out
    }

    /// Assembled sparse matrix of Δ.
    pub fn matrix(&self) -> SparseSym {
        laplacian_matrix(self.graph, self.weight)
    }
}

/// Sparse symmetric matrix of the Laplacian: off-diagonal `η_ij`, diagonal
/// `−Σ_j η_ij`.
pub fn laplacian_matrix(graph: &Graph, weight: &EdgeWeight) -> SparseSym {
    let mut triplets = Vec::with_capacity(4 * graph.edges.len());
    for (&[i, j], &w) in graph.edges.iter().zip(&weight.0) {
        triplets.push((i, j, w));
        triplets.push((j, i, w));
        triplets.push((i, i, -w));
        triplets.push((j, j, -w));
    }
    SparseSym::from_triplets(graph.n, triplets)
}
