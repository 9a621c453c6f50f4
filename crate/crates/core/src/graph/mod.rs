//! Graph ingestion, cleanup, compressed adjacency and 1D partitioning.
//!
//! Everything in here is immutable once built. A [`Graph`] is always
//! symmetric, free of self-edges and free of duplicate edges; the only way to
//! get one is through [`build_csr`], which checks those properties.

mod io;
mod partition;
mod rmat;
pub mod synthetic;

pub use io::{load_edge_list, load_edge_list_file, write_edge_list, EdgeFormat};
pub use partition::{partition_1d, Partition};
pub use rmat::{generate_rmat, generate_rmat_with, RmatParams};

use std::ops::Range;

use thiserror::Error;

/// Vertex identifier. 32 bits covers 2^32 - 1 vertices, which leaves room for
/// a scale-31 Kronecker graph.
pub type VertexId = u32;

/// Largest number of vertices a graph may hold. `VertexId::MAX` itself is
/// reserved so that `num_vertices` always fits in a `VertexId`.
pub const MAX_VERTICES: u64 = VertexId::MAX as u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex id {id} exceeds the representable range (max {max})")]
    IdOverflow { line: usize, id: u64, max: u64 },
    #[error("edge list is not symmetrized: {0}")]
    NotSymmetrized(String),
    #[error("edge ({src}, {dst}) references a vertex >= num_vertices ({num_vertices})")]
    VertexOutOfRange { src: VertexId, dst: VertexId, num_vertices: usize },
    #[error("rmat scale {0} overflows the vertex id range")]
    ScaleTooLarge(u32),
    #[error("invalid rmat parameters: {0}")]
    InvalidRmat(String),
    #[error("cannot split {num_vertices} vertices into {num_parts} parts")]
    InvalidPartCount { num_parts: usize, num_vertices: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(err: std::io::Error) -> Self {
        GraphError::Io(err.to_string())
    }
}

/// A list of directed edges over the vertex ids `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    pub edges: Vec<(VertexId, VertexId)>,
    pub num_vertices: usize,
}

impl EdgeList {
    pub fn new(edges: Vec<(VertexId, VertexId)>, num_vertices: usize) -> Self {
        EdgeList { edges, num_vertices }
    }

    /// Builds an edge list whose vertex count is one past the largest id seen.
    pub fn from_edges(edges: Vec<(VertexId, VertexId)>) -> Self {
        let num_vertices = edges
            .iter()
            .map(|&(s, d)| s.max(d) as usize + 1)
            .max()
            .unwrap_or(0);
        EdgeList { edges, num_vertices }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Mirrors every edge, drops self-edges and duplicates, and sorts the result
/// by `(src, dst)`.
pub fn symmetrize(el: &EdgeList) -> EdgeList {
    let mut edges = Vec::with_capacity(el.edges.len() * 2);
    for &(s, d) in &el.edges {
        if s != d {
            edges.push((s, d));
            edges.push((d, s));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    EdgeList {
        edges,
        num_vertices: el.num_vertices,
    }
}

/// Compressed sparse row adjacency of an undirected graph.
///
/// `num_edges` counts directed edges, so every undirected edge contributes
/// two entries to `adjacency`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    adjacency: Vec<VertexId>,
}

/// Builds the CSR form of a symmetrized edge list.
///
/// The input may be in any order, but it must contain no self-edges, no
/// duplicate edges, and the reverse of every edge.
pub fn build_csr(el: &EdgeList) -> Result<Graph, GraphError> {
    let n = el.num_vertices;
    let mut offsets = vec![0usize; n + 1];
    for &(s, d) in &el.edges {
        if s as usize >= n || d as usize >= n {
            return Err(GraphError::VertexOutOfRange {
                src: s,
                dst: d,
                num_vertices: n,
            });
        }
        if s == d {
            return Err(GraphError::NotSymmetrized(format!("self-edge on vertex {s}")));
        }
        offsets[s as usize + 1] += 1;
    }
    for v in 0..n {
        offsets[v + 1] += offsets[v];
    }

    let mut cursor = offsets.clone();
    let mut adjacency = vec![0 as VertexId; el.edges.len()];
    for &(s, d) in &el.edges {
        let slot = &mut cursor[s as usize];
        adjacency[*slot] = d;
        *slot += 1;
    }

    for v in 0..n {
        let row = &mut adjacency[offsets[v]..offsets[v + 1]];
        row.sort_unstable();
        if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::NotSymmetrized(format!(
                "duplicate edge ({v}, {})",
                w[0]
            )));
        }
    }

    let graph = Graph { offsets, adjacency };
    for u in 0..n as VertexId {
        for &v in graph.neighbors(u) {
            if graph.neighbors(v).binary_search(&u).is_err() {
                return Err(GraphError::NotSymmetrized(format!(
                    "edge ({u}, {v}) has no reverse"
                )));
            }
        }
    }
    Ok(graph)
}

impl Graph {
    /// Convenience: symmetrize then build.
    pub fn from_edge_list(el: &EdgeList) -> Graph {
        build_csr(&symmetrize(el)).expect("symmetrized edge list is always valid CSR input")
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Directed edge count after symmetrization.
    pub fn num_edges(&self) -> usize {
        self.adjacency.len()
    }

    /// Undirected edge count, `num_edges() / 2`.
    pub fn num_undirected_edges(&self) -> usize {
        self.adjacency.len() / 2
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn adjacency(&self) -> &[VertexId] {
        &self.adjacency
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Directed edges whose source lies in `range`.
    pub fn edges_in(&self, range: Range<VertexId>) -> usize {
        self.offsets[range.end as usize] - self.offsets[range.start as usize]
    }

    pub fn max_degree(&self) -> usize {
        self.offsets
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    /// Iterates over all directed edges in `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.num_vertices() as VertexId)
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            edges: self.edges().collect(),
            num_vertices: self.num_vertices(),
        }
    }
}
