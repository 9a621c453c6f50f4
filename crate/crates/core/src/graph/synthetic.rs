//! Small deterministic graph families for tests and smoke runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeList, Graph, VertexId};

/// `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    let edges = (1..n as VertexId).map(|v| (v - 1, v)).collect();
    Graph::from_edge_list(&EdgeList::new(edges, n))
}

/// Vertex 0 joined to `leaves` vertices `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges = (1..=leaves as VertexId).map(|v| (0, v)).collect();
    Graph::from_edge_list(&EdgeList::new(edges, leaves + 1))
}

/// Erdős–Rényi G(n, p): every unordered pair is an edge with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edge_list(&EdgeList::new(edges, n))
}

/// `count` connected components of `size` vertices each. Every component is
/// a path with `size` extra random chords, so diameters vary between
/// components. Component `k` owns ids `k*size..(k+1)*size`.
pub fn components(count: usize, size: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for k in 0..count {
        let base = (k * size) as VertexId;
        let size = size as VertexId;
        for v in 1..size {
            edges.push((base + v - 1, base + v));
        }
        if size > 1 {
            for _ in 0..size {
                let u = rng.random_range(0..size);
                let v = rng.random_range(0..size);
                edges.push((base + u, base + v));
            }
        }
    }
    Graph::from_edge_list(&EdgeList::new(edges, count * size))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(path(5).num_edges(), 8);
        assert_eq!(star(5).degree(0), 5);
        let g = components(5, 10, 1);
        assert_eq!(g.num_vertices(), 50);
        assert!(g.edges().all(|(u, v)| u / 10 == v / 10));
        assert_eq!(gnp(30, 0.2, 4), gnp(30, 0.2, 4));
    }
}
