//! Single-node top-down BFS.
//!
//! This is the reference every multi-node run is checked against, and also
//! what the engine degenerates to with one compute node.

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::queue::FrontierQueue;

/// Hop count from the root.
pub type Distance = u32;

/// Distance of a vertex the traversal never reached.
pub const UNREACHED: Distance = Distance::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BfsError {
    #[error("root {root} out of range for a graph with {num_vertices} vertices")]
    RootOutOfRange { root: VertexId, num_vertices: usize },
}

pub(crate) fn check_root(g: &Graph, root: VertexId) -> Result<(), BfsError> {
    if (root as usize) < g.num_vertices() {
        Ok(())
    } else {
        Err(BfsError::RootOutOfRange {
            root,
            num_vertices: g.num_vertices(),
        })
    }
}

/// Per-vertex BFS distances from one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceArray {
    pub root: VertexId,
    pub dist: Vec<Distance>,
}

impl DistanceArray {
    pub fn get(&self, v: VertexId) -> Distance {
        self.dist[v as usize]
    }

    pub fn reached(&self) -> usize {
        self.dist.iter().filter(|&&d| d != UNREACHED).count()
    }

    /// Largest finite distance; the root's eccentricity within its component.
    pub fn eccentricity(&self) -> Distance {
        self.dist
            .iter()
            .copied()
            .filter(|&d| d != UNREACHED)
            .max()
            .unwrap_or(0)
    }

    /// Number of non-empty BFS levels, `1 + eccentricity`.
    pub fn num_levels(&self) -> usize {
        self.eccentricity() as usize + 1
    }

    /// Element `l` is the number of vertices at distance `l`.
    pub fn frontier_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_levels()];
        for &d in &self.dist {
            if d != UNREACHED {
                sizes[d as usize] += 1;
            }
        }
        sizes
    }

    /// Vertices at exactly distance `level`, ascending.
    pub fn level_set(&self, level: Distance) -> Vec<VertexId> {
        (0..self.dist.len() as VertexId)
            .filter(|&v| self.dist[v as usize] == level)
            .collect()
    }

    /// First vertex where `self` (taken as expected) and `other` disagree,
    /// as `(vertex, expected, got)`.
    pub fn first_difference(&self, other: &DistanceArray) -> Option<(VertexId, Distance, Distance)> {
        if self.dist.len() != other.dist.len() {
            let v = self.dist.len().min(other.dist.len());
            let pick = |d: &DistanceArray| d.dist.get(v).copied().unwrap_or(UNREACHED);
            return Some((v as VertexId, pick(self), pick(other)));
        }
        self.dist
            .iter()
            .zip(&other.dist)
            .position(|(a, b)| a != b)
            .map(|v| (v as VertexId, self.dist[v], other.dist[v]))
    }

    /// Checks the structural properties every BFS distance array has:
    /// the root is at 0, reached neighbors differ by at most one hop, and
    /// every other reached vertex has a parent one hop closer. Returns the
    /// first violation found.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        if self.dist.len() != g.num_vertices() {
            return Err(format!(
                "length {} does not match {} vertices",
                self.dist.len(),
                g.num_vertices()
            ));
        }
        if self.get(self.root) != 0 {
            return Err(format!("root {} has distance {}", self.root, self.get(self.root)));
        }
        for u in 0..g.num_vertices() as VertexId {
            let du = self.get(u);
            let mut has_parent = u == self.root || du == UNREACHED;
            for &v in g.neighbors(u) {
                let dv = self.get(v);
                if (du == UNREACHED) != (dv == UNREACHED) {
                    return Err(format!("edge ({u}, {v}) joins reached and unreached vertices"));
                }
                if du != UNREACHED {
                    if du.abs_diff(dv) > 1 {
                        return Err(format!("edge ({u}, {v}) spans distances {du} and {dv}"));
                    }
                    has_parent |= dv + 1 == du;
                }
            }
            if !has_parent {
                return Err(format!("vertex {u} at distance {du} has no parent"));
            }
        }
        Ok(())
    }
}

/// Level-synchronous top-down BFS on one thread.
///
/// Two frontier queues of `|V|` slots are allocated up front and swapped
/// after every level.
pub fn bfs_top_down(g: &Graph, root: VertexId) -> Result<DistanceArray, BfsError> {
    check_root(g, root)?;
    let n = g.num_vertices();
    let mut dist = vec![UNREACHED; n];
    let mut current: Vec<VertexId> = Vec::with_capacity(n);
    let mut next: Vec<VertexId> = Vec::with_capacity(n);

    dist[root as usize] = 0;
    current.push(root);
    let mut level: Distance = 0;
    while !current.is_empty() {
        for &v in &current {
            for &u in g.neighbors(v) {
                if dist[u as usize] == UNREACHED {
                    dist[u as usize] = level + 1;
                    next.push(u);
                }
            }
        }
        std::mem::swap(&mut current, &mut next);
        next.clear();
        level += 1;
    }
    Ok(DistanceArray { root, dist })
}

/// Top-down BFS that splits each frontier into `threads` chunks.
///
/// Discovery uses a compare-and-swap on the distance slot, so whichever
/// helper wins enqueues the vertex. The winner only changes queue order, not
/// the distances, so the output equals [`bfs_top_down`].
pub fn bfs_top_down_parallel(g: &Graph, root: VertexId, threads: usize) -> Result<DistanceArray, BfsError> {
    check_root(g, root)?;
    let n = g.num_vertices();
    let dist: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(UNREACHED)).collect();
    let mut current = FrontierQueue::with_capacity(n);
    let mut next = FrontierQueue::with_capacity(n);

    dist[root as usize].store(0, Ordering::Relaxed);
    current.push(root);
    let mut level: Distance = 0;
    let threads = threads.max(1);
    while !current.is_empty() {
        let len = current.len();
        let chunk = len.div_ceil(threads).max(1);
        (0..len).into_par_iter().step_by(chunk).for_each(|start| {
            for v in current.iter_prefix(len).skip(start).take(chunk) {
                for &u in g.neighbors(v) {
                    if dist[u as usize]
                        .compare_exchange(UNREACHED, level + 1, Ordering::Relaxed, Ordering::Relaxed)
                        .is_ok()
                    {
                        next.push(u);
                    }
                }
            }
        });
        std::mem::swap(&mut current, &mut next);
        next.clear();
        level += 1;
    }
    Ok(DistanceArray {
        root,
        dist: dist.into_iter().map(AtomicU32::into_inner).collect(),
    })
}

/// Number of vertices at each distance from `root`.
pub fn frontier_sizes(g: &Graph, root: VertexId) -> Result<Vec<usize>, BfsError> {
    Ok(bfs_top_down(g, root)?.frontier_sizes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_rmat, synthetic, EdgeList};
    use std::collections::VecDeque;

    /// Plain FIFO BFS over an adjacency-list copy of the graph.
    fn naive_bfs(g: &Graph, root: VertexId) -> Vec<Distance> {
        let adj: Vec<Vec<VertexId>> = (0..g.num_vertices() as VertexId)
            .map(|v| g.neighbors(v).to_vec())
            .collect();
        let mut dist = vec![UNREACHED; adj.len()];
        let mut queue = VecDeque::from([root]);
        dist[root as usize] = 0;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v as usize] {
                if dist[u as usize] == UNREACHED {
                    dist[u as usize] = dist[v as usize] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    #[test]
    fn path_distances() {
        let d = bfs_top_down(&synthetic::path(3), 0).unwrap();
        assert_eq!(d.dist, vec![0, 1, 2]);
    }

    #[test]
    fn disconnected_edges() {
        let g = Graph::from_edge_list(&EdgeList::from_edges(vec![(0, 1), (2, 3)]));
        let d = bfs_top_down(&g, 0).unwrap();
        assert_eq!(d.dist, vec![0, 1, UNREACHED, UNREACHED]);
        assert_eq!(d.reached(), 2);
        d.validate(&g).unwrap();
    }

    #[test]
    fn matches_naive_bfs_on_gnp() {
        let g = synthetic::gnp(200, 0.03, 11);
        let d = bfs_top_down(&g, 5).unwrap();
        assert_eq!(d.dist, naive_bfs(&g, 5));
        d.validate(&g).unwrap();
    }

    #[test]
    fn root_out_of_range() {
        let g = synthetic::path(3);
        assert_eq!(
            bfs_top_down(&g, 3).unwrap_err(),
            BfsError::RootOutOfRange { root: 3, num_vertices: 3 }
        );
        assert!(frontier_sizes(&g, 9).is_err());
        assert!(bfs_top_down_parallel(&g, 3, 2).is_err());
    }

    #[test]
    fn star_and_chain_frontiers() {
        assert_eq!(frontier_sizes(&synthetic::star(5), 0).unwrap(), vec![1, 5]);
        assert_eq!(frontier_sizes(&synthetic::path(4), 0).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn rmat_frontier_sum_equals_reached() {
        let g = Graph::from_edge_list(&generate_rmat(12, 8, 9).unwrap());
        let d = bfs_top_down(&g, 1).unwrap();
        let sizes = frontier_sizes(&g, 1).unwrap();
        assert_eq!(sizes.iter().sum::<usize>(), d.reached());
        assert_eq!(sizes.len(), d.num_levels());
        assert!(sizes.iter().all(|&s| s > 0));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = Graph::from_edge_list(&generate_rmat(12, 8, 2).unwrap());
        for root in [0, 17, 1000, 4095] {
            let seq = bfs_top_down(&g, root).unwrap();
            for threads in [1, 3, 8] {
                assert_eq!(bfs_top_down_parallel(&g, root, threads).unwrap(), seq);
            }
        }
    }

    #[test]
    fn validate_catches_corruption() {
        let g = synthetic::path(4);
        let mut d = bfs_top_down(&g, 0).unwrap();
        d.dist[2] = 3;
        assert!(d.validate(&g).is_err());
        d.dist[2] = UNREACHED;
        assert!(d.validate(&g).is_err());
    }

    proptest::proptest! {
        #[test]
        fn distances_are_valid_and_match_naive(
            edges in proptest::collection::vec((0u32..50, 0u32..50), 0..150),
            root in 0u32..50,
        ) {
            let g = Graph::from_edge_list(&EdgeList::new(edges, 50));
            let d = bfs_top_down(&g, root).unwrap();
            proptest::prop_assert_eq!(d.validate(&g), Ok(()));
            proptest::prop_assert_eq!(&d.dist, &naive_bfs(&g, root));
        }
    }
}
