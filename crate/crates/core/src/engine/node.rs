use std::ops::Range;
use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};

use rayon::prelude::*;

use super::SyncPlan;
use crate::graph::{Graph, VertexId};
use crate::oracle::{Distance, UNREACHED};
use crate::queue::FrontierQueue;

/// The parts of a node other nodes may read: its frontier queues and the
/// published length of its global queue for the current round.
///
/// Queues are double-buffered by level parity. At level `L`, index `L & 1`
/// holds the current frontier and the other index collects level `L + 1`.
pub(crate) struct Exchange {
    pub global: [FrontierQueue; 2],
    pub local: [FrontierQueue; 2],
    pub snapshot: AtomicUsize,
}

impl Exchange {
    pub fn new(num_vertices: usize, owned: usize) -> Self {
        Exchange {
            global: [
                FrontierQueue::with_capacity(num_vertices),
                FrontierQueue::with_capacity(num_vertices),
            ],
            local: [FrontierQueue::with_capacity(owned), FrontierQueue::with_capacity(owned)],
            snapshot: AtomicUsize::new(0),
        }
    }

    /// Records how much of the next-level global queue sources may read this
    /// round. Anything appended afterwards stays invisible until the next
    /// snapshot.
    pub fn publish_snapshot(&self, level: Distance) {
        let len = self.global[next(level)].len();
        self.snapshot.store(len, Ordering::Release);
    }

    pub fn reset_next(&self, level: Distance) {
        self.global[next(level)].clear();
        self.local[next(level)].clear();
    }
}

#[inline]
pub(crate) fn current(level: Distance) -> usize {
    (level & 1) as usize
}

#[inline]
pub(crate) fn next(level: Distance) -> usize {
    current(level) ^ 1
}

/// Adjacency rows of the vertices a node owns, copied out of the graph.
pub(crate) struct OwnedAdjacency {
    first: VertexId,
    offsets: Box<[usize]>,
    targets: Box<[VertexId]>,
}

impl OwnedAdjacency {
    fn new(g: &Graph, owned: Range<VertexId>) -> Self {
        let base = g.offsets()[owned.start as usize];
        let offsets = g.offsets()[owned.start as usize..=owned.end as usize]
            .iter()
            .map(|o| o - base)
            .collect();
        let targets = g.adjacency()[base..g.offsets()[owned.end as usize]].into();
        OwnedAdjacency {
            first: owned.start,
            offsets,
            targets,
        }
    }

    #[inline]
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = (v - self.first) as usize;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct NodeCounters {
    pub remote_messages: u64,
    pub remote_vertices: u64,
    pub scheduled_transfers: u64,
    pub rounds: u64,
    pub traversed_edges: u64,
    pub buffer_high_water: usize,
}

/// One compute node's private world.
pub(crate) struct NodeState {
    pub id: usize,
    pub owned: Range<VertexId>,
    adjacency: OwnedAdjacency,
    pub dist: Box<[AtomicU32]>,
    incoming: Box<[VertexId]>,
    pub counters: NodeCounters,
}

impl NodeState {
    pub fn new(id: usize, g: &Graph, owned: Range<VertexId>, incoming_capacity: usize) -> Self {
        NodeState {
            id,
            adjacency: OwnedAdjacency::new(g, owned.clone()),
            owned,
            dist: (0..g.num_vertices()).map(|_| AtomicU32::new(UNREACHED)).collect(),
            incoming: vec![0; incoming_capacity].into_boxed_slice(),
            counters: NodeCounters::default(),
        }
    }

    pub fn incoming_capacity(&self) -> usize {
        self.incoming.len()
    }

    pub fn incoming_ptr(&self) -> *const VertexId {
        self.incoming.as_ptr()
    }

    #[inline]
    fn owns(&self, v: VertexId) -> bool {
        self.owned.contains(&v)
    }

    fn expand(&self, v: VertexId, level: Distance, ex: &Exchange) -> u64 {
        debug_assert!(self.owns(v), "node {} asked to expand foreign vertex {v}", self.id);
        let neighbors = self.adjacency.neighbors(v);
        for &u in neighbors {
            if discover(&self.dist, u, level + 1) {
                ex.global[next(level)].push(u);
                if self.owns(u) {
                    ex.local[next(level)].push(u);
                }
            }
        }
        neighbors.len() as u64
    }

    /// Phase 1: expands every owned frontier vertex. New vertices go to the
    /// next global queue, and also to the next local queue when owned.
    pub fn traverse(&mut self, ex: &Exchange, level: Distance, helpers: usize) {
        let frontier = &ex.local[current(level)];
        let len = frontier.len();
        let edges: u64 = if helpers <= 1 || len < 2 * helpers {
            frontier.iter_prefix(len).map(|v| self.expand(v, level, ex)).sum()
        } else {
            let this = &*self;
            let chunk = len.div_ceil(helpers);
            (0..len)
                .into_par_iter()
                .step_by(chunk)
                .map(|start| {
                    (start..(start + chunk).min(len))
                        .map(|i| this.expand(frontier.get(i), level, ex))
                        .sum::<u64>()
                })
                .sum()
        };
        self.counters.traversed_edges += edges;
    }

    /// Phase 2, one round: copies each source's published global queue into
    /// the incoming buffer and merges the unseen vertices.
    ///
    /// With `streaming` each source is merged before the next is copied, so
    /// the buffer only ever holds one frontier; otherwise all of the round's
    /// sources are staged together first.
    pub fn pull_round(&mut self, all: &[Exchange], plan: &SyncPlan, round: usize, level: Distance) {
        let NodeState {
            id,
            owned,
            dist,
            incoming,
            counters,
            ..
        } = self;
        let own = &all[*id];
        let streaming = plan.streams_sources();
        let mut staged = 0usize;
        plan.for_each_source(round, *id, |src| {
            counters.scheduled_transfers += 1;
            let len = all[src].snapshot.load(Ordering::Acquire);
            if len == 0 {
                return;
            }
            counters.remote_messages += 1;
            counters.remote_vertices += len as u64;
            assert!(
                staged + len <= incoming.len(),
                "node {id}: incoming buffer overflow ({staged} + {len} > {})",
                incoming.len()
            );
            let source = &all[src].global[next(level)];
            for (slot, v) in incoming[staged..staged + len].iter_mut().zip(source.iter_prefix(len)) {
                *slot = v;
            }
            staged += len;
            counters.buffer_high_water = counters.buffer_high_water.max(staged);
            if streaming {
                merge(dist, owned, &incoming[..staged], own, level);
                staged = 0;
            }
        });
        if !streaming {
            merge(dist, owned, &incoming[..staged], own, level);
        }
        counters.rounds += 1;
    }
}

fn merge(dist: &[AtomicU32], owned: &Range<VertexId>, arrivals: &[VertexId], own: &Exchange, level: Distance) {
    for &v in arrivals {
        if discover(dist, v, level + 1) {
            own.global[next(level)].push(v);
            if owned.contains(&v) {
                own.local[next(level)].push(v);
            }
        }
    }
}

/// Check-and-set: claims `v` for `level` if it has not been seen yet.
#[inline]
fn discover(dist: &[AtomicU32], v: VertexId, level: Distance) -> bool {
    dist[v as usize]
        .compare_exchange(UNREACHED, level, Ordering::Relaxed, Ordering::Relaxed)
        .is_ok()
}
