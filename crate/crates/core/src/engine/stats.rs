use std::time::Duration;

/// Instrumentation collected over one engine run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunStats {
    /// Non-empty BFS levels, root included.
    pub levels: usize,
    /// Synchronized frontier size per level; sums to the reached-vertex count.
    pub per_level_frontier_size: Vec<usize>,
    /// Non-empty cross-node buffer transfers.
    pub remote_messages: u64,
    /// Vertex ids carried by those transfers.
    pub remote_vertices_transferred: u64,
    /// Transfers the plan scheduled, including ones skipped because the
    /// source buffer was empty.
    pub scheduled_transfers: u64,
    /// Barrier-separated synchronization rounds over the whole run.
    pub rounds_executed: u64,
    /// Per node, the most vertex ids its incoming buffer held at once.
    pub buffer_high_water: Vec<usize>,
    /// Per-node incoming-buffer capacity.
    pub buffer_capacity: usize,
    pub elapsed: Duration,
    /// Adjacency entries scanned during traversal phases, summed over nodes.
    pub traversed_edges: u64,
}

impl RunStats {
    pub fn reached(&self) -> usize {
        self.per_level_frontier_size.iter().sum()
    }

    pub fn max_buffer_high_water(&self) -> usize {
        self.buffer_high_water.iter().copied().max().unwrap_or(0)
    }

    /// Same statistics with the wall-clock time zeroed, for comparing runs.
    pub fn without_timing(&self) -> RunStats {
        RunStats {
            elapsed: Duration::ZERO,
            ..self.clone()
        }
    }
}
