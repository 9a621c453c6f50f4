//! Multi-node butterfly BFS on simulated compute nodes.
//!
//! Every node owns a contiguous vertex range, a private full-length distance
//! array and a local/global pair of frontier queues. A level runs in two
//! phases:
//!
//! 1. **Traversal.** Each node expands the frontier vertices it owns. A
//!    neighbor it has not seen gets distance `level + 1` and goes into its
//!    global queue, plus its local queue when it also owns the neighbor.
//! 2. **Synchronization.** Nodes exchange global queues along the butterfly
//!    schedule. In every round a node pulls the queues of its scheduled
//!    sources and merges the vertices it has not seen with the same
//!    check-and-set rule. Rounds are separated by a barrier, and each source
//!    only exposes what its queue held when the round started.
//!
//! After the last round every node holds the full next frontier, so the
//! queues are swapped and the next level starts. The run ends once the
//! synchronized frontier is empty, which all nodes agree on.
//!
//! Nodes communicate only through frontier buffers and barriers. In
//! [`WorkerMode::Lockstep`] all nodes are stepped in a fixed order on the
//! calling thread. In [`WorkerMode::Concurrent`] each node runs on its own
//! thread.
//!
//! All queues and incoming buffers are sized at [`Engine::init`] and never
//! grow during the run.

mod node;
mod stats;

pub use stats::RunStats;

use std::sync::{Barrier, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Graph, Partition, VertexId};
use crate::oracle::{check_root, BfsError, Distance, DistanceArray};
use crate::schedule::{buffer_bound, ButterflySchedule, ScheduleError};
use node::{current, next, Exchange, NodeState};

/// How frontiers are synchronized after each traversal phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Butterfly,
    /// Single round in which every node pulls from every other node.
    #[serde(rename = "all2all")]
    AllToAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkerMode {
    /// One thread, nodes stepped in id order. Reproducible.
    #[default]
    Lockstep,
    /// One thread per node, barriers between phases and rounds.
    Concurrent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub fanout: usize,
    pub strategy: Strategy,
    pub worker_mode: WorkerMode,
    /// Helper threads per node for the traversal phase. Only used in
    /// concurrent mode; lockstep always traverses on one thread.
    pub intra_node_parallelism: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            fanout: 1,
            strategy: Strategy::Butterfly,
            worker_mode: WorkerMode::Lockstep,
            intra_node_parallelism: 1,
        }
    }
}

impl EngineConfig {
    pub fn butterfly(fanout: usize) -> Self {
        EngineConfig {
            fanout,
            ..Default::default()
        }
    }

    pub fn all_to_all(fanout: usize) -> Self {
        EngineConfig {
            fanout,
            strategy: Strategy::AllToAll,
            ..Default::default()
        }
    }

    pub fn with_mode(mut self, mode: WorkerMode) -> Self {
        self.worker_mode = mode;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.intra_node_parallelism = threads;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Root(#[from] BfsError),
    #[error("partition covers {partition} vertices but the graph has {graph}")]
    PartitionMismatch { partition: usize, graph: usize },
    #[error("schedule is for {schedule} nodes but the partition has {partition} parts")]
    ScheduleMismatch { schedule: usize, partition: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("intra-node parallelism must be at least 1")]
    NoHelpers,
}

/// Who pulls from whom in each synchronization round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyncPlan {
    Butterfly(ButterflySchedule),
    AllToAll { num_nodes: usize },
}

impl SyncPlan {
    pub fn for_config(num_nodes: usize, cfg: &EngineConfig) -> Result<SyncPlan, ScheduleError> {
        let schedule = ButterflySchedule::new(num_nodes, cfg.fanout)?;
        Ok(match cfg.strategy {
            Strategy::Butterfly => SyncPlan::Butterfly(schedule),
            Strategy::AllToAll => SyncPlan::AllToAll { num_nodes },
        })
    }

    pub fn num_nodes(&self) -> usize {
        match self {
            SyncPlan::Butterfly(s) => s.num_nodes(),
            SyncPlan::AllToAll { num_nodes } => *num_nodes,
        }
    }

    pub fn num_rounds(&self) -> usize {
        match self {
            SyncPlan::Butterfly(s) => s.num_rounds(),
            SyncPlan::AllToAll { num_nodes } => usize::from(*num_nodes > 1),
        }
    }

    /// Scheduled transfers per level, counting ones that turn out empty.
    pub fn transfers_per_level(&self) -> usize {
        match self {
            SyncPlan::Butterfly(s) => s.message_count_remote(),
            SyncPlan::AllToAll { num_nodes } => num_nodes * (num_nodes - 1),
        }
    }

    /// All-to-all merges one source at a time so its buffer never holds more
    /// than one frontier; the butterfly stages a whole round.
    fn streams_sources(&self) -> bool {
        matches!(self, SyncPlan::AllToAll { .. })
    }

    fn for_each_source(&self, round: usize, node: usize, mut f: impl FnMut(usize)) {
        match self {
            SyncPlan::Butterfly(s) => s.sources(round, node).iter().for_each(|&src| f(src)),
            SyncPlan::AllToAll { num_nodes } => (0..*num_nodes).filter(|&src| src != node).for_each(f),
        }
    }
}

/// Read access to every node's queues right after a synchronization phase.
pub struct SyncView<'a> {
    level: Distance,
    exchange: &'a [Exchange],
    partition: &'a Partition,
}

impl SyncView<'_> {
    /// Level whose successors were just synchronized.
    pub fn level(&self) -> Distance {
        self.level
    }

    pub fn num_nodes(&self) -> usize {
        self.exchange.len()
    }

    pub fn owned(&self, node: usize) -> std::ops::Range<VertexId> {
        self.partition.range(node)
    }

    /// Node's global queue for level `level() + 1`, in arrival order.
    pub fn global_next(&self, node: usize) -> Vec<VertexId> {
        self.exchange[node].global[next(self.level)].iter().collect()
    }

    /// Node's local queue for level `level() + 1`, in arrival order.
    pub fn local_next(&self, node: usize) -> Vec<VertexId> {
        self.exchange[node].local[next(self.level)].iter().collect()
    }
}

/// Hook called at the barrier after every synchronization phase.
pub trait SyncObserver: Send {
    fn after_sync(&mut self, view: &SyncView<'_>);
}

impl<F: FnMut(&SyncView<'_>) + Send> SyncObserver for F {
    fn after_sync(&mut self, view: &SyncView<'_>) {
        self(view)
    }
}

/// A BFS in progress across all simulated nodes.
pub struct Engine<'g> {
    graph: &'g Graph,
    partition: Partition,
    cfg: EngineConfig,
    plan: SyncPlan,
    root: VertexId,
    nodes: Vec<NodeState>,
    exchange: Vec<Exchange>,
    level: Distance,
    frontier_sizes: Vec<usize>,
    finished: bool,
    elapsed: Duration,
}

impl<'g> Engine<'g> {
    /// Sets up one node per partition part. Every node marks the root at
    /// distance 0; only the root's owner puts it in its local queue.
    pub fn init(g: &'g Graph, p: &Partition, root: VertexId, cfg: EngineConfig) -> Result<Self, EngineError> {
        let plan = SyncPlan::for_config(p.num_parts(), &cfg)?;
        Self::init_with_plan(g, p, root, cfg, plan)
    }

    /// Like [`init`](Self::init) with an explicit synchronization plan.
    pub fn init_with_plan(
        g: &'g Graph,
        p: &Partition,
        root: VertexId,
        cfg: EngineConfig,
        plan: SyncPlan,
    ) -> Result<Self, EngineError> {
        check_root(g, root)?;
        if p.num_vertices() != g.num_vertices() {
            return Err(EngineError::PartitionMismatch {
                partition: p.num_vertices(),
                graph: g.num_vertices(),
            });
        }
        if plan.num_nodes() != p.num_parts() {
            return Err(EngineError::ScheduleMismatch {
                schedule: plan.num_nodes(),
                partition: p.num_parts(),
            });
        }
        if cfg.fanout == 0 {
            return Err(ScheduleError::ZeroFanout.into());
        }
        if cfg.fanout > p.num_parts() {
            return Err(ScheduleError::FanoutTooLarge {
                fanout: cfg.fanout,
                num_nodes: p.num_parts(),
            }
            .into());
        }
        if cfg.intra_node_parallelism == 0 {
            return Err(EngineError::NoHelpers);
        }

        let n = g.num_vertices();
        let capacity = buffer_bound(n, cfg.fanout);
        let nodes: Vec<NodeState> = (0..p.num_parts())
            .map(|id| NodeState::new(id, g, p.range(id), capacity))
            .collect();
        let exchange: Vec<Exchange> = (0..p.num_parts())
            .map(|id| Exchange::new(n, p.range(id).len()))
            .collect();

        let owner = p.owner(root);
        for (node, ex) in nodes.iter().zip(&exchange) {
            node.dist[root as usize].store(0, std::sync::atomic::Ordering::Relaxed);
            ex.global[current(0)].push(root);
            if node.id == owner {
                ex.local[current(0)].push(root);
            }
        }

        // A BFS has at most |V| levels; reserving them keeps the run itself
        // free of allocations.
        let mut frontier_sizes = Vec::with_capacity(n + 1);
        frontier_sizes.push(1);

        Ok(Engine {
            graph: g,
            partition: p.clone(),
            cfg,
            plan,
            root,
            nodes,
            exchange,
            level: 0,
            frontier_sizes,
            finished: false,
            elapsed: Duration::ZERO,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn level(&self) -> Distance {
        self.level
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn plan(&self) -> &SyncPlan {
        &self.plan
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Per-node incoming-buffer capacity, `buffer_bound(|V|, fanout)`.
    pub fn incoming_capacity(&self, node: usize) -> usize {
        self.nodes[node].incoming_capacity()
    }

    /// Addresses of every preallocated buffer. They must not change between
    /// init and termination.
    pub fn buffer_addresses(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (node, ex) in self.nodes.iter().zip(&self.exchange) {
            out.push(node.incoming_ptr() as usize);
            for q in ex.global.iter().chain(&ex.local) {
                out.push(q.storage_ptr() as usize);
            }
        }
        out
    }

    /// Owned range of `node`.
    pub fn owned(&self, node: usize) -> std::ops::Range<VertexId> {
        self.nodes[node].owned.clone()
    }

    /// `node`'s view of the distance to `v`.
    pub fn distance(&self, node: usize, v: VertexId) -> Distance {
        self.nodes[node].dist[v as usize].load(std::sync::atomic::Ordering::Relaxed)
    }

    pub fn local_queue(&self, node: usize) -> Vec<VertexId> {
        self.exchange[node].local[current(self.level)].iter().collect()
    }

    pub fn global_queue(&self, node: usize) -> Vec<VertexId> {
        self.exchange[node].global[current(self.level)].iter().collect()
    }

    pub fn local_queue_next(&self, node: usize) -> Vec<VertexId> {
        self.exchange[node].local[next(self.level)].iter().collect()
    }

    pub fn global_queue_next(&self, node: usize) -> Vec<VertexId> {
        self.exchange[node].global[next(self.level)].iter().collect()
    }

    /// Phase 1 on a single node (lockstep stepping).
    pub fn traverse_node(&mut self, node: usize) {
        let level = self.level;
        self.nodes[node].traverse(&self.exchange[node], level, 1);
    }

    /// Phase 1 on every node, in id order.
    pub fn traverse_all(&mut self) {
        for g in 0..self.nodes.len() {
            self.traverse_node(g);
        }
    }

    /// Phase 2 on every node: all rounds of the plan, each preceded by a
    /// snapshot of every source queue.
    pub fn sync_all(&mut self) {
        let level = self.level;
        for round in 0..self.plan.num_rounds() {
            for ex in &self.exchange {
                ex.publish_snapshot(level);
            }
            for node in &mut self.nodes {
                node.pull_round(&self.exchange, &self.plan, round, level);
            }
        }
    }

    fn observe(&self, observer: &mut dyn SyncObserver) {
        observer.after_sync(&SyncView {
            level: self.level,
            exchange: &self.exchange,
            partition: &self.partition,
        });
    }

    /// Swaps queues after a synchronized level. Returns `false` once the new
    /// frontier is empty.
    pub fn finish_level(&mut self) -> bool {
        let size = self.exchange[0].global[next(self.level)].len();
        if size == 0 {
            self.finished = true;
            return false;
        }
        self.frontier_sizes.push(size);
        self.level += 1;
        for ex in &self.exchange {
            ex.reset_next(self.level);
        }
        true
    }

    /// One full level in lockstep: traverse, synchronize, swap.
    pub fn step_level(&mut self) -> bool {
        self.traverse_all();
        self.sync_all();
        self.finish_level()
    }

    /// Runs until the frontier is empty.
    pub fn run_to_completion(&mut self) {
        self.run_inner(None);
    }

    /// Runs until the frontier is empty, calling `observer` after every
    /// synchronization phase.
    pub fn run_observed(&mut self, observer: &mut dyn SyncObserver) {
        self.run_inner(Some(observer));
    }

    fn run_inner(&mut self, mut observer: Option<&mut dyn SyncObserver>) {
        if self.finished {
            return;
        }
        let start = Instant::now();
        match self.cfg.worker_mode {
            WorkerMode::Lockstep => loop {
                self.traverse_all();
                self.sync_all();
                if let Some(obs) = observer.as_deref_mut() {
                    self.observe(obs);
                }
                if !self.finish_level() {
                    break;
                }
            },
            WorkerMode::Concurrent => self.run_concurrent(observer),
        }
        self.elapsed += start.elapsed();
    }

    fn run_concurrent(&mut self, observer: Option<&mut dyn SyncObserver>) {
        let num_nodes = self.nodes.len();
        let barrier = Barrier::new(num_nodes);
        let observer = observer.map(Mutex::new);
        let start_level = self.level;
        let helpers = self.cfg.intra_node_parallelism;
        let exchange = &self.exchange;
        let plan = &self.plan;
        let partition = &self.partition;
        let mut sizes = Some(&mut self.frontier_sizes);

        let final_level = std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .nodes
                .iter_mut()
                .map(|node| {
                    let sizes = if node.id == 0 { sizes.take() } else { None };
                    let barrier = &barrier;
                    let observer = observer.as_ref();
                    scope.spawn(move || {
                        let g = node.id;
                        let mut level = start_level;
                        let mut sizes = sizes;
                        loop {
                            node.traverse(&exchange[g], level, helpers);
                            barrier.wait();
                            for round in 0..plan.num_rounds() {
                                exchange[g].publish_snapshot(level);
                                barrier.wait();
                                node.pull_round(exchange, plan, round, level);
                                barrier.wait();
                            }
                            if let Some(obs) = observer {
                                if barrier.wait().is_leader() {
                                    let view = SyncView {
                                        level,
                                        exchange,
                                        partition,
                                    };
                                    obs.lock().unwrap().after_sync(&view);
                                }
                                barrier.wait();
                            }
                            let size = exchange[g].global[next(level)].len();
                            if size == 0 {
                                return level;
                            }
                            if let Some(sizes) = sizes.as_deref_mut() {
                                sizes.push(size);
                            }
                            level += 1;
                            exchange[g].reset_next(level);
                        }
                    })
                })
                .collect();
            let levels: Vec<Distance> = handles
                .into_iter()
                .map(|h| h.join().expect("compute-node worker panicked"))
                .collect();
            debug_assert!(levels.windows(2).all(|w| w[0] == w[1]));
            levels[0]
        });
        self.level = final_level;
        self.finished = true;
    }

    /// Collects node 0's distances and the run statistics.
    pub fn into_result(self) -> (DistanceArray, RunStats) {
        let stats = self.stats();
        let dist = self.nodes[0]
            .dist
            .iter()
            .map(|d| d.load(std::sync::atomic::Ordering::Relaxed))
            .collect();
        (DistanceArray { root: self.root, dist }, stats)
    }

    /// Every node's distance view. At termination all of them are equal.
    pub fn all_distances(&self) -> Vec<Vec<Distance>> {
        self.nodes
            .iter()
            .map(|n| n.dist.iter().map(|d| d.load(std::sync::atomic::Ordering::Relaxed)).collect())
            .collect()
    }

    pub fn stats(&self) -> RunStats {
        let sum = |f: fn(&node::NodeCounters) -> u64| self.nodes.iter().map(|n| f(&n.counters)).sum::<u64>();
        RunStats {
            levels: self.frontier_sizes.len(),
            per_level_frontier_size: self.frontier_sizes.clone(),
            remote_messages: sum(|c| c.remote_messages),
            remote_vertices_transferred: sum(|c| c.remote_vertices),
            scheduled_transfers: sum(|c| c.scheduled_transfers),
            rounds_executed: self.nodes[0].counters.rounds,
            buffer_high_water: self.nodes.iter().map(|n| n.counters.buffer_high_water).collect(),
            buffer_capacity: buffer_bound(self.graph.num_vertices(), self.cfg.fanout),
            elapsed: self.elapsed,
            traversed_edges: sum(|c| c.traversed_edges),
        }
    }
}

/// Runs a full multi-node BFS and returns node 0's distances.
pub fn run(g: &Graph, p: &Partition, root: VertexId, cfg: EngineConfig) -> Result<(DistanceArray, RunStats), EngineError> {
    let mut engine = Engine::init(g, p, root, cfg)?;
    engine.run_to_completion();
    Ok(engine.into_result())
}

/// [`run`] with an explicit synchronization plan.
pub fn run_with_plan(
    g: &Graph,
    p: &Partition,
    root: VertexId,
    cfg: EngineConfig,
    plan: SyncPlan,
) -> Result<(DistanceArray, RunStats), EngineError> {
    let mut engine = Engine::init_with_plan(g, p, root, cfg, plan)?;
    engine.run_to_completion();
    Ok(engine.into_result())
}
