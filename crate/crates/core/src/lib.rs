//! Multi-node breadth-first search with butterfly-network frontier
//! synchronization.
//!
//! Compute nodes are simulated inside one process. Each owns a contiguous
//! slice of the graph, traverses its share of the frontier, and then
//! exchanges frontier buffers with other nodes along a butterfly schedule of
//! configurable fanout.
//!
//! - [`graph`]: ingestion, cleanup, CSR, R-MAT generation, 1D partitioning.
//! - [`oracle`]: single-node top-down BFS used as the correctness reference.
//! - [`schedule`]: the butterfly pattern and its message/buffer accounting.
//! - [`engine`]: the multi-node traversal itself.
//! - [`bench`]: the benchmarking, verification and schedule-dump commands.

pub mod bench;
pub mod engine;
pub mod graph;
pub mod oracle;
pub mod queue;
pub mod schedule;

pub use engine::{run, Engine, EngineConfig, EngineError, RunStats, Strategy, SyncPlan, WorkerMode};
pub use graph::{Graph, Partition, VertexId};
pub use oracle::{bfs_top_down, DistanceArray, UNREACHED};
pub use schedule::{make_schedule, ButterflySchedule};
