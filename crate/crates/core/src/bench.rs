//! Benchmark, verification and schedule-inspection drivers behind the CLI.
//!
//! The benchmark protocol samples distinct roots uniformly from all vertices,
//! runs one traversal per root, sorts the runs by wall-clock time, drops the
//! `trim` fastest and `trim` slowest, and averages the rest. Root sampling
//! depends only on the vertex count, the seed and the root count, so every
//! node-count and fanout configuration sees the same roots.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, EngineConfig, EngineError, RunStats, Strategy, SyncPlan, WorkerMode};
use crate::graph::{partition_1d, Graph, GraphError, VertexId};
use crate::oracle::{bfs_top_down, Distance};
use crate::schedule::{message_count_paper, ButterflySchedule, ScheduleError};

pub const DEFAULT_ROOTS: usize = 100;
pub const DEFAULT_TRIM: usize = 25;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Engine settings shared by `bench` and `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub num_nodes: usize,
    pub fanout: usize,
    pub strategy: Strategy,
    pub mode: WorkerMode,
    pub threads_per_node: usize,
}

impl RunConfig {
    pub fn new(num_nodes: usize, fanout: usize) -> Self {
        RunConfig {
            num_nodes,
            fanout,
            strategy: Strategy::Butterfly,
            mode: WorkerMode::Lockstep,
            threads_per_node: 1,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_mode(mut self, mode: WorkerMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            fanout: self.fanout,
            strategy: self.strategy,
            worker_mode: self.mode,
            intra_node_parallelism: self.threads_per_node,
        }
    }
}

/// Samples up to `count` distinct roots uniformly from `0..num_vertices`.
/// Returns fewer when the graph is smaller than `count`.
pub fn sample_roots(num_vertices: usize, count: usize, seed: u64) -> Vec<VertexId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amount = count.min(num_vertices);
    rand::seq::index::sample(&mut rng, num_vertices, amount)
        .into_iter()
        .map(|v| v as VertexId)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub root: VertexId,
    pub elapsed_s: f64,
    pub levels: usize,
    pub frontier_sizes: Vec<usize>,
    pub reached: usize,
    pub traversed_edges: u64,
    pub remote_messages: u64,
    pub remote_vertices: u64,
    pub scheduled_transfers: u64,
    pub rounds_executed: u64,
    pub buffer_high_water_max: usize,
    /// Whether the run survived trimming.
    pub kept: bool,
}

impl RunSummary {
    fn from_stats(root: VertexId, stats: &RunStats) -> Self {
        RunSummary {
            root,
            elapsed_s: stats.elapsed.as_secs_f64(),
            levels: stats.levels,
            frontier_sizes: stats.per_level_frontier_size.clone(),
            reached: stats.reached(),
            traversed_edges: stats.traversed_edges,
            remote_messages: stats.remote_messages,
            remote_vertices: stats.remote_vertices_transferred,
            scheduled_transfers: stats.scheduled_transfers,
            rounds_executed: stats.rounds_executed,
            buffer_high_water_max: stats.max_buffer_high_water(),
            kept: false,
        }
    }
}

/// Means over the kept runs, plus the worst buffer occupancy over all runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub remote_messages_mean: f64,
    pub remote_vertices_mean: f64,
    pub scheduled_transfers_mean: f64,
    pub rounds_mean: f64,
    pub levels_mean: f64,
    pub traversed_edges_mean: f64,
    pub buffer_high_water_max: usize,
    pub buffer_capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub graph_name: String,
    pub num_vertices: usize,
    /// Directed edges after symmetrization; the TEPS numerator.
    pub num_edges: usize,
    pub num_undirected_edges: usize,
    pub config: RunConfig,
    pub seed: u64,
    pub roots_requested: usize,
    pub roots_sampled: usize,
    pub trim: usize,
    pub roots_kept: usize,
    /// Set when the graph had fewer vertices than requested roots.
    pub roots_clamped: bool,
    pub mean_time_s: f64,
    /// `num_edges / mean_time_s`; absent when the mean time is zero.
    pub teps_nominal: Option<f64>,
    /// Mean traversed edges of the kept runs over `mean_time_s`.
    pub teps_touched: Option<f64>,
    pub aggregate: Aggregate,
    /// Every sampled run in sampling order.
    pub per_run: Vec<RunSummary>,
}

impl BenchReport {
    pub fn roots(&self) -> Vec<VertexId> {
        self.per_run.iter().map(|r| r.root).collect()
    }

    pub fn kept_runs(&self) -> impl Iterator<Item = &RunSummary> {
        self.per_run.iter().filter(|r| r.kept)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<BenchReport> {
        serde_json::from_str(s)
    }

    /// One row per run: root, elapsed_s, levels, remote_messages,
    /// remote_vertices, buffer_high_water_max.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "root",
            "elapsed_s",
            "levels",
            "remote_messages",
            "remote_vertices",
            "buffer_high_water_max",
        ])?;
        for r in &self.per_run {
            w.write_record([
                r.root.to_string(),
                r.elapsed_s.to_string(),
                r.levels.to_string(),
                r.remote_messages.to_string(),
                r.remote_vertices.to_string(),
                r.buffer_high_water_max.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub run: RunConfig,
    pub roots: usize,
    pub trim: usize,
    pub seed: u64,
}

impl BenchOptions {
    pub fn new(run: RunConfig) -> Self {
        BenchOptions {
            run,
            roots: DEFAULT_ROOTS,
            trim: DEFAULT_TRIM,
            seed: 1,
        }
    }
}

fn teps(edges: f64, seconds: f64) -> Option<f64> {
    (seconds > 0.0).then(|| edges / seconds)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Runs the sampled-root benchmark on `g`.
pub fn bench(g: &Graph, graph_name: &str, opts: &BenchOptions) -> Result<BenchReport, BenchError> {
    if opts.roots == 0 || opts.roots <= 2 * opts.trim {
        return Err(BenchError::InvalidArgs(format!(
            "need roots > 2 * trim (roots = {}, trim = {})",
            opts.roots, opts.trim
        )));
    }
    let partition = partition_1d(g, opts.run.num_nodes)?;
    let cfg = opts.run.engine_config();
    let roots = sample_roots(g.num_vertices(), opts.roots, opts.seed);
    let clamped = roots.len() < opts.roots;
    if roots.is_empty() {
        return Err(BenchError::InvalidArgs("graph has no vertices".into()));
    }
    // With fewer roots than asked for, trim less so at least one run is kept.
    let trim = opts.trim.min((roots.len() - 1) / 2);

    let mut per_run = Vec::with_capacity(roots.len());
    let mut elapsed = Vec::with_capacity(roots.len());
    let mut buffer_capacity = 0;
    for &root in &roots {
        let (_, stats) = engine::run(g, &partition, root, cfg)?;
        buffer_capacity = stats.buffer_capacity;
        elapsed.push(stats.elapsed);
        per_run.push(RunSummary::from_stats(root, &stats));
    }

    let mut order: Vec<usize> = (0..per_run.len()).collect();
    order.sort_by_key(|&i| (elapsed[i], i));
    for &i in &order[trim..order.len() - trim] {
        per_run[i].kept = true;
    }

    let kept: Vec<&RunSummary> = per_run.iter().filter(|r| r.kept).collect();
    let mean_time_s = mean(kept.iter().map(|r| r.elapsed_s));
    let traversed_mean = mean(kept.iter().map(|r| r.traversed_edges as f64));
    let aggregate = Aggregate {
        remote_messages_mean: mean(kept.iter().map(|r| r.remote_messages as f64)),
        remote_vertices_mean: mean(kept.iter().map(|r| r.remote_vertices as f64)),
        scheduled_transfers_mean: mean(kept.iter().map(|r| r.scheduled_transfers as f64)),
        rounds_mean: mean(kept.iter().map(|r| r.rounds_executed as f64)),
        levels_mean: mean(kept.iter().map(|r| r.levels as f64)),
        traversed_edges_mean: traversed_mean,
        buffer_high_water_max: per_run.iter().map(|r| r.buffer_high_water_max).max().unwrap_or(0),
        buffer_capacity,
    };

    Ok(BenchReport {
        graph_name: graph_name.to_string(),
        num_vertices: g.num_vertices(),
        num_edges: g.num_edges(),
        num_undirected_edges: g.num_undirected_edges(),
        config: opts.run,
        seed: opts.seed,
        roots_requested: opts.roots,
        roots_sampled: roots.len(),
        trim,
        roots_kept: kept.len(),
        roots_clamped: clamped,
        mean_time_s,
        teps_nominal: teps(g.num_edges() as f64, mean_time_s),
        teps_touched: teps(traversed_mean, mean_time_s),
        aggregate,
        per_run,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub root: VertexId,
    pub vertex: VertexId,
    pub expected: Option<Distance>,
    pub got: Option<Distance>,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |d: Option<Distance>| d.map_or("unreached".to_string(), |d| d.to_string());
        write!(
            f,
            "root {}: vertex {} expected {} got {}",
            self.root,
            self.vertex,
            show(self.expected),
            show(self.got)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub roots_checked: usize,
    pub passed: bool,
    pub mismatch: Option<Mismatch>,
}

/// Compares the engine against the single-node oracle on sampled roots and
/// stops at the first differing vertex.
pub fn verify(g: &Graph, run: RunConfig, roots: usize, seed: u64) -> Result<VerifyReport, BenchError> {
    let plan = SyncPlan::for_config(run.num_nodes, &run.engine_config())?;
    verify_with_plan(g, run, plan, roots, seed)
}

/// [`verify`] with an explicit synchronization plan.
pub fn verify_with_plan(
    g: &Graph,
    run: RunConfig,
    plan: SyncPlan,
    roots: usize,
    seed: u64,
) -> Result<VerifyReport, BenchError> {
    let partition = partition_1d(g, run.num_nodes)?;
    let cfg = run.engine_config();
    let sampled = sample_roots(g.num_vertices(), roots, seed);
    let finite = |d: Distance| (d != crate::oracle::UNREACHED).then_some(d);
    for (checked, &root) in sampled.iter().enumerate() {
        let expected = bfs_top_down(g, root).map_err(EngineError::from)?;
        let (got, _) = engine::run_with_plan(g, &partition, root, cfg, plan.clone())?;
        if let Some((vertex, e, o)) = expected.first_difference(&got) {
            return Ok(VerifyReport {
                config: run,
                roots_checked: checked + 1,
                passed: false,
                mismatch: Some(Mismatch {
                    root,
                    vertex,
                    expected: finite(e),
                    got: finite(o),
                }),
            });
        }
    }
    Ok(VerifyReport {
        config: run,
        roots_checked: sampled.len(),
        passed: true,
        mismatch: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub num_nodes: usize,
    pub fanout: usize,
    pub radix: usize,
    pub num_rounds: usize,
    pub message_count_paper: usize,
    pub message_count_remote: usize,
    /// `rounds[i][g]`: nodes that node `g` pulls from in round `i`.
    pub rounds: Vec<Vec<Vec<usize>>>,
}

pub fn schedule_report(num_nodes: usize, fanout: usize) -> Result<ScheduleReport, BenchError> {
    let s = ButterflySchedule::new(num_nodes, fanout)?;
    Ok(ScheduleReport {
        num_nodes,
        fanout,
        radix: s.radix(),
        num_rounds: s.num_rounds(),
        message_count_paper: message_count_paper(num_nodes, fanout)?,
        message_count_remote: s.message_count_remote(),
        rounds: s.rounds().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_rmat, synthetic};

    fn small_rmat() -> Graph {
        Graph::from_edge_list(&generate_rmat(9, 8, 21).unwrap())
    }

    #[test]
    fn roots_are_distinct_and_reproducible() {
        let a = sample_roots(1000, 100, 7);
        assert_eq!(a, sample_roots(1000, 100, 7));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_ne!(a, sample_roots(1000, 100, 8));
        assert_eq!(sample_roots(5, 100, 7).len(), 5);
    }

    #[test]
    fn default_protocol_keeps_fifty() {
        let g = small_rmat();
        let report = bench(&g, "rmat9", &BenchOptions::new(RunConfig::new(4, 2))).unwrap();
        assert_eq!(report.roots_sampled, 100);
        assert_eq!(report.roots_kept, 50);
        assert_eq!(report.kept_runs().count(), 50);
        assert!(!report.roots_clamped);
    }

    #[test]
    fn trimmed_runs_are_the_extremes() {
        let g = small_rmat();
        let report = bench(&g, "rmat9", &BenchOptions::new(RunConfig::new(2, 1))).unwrap();
        let kept_max = report.kept_runs().map(|r| r.elapsed_s).fold(0.0, f64::max);
        let kept_min = report.kept_runs().map(|r| r.elapsed_s).fold(f64::MAX, f64::min);
        let dropped: Vec<_> = report.per_run.iter().filter(|r| !r.kept).collect();
        assert_eq!(dropped.len(), 50);
        assert!(dropped.iter().all(|r| r.elapsed_s <= kept_min || r.elapsed_s >= kept_max));
    }

    #[test]
    fn no_trim_is_plain_mean() {
        let g = synthetic::path(50);
        let opts = BenchOptions {
            roots: 3,
            trim: 0,
            ..BenchOptions::new(RunConfig::new(2, 1))
        };
        let report = bench(&g, "path", &opts).unwrap();
        assert_eq!(report.roots_kept, 3);
        let expected = report.per_run.iter().map(|r| r.elapsed_s).sum::<f64>() / 3.0;
        assert!((report.mean_time_s - expected).abs() < 1e-12);
        if let Some(t) = report.teps_nominal {
            assert!((t * report.mean_time_s - g.num_edges() as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn too_few_vertices_is_flagged() {
        let g = synthetic::path(9);
        let report = bench(&g, "path", &BenchOptions::new(RunConfig::new(3, 1))).unwrap();
        assert!(report.roots_clamped);
        assert_eq!(report.roots_sampled, 9);
        assert_eq!(report.trim, 4);
        assert_eq!(report.roots_kept, 1);
    }

    #[test]
    fn invalid_protocol_arguments() {
        let g = synthetic::path(9);
        let opts = BenchOptions {
            roots: 50,
            ..BenchOptions::new(RunConfig::new(2, 1))
        };
        assert!(matches!(bench(&g, "p", &opts), Err(BenchError::InvalidArgs(_))));
        let opts = BenchOptions::new(RunConfig::new(2, 3));
        assert!(bench(&g, "p", &opts).is_err());
    }

    #[test]
    fn strategies_agree_on_levels_not_messages() {
        let g = small_rmat();
        let opts = |s| BenchOptions {
            roots: 20,
            trim: 5,
            ..BenchOptions::new(RunConfig::new(8, 1).with_strategy(s))
        };
        let bfly = bench(&g, "r", &opts(Strategy::Butterfly)).unwrap();
        let a2a = bench(&g, "r", &opts(Strategy::AllToAll)).unwrap();
        assert_eq!(bfly.roots(), a2a.roots());
        for (b, a) in bfly.per_run.iter().zip(&a2a.per_run) {
            assert_eq!(b.levels, a.levels);
            assert_eq!(b.frontier_sizes, a.frontier_sizes);
            assert_eq!(b.scheduled_transfers, 8 * 3 * b.levels as u64);
            assert_eq!(a.scheduled_transfers, 8 * 7 * a.levels as u64);
        }
    }

    #[test]
    fn report_json_round_trips() {
        let g = small_rmat();
        let opts = BenchOptions {
            roots: 6,
            trim: 1,
            ..BenchOptions::new(RunConfig::new(3, 1))
        };
        let report = bench(&g, "rmat9", &opts).unwrap();
        let parsed = BenchReport::from_json(&report.to_json()).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.to_json(), report.to_json());
    }

    #[test]
    fn csv_has_one_row_per_run() {
        let g = synthetic::path(20);
        let opts = BenchOptions {
            roots: 4,
            trim: 1,
            ..BenchOptions::new(RunConfig::new(2, 1))
        };
        let report = bench(&g, "p", &opts).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("root,elapsed_s,levels,remote_messages,remote_vertices,buffer_high_water_max")
        );
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn verify_passes_and_single_node_always_passes() {
        let g = small_rmat();
        assert!(verify(&g, RunConfig::new(1, 1), 5, 3).unwrap().passed);
        let report = verify(&g, RunConfig::new(9, 1), 10, 3).unwrap();
        assert!(report.passed);
        assert_eq!(report.roots_checked, 10);
    }

    #[test]
    fn verify_reports_a_broken_schedule() {
        let g = synthetic::path(40);
        let mut s = ButterflySchedule::new(4, 1).unwrap().rounds().to_vec();
        // Node 0 never hears from the upper half.
        s[1][0].clear();
        let plan = SyncPlan::Butterfly(ButterflySchedule::from_rounds(4, 1, s));
        let report = verify_with_plan(&g, RunConfig::new(4, 1), plan, 5, 2).unwrap();
        assert!(!report.passed);
        let m = report.mismatch.unwrap();
        assert_ne!(m.expected, m.got);
        assert!(m.to_string().starts_with(&format!("root {}", m.root)));
    }

    #[test]
    fn schedule_report_counts() {
        let r = schedule_report(16, 1).unwrap();
        assert_eq!((r.num_rounds, r.message_count_paper, r.message_count_remote), (4, 64, 64));
        let r = schedule_report(16, 4).unwrap();
        assert_eq!((r.num_rounds, r.message_count_paper, r.message_count_remote), (2, 128, 96));
        let r = schedule_report(9, 1).unwrap();
        assert!((0..8).all(|g| r.rounds[3][g] == vec![8]));
        assert!(schedule_report(3, 4).is_err());
    }
}
