use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use butterfly_bfs::bench::{self, BenchError, BenchOptions, RunConfig};
use butterfly_bfs::graph::{
    generate_rmat_with, load_edge_list_file, symmetrize, write_edge_list, EdgeFormat, Graph, RmatParams,
};
use butterfly_bfs::{Strategy, WorkerMode};

#[derive(Parser)]
#[command(name = "butterfly-bfs", version, about = "Multi-node BFS with butterfly frontier synchronization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a symmetrized R-MAT graph as an edge list.
    Generate {
        #[arg(long)]
        scale: u32,
        #[arg(long, default_value_t = 8)]
        edge_factor: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Quadrant probabilities a,b,c,d.
        #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [0.57, 0.19, 0.19, 0.05])]
        rmat: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time traversals from sampled roots and report trimmed statistics.
    Bench {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = bench::DEFAULT_ROOTS)]
        roots: usize,
        #[arg(long, default_value_t = bench::DEFAULT_TRIM)]
        trim: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write a per-run CSV table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the engine against the single-node BFS on sampled roots.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 20)]
        roots: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Dump the butterfly schedule and its message counts as JSON.
    Schedule {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        fanout: usize,
    },
}

#[derive(clap::Args)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    nodes: usize,
    #[arg(long, default_value_t = 1)]
    fanout: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Butterfly)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Lockstep)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    threads_per_node: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Edges,
    Mtx,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Butterfly,
    #[value(name = "all2all")]
    AllToAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lockstep,
    Concurrent,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            num_nodes: self.nodes,
            fanout: self.fanout,
            strategy: match self.strategy {
                StrategyArg::Butterfly => Strategy::Butterfly,
                StrategyArg::AllToAll => Strategy::AllToAll,
            },
            mode: match self.mode {
                ModeArg::Lockstep => WorkerMode::Lockstep,
                ModeArg::Concurrent => WorkerMode::Concurrent,
            },
            threads_per_node: self.threads_per_node,
        }
    }
}

fn load_graph(args: &GraphArgs) -> Result<Graph, BenchError> {
    let format = match args.format {
        Some(FormatArg::Edges) => EdgeFormat::EdgeListText,
        Some(FormatArg::Mtx) => EdgeFormat::MatrixMarket,
        None => EdgeFormat::from_path(&args.graph),
    };
    let el = load_edge_list_file(&args.graph, format)?;
    Ok(Graph::from_edge_list(&el))
}

fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn execute(cli: Cli) -> Result<ExitCode, BenchError> {
    match cli.command {
        Command::Generate {
            scale,
            edge_factor,
            seed,
            rmat,
            out,
        } => {
            let params = RmatParams {
                a: rmat[0],
                b: rmat[1],
                c: rmat[2],
                d: rmat[3],
            };
            let el = symmetrize(&generate_rmat_with(scale, edge_factor, seed, params)?);
            write_edge_list(BufWriter::new(File::create(&out)?), &el)?;
            print_json(&json!({
                "path": out.display().to_string(),
                "num_vertices": el.num_vertices,
                "num_edges": el.edges.len(),
            }));
        }
        Command::Bench {
            graph,
            run,
            roots,
            trim,
            seed,
            csv,
        } => {
            let g = load_graph(&graph)?;
            let opts = BenchOptions {
                run: run.config(),
                roots,
                trim,
                seed,
            };
            let report = bench::bench(&g, &graph_name(&graph.graph), &opts)?;
            if report.roots_clamped {
                eprintln!(
                    "warning: graph has only {} vertices; sampled {} of {} requested roots",
                    report.num_vertices, report.roots_sampled, report.roots_requested
                );
            }
            if let Some(path) = csv {
                report.write_csv(File::create(path)?)?;
            }
            println!("{}", report.to_json());
        }
        Command::Verify {
            graph,
            run,
            roots,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let report = bench::verify(&g, run.config(), roots, seed)?;
            print_json(&report);
            if let Some(m) = &report.mismatch {
                eprintln!("mismatch: {m}");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Schedule { nodes, fanout } => {
            print_json(&bench::schedule_report(nodes, fanout)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
