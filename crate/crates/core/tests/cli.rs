use std::path::Path;
use std::process::Command;

use butterfly_bfs::graph::{build_csr, load_edge_list_file, partition_1d, EdgeFormat, GraphError};
use butterfly_bfs::{bfs_top_down, UNREACHED};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_butterfly-bfs"))
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run_json(cmd: &mut Command) -> Value {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn matrix_market_fixture_matches_hand_parse() {
    let el = load_edge_list_file(&fixture("pattern_3x3.mtx"), EdgeFormat::MatrixMarket).unwrap();
    assert_eq!(el.edges, vec![(0, 1), (1, 2)]);
    assert_eq!(el.num_vertices, 3);

    let el = load_edge_list_file(&fixture("weighted_symmetric.mtx"), EdgeFormat::MatrixMarket).unwrap();
    assert_eq!(el.edges, vec![(1, 0), (2, 1), (3, 2), (3, 0)]);
    assert_eq!(el.num_vertices, 5);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_edge_list_file(Path::new("/nonexistent/graph.txt"), EdgeFormat::EdgeListText).unwrap_err();
    assert!(matches!(err, GraphError::Io(_)));
}

#[test]
fn generate_small_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let v = run_json(bin().args(["generate", "--scale", "4", "--edge-factor", "2", "--seed", "1", "--out"]).arg(path));
        assert_eq!(v["num_vertices"], 16);
        assert!(v["num_edges"].as_u64().unwrap() <= 64);
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let el = load_edge_list_file(&a, EdgeFormat::EdgeListText).unwrap();
    assert!(el.edges.iter().all(|&(s, d)| s < 16 && d < 16));
    assert!(el.edges.len() <= 64);
}

#[test]
fn generated_scale_14_reloads_as_a_valid_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k14.txt");
    let v = run_json(bin().args(["generate", "--scale", "14", "--edge-factor", "8", "--out"]).arg(&path));
    let el = load_edge_list_file(&path, EdgeFormat::EdgeListText).unwrap();
    assert_eq!(el.edges.len() as u64, v["num_edges"].as_u64().unwrap());
    // The file is already symmetrized, so it must build without cleanup.
    let g = build_csr(&el).unwrap();
    assert!(g.offsets().windows(2).all(|w| w[0] <= w[1]));
    for u in 0..g.num_vertices() as u32 {
        assert!(g.neighbors(u).windows(2).all(|w| w[0] < w[1]));
        assert!(!g.neighbors(u).contains(&u));
    }
    let p = partition_1d(&g, 8).unwrap();
    let bound = g.num_edges().div_ceil(8) + g.max_degree();
    assert!((0..8).all(|part| p.owned_edges(&g, part) <= bound));
    let d = bfs_top_down(&g, 0).unwrap();
    d.validate(&g).unwrap();
    assert!(d.dist.iter().any(|&x| x != UNREACHED));
}

#[test]
fn schedule_command() {
    let v = run_json(bin().args(["schedule", "--nodes", "16", "--fanout", "1"]));
    assert_eq!(v["num_rounds"], 4);
    assert_eq!(v["message_count_paper"], 64);
    let v = run_json(bin().args(["schedule", "--nodes", "16", "--fanout", "4"]));
    assert_eq!(v["num_rounds"], 2);
    assert_eq!(v["message_count_paper"], 128);
    assert_eq!(v["message_count_remote"], 96);
    let v = run_json(bin().args(["schedule", "--nodes", "9", "--fanout", "1"]));
    let last = &v["rounds"][3];
    for g in 0..8 {
        assert_eq!(last[g], serde_json::json!([8]));
    }

    let out = bin().args(["schedule", "--nodes", "3", "--fanout", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fanout 4 exceeds"));
}

#[test]
fn verify_and_bench_commands() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    run_json(bin().args(["generate", "--scale", "12", "--out"]).arg(&graph));

    let v = run_json(bin().args(["verify", "--nodes", "9", "--fanout", "1", "--roots", "5", "--graph"]).arg(&graph));
    assert_eq!(v["passed"], true);
    let v = run_json(bin().args(["verify", "--nodes", "1", "--roots", "3", "--graph"]).arg(&graph));
    assert_eq!(v["passed"], true);

    let csv = dir.path().join("runs.csv");
    let v = run_json(
        bin()
            .args(["bench", "--nodes", "4", "--fanout", "2", "--roots", "10", "--trim", "2", "--strategy", "all2all"])
            .args(["--mode", "concurrent", "--threads-per-node", "2", "--graph"])
            .arg(&graph)
            .arg("--csv")
            .arg(&csv),
    );
    assert_eq!(v["roots_kept"], 6);
    assert_eq!(v["config"]["strategy"], "all2all");
    assert_eq!(v["per_run"].as_array().unwrap().len(), 10);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 11);
    assert!(table.starts_with("root,elapsed_s,levels,remote_messages,remote_vertices,buffer_high_water_max"));
}

#[test]
fn bench_rejects_bad_protocol() {
    let out = bin()
        .args(["bench", "--graph"])
        .arg(fixture("pattern_3x3.mtx"))
        .args(["--roots", "10", "--trim", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("roots > 2 * trim"));
}

#[test]
fn mtx_input_through_the_cli() {
    let v = run_json(
        bin()
            .args(["verify", "--nodes", "2", "--roots", "5", "--format", "mtx", "--graph"])
            .arg(fixture("weighted_symmetric.mtx")),
    );
    assert_eq!(v["passed"], true);
    assert_eq!(v["roots_checked"], 5);
}
