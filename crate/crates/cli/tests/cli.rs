use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use labelleak::generate;

fn labelleak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labelleak"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_edges(dir: &Path, name: &str, edges: impl Iterator<Item = (usize, usize)>) -> PathBuf {
    let path = dir.join(name);
    let text: String = edges.map(|(u, v)| format!("{u} {v}\n")).collect();
    fs::write(&path, text).unwrap();
    path
}

fn community_graph(dir: &Path) -> PathBuf {
    let g = generate::planted_partition(&[60, 60], 0.15, 0.02, 11);
    write_edges(dir, "g.edges", g.edges())
}

#[test]
fn metrics_on_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_edges(dir.path(), "t.edges", [(0, 1), (1, 2), (0, 2)].into_iter());
    let out = labelleak(&["metrics", "--graph", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nodes 3\n"));
    assert!(text.contains("edges 3\n"));
    assert!(text.contains("density 1\n"));
    assert!(text.contains("transitivity 1\n"));
    assert!(text.contains("avg_path_length 1\n"));

    let out = labelleak(&["metrics", "--graph", path.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["density"], 1.0);
}

#[test]
fn unreachable_labeling_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_edges(dir.path(), "c.edges", (0..40).map(|i| (i, (i + 1) % 40)));
    let out = labelleak(&["label", "--graph", path.to_str().unwrap(), "--p", "0.5", "--tau", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("converged false"));
}

#[test]
fn label_writes_an_attribute_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = community_graph(dir.path());
    let attrs = dir.path().join("g.attrs");
    let out = labelleak(&[
        "label", "--graph", graph.to_str().unwrap(), "--p", "0.3", "--tau", "0.2", "--seed", "4", "--out",
        attrs.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&attrs).unwrap();
    assert_eq!(text.lines().count(), 120);
    assert_eq!(text.lines().filter(|l| l.ends_with(" B")).count(), 36);

    let out = labelleak(&["estimate", "--graph", graph.to_str().unwrap(), "--attributes", attrs.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("p 0.3\n"));
}

#[test]
fn exit_codes_separate_usage_from_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let graph = community_graph(dir.path());
    let out_dir = dir.path().join("out");

    // no seed anywhere
    let out = labelleak(&[
        "attack", "--graph", graph.to_str().unwrap(), "--p", "0.3", "--tau", "0.2", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // unknown flag
    assert_eq!(labelleak(&["metrics", "--graf", "x"]).status.code(), Some(1));

    // missing file
    let missing = dir.path().join("nope.edges");
    assert_eq!(labelleak(&["metrics", "--graph", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn attack_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    community_graph(dir.path());
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        r#"[graph]
edges = "g.edges"

[labeling]
p = 0.4
tau = 0.3

[split]
alpha = 0.5

[sampling]
subsamples = 4
subsample_size = 100

[forest]
n_trees = 10

[seeds]
master = 3

[output]
dir = "out"
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("flag_out");
    let out = labelleak(&["attack", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("GS mean F1 "));
    for name in ["report.json", "f1_vectors.csv", "importance_full.csv", "importance_filtered.csv"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["f1"]["gs"].as_array().unwrap().len(), 4);
    assert_eq!(report["config"]["split"]["alpha"], 0.5);
}

#[test]
fn sweep_writes_a_grid() {
    let dir = tempfile::tempdir().unwrap();
    let graph = community_graph(dir.path());
    let out_dir = dir.path().join("sweep");
    let out = labelleak(&[
        "sweep", "--graph", graph.to_str().unwrap(), "--alpha", "0.5", "--subsamples", "3", "--subsample-size",
        "100", "--trees", "5", "--seed", "2", "--p-values", "0.3,0.5", "--tau-values", "0.2,1", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = fs::read_to_string(out_dir.join("grid.csv")).unwrap();
    assert_eq!(grid, stdout(&out));
    let rows: Vec<&str> = grid.lines().collect();
    assert_eq!(rows[0], "p,tau,t_statistic,gs_mean,gs_lbl_mean,status");
    assert_eq!(rows.len(), 5);
    // a connected graph cannot be split into two groups without a cross tie
    for r in &rows[1..] {
        let fields: Vec<&str> = r.split(',').collect();
        if fields[1] == "1" {
            assert_eq!(fields[5], "skipped");
        }
    }
    assert!(out_dir.join("p0.3_tau0.2").join("report.json").exists());
}
