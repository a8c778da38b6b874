//! End-to-end tests of the `plgcirmap` binary: exit codes, file outputs,
//! and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const HEXAGON: &str = r#"{
  "polygons": [[[0.0,1.5],[-1.0,1.5],[-1.0,-1.0],[1.5,-1.0],[1.5,0.0],[1.0,0.0]]],
  "alpha": [0.0, 0.0]
}"#;

const BOWTIE: &str = r#"{
  "polygons": [[[0.0,0.0],[1.0,1.0],[1.0,0.0],[0.0,1.0]]],
  "alpha": [0.25, 0.5]
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plgcirmap"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Compute a small hexagon map into `dir`, returning the map path.
fn make_map(dir: &Path) -> PathBuf {
    let domain = dir.join("domain.json");
    std::fs::write(&domain, HEXAGON).unwrap();
    let map = dir.join("map.json");
    let out = run(&[
        "map",
        "--input",
        domain.to_str().unwrap(),
        "--output",
        map.to_str().unwrap(),
        "--n",
        "32",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    map
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("map"));
    assert!(text.contains("grid"));
}

#[test]
fn unknown_flag_exits_four() {
    let out = run(&["map", "--no-such-flag"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn map_command_writes_a_loadable_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = make_map(dir.path());
    let text = std::fs::read_to_string(&map).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["version"], serde_json::json!(1));

    let out = run(&["info", "--map", map.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("connectivity m = 1"));
    assert!(text.contains("normalization: eq1"));
}

#[test]
fn info_json_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let map = make_map(dir.path());
    let out = run(&["info", "--map", map.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["m"], serde_json::json!(1));
    assert_eq!(value["normalization"], serde_json::json!("eq1"));
    assert_eq!(value["converged"], serde_json::json!(true));
    assert_eq!(value["rad"].as_array().unwrap().len(), 1);
}

#[test]
fn invalid_geometry_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let domain = dir.path().join("bowtie.json");
    std::fs::write(&domain, BOWTIE).unwrap();
    let out = run(&[
        "map",
        "--input",
        domain.to_str().unwrap(),
        "--output",
        dir.path().join("map.json").to_str().unwrap(),
        "--n",
        "16",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-intersecting"));
}

#[test]
fn bad_mesh_size_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let domain = dir.path().join("domain.json");
    std::fs::write(&domain, HEXAGON).unwrap();
    let out = run(&[
        "map",
        "--input",
        domain.to_str().unwrap(),
        "--output",
        dir.path().join("map.json").to_str().unwrap(),
        "--n",
        "7",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn missing_input_exits_four() {
    let out = run(&[
        "map",
        "--input",
        "/nonexistent/domain.json",
        "--output",
        "/tmp/unused-map.json",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn truncated_map_file_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let map = make_map(dir.path());
    let text = std::fs::read_to_string(&map).unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, &text[..text.len() / 2]).unwrap();
    let out = run(&["info", "--map", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn eval_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let map = make_map(dir.path());
    let points = dir.path().join("points.csv");
    std::fs::write(&points, "0.0,0.0\n0.3,0.2\n-0.4,-0.5\n").unwrap();
    let out = run(&[
        "eval",
        "--map",
        map.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
        "--direction",
        "forward",
        "--deriv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!(row.len(), 6); // x, y, fx, fy, dfx, dfy
    }
    // alpha = 0 maps to (approximately) 0 at this coarse mesh.
    assert!(rows[0][2].abs() < 1e-5 && rows[0][3].abs() < 1e-5);

    // Malformed CSV exits 4.
    std::fs::write(&points, "0.0,abc\n").unwrap();
    let out = run(&[
        "eval",
        "--map",
        map.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
        "--direction",
        "forward",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn grid_command_emits_files_and_validates_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let map = make_map(dir.path());
    let svg = dir.path().join("grid.svg");
    let data = dir.path().join("grid.jsonl");
    let out = run(&[
        "grid",
        "--map",
        map.to_str().unwrap(),
        "--kind",
        "rec",
        "--side",
        "d",
        "--n1",
        "5",
        "--n2",
        "5",
        "--svg",
        svg.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for suffix in ["_src", "_img"] {
        assert!(dir.path().join(format!("grid{suffix}.svg")).exists());
        assert!(dir.path().join(format!("grid{suffix}.jsonl")).exists());
    }

    // Zero grid size is a usage error.
    let out = run(&[
        "grid",
        "--map",
        map.to_str().unwrap(),
        "--kind",
        "rec",
        "--side",
        "d",
        "--n1",
        "0",
        "--n2",
        "5",
        "--svg",
        svg.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);

    // Unsupported kind/side combination is a usage error.
    let out = run(&[
        "grid",
        "--map",
        map.to_str().unwrap(),
        "--kind",
        "rec",
        "--side",
        "v",
        "--n1",
        "3",
        "--n2",
        "3",
        "--svg",
        svg.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let domain = dir.path().join("domain.json");
    std::fs::write(&domain, HEXAGON).unwrap();
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let map = dir.path().join(name);
        let out = run(&[
            "map",
            "--input",
            domain.to_str().unwrap(),
            "--output",
            map.to_str().unwrap(),
            "--n",
            "32",
        ]);
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(&map).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
