use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_randers"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn write_config(dir: &TempDir, v: &Value) -> PathBuf {
    let p = dir.path().join("config.json");
    fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).arg("--quiet").args(extra).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn manifest(out: &Path) -> Value {
    serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap()
}

fn euclidean(tasks: Value) -> Value {
    json!({
        "scenario": "t",
        "dimension": 2,
        "domain": {"min": -2, "max": 2, "nodes": 41},
        "randers": {"g0[0][0]": "1", "g0[1][1]": "1"},
        "tasks": tasks,
    })
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn minimal_connect_writes_one_curve_of_unit_length() {
    let tmp = TempDir::new().unwrap();
    let o = run(&scenario("minimal.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(tmp.path());
    assert_eq!(m["files"].as_array().unwrap().len(), 1);
    let task = &m["tasks"][0];
    assert_eq!(task["status"], "ok");
    assert_eq!(task["files"], json!(["segment.csv"]));
    let len = task["summary"]["length"].as_f64().unwrap();
    assert!((len - 1.0).abs() < 1e-8, "{len}");
    let (header, rows) = read_csv(&tmp.path().join("segment.csv"));
    assert_eq!(header, ["s", "x1", "x2", "v1", "v2"]);
    let last = rows.last().unwrap();
    assert!((last[1] - 1.0).abs() < 1e-8 && last[2].abs() < 1e-8);
}

#[test]
fn missing_metric_tensor_exits_2_with_pointer() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = euclidean(json!([]));
    cfg["randers"] = json!({"omega[0]": "0.1"});
    let p = write_config(&tmp, &cfg);
    let o = run(&p, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let rep = stdout_json(&o);
    assert_eq!(rep["error"], "schema");
    assert_eq!(rep["pointer"], "/randers/g0");
    assert!(rep["message"].as_str().unwrap().contains("g0"));
    assert!(!tmp.path().join("out").exists());

    cfg["randers"] = json!({"g0[0][0]": "1"});
    let p = write_config(&tmp, &cfg);
    let rep = stdout_json(&bin().arg("validate").arg(&p).output().unwrap());
    assert_eq!(rep["pointer"], "/randers/g0[1][1]");
}

#[test]
fn schema_errors_point_at_the_offending_key() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        (json!([{"id": "g", "type": "gauge", "f": "0.5*x1 +"}]), "/tasks/0/f"),
        (json!([{"id": "g", "type": "teleport"}]), "/tasks/0/type"),
        (json!([{"id": "c", "type": "connect", "from": [0, 0]}]), "/tasks/0/to"),
        (json!([{"id": "c", "type": "connect", "from": [0, 0], "to": [1]}]), "/tasks/0/to"),
        (json!([{"id": "c", "type": "connect", "from": [0, 0], "to": [1, 0], "speed": 2}]), "/tasks/0/speed"),
        (json!([{"id": "a", "type": "zermelo-convert"}, {"id": "a", "type": "zermelo-convert"}]), "/tasks/1/id"),
        (json!([{"id": "l", "type": "lightcone", "apex": [0, 0], "times": [1, 0.5]}]), "/tasks/0/times"),
    ];
    for (tasks, pointer) in cases {
        let p = write_config(&tmp, &euclidean(tasks));
        let o = bin().arg("validate").arg(&p).output().unwrap();
        assert_eq!(o.status.code(), Some(2));
        let rep = stdout_json(&o);
        assert_eq!(rep["pointer"], pointer, "{rep}");
    }
    let rep = stdout_json(&bin().arg("validate").arg(&write_config(&tmp, &euclidean(json!([{"id": "g", "type": "gauge", "f": "sin(x1"}])))).output().unwrap());
    assert!(rep["message"].as_str().unwrap().contains("parse error"), "{rep}");
}

#[test]
fn two_metric_specs_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = euclidean(json!([]));
    cfg["zermelo"] = json!({"g[0][0]": "1", "g[1][1]": "1"});
    let o = bin().arg("validate").arg(write_config(&tmp, &cfg)).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout_json(&o)["message"].as_str().unwrap().contains("exactly one"));
}

#[test]
fn validate_reports_sampled_one_form_norm() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = euclidean(json!([]));
    cfg["randers"]["omega[0]"] = json!("0.5");
    let o = bin().arg("validate").arg(write_config(&tmp, &cfg)).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rep = stdout_json(&o);
    assert_eq!(rep["status"], "ok");
    assert!((rep["max_omega_norm"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn validate_names_the_worst_point_of_an_invalid_metric() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = euclidean(json!([]));
    cfg["randers"]["omega[0]"] = json!("1.2 + 0.1*x1");
    let o = bin().arg("validate").arg(write_config(&tmp, &cfg)).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let rep = stdout_json(&o);
    assert_eq!(rep["error"], "invalid_metric");
    // largest norm where x1 is largest
    assert_eq!(rep["worst_point"][0].as_f64().unwrap(), 2.0);
    assert!(rep["message"].as_str().unwrap().contains(">= 1"));
}

#[test]
fn minkowski_cone_slices_are_discs_within_one_cell() {
    let tmp = TempDir::new().unwrap();
    let o = run(&scenario("minkowski_cone.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(tmp.path());
    let slices = m["tasks"][0]["summary"]["slices"].as_array().unwrap().clone();
    assert_eq!(slices.len(), 3);
    let h = 4.0 / 80.0;
    for s in slices {
        let t = s["t"].as_f64().unwrap();
        let (_, rows) = read_csv(&tmp.path().join(s["file"].as_str().unwrap()));
        assert_eq!(rows.len(), 81 * 81);
        for r in rows {
            let d = r[0].hypot(r[1]);
            if r[2] == 1.0 {
                assert!(d < t + h, "inside node at {d} for t={t}");
            } else {
                assert!(d >= t - h, "outside node at {d} for t={t}");
            }
        }
    }
    // disc horizon: t = 1 - |x| on the base
    let (header, rows) = read_csv(&tmp.path().join("horizon.csv"));
    assert_eq!(header, ["x1", "x2", "t_horizon"]);
    assert!(!rows.is_empty());
    for r in rows {
        let exact = 1.0 - r[0].hypot(r[1]);
        assert!((r[2] - exact).abs() <= 2.0 * h, "{r:?}");
    }
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn repeated_and_parallel_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = scenario("tour.json");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert_eq!(run(&cfg, &a, &[]).status.code(), Some(0));
    assert_eq!(run(&cfg, &b, &[]).status.code(), Some(0));
    assert_eq!(run(&cfg, &c, &["--parallel", "4"]).status.code(), Some(0));
    let (da, db, dc) = (dir_contents(&a), dir_contents(&b), dir_contents(&c));
    assert!(da.len() > 10);
    assert!(da == db && da == dc);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let tmp = TempDir::new().unwrap();
    run(&scenario("minimal.json"), tmp.path(), &["--seed", "42"]);
    assert_eq!(manifest(tmp.path())["seed"], 42);
}

#[test]
fn manifest_lists_every_file_with_its_digest() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(&scenario("tour.json"), tmp.path(), &[]).status.code(), Some(0));
    let m = manifest(tmp.path());
    let listed: BTreeSet<String> =
        m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap().to_string()).collect();
    let on_disk: BTreeSet<String> =
        dir_contents(tmp.path()).into_iter().map(|(n, _)| n).filter(|n| n != "manifest.json").collect();
    assert_eq!(listed, on_disk);
    for f in m["files"].as_array().unwrap() {
        let bytes = fs::read(tmp.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
        assert_eq!(f["sha256"].as_str().unwrap(), randers_cli::output::sha256_hex(&bytes));
    }
    let tasks = m["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 14);
    for t in tasks {
        assert_eq!(t["status"], "ok", "{t}");
    }
    let types: BTreeSet<&str> = tasks.iter().map(|t| t["type"].as_str().unwrap()).collect();
    assert_eq!(types, randers_cli::config::TASK_TYPES.into_iter().collect());
}

#[test]
fn task_failure_exits_1_with_partial_manifest() {
    let tmp = TempDir::new().unwrap();
    let cfg = euclidean(json!([
        {"id": "ok", "type": "connect", "from": [0, 0], "to": [1, 0]},
        {"id": "escape", "type": "geodesic", "start": [0, 0], "velocity": [1, 0], "length": 5},
        {"id": "after", "type": "ball", "center": [0, 0], "radius": 1}
    ]));
    let out = tmp.path().join("out");
    let o = run(&write_config(&tmp, &cfg), &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    let m = manifest(&out);
    assert_eq!(m["status"], "failed");
    let status: Vec<&str> = m["tasks"].as_array().unwrap().iter().map(|t| t["status"].as_str().unwrap()).collect();
    assert_eq!(status, ["ok", "failed", "ok"]);
    assert!(m["tasks"][1]["error"].as_str().unwrap().contains("left the domain"));
    assert!(!out.join("escape.csv").exists());
    assert!(out.join("after.csv").exists());
}

#[test]
fn io_failures_exit_3() {
    let tmp = TempDir::new().unwrap();
    let o = bin().arg("run").arg(tmp.path().join("absent.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["error"], "io");

    let blocker = tmp.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let o = run(&scenario("minimal.json"), &blocker.join("sub"), &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gauge_output_is_a_loadable_metric() {
    let tmp = TempDir::new().unwrap();
    let cfg = euclidean(json!([{"id": "g", "type": "gauge", "f": "0.5*x1"}]));
    let out = tmp.path().join("out");
    assert_eq!(run(&write_config(&tmp, &cfg), &out, &[]).status.code(), Some(0));
    let metric: Value = serde_json::from_slice(&fs::read(out.join("g.json")).unwrap()).unwrap();
    let mut next = euclidean(json!([{"id": "c", "type": "connect", "from": [0, 0], "to": [1, 0]}]));
    next["randers"] = metric["randers"].clone();
    let out2 = tmp.path().join("out2");
    assert_eq!(run(&write_config(&tmp, &next), &out2, &[]).status.code(), Some(0));
    let len = manifest(&out2)["tasks"][0]["summary"]["length"].as_f64().unwrap();
    assert!((len - 0.5).abs() < 1e-8, "{len}");

    let bad = euclidean(json!([{"id": "g", "type": "gauge", "f": "2*x1"}]));
    let o = run(&write_config(&tmp, &bad), &tmp.path().join("out3"), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zermelo_round_trip_through_the_cli() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "scenario": "wind",
        "dimension": 2,
        "domain": {"min": -2, "max": 2, "nodes": 41},
        "zermelo": {"g[0][0]": "1", "g[1][1]": "1", "W[0]": "0.5"},
        "tasks": [
            {"id": "r", "type": "zermelo-convert"},
            {"id": "d", "type": "distance", "source": [0, 0], "targets": [[1, 0], [-1, 0]], "bvp": true}
        ]
    });
    let out = tmp.path().join("out");
    assert_eq!(run(&write_config(&tmp, &cfg), &out, &[]).status.code(), Some(0));
    let m = manifest(&out);
    let bvp = &m["tasks"][1]["summary"]["targets_bvp"];
    // downwind T = 1/(1 + 0.5), upwind T = 1/(1 - 0.5)
    assert!((bvp[0]["value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
    assert!((bvp[1]["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    let metric: Value = serde_json::from_slice(&fs::read(out.join("r.json")).unwrap()).unwrap();
    assert_eq!(metric["randers"]["form"], "fermat");
}
