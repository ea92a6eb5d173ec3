use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cuspfs::tolerance::Tolerances;
use cuspfs_cli::config::DEFAULT_TOLERANCES;
use cuspfs_cli::output::CSV_COLUMNS;
use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cuspfs"));
    c.env_remove("CUSPFS_THREADS");
    c
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/examples")
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(cmd).arg("--config").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn small_weighted() -> Value {
    json!({
        "checks": ["weighted.norm_equivalence", "weighted.isomorphism"],
        "weighted": {
            "geometry": {
                "characteristics": [{"kind": "power", "alpha": 2}],
                "grid": {"ns": 81, "ntheta": 8, "s_max": 4.0},
                "corpus": {"count": 12}
            },
            "k": [1],
            "q": [2],
            "lambda": [0.5]
        }
    })
}

#[test]
fn list_checks_is_sorted_with_descriptions() {
    let out = bin().arg("list-checks").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let ids: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(ids.len() >= 14);
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
    assert!(text.lines().all(|l| l.split_whitespace().count() > 1));
}

#[test]
fn power_two_characteristic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = run("validate-characteristic", &examples().join("validate-power2.json"), &out, &[]);
    assert_eq!(res.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["cusp.characteristic_bound"]["pass"], json!(true));
    assert_eq!(s["cusp.characteristic_bound"]["tolerance"], json!(1e-9));
    let csv = fs::read_to_string(out.join("cusp.characteristic_bound.csv")).unwrap();
    let c1: f64 = csv
        .lines()
        .find(|l| l.starts_with("cusp.characteristic_bound,power2,1,"))
        .and_then(|l| l.split(',').nth(5))
        .unwrap()
        .parse()
        .unwrap();
    assert!((c1 - 2.0).abs() <= 1e-9);
}

#[test]
fn unit_weight_ratios_are_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = run("norm-equivalence", &examples().join("unit-weight.json"), &out, &[]);
    assert_eq!(res.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(out.join("weighted.norm_equivalence.csv")).unwrap();
    let mut n = 0;
    for rec in rdr.records() {
        let ratio: f64 = rec.unwrap()[6].parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-12, "{ratio}");
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn missing_q_is_a_config_error_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = run("norm-equivalence", &examples().join("malformed-missing-q.json"), &out, &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&res.stderr).contains("`q`"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = small_weighted();
    v["weighted"]["geometry"]["grid"]["nx"] = json!(3);
    let cfg = write_config(dir.path(), "c.json", &v);
    let out = dir.path().join("out");
    assert_eq!(run("norm-equivalence", &cfg, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());

    let cfg = write_config(dir.path(), "d.json", &json!({"cusp": {"characteristics": []}, "extra": 1}));
    assert_eq!(run("cusp-report", &cfg, &out, &[]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "e.json", &json!({"checks": ["weighted.nothing"]}));
    assert_eq!(run("cusp-report", &cfg, &out, &[]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "f.json", &json!({"tolerances": {"no_such_tolerance": 1.0}}));
    assert_eq!(run("cusp-report", &cfg, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn invalid_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut v = small_weighted();
    v["weighted"]["q"] = json!([0.5]);
    let cfg = write_config(dir.path(), "q.json", &v);
    assert_eq!(run("norm-equivalence", &cfg, &out, &[]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "a.json", &json!({"cusp": {"characteristics": [{"kind": "power", "alpha": 0.5}]}}));
    assert_eq!(run("validate-characteristic", &cfg, &out, &[]).status.code(), Some(2));
    // a check whose section is missing
    let cfg = write_config(dir.path(), "s.json", &json!({"checks": ["parabolic.mr_ratio"]}));
    assert_eq!(run("mr-study", &cfg, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn outputs_are_deterministic_by_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "w.json", &small_weighted());
    let read = |name: &str, seed: &str, threads: &str| {
        let out = dir.path().join(name);
        let res = bin()
            .env("CUSPFS_THREADS", threads)
            .args(["norm-equivalence", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
        fs::read(out.join("weighted.isomorphism.csv")).unwrap()
    };
    let a = read("a", "7", "1");
    let b = read("b", "7", "3");
    let c = read("c", "8", "2");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let header = String::from_utf8(a).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, CSV_COLUMNS.join(","));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = bin()
        .env("CUSPFS_THREADS", "zero")
        .args(["validate-characteristic", "--config"])
        .arg(examples().join("validate-power2.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn solver_breakdown_writes_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let grid = json!({"ns": 41, "ntheta": 4, "s_max": 6.0});
    let cfg = write_config(
        dir.path(),
        "s.json",
        &json!({
            "checks": ["parabolic.time_order"],
            "tolerances": {"solver_max_iterations": 1, "solver_tolerance": 1e-14},
            "solver": {
                "alpha": 2, "lambda": 1,
                "time_order": {"grid": grid, "dts": [0.1, 0.05, 0.025]},
                "space_order": {"grid": grid, "dt": 0.1},
                "heat": {"n": 16, "dt": 0.1, "t_end": 0.5},
                "conjugation": {"grid": grid}
            }
        }),
    );
    let out = dir.path().join("out");
    let res = run("solve", &cfg, &out, &[]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
    let d: Value = serde_json::from_str(&fs::read_to_string(out.join("diagnostic.json")).unwrap()).unwrap();
    assert_eq!(d["check_id"], json!("parabolic.time_order"));
    assert_eq!(d["step"], json!(1));
    assert!(d["error"].as_str().unwrap().contains("did not converge"));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"checks": ["cusp.divergence"], "tolerances": {"divergence_threshold": 1e12},
                "cusp": {"characteristics": [{"kind": "power", "alpha": 2}]}}),
    );
    let out = dir.path().join("out");
    assert_eq!(run("validate-characteristic", &cfg, &out, &[]).status.code(), Some(1));
    assert_eq!(summary(&out)["cusp.divergence"]["pass"], json!(false));
}

#[test]
fn shipped_tolerances_match_library_defaults() {
    let shipped: Tolerances = serde_json::from_str(DEFAULT_TOLERANCES).unwrap();
    assert_eq!(shipped, Tolerances::default());
}

#[test]
fn schema_lists_the_csv_columns() {
    let schema: Value =
        serde_json::from_str(include_str!("../data/csv-schema.json")).unwrap();
    let cols: Vec<&str> = schema["check"]["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(cols, CSV_COLUMNS);
}

#[test]
fn every_example_config_parses() {
    for entry in fs::read_dir(examples()).unwrap().chain(fs::read_dir(examples().join("..")).unwrap()) {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") && !p.ends_with("malformed-missing-q.json") {
            let text = fs::read_to_string(&p).unwrap();
            cuspfs_cli::config::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        }
    }
}
