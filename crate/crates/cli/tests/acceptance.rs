//! Runs every acceptance criterion as one CLI invocation with the shipped
//! tolerance table and prints one verdict line per criterion.
//!
//! Criterion 6 fails at the stated tolerances (the localized-norm bracket
//! for k = 2, q = 1 exceeds 8); the test pins the set of failing criteria so
//! a regression or an unexpected pass both show up.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde_json::Value;

const CRITERIA: [(u32, &str, &str); 12] = [
    (1, "norm-equivalence", "connection identities, residual and order"),
    (2, "norm-equivalence", "recursion round trip"),
    (3, "norm-equivalence", "measure-change exactness"),
    (4, "norm-equivalence", "norm equivalence brackets"),
    (5, "norm-equivalence", "isomorphism and commutator"),
    (6, "localization", "localization pair and localized norms"),
    (7, "cusp-report", "cone exactness and cusp ratio"),
    (8, "cusp-report", "analytic-oracle norms"),
    (9, "solve", "solver orders and heat decay"),
    (10, "mr-study", "maximal-regularity functional"),
    (11, "kondratiev", "Kondratiev norms"),
    (12, "embedding", "embedding and multiplication"),
];

const KNOWN_FAILING: [u32; 1] = [6];

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn acceptance() {
    let out = tempfile::tempdir().unwrap();
    let mut failing = Vec::new();
    let mut lines = Vec::new();
    for (n, command, title) in CRITERIA {
        let config = configs().join(format!("criterion-{n:02}.json"));
        let text = std::fs::read_to_string(&config).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert!(parsed.get("tolerances").is_none(), "criterion {n} must run at the shipped tolerances");
        let dir = out.path().join(format!("c{n}"));
        let start = Instant::now();
        let run = Command::new(env!("CARGO_BIN_EXE_cuspfs"))
            .args([command, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        let code = run.status.code().unwrap_or(-1);
        assert!(code == 0 || code == 1, "criterion {n}: exit {code}\n{}", String::from_utf8_lossy(&run.stderr));
        let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
        let checks = summary.as_object().unwrap();
        let pass = checks.values().all(|c| c["pass"] == Value::Bool(true));
        assert_eq!(pass, code == 0, "criterion {n}: exit code disagrees with summary");
        let detail: Vec<String> = checks
            .iter()
            .map(|(id, c)| format!("{id}={}{}", c["value"], if c["pass"] == Value::Bool(true) { "" } else { " (fail)" }))
            .collect();
        let line = format!(
            "criterion {n:2}: {} {title} [{}] ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            detail.join(", "),
            start.elapsed().as_secs_f64()
        );
        // bypass libtest capture so the verdicts show up in plain `cargo test`
        writeln!(std::io::stdout().lock(), "{line}").unwrap();
        lines.push(line);
        if !pass {
            failing.push(n);
        }
    }
    assert_eq!(failing, KNOWN_FAILING, "failing criteria changed:\n{}", lines.join("\n"));
}
