//! Summary JSON, per-check CSVs and the numerical-failure diagnostic.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use cuspfs::report::{CheckResult, Row};
use serde::Serialize;

use crate::run::Table;

/// CSV columns of every per-check file, in order.
pub const CSV_COLUMNS: [&str; 8] = ["check_id", "function_id", "k", "q", "lambda", "value", "ratio", "refinement_level"];

#[derive(Debug, Clone, Serialize)]
pub struct SummaryEntry {
    pub pass: bool,
    /// `null` when the value is not finite.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn row_record(r: &Row) -> [String; 8] {
    [
        r.check_id.clone(),
        r.function_id.clone(),
        opt(r.k),
        r.q.map(num).unwrap_or_default(),
        r.lambda.map(num).unwrap_or_default(),
        num(r.value),
        r.ratio.map(num).unwrap_or_default(),
        r.refinement_level.to_string(),
    ]
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn write_check_csv(dir: &Path, result: &CheckResult) -> io::Result<()> {
    let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", result.id))).map_err(to_io)?;
    w.write_record(CSV_COLUMNS).map_err(to_io)?;
    for r in &result.rows {
        w.write_record(row_record(r)).map_err(to_io)?;
    }
    w.flush()
}

pub fn write_table(dir: &Path, table: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", table.name))).map_err(to_io)?;
    w.write_record(&table.header).map_err(to_io)?;
    for r in &table.rows {
        w.write_record(r).map_err(to_io)?;
    }
    w.flush()
}

pub fn summary(results: &[CheckResult]) -> BTreeMap<String, SummaryEntry> {
    results
        .iter()
        .map(|r| (r.id.clone(), SummaryEntry { pass: r.pass, value: finite(r.value), tolerance: finite(r.tolerance) }))
        .collect()
}

pub fn write_summary(dir: &Path, results: &[CheckResult]) -> io::Result<()> {
    let text = serde_json::to_string_pretty(&summary(results)).map_err(io::Error::other)?;
    fs::write(dir.join("summary.json"), text + "\n")
}

/// One line per check: id, verdict, value, tolerance and the note.
pub fn report_line(r: &CheckResult) -> String {
    let cmp = if r.upper { "<=" } else { ">=" };
    format!(
        "{:36} {} value={:.6e} {cmp} {:.3e}  {}",
        r.id,
        if r.pass { "PASS" } else { "FAIL" },
        r.value,
        r.tolerance,
        r.note
    )
}

pub fn write_report(dir: &Path, results: &[CheckResult]) -> io::Result<()> {
    let text: String = results.iter().map(|r| report_line(r) + "\n").collect();
    fs::write(dir.join("report.txt"), text)
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub check_id: String,
    pub error: String,
    pub node: Option<usize>,
    pub step: Option<usize>,
    pub time: Option<f64>,
}

impl Diagnostic {
    pub fn new(check_id: &str, e: &cuspfs::Error) -> Self {
        let mut d = Diagnostic { check_id: check_id.into(), error: e.to_string(), node: None, step: None, time: None };
        d.locate(e);
        d
    }

    fn locate(&mut self, e: &cuspfs::Error) {
        use cuspfs::Error as E;
        match e {
            E::MetricDegeneracy { node, .. }
            | E::NonPositiveWeight { node, .. }
            | E::SingularJacobian { node }
            | E::Ellipticity { node, .. } => self.node = Some(*node),
            E::UncoveredNode(node) => self.node = Some(*node),
            E::StepFailed { step, time, source } => {
                self.step = Some(*step);
                self.time = Some(*time);
                self.locate(source);
            }
            _ => {}
        }
    }
}

pub fn write_diagnostic(dir: &Path, d: &Diagnostic) -> io::Result<()> {
    let text = serde_json::to_string_pretty(d).map_err(io::Error::other)?;
    fs::write(dir.join("diagnostic.json"), text + "\n")
}
