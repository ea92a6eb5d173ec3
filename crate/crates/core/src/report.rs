//! Check outcomes shared by every module and serialized by the CLI.

use serde::Serialize;

/// One CSV row: `check_id, function_id, k, q, lambda, value, ratio, refinement_level`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub check_id: String,
    pub function_id: String,
    pub k: Option<usize>,
    pub q: Option<f64>,
    pub lambda: Option<f64>,
    pub value: f64,
    pub ratio: Option<f64>,
    pub refinement_level: usize,
}

impl Row {
    pub fn new(check_id: &str, function_id: impl Into<String>, value: f64) -> Self {
        Row {
            check_id: check_id.to_string(),
            function_id: function_id.into(),
            k: None,
            q: None,
            lambda: None,
            value,
            ratio: None,
            refinement_level: 0,
        }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn ratio(mut self, ratio: f64) -> Self {
        self.ratio = Some(ratio);
        self
    }

    pub fn level(mut self, level: usize) -> Self {
        self.refinement_level = level;
        self
    }
}

/// Outcome of one named check: the headline `value` is compared with
/// `tolerance` and `rows` carry the per-function detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub note: String,
    /// `true` when `value` is an upper-bounded quantity.
    #[serde(skip)]
    pub upper: bool,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

impl CheckResult {
    /// Passes when `value <= tolerance` (and `value` is finite).
    pub fn at_most(id: &str, value: f64, tolerance: f64, rows: Vec<Row>) -> Self {
        CheckResult {
            id: id.into(),
            pass: value.is_finite() && value <= tolerance,
            value,
            tolerance,
            note: String::new(),
            upper: true,
            rows,
        }
    }

    /// Passes when `value >= tolerance` (`+∞` included).
    pub fn at_least(id: &str, value: f64, tolerance: f64, rows: Vec<Row>) -> Self {
        CheckResult {
            id: id.into(),
            pass: value >= tolerance,
            value,
            tolerance,
            note: String::new(),
            upper: false,
            rows,
        }
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// How close the value is to its limit; above 1 means failure.
    fn severity(&self) -> f64 {
        let r = if self.upper { self.value / self.tolerance } else { self.tolerance / self.value };
        if self.pass {
            r.min(1.0)
        } else if r.is_nan() {
            f64::INFINITY
        } else {
            r.max(1.0 + f64::EPSILON)
        }
    }

    /// Fold several results into one under `id`: passes when all pass, and
    /// reports the entry closest to (or furthest beyond) its limit.
    pub fn merge(id: &str, parts: Vec<CheckResult>) -> Self {
        let pass = parts.iter().all(|p| p.pass);
        let worst = parts
            .iter()
            .max_by(|a, b| a.severity().partial_cmp(&b.severity()).unwrap_or(std::cmp::Ordering::Equal))
            .cloned();
        let notes: Vec<String> = parts.iter().filter(|p| !p.note.is_empty()).map(|p| p.note.clone()).collect();
        let rows = parts.into_iter().flat_map(|p| p.rows).collect();
        match worst {
            Some(w) => CheckResult { id: id.into(), pass, note: notes.join("; "), rows, ..w },
            None => CheckResult {
                id: id.into(),
                pass: false,
                value: f64::NAN,
                tolerance: f64::NAN,
                note: "no parts".into(),
                upper: true,
                rows,
            },
        }
    }
}

/// Relative change `|b − a| / |a|`.
pub fn drift(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs()
    }
}

/// Observed order `log2(e_coarse / e_fine)` for one grid halving.
pub fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}
