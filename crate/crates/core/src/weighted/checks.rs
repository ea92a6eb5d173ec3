//! Numerical checks of the weighted-space identities and estimates.
//!
//! Every check runs the corpus on a sequence of refinement levels and returns
//! a [`CheckResult`] with one CSV row per function, order and level.

use crate::cusp::ModelCusp;
use crate::error::{Error, Result};
use crate::geometry::{bundle_norm, integrate, Axis, ChartGrid, MetricField, ScalarField, TensorField};
use crate::par;
use crate::report::{drift, order, CheckResult, Row};
use crate::tolerance::Tolerances;
use crate::weighted::correction::{commutator_coefficients, s_tensor, CorrectionFamilies};
use crate::weighted::corpus::{Corpus, CorpusFunction};
use crate::weighted::norms::{
    hat_from_pointwise, jet_norms, pointwise_jets, weight_map, weighted_from_pointwise, weighted_sobolev_norm, Exponent,
    NormSpec,
};
use crate::weighted::{CylinderSpec, WeightedManifold};

/// A labelled geometry together with its refinement levels.
#[derive(Debug, Clone)]
pub struct Setting {
    pub label: String,
    pub cusp: ModelCusp,
    pub levels: Vec<CylinderSpec>,
    /// Replace `ρ` by the constant 1 (a sanity setting where `ĝ = g`).
    pub unit_weight: bool,
}

impl Setting {
    /// `count` levels starting from `base`; the angular resolution is doubled
    /// only when `refine_theta` is set.
    pub fn new(label: impl Into<String>, cusp: ModelCusp, base: CylinderSpec, count: usize, refine_theta: bool) -> Self {
        let mut levels = vec![base];
        for _ in 1..count.max(1) {
            let last = *levels.last().expect("non-empty");
            let next = if refine_theta {
                last.refined(cusp.base())
            } else {
                CylinderSpec { ns: 2 * last.ns - 1, ..last }
            };
            levels.push(next);
        }
        Setting { label: label.into(), cusp, levels, unit_weight: false }
    }

    pub fn with_unit_weight(mut self) -> Self {
        self.unit_weight = true;
        self
    }

    pub fn manifold(&self, level: usize) -> Result<WeightedManifold> {
        let wm = WeightedManifold::cusp_cylinder(&self.cusp, &self.levels[level])?;
        if !self.unit_weight {
            return Ok(wm);
        }
        WeightedManifold::new(wm.g().clone(), ScalarField::constant_scalar(wm.grid(), 1.0))
    }

    fn fid(&self, f: &CorpusFunction) -> String {
        format!("{}/{}", self.label, f.id)
    }
}

fn over_corpus<T, F>(corpus: &Corpus, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&CorpusFunction) -> Result<T> + Sync + Send,
{
    par::map_slice(corpus.functions(), f).into_iter().collect()
}

fn max_norm(t: &TensorField, g: &MetricField) -> Result<f64> {
    Ok(bundle_norm(t, g)?.max_abs())
}

/// Residuals of `∇̂ω − ∇ω = S•ω` (with `ω = du`) and of the product rule
/// `∇̂(δu) = δ∇̂u + dδ ⊗ u` (`δ = ρ^λ`), each relative to the size of its
/// left-hand side, at every level; plus the observed order between the last two.
pub fn connection_identity(settings: &[Setting], corpus: &Corpus, lambda: f64, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "weighted.connection_identity";
    let mut rows = Vec::new();
    let mut finest = 0.0f64;
    let mut worst_order = f64::INFINITY;
    for st in settings {
        let mut per_level = Vec::new();
        for level in 0..st.levels.len() {
            let wm = st.manifold(level)?;
            let s = s_tensor(wm.g(), &wm.dlog_rho()?)?;
            let delta = weight_map(&ScalarField::constant_scalar(wm.grid(), 1.0), lambda, wm.rho())?;
            let ddelta = delta.partial()?;
            let res = over_corpus(corpus, |f| {
                let u = f.sample(&wm);
                let omega = u.partial()?;
                let lhs = wm.conn_hat().nabla(&omega)?.sub(&wm.conn().nabla(&omega)?)?;
                let so = s.dot(&omega)?;
                let r1 = max_norm(&lhs.sub(&so)?, wm.ghat())? / max_norm(&so, wm.ghat())?.max(1e-300);
                let du = u.mul_scalar(&delta)?.partial()?;
                let rhs = omega.mul_scalar(&delta)?.add(&ddelta.mul_scalar(&u)?)?;
                let r2 = max_norm(&du.sub(&rhs)?, wm.ghat())? / max_norm(&du, wm.ghat())?.max(1e-300);
                Ok((r1, r2))
            })?;
            let (mut m1, mut m2) = (0.0f64, 0.0f64);
            for (f, (r1, r2)) in corpus.functions().iter().zip(&res) {
                rows.push(Row::new(ID, format!("{}/S", st.fid(f)), *r1).level(level));
                rows.push(Row::new(ID, format!("{}/product", st.fid(f)), *r2).lambda(lambda).level(level));
                m1 = m1.max(*r1);
                m2 = m2.max(*r2);
            }
            per_level.push((m1, m2));
        }
        let (l1, l2) = *per_level.last().expect("levels");
        finest = finest.max(l1).max(l2);
        if per_level.len() >= 2 {
            let (c1, c2) = per_level[per_level.len() - 2];
            let (o1, o2) = (order(c1, l1), order(c2, l2));
            rows.push(Row::new(ID, format!("{}/order_S", st.label), o1));
            rows.push(Row::new(ID, format!("{}/order_product", st.label), o2).lambda(lambda));
            worst_order = worst_order.min(o1).min(o2);
        }
    }
    let residual = CheckResult::at_most(ID, finest, tol.connection_residual, Vec::new());
    let ord = CheckResult::at_least(ID, worst_order, tol.connection_order, Vec::new())
        .note(format!("observed order {worst_order:.3} (minimum {})", tol.connection_order));
    let mut out = CheckResult::merge(ID, vec![residual, ord]);
    out.rows = rows;
    Ok(out.note(format!("max relative residual {finest:.3e}, minimum order {worst_order:.3}")))
}

/// Round trip `[∇^k u] → [∇̂^k u] → [∇^k u]` through the two correction
/// families, `k ≤ 3`. Rows also report the consistency of the `a`-expansion
/// with directly differenced `∇̂^k u` and the weighted sizes `ρ^{k−i}|a_i^k|`.
pub fn recursion_roundtrip(settings: &[Setting], corpus: &Corpus, k_max: usize, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "weighted.recursion_roundtrip";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for st in settings {
        let wm = st.manifold(0)?;
        let fam = CorrectionFamilies::for_manifold(&wm, k_max)?;
        for k in 1..=fam.k_max() {
            for (i, a) in fam.a[k].iter().enumerate() {
                let size = bundle_norm(a, wm.g())?;
                let p = (k - i) as i32;
                let w = par::max_range(size.grid().len(), |n| wm.rho().value(n).powi(p) * size.value(n));
                rows.push(Row::new(ID, format!("{}/a_{i}^{k}", st.label), w).k(k));
            }
        }
        let res = over_corpus(corpus, |f| {
            let u = f.sample(&wm);
            let jets = wm.conn().jets(&u, fam.k_max())?;
            let hat = fam.hat_from_plain(&jets)?;
            let back = fam.plain_from_hat(&hat)?;
            let direct = wm.conn_hat().jets(&u, fam.k_max())?;
            let mut out = Vec::new();
            for k in 0..jets.len() {
                let scale = jets[k].max_abs().max(1.0);
                let rt = back[k].sub(&jets[k])?.max_abs() / scale;
                let hs = direct[k].max_abs().max(1.0);
                let fd = hat[k].sub(&direct[k])?.max_abs() / hs;
                out.push((rt, fd));
            }
            Ok(out)
        })?;
        for (f, per_k) in corpus.functions().iter().zip(&res) {
            for (k, (rt, fd)) in per_k.iter().enumerate() {
                rows.push(Row::new(ID, st.fid(f), *rt).k(k));
                rows.push(Row::new(ID, format!("{}/direct", st.fid(f)), *fd).k(k));
                worst = worst.max(*rt);
            }
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.recursion_roundtrip, rows))
}

/// `‖ρ^{−m/q} u‖_{L_q(M)} / ‖u‖_{L_q(M̂)} − 1`.
pub fn measure_change(settings: &[Setting], corpus: &Corpus, qs: &[f64], tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "weighted.measure_change";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for st in settings {
        for level in 0..st.levels.len() {
            let wm = st.manifold(level)?;
            for &q in qs {
                let e = Exponent::finite(q)?;
                let ratios = over_corpus(corpus, |f| {
                    let u = f.sample(&wm);
                    let a = weighted_sobolev_norm(&u, &wm, &NormSpec::new(0, 0.0, q)?)?;
                    let b = hat_from_pointwise(&[u.map(f64::abs)], &wm, e)?;
                    Ok(a / b)
                })?;
                for (f, r) in corpus.functions().iter().zip(&ratios) {
                    rows.push(Row::new(ID, st.fid(f), (r - 1.0).abs()).k(0).q(q).ratio(*r).level(level));
                    worst = worst.max((r - 1.0).abs());
                }
            }
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.measure_change, rows))
}

/// Bracket and refinement drift of per-function ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// `max(max, 1/min)`.
    pub bracket: f64,
    /// Largest relative change of a single ratio between the last two levels.
    pub drift: f64,
}

/// `ratios[level][function]`.
pub fn ratio_stats(ratios: &[Vec<f64>]) -> RatioStats {
    let last = ratios.last().cloned().unwrap_or_default();
    let mut sorted = last.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let min = sorted.first().copied().unwrap_or(f64::NAN);
    let max = sorted.last().copied().unwrap_or(f64::NAN);
    let median = if sorted.is_empty() {
        f64::NAN
    } else if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let drift = if ratios.len() >= 2 {
        let prev = &ratios[ratios.len() - 2];
        prev.iter().zip(&last).map(|(a, b)| drift(*a, *b)).fold(0.0, f64::max)
    } else {
        0.0
    };
    RatioStats { min, max, median, bracket: max.max(1.0 / min), drift }
}

pub(crate) fn bracket_result(id: &str, label: &str, stats: &RatioStats, bracket_tol: f64, drift_tol: f64) -> CheckResult {
    let b = CheckResult::at_most(id, stats.bracket, bracket_tol, Vec::new());
    let d = CheckResult::at_most(id, stats.drift, drift_tol, Vec::new());
    CheckResult::merge(id, vec![b, d]).note(format!(
        "{label}: ratios [{:.4}, {:.4}] median {:.4}, C = {:.4}, drift {:.2}%",
        stats.min,
        stats.max,
        stats.median,
        stats.bracket,
        100.0 * stats.drift
    ))
}

/// Per-function ratios `num(u) / den(u)` at every level.
fn ratio_levels<F>(st: &Setting, corpus: &Corpus, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&WeightedManifold, &CorpusFunction) -> Result<f64> + Sync + Send,
{
    (0..st.levels.len())
        .map(|level| {
            let wm = st.manifold(level)?;
            over_corpus(corpus, |c| f(&wm, c))
        })
        .collect()
}

fn push_ratio_rows(
    rows: &mut Vec<Row>,
    id: &str,
    st: &Setting,
    corpus: &Corpus,
    ratios: &[Vec<f64>],
    k: usize,
    q: f64,
    lambda: f64,
) {
    for (level, rs) in ratios.iter().enumerate() {
        for (f, r) in corpus.functions().iter().zip(rs) {
            rows.push(Row::new(id, st.fid(f), *r).k(k).q(q).lambda(lambda).ratio(*r).level(level));
        }
    }
}

/// Ratio `‖u‖_{W_q^{k,0}(M;ρ)} / ‖u‖_{W_q^k(M̂)}` over the corpus.
pub fn norm_equivalence(
    settings: &[Setting],
    corpus: &Corpus,
    ks: &[usize],
    qs: &[f64],
    tol: &Tolerances,
) -> Result<CheckResult> {
    const ID: &str = "weighted.norm_equivalence";
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for st in settings {
        for &k in ks {
            for &q in qs {
                let spec = NormSpec::new(k, 0.0, q)?;
                let ratios = ratio_levels(st, corpus, |wm, f| {
                    let u = f.sample(wm);
                    let a = weighted_sobolev_norm(&u, wm, &spec)?;
                    let pw = pointwise_jets(&u, wm.conn_hat(), k)?;
                    Ok(a / hat_from_pointwise(&pw, wm, spec.q)?)
                })?;
                push_ratio_rows(&mut rows, ID, st, corpus, &ratios, k, q, 0.0);
                let stats = ratio_stats(&ratios);
                parts.push(bracket_result(
                    ID,
                    &format!("{} k={k} q={q}", st.label),
                    &stats,
                    tol.equivalence_bracket,
                    tol.ratio_drift,
                ));
            }
        }
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok(out)
}

/// Isomorphism ratio `‖ρ^λ u‖_{W_q^{k,λ}(M;ρ)} / ‖u‖_{W_q^k(M̂)}`.
pub fn isomorphism(
    settings: &[Setting],
    corpus: &Corpus,
    ks: &[usize],
    q: f64,
    lambdas: &[f64],
    tol: &Tolerances,
) -> Result<CheckResult> {
    const ID: &str = "weighted.isomorphism";
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for st in settings {
        for &k in ks {
            for &lambda in lambdas {
                let spec = NormSpec::new(k, lambda, q)?;
                let ratios = ratio_levels(st, corpus, |wm, f| {
                    let u = f.sample(wm);
                    let a = weighted_sobolev_norm(&weight_map(&u, lambda, wm.rho())?, wm, &spec)?;
                    let pw = pointwise_jets(&u, wm.conn_hat(), k)?;
                    Ok(a / hat_from_pointwise(&pw, wm, spec.q)?)
                })?;
                push_ratio_rows(&mut rows, ID, st, corpus, &ratios, k, q, lambda);
                parts.push(bracket_result(
                    ID,
                    &format!("{} k={k} λ={lambda}", st.label),
                    &ratio_stats(&ratios),
                    tol.equivalence_bracket,
                    tol.ratio_drift,
                ));
            }
        }
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok(out)
}

/// Commutator ratio `‖Σ_i |∇̂^i(δu)|‖ / ‖δ Σ_i |∇̂^i u|‖` in `L_q(M̂)` with
/// `δ = ρ^λ`; rows also give the residual of the coefficient expansion
/// `∇̂^k(δu) = δ Σ_i c_i^k•∇̂^i u`.
pub fn commutator(
    settings: &[Setting],
    corpus: &Corpus,
    ks: &[usize],
    q: f64,
    lambdas: &[f64],
    tol: &Tolerances,
) -> Result<CheckResult> {
    const ID: &str = "weighted.commutator";
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for st in settings {
        for &k in ks {
            for &lambda in lambdas {
                let mut expansion = vec![0.0f64; st.levels.len()];
                let mut ratios = Vec::new();
                for (level, slot) in expansion.iter_mut().enumerate() {
                    let wm = st.manifold(level)?;
                    let one = ScalarField::constant_scalar(wm.grid(), 1.0);
                    let delta = weight_map(&one, lambda, wm.rho())?;
                    let a = wm.dlog_rho()?.scale(lambda);
                    let c = commutator_coefficients(wm.conn_hat(), &a, k)?;
                    let res = over_corpus(corpus, |f| {
                        let u = f.sample(&wm);
                        let du = u.mul_scalar(&delta)?;
                        let lhs = wm.conn_hat().jets(&du, k)?;
                        let hat = wm.conn_hat().jets(&u, k)?;
                        let mut rhs = c[k][0].dot(&hat[0])?;
                        for i in 1..=k {
                            rhs = rhs.add(&c[k][i].dot(&hat[i])?)?;
                        }
                        let rhs = rhs.mul_scalar(&delta)?;
                        let resid = lhs[k].sub(&rhs)?.max_abs() / lhs[k].max_abs().max(1e-300);
                        let sum = |jets: &[TensorField], scale: Option<&ScalarField>| -> Result<ScalarField> {
                            let norms = jet_norms(jets, wm.ghat())?;
                            let mut acc = norms[0].clone();
                            for n in &norms[1..] {
                                acc = acc.add(n)?;
                            }
                            match scale {
                                Some(s) => acc.mul_scalar(s),
                                None => Ok(acc),
                            }
                        };
                        let num = integrate(&sum(&lhs, None)?, wm.ghat(), q)?;
                        let den = integrate(&sum(&hat, Some(&delta))?, wm.ghat(), q)?;
                        Ok((num / den, resid))
                    })?;
                    *slot = res.iter().map(|r| r.1).fold(0.0, f64::max);
                    ratios.push(res.iter().map(|r| r.0).collect::<Vec<_>>());
                }
                push_ratio_rows(&mut rows, ID, st, corpus, &ratios, k, q, lambda);
                for (level, e) in expansion.iter().enumerate() {
                    rows.push(Row::new(ID, format!("{}/expansion", st.label), *e).k(k).lambda(lambda).level(level));
                }
                parts.push(bracket_result(
                    ID,
                    &format!("{} k={k} λ={lambda}", st.label),
                    &ratio_stats(&ratios),
                    tol.equivalence_bracket,
                    tol.ratio_drift,
                ));
            }
        }
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok(out)
}

/// Closed-form weighted `L_q` norm `‖ρ^{−λ−1/q} r^μ‖_{L_q((0,1])} = ((μ−λ)q)^{−1/q}`
/// for `ρ = r`, `g = dr²`, on a geometric grid of `n` nodes down to `r_min`.
pub fn lq_oracle_value(mu: f64, lambda: f64, q: f64, n: usize, r_min: f64) -> Result<(f64, f64)> {
    if !((mu - lambda) * q > 0.0) {
        return Err(Error::InvalidParameter(format!("oracle needs (μ−λ)q > 0, got μ={mu}, λ={lambda}, q={q}")));
    }
    let (a, b) = (r_min.ln(), 0.0f64);
    let coords: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    let grid = std::sync::Arc::new(ChartGrid::one_d(Axis::new(coords)?)?);
    let g = MetricField::flat(&grid);
    let rho = ScalarField::scalar_fn(&grid, |[r, _]| r);
    let wm = WeightedManifold::new(g, rho)?;
    let u = ScalarField::scalar_fn(&grid, |[r, _]| r.powf(mu));
    let v = weighted_sobolev_norm(&u, &wm, &NormSpec::new(0, lambda, q)?)?;
    Ok((v, ((mu - lambda) * q).powf(-1.0 / q)))
}

/// [`lq_oracle_value`] over a table of `(μ, λ, q)`, compared to its closed form.
pub fn lq_oracle(cases: &[(f64, f64, f64)], tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "weighted.lq_oracle";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &(mu, lambda, q) in cases {
        let (v, exact) = lq_oracle_value(mu, lambda, q, 40_001, 1e-16)?;
        let err = (v - exact).abs();
        rows.push(Row::new(ID, format!("mu={mu}"), err).k(0).q(q).lambda(lambda).ratio(v / exact));
        worst = worst.max(err);
    }
    Ok(CheckResult::at_most(ID, worst, tol.analytic_oracle, rows))
}

/// `λ₁ ≥ λ₀ ⇒ ‖u‖_{W_q^{k,λ₀}} ≤ ‖u‖_{W_q^{k,λ₁}}`, checked without slack;
/// the value is the largest ratio `‖u‖_{λ₀} / ‖u‖_{λ₁}` (must not exceed 1).
pub fn monotonicity(
    settings: &[Setting],
    corpus: &Corpus,
    k: usize,
    q: f64,
    lambda_pairs: &[(f64, f64)],
) -> Result<CheckResult> {
    const ID: &str = "weighted.monotonicity";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for st in settings {
        let wm = st.manifold(0)?;
        for &(l0, l1) in lambda_pairs {
            if l1 < l0 {
                return Err(Error::IndexRelation(format!("monotonicity needs λ₁ ≥ λ₀, got λ₀={l0}, λ₁={l1}")));
            }
            let ratios = over_corpus(corpus, |f| {
                let u = f.sample(&wm);
                let pw = pointwise_jets(&u, wm.conn(), k)?;
                let n0 = weighted_from_pointwise(&pw, &wm, l0, Exponent::Finite(q))?;
                let n1 = weighted_from_pointwise(&pw, &wm, l1, Exponent::Finite(q))?;
                Ok(n0 / n1)
            })?;
            for (f, r) in corpus.functions().iter().zip(&ratios) {
                rows.push(Row::new(ID, format!("{}/{l0}->{l1}", st.fid(f)), *r).k(k).q(q).lambda(l1).ratio(*r));
                worst = worst.max(*r);
            }
        }
    }
    Ok(CheckResult::at_most(ID, worst, 1.0, rows))
}

/// Embedding inequalities on the regularized manifold `M̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Embedding {
    /// `‖u‖_{s₀,q₀} ≤ c‖u‖_{s₁,q₁}`, needs `s₁ − m/q₁ ≥ s₀ − m/q₀` and `s₁ ≥ s₀`.
    Sobolev { s1: usize, q1: f64, s0: usize, q0: f64 },
    /// `‖u‖_{BC^t} ≤ c‖u‖_{k,q}`, needs `t < k − m/q`.
    Morrey { k: usize, q: f64, t: usize },
    /// `‖u‖_{1,q} ≤ c‖u‖_{0,q}^{1/2}‖u‖_{2,q}^{1/2}`.
    GagliardoNirenberg { q: f64 },
}

impl Embedding {
    pub fn check_id(&self) -> &'static str {
        match self {
            Embedding::Sobolev { .. } => "weighted.sobolev",
            Embedding::Morrey { .. } => "weighted.morrey",
            Embedding::GagliardoNirenberg { .. } => "weighted.gagliardo_nirenberg",
        }
    }

    /// Reject index combinations the embedding does not cover.
    pub fn validate(&self, m: usize) -> Result<()> {
        let m = m as f64;
        match *self {
            Embedding::Sobolev { s1, q1, s0, q0 } => {
                if q1 < 1.0 || q0 < 1.0 || s1 < s0 || (s1 as f64 - m / q1) < (s0 as f64 - m / q0) - 1e-12 {
                    return Err(Error::IndexRelation(format!(
                        "Sobolev embedding W^{s1}_{q1} -> W^{s0}_{q0} violates s₁ − m/q₁ ≥ s₀ − m/q₀"
                    )));
                }
            }
            Embedding::Morrey { k, q, t } => {
                if q < 1.0 || (t as f64) >= k as f64 - m / q {
                    return Err(Error::IndexRelation(format!("Morrey embedding W^{k}_{q} -> BC^{t} needs t < k − m/q")));
                }
            }
            Embedding::GagliardoNirenberg { q } => {
                if q < 1.0 {
                    return Err(Error::InvalidExponent(q));
                }
            }
        }
        Ok(())
    }

    fn ratio(&self, u: &ScalarField, wm: &WeightedManifold) -> Result<f64> {
        let norm = |k: usize, q: Exponent| -> Result<f64> {
            let pw = pointwise_jets(u, wm.conn_hat(), k)?;
            hat_from_pointwise(&pw, wm, q)
        };
        Ok(match *self {
            Embedding::Sobolev { s1, q1, s0, q0 } => norm(s0, Exponent::Finite(q0))? / norm(s1, Exponent::Finite(q1))?,
            Embedding::Morrey { k, q, t } => norm(t, Exponent::Infinity)? / norm(k, Exponent::Finite(q))?,
            Embedding::GagliardoNirenberg { q } => {
                let e = Exponent::Finite(q);
                norm(1, e)? / (norm(0, e)? * norm(2, e)?).sqrt()
            }
        })
    }
}

/// Per-function embedding ratios; passes when all are finite and drift by
/// less than the embedding tolerance under refinement.
pub fn embedding(settings: &[Setting], corpus: &Corpus, variant: Embedding, tol: &Tolerances) -> Result<CheckResult> {
    let id = variant.check_id();
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for st in settings {
        variant.validate(st.cusp.dim())?;
        let ratios = ratio_levels(st, corpus, |wm, f| variant.ratio(&f.sample(wm), wm))?;
        for (level, rs) in ratios.iter().enumerate() {
            for (f, r) in corpus.functions().iter().zip(rs) {
                rows.push(Row::new(id, st.fid(f), *r).ratio(*r).level(level));
            }
        }
        let stats = ratio_stats(&ratios);
        let finite = ratios.iter().flatten().all(|r| r.is_finite() && *r > 0.0);
        parts.push(
            CheckResult::at_most(id, stats.drift, tol.embedding_drift, Vec::new())
                .with_pass(finite && stats.drift <= tol.embedding_drift)
                .note(format!("{}: constant {:.4}, drift {:.2}%", st.label, stats.max, 100.0 * stats.drift)),
        );
    }
    let mut out = CheckResult::merge(id, parts);
    out.rows = rows;
    Ok(out)
}

/// Multiplier `v_j = ρ^{λ₀}(1 + ½ shape_j)` paired with corpus function `u_j`.
fn multiplier(f: &CorpusFunction, wm: &WeightedManifold, lambda0: f64) -> ScalarField {
    let grid = wm.grid();
    let data = par::map_range(grid.len(), |n| {
        let [s, th] = grid.point(n);
        wm.rho().value(n).powf(lambda0) * (1.0 + 0.5 * f.shape_value(s, th))
    });
    ScalarField::from_data(grid, crate::geometry::Valence::SCALAR, data).expect("scalar length")
}

/// `‖vu‖_{W_q^{k,λ₀+λ₁}} / (‖v‖_{BC^{k,λ₀}} ‖u‖_{W_q^{k,λ₁}})`.
pub fn multiplication_ratio(
    v: &ScalarField,
    u: &ScalarField,
    wm: &WeightedManifold,
    k: usize,
    q: f64,
    lambda0: f64,
    lambda1: f64,
) -> Result<f64> {
    let vu = v.mul_scalar(u)?;
    let num = weighted_sobolev_norm(&vu, wm, &NormSpec::new(k, lambda0 + lambda1, q)?)?;
    let bv = weighted_sobolev_norm(v, wm, &NormSpec::bc(k, lambda0)?)?;
    let nu = weighted_sobolev_norm(u, wm, &NormSpec::new(k, lambda1, q)?)?;
    Ok(num / (bv * nu))
}

/// Multiplication estimate over the corpus, `k ≤ 2`.
pub fn multiplication(
    settings: &[Setting],
    corpus: &Corpus,
    k: usize,
    q: f64,
    lambda0: f64,
    lambda1: f64,
    tol: &Tolerances,
) -> Result<CheckResult> {
    const ID: &str = "weighted.multiplication";
    if k > 2 {
        return Err(Error::IndexRelation(format!("multiplication check supports k ≤ 2, got {k}")));
    }
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for st in settings {
        let ratios = ratio_levels(st, corpus, |wm, f| {
            let u = f.sample(wm);
            multiplication_ratio(&multiplier(f, wm, lambda0), &u, wm, k, q, lambda0, lambda1)
        })?;
        push_ratio_rows(&mut rows, ID, st, corpus, &ratios, k, q, lambda0 + lambda1);
        let stats = ratio_stats(&ratios);
        let finite = ratios.iter().flatten().all(|r| r.is_finite() && *r > 0.0);
        parts.push(
            CheckResult::at_most(ID, stats.drift, tol.embedding_drift, Vec::new())
                .with_pass(finite && stats.drift <= tol.embedding_drift)
                .note(format!("{}: constant {:.4}, drift {:.2}%", st.label, stats.max, 100.0 * stats.drift)),
        );
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok(out)
}
