//! Kondratiev norms on planar sectors and punctured disks, and their
//! equivalence with weighted Sobolev norms built on a distance function.
//!
//! A domain is the cone over a circle or an arc in polar coordinates
//! `(r, θ)`, `g = dr² + r²dθ²`. The distance function `δ` is the glued weight
//! of that cone: `δ = r` below `ε₀`, `δ = 1` above `ε₁`.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cusp::{adaptive_quad, Characteristic, CuspBase, Cutoff, Flavor, GluedCusp, Grading, ModelCusp};
use crate::error::{Error, Result};
use crate::geometry::{integrate, ChartGrid, ScalarField, Valence};
use crate::par;
use crate::report::{drift, CheckResult, Row};
use crate::tolerance::Tolerances;
use crate::weighted::checks::{bracket_result, ratio_stats};
use crate::weighted::corpus::MIN_CORPUS;
use crate::weighted::norms::pointwise_jets;
use crate::weighted::{weighted_sobolev_norm, NormSpec, WeightedManifold};

/// Largest derivative order of the Kondratiev norms.
pub const MAX_ORDER: usize = 2;

/// Sector `{0 < r ≤ 1, 0 ≤ θ ≤ θ₁}`; `θ₁ = 2π` is the punctured disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConicalDomain {
    pub theta1: f64,
    pub eps0: f64,
    pub eps1: f64,
    /// Inner truncation radius of the grid.
    #[serde(default = "default_r_min")]
    pub r_min: f64,
}

fn default_r_min() -> f64 {
    1e-4
}

impl ConicalDomain {
    pub fn new(theta1: f64, eps0: f64, eps1: f64) -> Result<Self> {
        let d = ConicalDomain { theta1, eps0, eps1, r_min: default_r_min() };
        d.validate()?;
        Ok(d)
    }

    pub fn disk(eps0: f64, eps1: f64) -> Result<Self> {
        Self::new(TAU, eps0, eps1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta1 > 0.0 && self.theta1 <= TAU) {
            return Err(Error::InvalidParameter(format!("opening angle {} not in (0, 2π]", self.theta1)));
        }
        if !(self.r_min > 0.0 && self.r_min < self.eps0) {
            return Err(Error::InvalidParameter(format!("r_min = {} must lie in (0, ε₀)", self.r_min)));
        }
        Cutoff::new(self.eps0, self.eps1)?;
        if self.eps1 >= 1.0 {
            return Err(Error::InvalidParameter(format!("ε₁ = {} must be below 1", self.eps1)));
        }
        Ok(())
    }

    pub fn is_disk(&self) -> bool {
        self.theta1 == TAU
    }

    fn glued(&self) -> Result<GluedCusp> {
        self.validate()?;
        let base = if self.is_disk() { CuspBase::Circle } else { CuspBase::Arc { theta0: 0.0, theta1: self.theta1 } };
        let cone = ModelCusp::new(Characteristic::power(1.0)?, base, Flavor::Cone, 1.0)?;
        GluedCusp::new(cone, self.eps0, self.eps1)
    }

    /// Polar grid, geometric in `r ∈ [r_min, 1]`.
    pub fn discretize(&self, nr: usize, ntheta: usize) -> Result<PolarDomain> {
        let glued = self.glued()?;
        let grid = glued.cusp().stretched_grid(nr, ntheta, self.r_min, Grading::Geometric)?;
        let g = glued.cusp().metric_stretched(&grid)?;
        let delta = glued.rho_stretched(&grid);
        Ok(PolarDomain { domain: *self, wm: WeightedManifold::new(g, delta)?, nr, ntheta })
    }
}

/// A discretized conical domain with `δ` as the weight.
#[derive(Debug, Clone)]
pub struct PolarDomain {
    domain: ConicalDomain,
    wm: WeightedManifold,
    nr: usize,
    ntheta: usize,
}

impl PolarDomain {
    pub fn domain(&self) -> &ConicalDomain {
        &self.domain
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        self.wm.grid()
    }

    pub fn delta(&self) -> &ScalarField {
        self.wm.rho()
    }

    pub fn manifold(&self) -> &WeightedManifold {
        &self.wm
    }

    /// Both spacings halved.
    pub fn refined(&self) -> Result<PolarDomain> {
        let nt = if self.domain.is_disk() { 2 * self.ntheta } else { 2 * self.ntheta - 1 };
        self.domain.discretize(2 * self.nr - 1, nt)
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> ScalarField {
        let grid = self.grid();
        let data = par::map_range(grid.len(), |n| {
            let [r, th] = grid.point(n);
            f(r, th)
        });
        ScalarField::from_data(grid, Valence::SCALAR, data).expect("scalar length")
    }
}

/// Cartesian partial derivatives `[[u], [∂_x u, ∂_y u], [∂_xx u, ∂_xy u, ∂_yy u]]`
/// up to order `k`, by the chain rule from polar finite differences.
pub fn cartesian_derivatives(u: &ScalarField, k: usize) -> Result<Vec<Vec<ScalarField>>> {
    if k > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("Kondratiev order {k} exceeds {MAX_ORDER}")));
    }
    let grid = Arc::clone(u.grid());
    if grid.dim() != 2 {
        return Err(Error::InvalidGrid("Kondratiev norms need a polar grid".into()));
    }
    let v = u.values();
    let d = |n: usize, a: usize| grid.first_stencil(n, a).apply(|i| v[i]);
    let polar: Vec<[f64; 5]> = par::map_range(grid.len(), |n| {
        let ur = d(n, 0);
        let ut = d(n, 1);
        if k < 2 {
            return [ur, ut, 0.0, 0.0, 0.0];
        }
        let urr = grid.second_stencil(n, 0).apply(|i| v[i]);
        let utt = grid.second_stencil(n, 1).apply(|i| v[i]);
        let urt = grid.first_stencil(n, 0).apply(|i| d(i, 1));
        [ur, ut, urr, urt, utt]
    });
    let field = |f: &dyn Fn(usize, [f64; 2], &[f64; 5]) -> f64| {
        let data = (0..grid.len()).map(|n| f(n, grid.point(n), &polar[n])).collect();
        ScalarField::from_data(&grid, Valence::SCALAR, data)
    };
    let mut out = vec![vec![u.clone()]];
    if k >= 1 {
        out.push(vec![
            field(&|_, [r, t], p| t.cos() * p[0] - t.sin() / r * p[1])?,
            field(&|_, [r, t], p| t.sin() * p[0] + t.cos() / r * p[1])?,
        ]);
    }
    if k >= 2 {
        out.push(vec![
            field(&|_, [r, t], p| {
                let (s, c) = t.sin_cos();
                c * c * p[2] - 2.0 * s * c / r * p[3] + s * s / (r * r) * p[4] + s * s / r * p[0] + 2.0 * s * c / (r * r) * p[1]
            })?,
            field(&|_, [r, t], p| {
                let (s, c) = t.sin_cos();
                s * c * p[2] + (c * c - s * s) / r * p[3] - s * c / (r * r) * p[4] - s * c / r * p[0]
                    - (c * c - s * s) / (r * r) * p[1]
            })?,
            field(&|_, [r, t], p| {
                let (s, c) = t.sin_cos();
                s * s * p[2] + 2.0 * s * c / r * p[3] + c * c / (r * r) * p[4] + c * c / r * p[0] - 2.0 * s * c / (r * r) * p[1]
            })?,
        ]);
    }
    Ok(out)
}

/// `‖u‖_{K^k_{q,a}} = Σ_{|α|≤k} ‖δ^{|α|−a} ∂^α u‖_{L_q}` with `r dr dθ` quadrature.
pub fn kondratiev_norm(u: &ScalarField, dom: &PolarDomain, k: usize, a: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    u.same_grid(dom.delta())?;
    let delta = dom.delta();
    let g = dom.manifold().g();
    let mut total = 0.0;
    for (j, parts) in cartesian_derivatives(u, k)?.iter().enumerate() {
        let w = delta.map(|d| d.powf(j as f64 - a));
        for p in parts {
            total += integrate(&p.mul_scalar(&w)?, g, q)?;
        }
    }
    Ok(total)
}

/// `Σ_{j≤k} ‖δ^{−λ+j−m/q} |∇^j u|_g‖_{L_q}`: the weighted Sobolev norm with `ρ`
/// replaced by `δ`.
pub fn distance_norm(u: &ScalarField, dom: &PolarDomain, k: usize, lambda: f64, q: f64) -> Result<f64> {
    weighted_sobolev_norm(u, dom.manifold(), &NormSpec::new(k, lambda, q)?)
}

/// Weight index `λ = a − m/q` (`m = 2`) matching `K^k_{q,a}`.
pub fn matching_lambda(a: f64, q: f64) -> f64 {
    a - 2.0 / q
}

/// Test function `r^μ (c + cos(kθ + φ)) (1 − r²)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeFunction {
    pub mu: f64,
    pub offset: f64,
    pub k_theta: f64,
    pub phase: f64,
}

impl ConeFunction {
    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        let b = 1.0 - r * r;
        r.powf(self.mu) * (self.offset + (self.k_theta * theta + self.phase).cos()) * b * b
    }
}

/// Decay exponents of the cone corpus.
pub const CONE_DECAY: [f64; 4] = [1.5, 2.0, 2.5, 3.0];

/// Seeded family of cone functions; every `μ` exceeds the weight indices used
/// by the reports (`a ≤ 1.5`), so all norms are finite.
pub fn cone_corpus(seed: u64, count: usize) -> Result<Vec<ConeFunction>> {
    if count < MIN_CORPUS {
        return Err(Error::CorpusTooSmall { found: count, required: MIN_CORPUS });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|j| ConeFunction {
            mu: CONE_DECAY[j % CONE_DECAY.len()],
            offset: rng.gen_range(0.0..1.5),
            k_theta: rng.gen_range(0..=3) as f64,
            phase: rng.gen_range(0.0..TAU),
        })
        .collect())
}

/// Kondratiev/distance norm ratio per corpus function.
pub fn equivalence_ratios(dom: &PolarDomain, corpus: &[ConeFunction], k: usize, a: f64, q: f64) -> Result<Vec<f64>> {
    let lambda = matching_lambda(a, q);
    par::map_slice(corpus, |f| {
        let u = dom.sample(|r, t| f.eval(r, t));
        Ok(kondratiev_norm(&u, dom, k, a, q)? / distance_norm(&u, dom, k, lambda, q)?)
    })
    .into_iter()
    .collect()
}

/// Closed-form checks: area of the punctured disk as the `k = 0`, `a = 0`,
/// `q = 1` norm of `u ≡ 1`, and the `k = 0` distance norm of the radial function
/// `r^μ(1 − r²)²` against adaptive quadrature of its radial integral.
pub fn oracle(nr: usize, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "kondratiev.oracle";
    let mut rows = Vec::new();
    let dom = ConicalDomain::disk(0.25, 0.5)?;
    let pd = dom.discretize(nr, 16)?;
    let one = pd.sample(|_, _| 1.0);
    let area = kondratiev_norm(&one, &pd, 0, 0.0, 1.0)?;
    let e_area = (area - std::f64::consts::PI).abs() / std::f64::consts::PI;
    rows.push(Row::new(ID, "area", area).k(0).q(1.0).ratio(area / std::f64::consts::PI));
    let zero = kondratiev_norm(&pd.sample(|_, _| 0.0), &pd, 2, 1.0, 2.0)?;
    rows.push(Row::new(ID, "zero", zero).k(2));
    let cut = Cutoff::new(dom.eps0, dom.eps1)?;
    let delta = |r: f64| {
        let w = cut.eval(r);
        (1.0 - w) * r + w
    };
    let mut worst = e_area.max(zero);
    for &(mu, lambda, q) in &[(2.0, 0.0, 2.0), (1.5, 0.5, 1.0), (3.0, 1.0, 4.0)] {
        let f = ConeFunction { mu, offset: 1.0, k_theta: 0.0, phase: std::f64::consts::FRAC_PI_2 };
        let u = pd.sample(|r, t| f.eval(r, t));
        let num = distance_norm(&u, &pd, 0, lambda, q)?;
        let e = -lambda - 2.0 / q;
        let radial = adaptive_quad(
            |r| {
                let b = 1.0 - r * r;
                (delta(r).powf(e) * r.powf(mu) * b * b).abs().powf(q) * r
            },
            dom.r_min,
            1.0,
            1e-13,
        )?;
        let exact = (TAU * radial).powf(1.0 / q);
        let err = (num - exact).abs() / exact;
        rows.push(Row::new(ID, format!("radial_mu{mu}"), num).k(0).q(q).lambda(lambda).ratio(num / exact));
        worst = worst.max(err);
    }
    Ok(CheckResult::at_most(ID, worst, tol.analytic_oracle, rows))
}

/// Pointwise bracket of `Σ_{|α|=j}|∂^α u|` against `|∇^j u|_g`, `j ∈ {1, 2}`,
/// over the corpus; the value is `max(max, 1/min)`.
pub fn cartesian_consistency(dom: &PolarDomain, corpus: &[ConeFunction], tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "kondratiev.cartesian_consistency";
    let grid = dom.grid();
    let interior: Vec<usize> = (0..grid.len()).filter(|&n| !grid.on_boundary(n)).collect();
    let per: Vec<Result<[f64; 4]>> = par::map_slice(corpus, |f| {
        let u = dom.sample(|r, t| f.eval(r, t));
        let cart = cartesian_derivatives(&u, 2)?;
        let cov = pointwise_jets(&u, dom.manifold().conn(), 2)?;
        let mut b = [f64::INFINITY, 0.0, f64::INFINITY, 0.0];
        for j in 1..=2 {
            for &n in &interior {
                let c = cov[j].value(n);
                if c <= 1e-8 * cov[j].max_abs() {
                    continue;
                }
                let s: f64 = cart[j].iter().map(|p| p.value(n).abs()).sum();
                let r = s / c;
                let i = 2 * (j - 1);
                b[i] = b[i].min(r);
                b[i + 1] = b[i + 1].max(r);
            }
        }
        Ok(b)
    });
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (i, b) in per.into_iter().enumerate() {
        let b = b?;
        for j in 1..=2 {
            let (lo, hi) = (b[2 * (j - 1)], b[2 * j - 1]);
            rows.push(Row::new(ID, format!("v{i:02}/min"), lo).k(j));
            rows.push(Row::new(ID, format!("v{i:02}/max"), hi).k(j));
            worst = worst.max(hi).max(1.0 / lo);
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.cartesian_bracket, rows))
}

/// `k = 0`: the Kondratiev and distance norms coincide for `λ = a − 2/q`.
pub fn exact_k0(dom: &PolarDomain, corpus: &[ConeFunction], cases: &[(f64, f64)], tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "kondratiev.exact_k0";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &(a, q) in cases {
        let r = equivalence_ratios(dom, corpus, 0, a, q)?;
        for (i, v) in r.iter().enumerate() {
            rows.push(Row::new(ID, format!("v{i:02}"), *v).k(0).q(q).lambda(matching_lambda(a, q)).ratio(*v));
            worst = worst.max((v - 1.0).abs());
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.kondratiev_exact, rows))
}

/// `k ∈ ks`: bracket `C ≤ kondratiev_bracket` with refinement drift under
/// `kondratiev_drift`, on `dom` and its refinement.
pub fn bracket(dom: &PolarDomain, corpus: &[ConeFunction], ks: &[usize], cases: &[(f64, f64)], tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "kondratiev.bracket";
    let fine = dom.refined()?;
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for &k in ks {
        for &(a, q) in cases {
            let lambda = matching_lambda(a, q);
            let levels = vec![equivalence_ratios(dom, corpus, k, a, q)?, equivalence_ratios(&fine, corpus, k, a, q)?];
            for (level, rs) in levels.iter().enumerate() {
                for (i, v) in rs.iter().enumerate() {
                    rows.push(Row::new(ID, format!("v{i:02}"), *v).k(k).q(q).lambda(lambda).ratio(*v).level(level));
                }
            }
            let label = format!("θ₁={:.4} k={k} a={a} q={q}", dom.domain().theta1);
            parts.push(bracket_result(ID, &label, &ratio_stats(&levels), tol.kondratiev_bracket, tol.kondratiev_drift));
        }
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok(out)
}

/// Relative change of every ratio between two blend parameter pairs.
pub fn blend_stability(
    domains: [&PolarDomain; 2],
    corpus: &[ConeFunction],
    ks: &[usize],
    cases: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<CheckResult> {
    const ID: &str = "kondratiev.blend_stability";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &k in ks {
        for &(a, q) in cases {
            let r0 = equivalence_ratios(domains[0], corpus, k, a, q)?;
            let r1 = equivalence_ratios(domains[1], corpus, k, a, q)?;
            for (i, (x, y)) in r0.iter().zip(&r1).enumerate() {
                let d = drift(*x, *y);
                rows.push(Row::new(ID, format!("v{i:02}"), d).k(k).q(q).lambda(matching_lambda(a, q)).ratio(*y));
                worst = worst.max(d);
            }
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.kondratiev_drift, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Largest chain-rule error for `u = x²y + x` away from the tip.
    fn chain_rule_error(nr: usize, nt: usize) -> f64 {
        let dom = ConicalDomain::new(3.0, 0.25, 0.5).unwrap().discretize(nr, nt).unwrap();
        // u_x = 2xy + 1, u_y = x², u_xx = 2y, u_xy = 2x, u_yy = 0
        let u = dom.sample(|r, t| {
            let (x, y) = (r * t.cos(), r * t.sin());
            x * x * y + x
        });
        let d = cartesian_derivatives(&u, 2).unwrap();
        let grid = dom.grid();
        let mut worst = 0.0f64;
        for n in (0..grid.len()).filter(|&n| !grid.on_boundary(n)) {
            let [r, t] = grid.point(n);
            if r < 0.3 {
                continue;
            }
            let (x, y) = (r * t.cos(), r * t.sin());
            let exact = [2.0 * x * y + 1.0, x * x, 2.0 * y, 2.0 * x, 0.0];
            let got = [d[1][0].value(n), d[1][1].value(n), d[2][0].value(n), d[2][1].value(n), d[2][2].value(n)];
            for (e, g) in exact.iter().zip(&got) {
                worst = worst.max((e - g).abs());
            }
        }
        worst
    }

    #[test]
    fn chain_rule_matches_cartesian_polynomial() {
        let coarse = chain_rule_error(201, 101);
        let fine = chain_rule_error(401, 201);
        assert!(fine < 1e-3, "{fine}");
        assert!(coarse / fine > 3.0, "{coarse} -> {fine}");
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(ConicalDomain::new(7.0, 0.25, 0.5).is_err());
        assert!(ConicalDomain::new(1.0, 0.5, 0.25).is_err());
        assert!(ConicalDomain::new(1.0, 0.25, 1.0).is_err());
        assert!(cone_corpus(1, 3).is_err());
    }
}
