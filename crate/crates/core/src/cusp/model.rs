use std::f64::consts::TAU;
use std::sync::Arc;

use crate::cusp::arclength::ArclengthMap;
use crate::cusp::characteristic::Characteristic;
use crate::error::{Error, Result};
use crate::geometry::{Axis, ChartGrid, LeviCivita, MetricField, ScalarField, TensorField};
use crate::par;

/// Compact base `B` of a model cusp with the arclength metric `g_B = dθ²`.
#[derive(Debug, Clone, PartialEq)]
pub enum CuspBase {
    /// Full unit circle, `θ ∈ [0, 2π)` periodic.
    Circle,
    /// Circular arc `[θ₀, θ₁]`.
    Arc { theta0: f64, theta1: f64 },
    /// Finitely many points; every branch carries the same 1-D geometry.
    Points { count: usize },
}

impl CuspBase {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CuspBase::Arc { theta0, theta1 } if !(theta1 > theta0) || theta1 - theta0 > TAU => {
                Err(Error::InvalidParameter(format!("arc [{theta0}, {theta1}] must have length in (0, 2π]")))
            }
            CuspBase::Points { count: 0 } => Err(Error::InvalidParameter("point base needs at least one point".into())),
            _ => Ok(()),
        }
    }

    /// `dim B = m − 1`.
    pub fn dim(&self) -> usize {
        match self {
            CuspBase::Points { .. } => 0,
            _ => 1,
        }
    }

    /// Angular axis with `n` nodes, or `None` for point bases.
    pub fn axis(&self, n: usize) -> Result<Option<Axis>> {
        match *self {
            CuspBase::Circle => Axis::periodic(0.0, TAU, n).map(Some),
            CuspBase::Arc { theta0, theta1 } => Axis::uniform(theta0, theta1, n).map(Some),
            CuspBase::Points { .. } => Ok(None),
        }
    }

    /// Number of identical branches (1 unless the base is a point set).
    pub fn multiplicity(&self) -> usize {
        match *self {
            CuspBase::Points { count } => count,
            _ => 1,
        }
    }
}

/// Cone `C(B)` or cusp `K(R, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Cone,
    Cusp,
}

/// Smooth model cusp `Z(R, B)` truncated at radius `ε`.
#[derive(Debug, Clone)]
pub struct ModelCusp {
    r: Characteristic,
    base: CuspBase,
    flavor: Flavor,
    epsilon: f64,
    arclength: ArclengthMap,
}

/// How `t`-nodes of a stretched grid are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    /// Images of uniformly spaced arclength nodes, `t_i = t(s_i)`.
    Arclength,
    /// Geometric, uniform in `log t`.
    Geometric,
    /// Uniform in `t`.
    Uniform,
}

impl ModelCusp {
    pub fn new(r: Characteristic, base: CuspBase, flavor: Flavor, epsilon: f64) -> Result<Self> {
        base.validate()?;
        if flavor == Flavor::Cone && !r.is_linear() {
            return Err(Error::IncompatibleFlavor("a cone requires the linear characteristic R(t) = t".into()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("radius cap {epsilon} not in (0, 1]")));
        }
        let arclength = ArclengthMap::new(r.clone());
        Ok(ModelCusp { r, base, flavor, epsilon, arclength })
    }

    pub fn characteristic(&self) -> &Characteristic {
        &self.r
    }

    pub fn base(&self) -> &CuspBase {
        &self.base
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn arclength(&self) -> &ArclengthMap {
        &self.arclength
    }

    /// Manifold dimension `m`.
    pub fn dim(&self) -> usize {
        self.base.dim() + 1
    }

    /// Grid in stretched coordinates `(t, θ)` with `t ∈ [t_min, ε]`.
    pub fn stretched_grid(&self, nt: usize, ntheta: usize, t_min: f64, grading: Grading) -> Result<Arc<ChartGrid>> {
        if !(t_min > 0.0 && t_min < self.epsilon) {
            return Err(Error::InvalidParameter(format!("t_min = {t_min} must lie in (0, ε)")));
        }
        if nt < 4 {
            return Err(Error::InvalidGrid(format!("{nt} radial nodes")));
        }
        let t = match grading {
            Grading::Uniform => Axis::uniform(t_min, self.epsilon, nt)?.coords().to_vec(),
            Grading::Geometric => {
                let (a, b) = (t_min.ln(), self.epsilon.ln());
                let mut t: Vec<f64> = (0..nt).map(|i| (a + (b - a) * i as f64 / (nt - 1) as f64).exp()).collect();
                t[0] = t_min;
                t[nt - 1] = self.epsilon;
                t
            }
            Grading::Arclength => {
                let s_top = self.arclength.rho(self.epsilon)?;
                let s_bot = self.arclength.rho(t_min)?;
                let s: Vec<f64> = (0..nt).map(|i| s_bot + (s_top - s_bot) * i as f64 / (nt - 1) as f64).collect();
                let mut t = par::map_slice(&s, |&v| self.arclength.inverse(v))
                    .into_iter()
                    .collect::<Result<Vec<f64>>>()?;
                t[0] = t_min;
                t[nt - 1] = self.epsilon;
                t
            }
        };
        let radial = Axis::new(t)?;
        self.with_base(radial, ntheta)
    }

    /// Grid in cylinder coordinates `(s, θ)`, `s = ρ(t) − ρ(ε) ∈ [0, s_max]`;
    /// `s = 0` is the outer edge `t = ε`.
    pub fn cylinder_grid(&self, ns: usize, ntheta: usize, s_max: f64) -> Result<Arc<ChartGrid>> {
        if !(s_max > 0.0) {
            return Err(Error::InvalidParameter(format!("s_max = {s_max} must be positive")));
        }
        self.with_base(Axis::uniform(0.0, s_max, ns)?, ntheta)
    }

    fn with_base(&self, first: Axis, ntheta: usize) -> Result<Arc<ChartGrid>> {
        let grid = match self.base.axis(ntheta)? {
            Some(th) => ChartGrid::two_d(first, th)?,
            None => ChartGrid::one_d(first)?,
        };
        Ok(Arc::new(grid))
    }

    /// `t(s)` for every node of the first axis of a cylinder grid.
    pub fn cylinder_t(&self, grid: &ChartGrid) -> Result<Vec<f64>> {
        let s0 = self.arclength.rho(self.epsilon)?;
        par::map_slice(grid.axis(0).coords(), |&s| self.arclength.inverse(s0 + s)).into_iter().collect()
    }

    /// `g_Z = dt² + R(t)² dθ²` on a stretched grid.
    pub fn metric_stretched(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        MetricField::from_fn(grid, |[t, _]| {
            let r = self.r.eval(t);
            [[1.0, 0.0], [0.0, r * r]]
        })
    }

    /// Metric induced by the embedding `ι_Z ∘ f_Z` on a stretched grid.
    ///
    /// Cones over a circle or arc live in the plane, `f(t,θ) = t(cos θ, sin θ)`;
    /// cusps live in `ℝ³`, `f(t,θ) = (t, R cos θ, R sin θ)`; point bases use a
    /// unit vector `b`.
    pub fn embedding_metric(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        let flavor = self.flavor;
        MetricField::from_fn(grid, |[t, _]| {
            let [r, dr, ..] = self.r.jet(t);
            match flavor {
                // |∂_t f|² = 1, ∂_t f ⟂ ∂_θ f, |∂_θ f|² = t²
                Flavor::Cone => [[1.0, 0.0], [0.0, t * t]],
                // ∂_t f = (1, R' cos θ, R' sin θ), ∂_θ f = (0, −R sin θ, R cos θ)
                Flavor::Cusp => [[1.0 + dr * dr, 0.0], [0.0, r * r]],
            }
        })
    }

    /// Singularity function `r_Z` on a stretched grid: `|x| = t` on cones, `R(t)` on cusps.
    pub fn singularity_stretched(&self, grid: &Arc<ChartGrid>) -> ScalarField {
        ScalarField::scalar_fn(grid, |[t, _]| match self.flavor {
            Flavor::Cone => t,
            Flavor::Cusp => self.r.eval(t),
        })
    }

    /// `r_Z = R(t(s))` on a cylinder grid (cones have `R(t) = t`).
    pub fn singularity_cylinder(&self, grid: &Arc<ChartGrid>) -> Result<ScalarField> {
        let t = self.cylinder_t(grid)?;
        let vals: Vec<f64> = (0..grid.len()).map(|n| self.r.eval(t[grid.multi_index(n)[0]])).collect();
        ScalarField::from_data(grid, crate::geometry::Valence::SCALAR, vals)
    }

    /// `g_Z = R(t(s))² (ds² + dθ²)` on a cylinder grid.
    pub fn metric_cylinder(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        let rho = self.singularity_cylinder(grid)?;
        let flat = MetricField::flat(grid);
        MetricField::new(flat.cov().mul_scalar(&rho.map(|r| r * r))?)
    }

    /// Regularized metric `ĝ_Z = g_Z / r_Z²` on a cylinder grid.
    pub fn regularized_cylinder(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        let g = self.metric_cylinder(grid)?;
        g.conformal_rescale(&self.singularity_cylinder(grid)?)
    }
}

/// Generalized eigenvalue bounds of `g2` relative to `g1` over the given nodes
/// (all nodes when `nodes` is empty).
pub fn metric_equivalence_ratio(g1: &MetricField, g2: &MetricField, nodes: &[usize]) -> Result<(f64, f64)> {
    g1.cov().same_grid(g2.cov())?;
    let m = g1.dim();
    let all: Vec<usize>;
    let nodes = if nodes.is_empty() {
        all = (0..g1.grid().len()).collect();
        &all[..]
    } else {
        nodes
    };
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &n in nodes {
        let (a, b) = (g1.cov().at(n), g2.cov().at(n));
        let (l, h) = if m == 1 {
            let r = b[0] / a[0];
            (r, r)
        } else {
            // Cholesky a = L Lᵀ, then eigenvalues of L⁻¹ b L⁻ᵀ
            let l00 = a[0].sqrt();
            let l10 = a[2] / l00;
            let l11 = (a[3] - l10 * l10).sqrt();
            if !(l11 > 0.0) {
                return Err(Error::MetricDegeneracy { node: n, eigenvalue: l11 });
            }
            let c00 = b[0] / (l00 * l00);
            let c01 = (b[1] - l10 * b[0] / l00) / (l00 * l11);
            let c11 = (b[3] - 2.0 * l10 * b[1] / l00 + l10 * l10 * b[0] / (l00 * l00)) / (l11 * l11);
            let mean = 0.5 * (c00 + c11);
            let rad = (0.25 * (c00 - c11) * (c00 - c11) + c01 * c01).sqrt();
            (mean - rad, mean + rad)
        };
        if !(l > 0.0) {
            return Err(Error::MetricDegeneracy { node: n, eigenvalue: l });
        }
        lo = lo.min(l);
        hi = hi.max(h);
    }
    Ok((lo, hi))
}

/// `max_nodes ρ^{k+1} |∇^k d(log ρ)|_{g_0^{k+1}}`.
pub fn singularity_bound(g: &MetricField, rho: &ScalarField, k: usize) -> Result<f64> {
    if k > 3 {
        return Err(Error::UnsupportedValence { contra: 0, co: k + 1, cap: 4 });
    }
    for (node, &r) in rho.values().iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::NonPositiveWeight { node, value: r });
        }
    }
    let conn = LeviCivita::new(g)?;
    let dlog = rho.map(f64::ln).partial()?;
    let jet = conn.nabla_k(&dlog, k)?;
    let norm = crate::geometry::bundle_norm(&jet, g)?;
    let p = (k + 1) as i32;
    Ok(par::max_range(g.grid().len(), |n| rho.value(n).powi(p) * norm.value(n)))
}

impl ModelCusp {
    /// [`singularity_bound`] of `r_Z` for `g_Z` on a stretched grid.
    pub fn singularity_bound(&self, k: usize, grid: &Arc<ChartGrid>) -> Result<f64> {
        singularity_bound(&self.metric_stretched(grid)?, &self.singularity_stretched(grid), k)
    }

    /// Pointwise identity check: components of `ĝ` on a cylinder grid minus those of `ds² + g_B`.
    pub fn desingularization_defect(&self, grid: &Arc<ChartGrid>) -> Result<f64> {
        let gh = self.regularized_cylinder(grid)?;
        let flat = MetricField::flat(grid);
        let d: TensorField = gh.cov().sub(flat.cov())?;
        Ok(d.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_requires_linear_characteristic() {
        let err = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Circle, Flavor::Cone, 1.0);
        assert!(matches!(err, Err(Error::IncompatibleFlavor(_))));
    }

    #[test]
    fn cone_metric_is_embedding_metric() {
        let z = ModelCusp::new(Characteristic::power(1.0).unwrap(), CuspBase::Circle, Flavor::Cone, 1.0).unwrap();
        let grid = z.stretched_grid(40, 16, 1e-3, Grading::Arclength).unwrap();
        let (lo, hi) = metric_equivalence_ratio(&z.metric_stretched(&grid).unwrap(), &z.embedding_metric(&grid).unwrap(), &[]).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
    }

    #[test]
    fn cusp_ratio_closed_form() {
        let z = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
        let grid = z.stretched_grid(50, 8, 1e-2, Grading::Uniform).unwrap();
        let (lo, hi) = metric_equivalence_ratio(&z.metric_stretched(&grid).unwrap(), &z.embedding_metric(&grid).unwrap(), &[]).unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((hi - 5.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_metric_is_flat_after_rescaling() {
        let z = ModelCusp::new(Characteristic::exponential(1.0, 1.0).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
        let grid = z.cylinder_grid(33, 8, 4.0).unwrap();
        assert!(z.desingularization_defect(&grid).unwrap() < 1e-10);
    }

    #[test]
    fn one_dimensional_singularity_bounds() {
        let grid = Arc::new(ChartGrid::one_d(Axis::uniform(0.1, 1.0, 2001).unwrap()).unwrap());
        let g = MetricField::flat(&grid);
        let rho = ScalarField::scalar_fn(&grid, |[r, _]| r);
        assert!((singularity_bound(&g, &rho, 0).unwrap() - 1.0).abs() < 1e-4);
        assert!((singularity_bound(&g, &rho, 1).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn power_cusp_bound_is_alpha() {
        let z = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Points { count: 1 }, Flavor::Cusp, 1.0).unwrap();
        let grid = z.stretched_grid(400, 0, 1e-3, Grading::Geometric).unwrap();
        let b = z.singularity_bound(0, &grid).unwrap();
        assert!((b - 2.0).abs() < 0.04, "{b}");
    }
}
