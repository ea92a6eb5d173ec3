use std::sync::Arc;

use crate::cusp::model::ModelCusp;
use crate::error::{Error, Result};
use crate::geometry::{ChartGrid, MetricField, ScalarField, Valence};

/// Monotone cutoff `ω` with `ω = 0` on `[0, ε₀]`, `ω = 1` on `[ε₁, ∞)`.
///
/// The transition is the degree-7 smoothstep `35x⁴ − 84x⁵ + 70x⁶ − 20x⁷`,
/// whose first three derivatives vanish at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub eps0: f64,
    pub eps1: f64,
}

impl Cutoff {
    pub fn new(eps0: f64, eps1: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 < eps1) {
            return Err(Error::InvalidParameter(format!("cutoff needs 0 < ε₀ < ε₁, got ε₀ = {eps0}, ε₁ = {eps1}")));
        }
        Ok(Cutoff { eps0, eps1 })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = ((t - self.eps0) / (self.eps1 - self.eps0)).clamp(0.0, 1.0);
        let x4 = x * x * x * x;
        x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
    }

    /// `dω/dt`.
    pub fn derivative(&self, t: f64) -> f64 {
        let w = self.eps1 - self.eps0;
        let x = (t - self.eps0) / w;
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        140.0 * x * x * x * (1.0 - x) * (1.0 - x) * (1.0 - x) / w
    }

    /// `d²ω/dt²`.
    pub fn second_derivative(&self, t: f64) -> f64 {
        let w = self.eps1 - self.eps0;
        let x = (t - self.eps0) / w;
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        420.0 * x * x * (1.0 - x) * (1.0 - x) * (1.0 - 2.0 * x) / (w * w)
    }
}

/// Model cusp glued to an outer region with weight `ρ = (1 − ω) r_Z + ω` and
/// metric `ḡ = (1 − ω) g_Z + ω g`.
///
/// The outer metric `g` is the one induced by the embedding, so the glued
/// manifold is the embedded cusp with the model metric near the tip.
#[derive(Debug, Clone)]
pub struct GluedCusp {
    cusp: ModelCusp,
    cutoff: Cutoff,
}

impl GluedCusp {
    pub fn new(cusp: ModelCusp, eps0: f64, eps1: f64) -> Result<Self> {
        let cutoff = Cutoff::new(eps0, eps1)?;
        if eps1 >= cusp.epsilon() {
            return Err(Error::InvalidParameter(format!("ε₁ = {eps1} must be below the radius cap {}", cusp.epsilon())));
        }
        Ok(GluedCusp { cusp, cutoff })
    }

    pub fn cusp(&self) -> &ModelCusp {
        &self.cusp
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    /// Blended weight on a stretched grid.
    pub fn rho_stretched(&self, grid: &Arc<ChartGrid>) -> ScalarField {
        let rz = self.cusp.singularity_stretched(grid);
        let g = Arc::clone(grid);
        let data: Vec<f64> = (0..grid.len())
            .map(|n| {
                let w = self.cutoff.eval(g.point(n)[0]);
                (1.0 - w) * rz.value(n) + w
            })
            .collect();
        ScalarField::from_data(grid, Valence::SCALAR, data).expect("scalar length")
    }

    /// Blended metric on a stretched grid.
    pub fn metric_stretched(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        let gz = self.cusp.metric_stretched(grid)?;
        let ge = self.cusp.embedding_metric(grid)?;
        let w = ScalarField::scalar_fn(grid, |[t, _]| self.cutoff.eval(t));
        let blended = gz.cov().mul_scalar(&w.map(|x| 1.0 - x))?.add(&ge.cov().mul_scalar(&w)?)?;
        MetricField::new(blended)
    }

    /// `ĝ = ḡ / ρ²` on a stretched grid.
    pub fn regularized_stretched(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        self.metric_stretched(grid)?.conformal_rescale(&self.rho_stretched(grid))
    }

    /// Blended weight on a cylinder grid.
    pub fn rho_cylinder(&self, grid: &Arc<ChartGrid>) -> Result<ScalarField> {
        let t = self.cusp.cylinder_t(grid)?;
        let r = self.cusp.characteristic();
        let data: Vec<f64> = (0..grid.len())
            .map(|n| {
                let ti = t[grid.multi_index(n)[0]];
                let w = self.cutoff.eval(ti);
                (1.0 - w) * r.eval(ti) + w
            })
            .collect();
        ScalarField::from_data(grid, Valence::SCALAR, data)
    }

    /// Blended metric on a cylinder grid: `R²[(1 + ω R'²) ds² + dθ²]` for cusps,
    /// `R²(ds² + dθ²)` for cones.
    pub fn metric_cylinder(&self, grid: &Arc<ChartGrid>) -> Result<MetricField> {
        let t = self.cusp.cylinder_t(grid)?;
        let r = self.cusp.characteristic();
        let cone = self.cusp.flavor() == crate::cusp::model::Flavor::Cone;
        let g = Arc::clone(grid);
        MetricField::from_fn(grid, |p| {
            let i = g.axis(0).coords().partition_point(|&s| s < p[0]).min(t.len() - 1);
            let ti = t[i];
            let [rv, dr, ..] = r.jet(ti);
            let stretch = if cone { 1.0 } else { 1.0 + self.cutoff.eval(ti) * dr * dr };
            [[rv * rv * stretch, 0.0], [0.0, rv * rv]]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusp::characteristic::Characteristic;
    use crate::cusp::model::{CuspBase, Flavor, Grading};

    #[test]
    fn cutoff_shape() {
        let c = Cutoff::new(0.25, 0.5).unwrap();
        assert_eq!(c.eval(0.1), 0.0);
        assert_eq!(c.eval(0.25), 0.0);
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(0.9), 1.0);
        assert!((c.eval(0.375) - 0.5).abs() < 1e-14);
        let h = 1e-6;
        for &t in &[0.3, 0.4, 0.45] {
            let fd = (c.eval(t + h) - c.eval(t - h)) / (2.0 * h);
            assert!((fd - c.derivative(t)).abs() < 1e-6);
            let fd2 = (c.derivative(t + h) - c.derivative(t - h)) / (2.0 * h);
            assert!((fd2 - c.second_derivative(t)).abs() < 1e-5);
        }
        assert!(Cutoff::new(0.5, 0.25).is_err());
    }

    #[test]
    fn glued_weight_regions() {
        let z = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
        let gl = GluedCusp::new(z.clone(), 0.25, 0.5).unwrap();
        let grid = z.stretched_grid(200, 8, 1e-2, Grading::Uniform).unwrap();
        let rho = gl.rho_stretched(&grid);
        let rz = z.singularity_stretched(&grid);
        let gbar = gl.metric_stretched(&grid).unwrap();
        let ge = z.embedding_metric(&grid).unwrap();
        for n in 0..grid.len() {
            let t = grid.point(n)[0];
            if t <= 0.25 {
                assert_eq!(rho.value(n), rz.value(n));
            }
            if t >= 0.5 {
                assert_eq!(rho.value(n), 1.0);
                assert_eq!(gbar.cov().at(n), ge.cov().at(n));
            }
        }
        assert!(gl.regularized_stretched(&grid).is_ok());
    }
}
