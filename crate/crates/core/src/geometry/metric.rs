use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::grid::ChartGrid;
use crate::geometry::tensor::{ScalarField, TensorField, Valence};
use crate::par;

/// Riemannian metric on a chart grid with cached inverse and volume density.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    cov: TensorField,
    inv: TensorField,
    sqrt_det: Vec<f64>,
}

#[inline]
fn sym_eigen_min(g: &[f64], m: usize) -> f64 {
    if m == 1 {
        return g[0];
    }
    let (a, b, d) = (g[0], 0.5 * (g[1] + g[2]), g[3]);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let big = 0.5 * (tr + disc);
    if big <= 0.0 {
        return 0.5 * (tr - disc);
    }
    // det / λ_max avoids cancellation for strongly anisotropic metrics
    (a * d - b * b) / big
}

impl MetricField {
    /// Wrap a `(0,2)` field, symmetrizing it and checking positive definiteness.
    pub fn new(cov: TensorField) -> Result<Self> {
        if cov.valence() != Valence::new(0, 2) {
            return Err(Error::InvalidParameter("metric must be a (0,2)-field".into()));
        }
        let m = cov.dim();
        let grid = Arc::clone(cov.grid());
        let mut cov = cov;
        par::fill_chunks(cov.data_mut(), m * m, |_, g| {
            if m == 2 {
                let s = 0.5 * (g[1] + g[2]);
                g[1] = s;
                g[2] = s;
            }
        });
        let worst = par::map_range(grid.len(), |n| sym_eigen_min(cov.at(n), m));
        for (node, &ev) in worst.iter().enumerate() {
            if !(ev > 0.0) || !ev.is_finite() {
                return Err(Error::MetricDegeneracy { node, eigenvalue: ev });
            }
        }
        let inv = TensorField::from_fn(&grid, Valence::new(2, 0), |n, out| {
            let g = cov.at(n);
            if m == 1 {
                out[0] = 1.0 / g[0];
            } else {
                let det = g[0] * g[3] - g[1] * g[2];
                out[0] = g[3] / det;
                out[1] = -g[1] / det;
                out[2] = -g[2] / det;
                out[3] = g[0] / det;
            }
        })?;
        let sqrt_det = par::map_range(grid.len(), |n| {
            let g = cov.at(n);
            if m == 1 {
                g[0].sqrt()
            } else {
                (g[0] * g[3] - g[1] * g[2]).sqrt()
            }
        });
        Ok(MetricField { cov, inv, sqrt_det })
    }

    /// Metric from a closed-form component function of the chart coordinates.
    pub fn from_fn<F>(grid: &Arc<ChartGrid>, f: F) -> Result<Self>
    where
        F: Fn([f64; 2]) -> [[f64; 2]; 2] + Sync + Send,
    {
        let m = grid.dim();
        let g = Arc::clone(grid);
        let cov = TensorField::from_fn(grid, Valence::new(0, 2), |n, out| {
            let c = f(g.point(n));
            for i in 0..m {
                for j in 0..m {
                    out[i * m + j] = c[i][j];
                }
            }
        })?;
        Self::new(cov)
    }

    /// Euclidean metric `δ_ij` in the chart coordinates.
    pub fn flat(grid: &Arc<ChartGrid>) -> Self {
        Self::from_fn(grid, |_| [[1.0, 0.0], [0.0, 1.0]]).expect("flat metric is positive definite")
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        self.cov.grid()
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }

    /// Components `g_ij` as a `(0,2)`-field.
    pub fn cov(&self) -> &TensorField {
        &self.cov
    }

    /// Components `g^ij` as a `(2,0)`-field (the cometric `g*`).
    pub fn inv(&self) -> &TensorField {
        &self.inv
    }

    #[inline]
    pub fn sqrt_det(&self, node: usize) -> f64 {
        self.sqrt_det[node]
    }

    pub fn sqrt_det_field(&self) -> ScalarField {
        ScalarField::from_data(self.grid(), Valence::SCALAR, self.sqrt_det.clone()).expect("one value per node")
    }

    /// Smallest eigenvalue of `[g_ij]` at a node.
    pub fn min_eigenvalue(&self, node: usize) -> f64 {
        sym_eigen_min(self.cov.at(node), self.dim())
    }

    /// Conformal rescaling `ĝ = g/ρ²`.
    pub fn conformal_rescale(&self, rho: &ScalarField) -> Result<MetricField> {
        conformal_rescale(self, rho)
    }

    /// `g♯ω`: raise the index of a 1-form.
    pub fn sharp(&self, omega: &TensorField) -> Result<TensorField> {
        self.inv.dot(omega)
    }
}

/// Conformal rescaling `ĝ_ij = ρ^{-2} g_ij`, `ĝ^ij = ρ² g^ij`, `√ĝ = ρ^{-m} √g`.
pub fn conformal_rescale(g: &MetricField, rho: &ScalarField) -> Result<MetricField> {
    g.cov.same_grid(rho)?;
    for (node, &r) in rho.values().iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::NonPositiveWeight { node, value: r });
        }
    }
    let m = g.dim() as i32;
    let inv_sq = rho.map(|r| r.powi(-2));
    let sq = rho.map(|r| r * r);
    let cov = g.cov.mul_scalar(&inv_sq)?;
    let inv = g.inv.mul_scalar(&sq)?;
    let sqrt_det = g.sqrt_det.iter().zip(rho.values()).map(|(s, r)| s * r.powi(-m)).collect();
    Ok(MetricField { cov, inv, sqrt_det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::Axis;

    fn cone_grid() -> Arc<ChartGrid> {
        Arc::new(
            ChartGrid::two_d(Axis::uniform(0.1, 1.0, 10).unwrap(), Axis::periodic(0.0, std::f64::consts::TAU, 8).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn inverse_is_exact() {
        let g = MetricField::from_fn(&cone_grid(), |[t, th]| [[1.0 + 0.1 * th.sin(), 0.2 * t], [0.2 * t, t * t]]).unwrap();
        for n in 0..g.grid().len() {
            let (a, b) = (g.cov().at(n), g.inv().at(n));
            for i in 0..2 {
                for k in 0..2 {
                    let s: f64 = (0..2).map(|j| b[k * 2 + j] * a[j * 2 + i]).sum();
                    assert!((s - if i == k { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn degenerate_metric_is_rejected_with_node() {
        let grid = cone_grid();
        let err = MetricField::from_fn(&grid, |[t, _]| [[1.0, 0.0], [0.0, t - 0.5]]).unwrap_err();
        assert!(matches!(err, Error::MetricDegeneracy { node: 0, .. }));
    }

    #[test]
    fn rescale_volume_density() {
        let grid = cone_grid();
        let g = MetricField::from_fn(&grid, |[t, _]| [[1.0, 0.0], [0.0, t * t]]).unwrap();
        let rho = TensorField::constant_scalar(&grid, 0.5);
        let gh = g.conformal_rescale(&rho).unwrap();
        for n in 0..grid.len() {
            assert!((gh.sqrt_det(n) - 4.0 * g.sqrt_det(n)).abs() < 1e-14);
        }
        let one = TensorField::constant_scalar(&grid, 1.0);
        assert_eq!(g.conformal_rescale(&one).unwrap(), g);
        let bad = TensorField::constant_scalar(&grid, 0.0);
        assert!(matches!(g.conformal_rescale(&bad), Err(Error::NonPositiveWeight { .. })));
    }
}
