//! Manufactured solution `û* = e^{−t} sin(s) χ(s) A(θ)` on a model cusp
//! cylinder with `a = id`, where `χ = 1 − ω` switches off on `[2, 3]` and
//! `A = 1 + ½ cos θ` (`A = 1` on one-dimensional grids).

use std::sync::Arc;

use crate::cusp::{Cutoff, ModelCusp};
use crate::error::Result;
use crate::geometry::ChartGrid;
use crate::parabolic::solve::Mass;

#[derive(Debug, Clone)]
pub struct Manufactured {
    cut: Cutoff,
}

impl Default for Manufactured {
    fn default() -> Self {
        Manufactured { cut: Cutoff { eps0: 2.0, eps1: 3.0 } }
    }
}

/// `ℓ'` and `ℓ''` of `ℓ = log ρ` in `s` at every node of the first axis.
pub fn log_rho_jet(cusp: &ModelCusp, grid: &ChartGrid) -> Result<Vec<(f64, f64)>> {
    let r = cusp.characteristic();
    // dt/ds = −R, so ℓ' = −R' and ℓ'' = R R''
    Ok(cusp.cylinder_t(grid)?.into_iter().map(|t| {
        let j = r.jet(t);
        (-j[1], j[0] * j[2])
    }).collect())
}

impl Manufactured {
    /// Truncation length; the support of `û*` stays in `s < S_MAX/2`.
    pub const S_MAX: f64 = 6.0;

    /// `p = sin(s) χ(s)` and its first two derivatives.
    fn radial(&self, s: f64) -> [f64; 3] {
        let (sn, cs) = s.sin_cos();
        let (c0, c1, c2) = (1.0 - self.cut.eval(s), -self.cut.derivative(s), -self.cut.second_derivative(s));
        [sn * c0, cs * c0 + sn * c1, -sn * c0 + 2.0 * cs * c1 + sn * c2]
    }

    fn angular(grid: &ChartGrid, theta: f64) -> [f64; 2] {
        if grid.dim() == 1 {
            [1.0, 0.0]
        } else {
            [1.0 + 0.5 * theta.cos(), -0.5 * theta.cos()]
        }
    }

    pub fn uhat(&self, grid: &Arc<ChartGrid>, t: f64) -> Vec<f64> {
        let e = (-t).exp();
        (0..grid.len())
            .map(|n| {
                let [s, th] = grid.point(n);
                e * self.radial(s)[0] * Self::angular(grid, th)[0]
            })
            .collect()
    }

    /// `f̂ = M ∂_t û* + Â û*` with the exact operator for `a = id`:
    /// `Âû = −[û'' + Δ_B û + 2λℓ'û' + (λℓ'' + λ²ℓ'²)û + (m − 2)ℓ'(û' + λℓ'û)]`.
    pub fn fhat(
        &self,
        cusp: &ModelCusp,
        grid: &Arc<ChartGrid>,
        rho: &[f64],
        lambda: f64,
        mass: Mass,
        t: f64,
    ) -> Result<Vec<f64>> {
        let jets = log_rho_jet(cusp, grid)?;
        let m = grid.dim() as f64;
        let e = (-t).exp();
        Ok((0..grid.len())
            .map(|n| {
                let [s, th] = grid.point(n);
                let (l1, l2) = jets[grid.multi_index(n)[0]];
                let [p, p1, p2] = self.radial(s);
                let [a, a2] = Self::angular(grid, th);
                let (u, u1, u2, ub) = (e * p * a, e * p1 * a, e * p2 * a, e * p * a2);
                let op = -(u2 + ub + 2.0 * lambda * l1 * u1 + (lambda * l2 + lambda * lambda * l1 * l1) * u
                    + (m - 2.0) * l1 * (u1 + lambda * l1 * u));
                let mass = match mass {
                    Mass::Identity => 1.0,
                    Mass::Conjugated => rho[n] * rho[n],
                };
                -mass * u + op
            })
            .collect())
    }
}
