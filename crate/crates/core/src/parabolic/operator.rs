//! Diffusion problems on weighted manifolds and their desingularized
//! cylinder operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LeviCivita, MetricField, ScalarField, TensorField, Valence};
use crate::par;
use crate::parabolic::sparse::CsrMatrix;
use crate::weighted::{commutator_coefficients, s_tensor, WeightedManifold};

/// Diffusion tensor `a ∈ T¹₁` given by its components in cylinder coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Diffusion {
    Identity,
    /// `δ + amplitude·M(s, θ)` with `M = [[½ sin s, 0.3 cos θ], [0.3 cos θ, −½ sin s]]`.
    Anisotropic { amplitude: f64 },
}

impl Diffusion {
    pub fn field(&self, wm: &WeightedManifold) -> Result<TensorField> {
        let grid = wm.grid();
        let m = grid.dim();
        let g = std::sync::Arc::clone(grid);
        let amp = match *self {
            Diffusion::Identity => 0.0,
            Diffusion::Anisotropic { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidParameter(format!("diffusion amplitude {amplitude}")));
                }
                amplitude
            }
        };
        TensorField::from_fn(grid, Valence::new(1, 1), |n, out| {
            let [s, th] = g.point(n);
            if m == 1 {
                out[0] = 1.0 + amp * 0.5 * s.sin();
            } else {
                let (d, o) = (0.5 * s.sin(), 0.3 * th.cos());
                out.copy_from_slice(&[1.0 + amp * d, amp * o, amp * o, 1.0 - amp * d]);
            }
        })
    }
}

/// Smallest `μ` with `det(sym(p) − μ q) = 0` for `m ≤ 2`, `q` positive definite.
pub fn min_generalized_eigenvalue(p: &[f64], q: &[f64], m: usize) -> f64 {
    if m == 1 {
        return p[0] / q[0];
    }
    let (p00, p01, p11) = (p[0], 0.5 * (p[1] + p[2]), p[3]);
    let (q00, q01, q11) = (q[0], q[1], q[3]);
    let a = q00 * q11 - q01 * q01;
    let b = p00 * q11 + p11 * q00 - 2.0 * p01 * q01;
    let c = p00 * p11 - p01 * p01;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    // smaller root, written to avoid cancellation
    if b > 0.0 {
        2.0 * c / (b + disc)
    } else {
        (b - disc) / (2.0 * a)
    }
}

fn ellipticity_of(p: &TensorField, metric_inv: &TensorField) -> (usize, f64) {
    let m = p.dim();
    let vals = par::map_range(p.grid().len(), |n| min_generalized_eigenvalue(p.at(n), metric_inv.at(n), m));
    vals.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (n, &v)| if v < acc.1 { (n, v) } else { acc })
}

/// `∂_t u − div(a•grad u) = f` on a weighted manifold, with weight exponent `λ`.
#[derive(Debug, Clone)]
pub struct DiffusionProblem {
    wm: WeightedManifold,
    a: TensorField,
    lambda: f64,
    ellipticity: f64,
}

impl DiffusionProblem {
    /// Certifies `(ξ|aξ)_{g*} ≥ ε̲|ξ|²_{g*}` nodewise and records the largest such `ε̲`.
    pub fn new(wm: WeightedManifold, a: TensorField, lambda: f64) -> Result<Self> {
        a.same_grid(wm.rho())?;
        if a.valence() != Valence::new(1, 1) {
            return Err(Error::InvalidParameter("diffusion tensor must be a (1,1)-field".into()));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("weight exponent {lambda}")));
        }
        let sharp = contravariant(&a, wm.g())?;
        let (node, eps) = ellipticity_of(&sharp, wm.g().inv());
        if !(eps > 0.0) {
            return Err(Error::Ellipticity { node, eigenvalue: eps, bound: 0.0 });
        }
        Ok(DiffusionProblem { wm, a, lambda, ellipticity: eps })
    }

    /// As [`DiffusionProblem::new`], requiring the certified constant to reach `bound`.
    pub fn with_bound(wm: WeightedManifold, a: TensorField, lambda: f64, bound: f64) -> Result<Self> {
        let p = Self::new(wm, a, lambda)?;
        if p.ellipticity < bound {
            let sharp = contravariant(&p.a, p.wm.g())?;
            let (node, eigenvalue) = ellipticity_of(&sharp, p.wm.g().inv());
            return Err(Error::Ellipticity { node, eigenvalue, bound });
        }
        Ok(p)
    }

    pub fn manifold(&self) -> &WeightedManifold {
        &self.wm
    }

    pub fn diffusion(&self) -> &TensorField {
        &self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Certified ellipticity constant `ε̲`.
    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    /// `𝒜u = −div(a•grad u) = −(1/√g) ∂_i(√g A^{ik} ∂_k u)`, `A = g♯a`.
    pub fn apply_plain(&self, u: &ScalarField) -> Result<ScalarField> {
        let g = self.wm.g();
        let a = contravariant(&self.a, g)?;
        let sq = g.sqrt_det_field();
        let flux = a.dot(&u.partial()?)?.mul_scalar(&sq)?;
        flux.partial()?.contract(1, 1)?.mul_scalar(&sq.map(|s| -1.0 / s))
    }

    /// `ρ^{2−λ} 𝒜(ρ^λ û)`, evaluated without the coefficient form.
    pub fn apply_direct(&self, uhat: &ScalarField) -> Result<ScalarField> {
        let rho = self.wm.rho();
        let lam = self.lambda;
        let w = uhat.mul_scalar(&rho.map(|r| r.powf(lam)))?;
        self.apply_plain(&w)?.mul_scalar(&rho.map(|r| r.powf(2.0 - lam)))
    }
}

/// `A^{ik} = a^i_j g^{jk}`.
fn contravariant(a: &TensorField, g: &MetricField) -> Result<TensorField> {
    a.tensor(g.inv())?.contract(2, 1)
}

/// Desingularized operator `Â = P^{2−λ} ∘ 𝒜 ∘ P^λ` in coefficient form
/// `−Â = â₂•∇̂² + â₁•∇̂ + â₀`.
#[derive(Debug, Clone)]
pub struct CylinderOperator {
    pub a2: TensorField,
    pub a1: TensorField,
    pub a0: ScalarField,
    conn_hat: LeviCivita,
    ellipticity: f64,
}

impl CylinderOperator {
    /// Assemble the coefficients and certify `â₂•(ξ⊗ξ) ≥ ε̲|ξ|²_{ĝ*}` with the
    /// problem's `ε̲`, up to `slack`.
    pub fn new(problem: &DiffusionProblem, slack: f64) -> Result<Self> {
        let wm = problem.manifold();
        let g = wm.g();
        let lam = problem.lambda();
        let rho2 = wm.rho().map(|r| r * r);
        let a = contravariant(problem.diffusion(), g)?;
        let div_a = wm.conn().nabla(&a)?.contract(1, 1)?;
        let dl = wm.dlog_rho()?;
        let s = s_tensor(g, &dl)?;
        let c = commutator_coefficients(wm.conn_hat(), &dl.scale(lam), 2)?;
        // ∇²u = ∇̂²u − S•du and ∇^k(ρ^λ û) = ρ^λ Σ_i c_i^k • ∇̂^i û
        let a2 = a.mul_scalar(&rho2)?;
        let a1 = a
            .compose(&c[2][1])?
            .sub(&a.compose(&s.compose(&c[1][1])?)?)?
            .add(&div_a.compose(&c[1][1])?)?
            .mul_scalar(&rho2)?;
        let a0 = a
            .compose(&c[2][0])?
            .sub(&a.compose(&s.compose(&c[1][0])?)?)?
            .add(&div_a.compose(&c[1][0])?)?
            .mul_scalar(&rho2)?;
        let (node, eps) = ellipticity_of(&a2, wm.ghat().inv());
        if eps < problem.ellipticity() - slack {
            return Err(Error::Ellipticity { node, eigenvalue: eps, bound: problem.ellipticity() });
        }
        Ok(CylinderOperator { a2, a1, a0, conn_hat: wm.conn_hat().clone(), ellipticity: eps })
    }

    /// Smallest eigenvalue of `â₂` relative to `ĝ*` over the grid.
    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    /// `Â û` from the coefficients and `∇̂`.
    pub fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        let jets = self.conn_hat.jets(u, 2)?;
        let v = self.a2.dot(&jets[2])?.add(&self.a1.dot(&jets[1])?)?.add(&self.a0.mul_scalar(u)?)?;
        Ok(v.scale(-1.0))
    }

    /// Finite-difference matrix of `Â` on all nodes (no boundary rows).
    pub fn matrix(&self) -> Result<CsrMatrix> {
        let grid = self.a2.grid();
        let m = grid.dim();
        let gamma = self.conn_hat.christoffel();
        let rows = par::map_range(grid.len(), |n| {
            let a2 = self.a2.at(n);
            let a1 = self.a1.at(n);
            let gm = gamma.at(n);
            let mut row = Vec::with_capacity(9 + 3 * m);
            for i in 0..m {
                // â₂^{ii} ∂_i²
                let c = a2[i * m + i];
                let st = grid.second_stencil(n, i);
                for k in 0..3 {
                    row.push((st.idx[k], -c * st.w[k]));
                }
                for j in (i + 1)..m {
                    // mixed derivative as a product of first-derivative stencils
                    let c = a2[i * m + j] + a2[j * m + i];
                    let si = grid.first_stencil(n, i);
                    for ka in 0..3 {
                        let sj = grid.first_stencil(si.idx[ka], j);
                        for kb in 0..3 {
                            row.push((sj.idx[kb], -c * si.w[ka] * sj.w[kb]));
                        }
                    }
                }
            }
            for k in 0..m {
                // â₁^k − â₂^{ij} Γ̂^k_ij
                let mut b = a1[k];
                for i in 0..m {
                    for j in 0..m {
                        b -= a2[i * m + j] * gm[(k * m + i) * m + j];
                    }
                }
                let st = grid.first_stencil(n, k);
                for q in 0..3 {
                    row.push((st.idx[q], -b * st.w[q]));
                }
            }
            row.push((n, -self.a0.value(n)));
            row.retain(|e| e.1 != 0.0);
            row
        });
        CsrMatrix::from_rows(rows)
    }
}

/// Boundary rows of the cylinder: homogeneous Dirichlet at the outer edge
/// `s = 0`, homogeneous Neumann at `s = s_max` and at the ends of an arc base.
pub fn boundary_rows(grid: &crate::geometry::ChartGrid) -> Vec<(usize, Vec<(usize, f64)>)> {
    let m = grid.dim();
    let mut out = Vec::new();
    for n in 0..grid.len() {
        let mi = grid.multi_index(n);
        let ax0 = grid.axis(0);
        if !ax0.is_periodic() && mi[0] == 0 {
            out.push((n, vec![(n, 1.0)]));
            continue;
        }
        let neumann_axis = if !ax0.is_periodic() && mi[0] == ax0.len() - 1 {
            Some(0)
        } else if m == 2 && !grid.axis(1).is_periodic() && (mi[1] == 0 || mi[1] == grid.axis(1).len() - 1) {
            Some(1)
        } else {
            None
        };
        if let Some(a) = neumann_axis {
            let st = grid.first_stencil(n, a);
            out.push((n, (0..3).map(|k| (st.idx[k], st.w[k])).collect()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_eigenvalue_of_scaled_identity() {
        let q = [2.0, 0.0, 0.0, 2.0];
        assert!((min_generalized_eigenvalue(&[4.0, 0.0, 0.0, 6.0], &q, 2) - 2.0).abs() < 1e-15);
        // symmetric part only
        assert!((min_generalized_eigenvalue(&[1.0, 3.0, -3.0, 1.0], &[1.0, 0.0, 0.0, 1.0], 2) - 1.0).abs() < 1e-15);
        assert_eq!(min_generalized_eigenvalue(&[3.0], &[2.0], 1), 1.5);
    }
}
