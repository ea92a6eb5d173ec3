use crate::error::{Error, Result};
use crate::geometry::metric::MetricField;
use crate::geometry::tensor::{ScalarField, TensorField, Valence, MAX_RANK};
use crate::par;

/// Christoffel symbols `Γ^k_ij` of the Levi-Civita connection as a
/// `(1,2)`-field with slots `[k][i][j]`.
pub fn christoffel(g: &MetricField) -> Result<TensorField> {
    let m = g.dim();
    let dg = g.cov().partial()?; // slots [i][j][d] = ∂_d g_ij
    let inv = g.inv();
    let gamma = TensorField::from_fn(g.grid(), Valence::new(1, 2), |n, out| {
        let d = dg.at(n);
        let gi = inv.at(n);
        let dgc = |i: usize, j: usize, k: usize| d[(i * m + j) * m + k];
        for k in 0..m {
            for i in 0..m {
                for j in i..m {
                    let mut acc = 0.0;
                    for l in 0..m {
                        acc += gi[k * m + l] * (dgc(j, l, i) + dgc(i, l, j) - dgc(i, j, l));
                    }
                    out[(k * m + i) * m + j] = 0.5 * acc;
                    out[(k * m + j) * m + i] = 0.5 * acc;
                }
            }
        }
    })?;
    Ok(gamma)
}

/// Levi-Civita connection with cached Christoffel symbols.
#[derive(Debug, Clone)]
pub struct LeviCivita {
    metric: MetricField,
    gamma: TensorField,
}

impl LeviCivita {
    pub fn new(metric: &MetricField) -> Result<Self> {
        Ok(LeviCivita { gamma: christoffel(metric)?, metric: metric.clone() })
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn christoffel(&self) -> &TensorField {
        &self.gamma
    }

    /// `∇a` for a `(σ,τ)`-field; the derivative slot is appended last.
    pub fn nabla(&self, a: &TensorField) -> Result<TensorField> {
        a.same_grid(&self.gamma)?;
        let v = a.valence();
        if v.rank() + 1 > MAX_RANK {
            return Err(Error::UnsupportedValence { contra: v.contra, co: v.co + 1, cap: MAX_RANK });
        }
        let m = a.dim();
        let r = v.rank();
        let mut out = a.partial()?;
        let nc = a.ncomp();
        let gamma = &self.gamma;
        let strides: Vec<usize> = (0..r).map(|s| m.pow((r - 1 - s) as u32)).collect();
        par::fill_chunks(out.data_mut(), nc * m, |n, o| {
            let x = a.at(n);
            let gm = gamma.at(n);
            let g = |k: usize, i: usize, j: usize| gm[(k * m + i) * m + j];
            for c in 0..nc {
                for d in 0..m {
                    let mut acc = 0.0;
                    for (s, &st) in strides.iter().enumerate() {
                        let digit = (c / st) % m;
                        let base = c - digit * st;
                        for l in 0..m {
                            let xl = x[base + l * st];
                            if s < v.contra {
                                acc += g(digit, d, l) * xl;
                            } else {
                                acc -= g(l, d, digit) * xl;
                            }
                        }
                    }
                    o[c * m + d] += acc;
                }
            }
        });
        Ok(out)
    }

    /// `∇^k a`.
    pub fn nabla_k(&self, a: &TensorField, k: usize) -> Result<TensorField> {
        let mut t = a.clone();
        for _ in 0..k {
            t = self.nabla(&t)?;
        }
        Ok(t)
    }

    /// `[u, ∇u, …, ∇^k u]`.
    pub fn jets(&self, u: &TensorField, k: usize) -> Result<Vec<TensorField>> {
        let mut out = Vec::with_capacity(k + 1);
        out.push(u.clone());
        for i in 0..k {
            let next = self.nabla(&out[i])?;
            out.push(next);
        }
        Ok(out)
    }
}

/// `∇a` computed from a fresh set of Christoffel symbols.
pub fn covariant_derivative(a: &TensorField, g: &MetricField) -> Result<TensorField> {
    LeviCivita::new(g)?.nabla(a)
}

/// Apply a per-node `m×m` matrix to slot `p` of a component block.
fn apply_slot(x: &mut [f64], tmp: &mut [f64], mat: &[f64], m: usize, r: usize, p: usize) {
    let st = m.pow((r - 1 - p) as u32);
    tmp.copy_from_slice(x);
    for (c, xc) in x.iter_mut().enumerate() {
        let digit = (c / st) % m;
        let base = c - digit * st;
        *xc = (0..m).map(|b| mat[digit * m + b] * tmp[base + b * st]).sum();
    }
}

/// Pointwise bundle norm `|a|_{g^τ_σ}`.
pub fn bundle_norm(a: &TensorField, g: &MetricField) -> Result<ScalarField> {
    a.same_grid(g.cov())?;
    let v = a.valence();
    let m = a.dim();
    let r = v.rank();
    let nc = a.ncomp();
    TensorField::from_fn(a.grid(), Valence::SCALAR, |n, out| {
        let x = a.at(n);
        let mut y = x.to_vec();
        let mut tmp = vec![0.0; nc];
        for p in 0..r {
            let mat = if p < v.contra { g.cov().at(n) } else { g.inv().at(n) };
            apply_slot(&mut y, &mut tmp, mat, m, r, p);
        }
        let s: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        out[0] = s.max(0.0).sqrt();
    })
}

/// `(∫ |u|^q dV_g)^{1/q}` by trapezoidal quadrature with the `√g` density.
pub fn integrate(u: &ScalarField, g: &MetricField, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    u.same_grid(g.cov())?;
    if u.rank() != 0 {
        return Err(Error::InvalidParameter("integrand must be scalar".into()));
    }
    let grid = g.grid();
    let s = par::sum_range(grid.len(), |n| u.value(n).abs().powf(q) * g.sqrt_det(n) * grid.cell_measure(n));
    Ok(s.powf(1.0 / q))
}

/// Signed integral `∫ u dV_g`.
pub fn integral(u: &ScalarField, g: &MetricField) -> Result<f64> {
    u.same_grid(g.cov())?;
    let grid = g.grid();
    Ok(par::sum_range(grid.len(), |n| u.value(n) * g.sqrt_det(n) * grid.cell_measure(n)))
}

/// Laplace-Beltrami operator `Δu = g*•∇²u`.
pub fn laplace_beltrami(u: &ScalarField, conn: &LeviCivita) -> Result<ScalarField> {
    let h = conn.nabla_k(u, 2)?;
    conn.metric().inv().tensor(&h)?.contract(1, 1)?.contract(1, 1)
}

/// Divergence-form Laplacian `(1/√g) ∂_i(√g g^ij ∂_j u)`, used as a cross-check.
pub fn laplace_divergence_form(u: &ScalarField, g: &MetricField) -> Result<ScalarField> {
    let du = u.partial()?;
    let flux = g.inv().dot(&du)?.mul_scalar(&g.sqrt_det_field())?;
    let div = flux.partial()?.contract(1, 1)?;
    div.mul_scalar(&g.sqrt_det_field().map(|s| 1.0 / s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::{Axis, ChartGrid};
    use std::f64::consts::{PI, TAU};
    use std::sync::Arc;

    fn cone(nt: usize, nth: usize, t0: f64) -> (Arc<ChartGrid>, MetricField) {
        let grid = Arc::new(ChartGrid::two_d(Axis::uniform(t0, 1.0, nt).unwrap(), Axis::periodic(0.0, TAU, nth).unwrap()).unwrap());
        let g = MetricField::from_fn(&grid, |[t, _]| [[1.0, 0.0], [0.0, t * t]]).unwrap();
        (grid, g)
    }

    #[test]
    fn flat_metric_has_zero_symbols() {
        let grid = Arc::new(ChartGrid::two_d(Axis::uniform(0.0, 1.0, 6).unwrap(), Axis::uniform(0.0, 2.0, 7).unwrap()).unwrap());
        let g = MetricField::flat(&grid);
        assert!(christoffel(&g).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn cone_symbols_match_closed_form() {
        let (grid, g) = cone(46, 8, 0.1);
        let gam = christoffel(&g).unwrap();
        for n in 0..grid.len() {
            let t = grid.point(n)[0];
            assert!((gam.component(n, &[0, 1, 1]) + t).abs() < 1e-6);
            assert!((gam.component(n, &[1, 0, 1]) - 1.0 / t).abs() < 1e-6);
            assert_eq!(gam.component(n, &[1, 0, 1]), gam.component(n, &[1, 1, 0]));
        }
    }

    #[test]
    fn log_metric_symbol() {
        let grid = Arc::new(ChartGrid::one_d(Axis::uniform(0.5, 1.0, 4001).unwrap()).unwrap());
        let g = MetricField::from_fn(&grid, |[r, _]| [[1.0 / (r * r), 0.0], [0.0, 0.0]]).unwrap();
        let gam = christoffel(&g).unwrap();
        for n in 0..grid.len() {
            let r = grid.point(n)[0];
            assert!((gam.value(n) + 1.0 / r).abs() < 1e-6, "{} at {r}", gam.value(n));
        }
    }

    #[test]
    fn hessian_on_cone() {
        let (grid, g) = cone(60, 8, 0.1);
        let conn = LeviCivita::new(&g).unwrap();
        let u = ScalarField::scalar_fn(&grid, |[t, _]| t * t);
        let h = conn.nabla_k(&u, 2).unwrap();
        for n in 0..grid.len() {
            let t = grid.point(n)[0];
            assert!((h.component(n, &[1, 1]) - 2.0 * t * t).abs() < 1e-5);
            assert!((h.component(n, &[0, 0]) - 2.0).abs() < 1e-8);
        }
        let c = ScalarField::constant_scalar(&grid, 3.0);
        assert!(conn.nabla(&c).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn norms_of_metric_objects() {
        let (grid, g) = cone(20, 8, 0.1);
        let n = bundle_norm(g.inv(), &g).unwrap();
        assert!(n.values().iter().all(|v| (v - 2f64.sqrt()).abs() < 1e-12));
        let dt = TensorField::from_fn(&grid, Valence::new(0, 1), |_, c| c[0] = 1.0).unwrap();
        assert!(bundle_norm(&dt, &g).unwrap().values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let z = TensorField::zeros(&grid, Valence::new(1, 1)).unwrap();
        assert_eq!(bundle_norm(&z, &g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn cone_area_is_pi() {
        let (grid, g) = cone(201, 16, 1e-9);
        let one = ScalarField::constant_scalar(&grid, 1.0);
        assert!((integrate(&one, &g, 1.0).unwrap() - PI).abs() < 1e-6);
        assert!(matches!(integrate(&one, &g, 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn laplacians_agree_on_cone() {
        let (grid, g) = cone(81, 16, 0.1);
        let conn = LeviCivita::new(&g).unwrap();
        let u = ScalarField::scalar_fn(&grid, |[t, _]| t * t);
        let a = laplace_beltrami(&u, &conn).unwrap();
        let b = laplace_divergence_form(&u, &g).unwrap();
        for n in 0..grid.len() {
            assert!((a.value(n) - 4.0).abs() < 1e-5);
            assert!((b.value(n) - 4.0).abs() < 1e-5);
        }
    }
}
