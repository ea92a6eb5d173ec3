use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bundle_norm, integrate, LeviCivita, MetricField, ScalarField, TensorField};
use crate::par;
use crate::weighted::WeightedManifold;

/// Largest norm order.
pub const MAX_NORM_ORDER: usize = 3;

/// Integrability exponent `q ∈ [1, ∞)` or the sup-norm flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(q: f64) -> Result<Self> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::InvalidExponent(q));
        }
        Ok(Exponent::Finite(q))
    }
}

/// Order `k`, weight exponent `λ` and integrability `q` of a weighted norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub k: usize,
    pub lambda: f64,
    pub q: Exponent,
}

impl NormSpec {
    pub fn new(k: usize, lambda: f64, q: f64) -> Result<Self> {
        Self::with_exponent(k, lambda, Exponent::finite(q)?)
    }

    /// `BC^{k,λ}`.
    pub fn bc(k: usize, lambda: f64) -> Result<Self> {
        Self::with_exponent(k, lambda, Exponent::Infinity)
    }

    pub fn with_exponent(k: usize, lambda: f64, q: Exponent) -> Result<Self> {
        if k > MAX_NORM_ORDER {
            return Err(Error::InvalidParameter(format!("norm order {k} exceeds {MAX_NORM_ORDER}")));
        }
        if let Exponent::Finite(v) = q {
            Exponent::finite(v)?;
        }
        Ok(NormSpec { k, lambda, q })
    }
}

/// `[|∇^i u|_{g_0^i}]_{i ≤ k}` nodewise.
pub fn pointwise_jets(u: &ScalarField, conn: &LeviCivita, k: usize) -> Result<Vec<ScalarField>> {
    conn.jets(u, k)?.iter().map(|j| bundle_norm(j, conn.metric())).collect()
}

/// Norms of precomputed jets.
pub fn jet_norms(jets: &[TensorField], g: &MetricField) -> Result<Vec<ScalarField>> {
    jets.iter().map(|j| bundle_norm(j, g)).collect()
}

/// `Σ_i ‖ρ^{−λ+i−m/q} p_i‖_{L_q(M)}`, or `Σ_i max ρ^{−λ+i} p_i` for `q = ∞`,
/// given pointwise jet norms `p_i = |∇^i u|_{g_0^i}`.
pub fn weighted_from_pointwise(pw: &[ScalarField], wm: &WeightedManifold, lambda: f64, q: Exponent) -> Result<f64> {
    let m = wm.dim() as f64;
    let rho = wm.rho();
    let mut total = 0.0;
    for (i, p) in pw.iter().enumerate() {
        total += match q {
            Exponent::Finite(q) => {
                let e = -lambda + i as f64 - m / q;
                let w = ScalarField::from_data(
                    p.grid(),
                    p.valence(),
                    par::map_range(p.grid().len(), |n| rho.value(n).powf(e) * p.value(n)),
                )?;
                integrate(&w, wm.g(), q)?
            }
            Exponent::Infinity => {
                let e = -lambda + i as f64;
                par::max_range(p.grid().len(), |n| rho.value(n).powf(e) * p.value(n))
            }
        };
    }
    Ok(total)
}

/// Weighted Sobolev norm `‖u‖_{W_q^{k,λ}(M;ρ)}`, or `‖u‖_{BC^{k,λ}(M;ρ)}`.
pub fn weighted_sobolev_norm(u: &ScalarField, wm: &WeightedManifold, spec: &NormSpec) -> Result<f64> {
    let pw = pointwise_jets(u, wm.conn(), spec.k)?;
    weighted_from_pointwise(&pw, wm, spec.lambda, spec.q)
}

/// `Σ_i ‖p_i‖_{L_q(M̂)}` for pointwise norms `p_i = |∇̂^i u|_{ĝ_0^i}`.
pub fn hat_from_pointwise(pw: &[ScalarField], wm: &WeightedManifold, q: Exponent) -> Result<f64> {
    pw.iter()
        .map(|p| match q {
            Exponent::Finite(q) => integrate(p, wm.ghat(), q),
            Exponent::Infinity => Ok(p.max_abs()),
        })
        .sum()
}

/// Unweighted norm `‖u‖_{W_q^k(M̂)}` in the regularized metric.
pub fn hat_sobolev_norm(u: &ScalarField, wm: &WeightedManifold, k: usize, q: Exponent) -> Result<f64> {
    let pw = pointwise_jets(u, wm.conn_hat(), k)?;
    hat_from_pointwise(&pw, wm, q)
}

/// `P^λ u = ρ^λ u`.
pub fn weight_map(u: &ScalarField, lambda: f64, rho: &ScalarField) -> Result<ScalarField> {
    u.same_grid(rho)?;
    if let Some((node, &value)) = rho.values().iter().enumerate().find(|(_, &r)| !(r > 0.0)) {
        return Err(Error::NonPositiveWeight { node, value });
    }
    if lambda == 0.0 {
        return Ok(u.clone());
    }
    ScalarField::from_data(u.grid(), u.valence(), par::map_range(u.grid().len(), |n| rho.value(n).powf(lambda) * u.value(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Axis, ChartGrid};
    use std::sync::Arc;

    #[test]
    fn rejects_bad_exponent() {
        assert!(NormSpec::new(1, 0.0, 0.5).is_err());
        assert!(NormSpec::new(4, 0.0, 2.0).is_err());
    }

    #[test]
    fn weight_map_inverts() {
        let grid = Arc::new(ChartGrid::one_d(Axis::uniform(0.1, 1.0, 11).unwrap()).unwrap());
        let rho = ScalarField::scalar_fn(&grid, |[r, _]| r);
        let u = ScalarField::scalar_fn(&grid, |[r, _]| (3.0 * r).sin());
        let back = weight_map(&weight_map(&u, 1.7, &rho).unwrap(), -1.7, &rho).unwrap();
        assert!(back.sub(&u).unwrap().max_abs() < 1e-15);
        assert_eq!(weight_map(&u, 0.0, &rho).unwrap(), u);
    }

    #[test]
    fn unit_weight_is_classical() {
        let grid = Arc::new(ChartGrid::one_d(Axis::uniform(0.0, 1.0, 201).unwrap()).unwrap());
        let g = MetricField::flat(&grid);
        let wm = WeightedManifold::new(g.clone(), ScalarField::constant_scalar(&grid, 1.0)).unwrap();
        let u = ScalarField::scalar_fn(&grid, |[x, _]| x * x);
        let w = weighted_sobolev_norm(&u, &wm, &NormSpec::new(1, 0.0, 2.0).unwrap()).unwrap();
        let du = ScalarField::scalar_fn(&grid, |[x, _]| 2.0 * x);
        let expected = integrate(&u, &g, 2.0).unwrap() + integrate(&du, &g, 2.0).unwrap();
        assert!((w - expected).abs() < 1e-3);
        assert!((hat_sobolev_norm(&u, &wm, 1, Exponent::Finite(2.0)).unwrap() - w).abs() < 1e-14);
    }
}
