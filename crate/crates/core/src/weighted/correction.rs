use crate::error::{Error, Result};
use crate::geometry::{LeviCivita, MetricField, TensorField, Valence};
use crate::weighted::WeightedManifold;

/// Largest order of the correction families.
pub const MAX_CORRECTION_ORDER: usize = 3;

/// `S^k_ij = δ^k_i ∂_j ℓ + δ^k_j ∂_i ℓ − g_ij g^{kl} ∂_l ℓ` for `ℓ = log ρ`,
/// so that `∇̂ω − ∇ω = S•ω` for 1-forms `ω`.
pub fn s_tensor(g: &MetricField, dlog: &TensorField) -> Result<TensorField> {
    dlog.same_grid(g.cov())?;
    if dlog.valence() != Valence::new(0, 1) {
        return Err(Error::InvalidParameter("S-tensor needs a 1-form d(log ρ)".into()));
    }
    let m = g.dim();
    TensorField::from_fn(g.grid(), Valence::new(1, 2), |n, out| {
        let l = dlog.at(n);
        let (gc, gi) = (g.cov().at(n), g.inv().at(n));
        for k in 0..m {
            let raised: f64 = (0..m).map(|p| gi[k * m + p] * l[p]).sum();
            for i in 0..m {
                for j in 0..m {
                    let mut v = -gc[i * m + j] * raised;
                    if k == i {
                        v += l[j];
                    }
                    if k == j {
                        v += l[i];
                    }
                    out[(k * m + i) * m + j] = v;
                }
            }
        }
    })
}

/// The coefficient `a^k ∈ T^k_{k+1}` with `(∇̂ − ∇)v = a^k•v` on `(0,k)`-tensors:
/// `S` acts on each covariant slot of `v`, with the derivative slot last.
pub fn conformal_action(s: &TensorField, k: usize) -> Result<TensorField> {
    let m = s.dim();
    let val = Valence::new(k, k + 1).check()?;
    let mk = m.pow(k as u32);
    let co = mk * m;
    let digits = |mut x: usize| {
        let mut d = vec![0usize; k];
        for p in (0..k).rev() {
            d[p] = x % m;
            x /= m;
        }
        d
    };
    TensorField::from_fn(s.grid(), val, |n, out| {
        let sv = s.at(n);
        for big_l in 0..mk {
            let ls = digits(big_l);
            for big_j in 0..mk {
                let js = digits(big_j);
                for d in 0..m {
                    let mut acc = 0.0;
                    for t in 0..k {
                        if (0..k).all(|p| p == t || ls[p] == js[p]) {
                            acc += sv[(ls[t] * m + d) * m + js[t]];
                        }
                    }
                    out[big_l * co + big_j * m + d] = acc;
                }
            }
        }
    })
}

/// Coefficients of `∇̂^k u = ∇^k u + Σ_{i<k} a_i^k•∇^i u` and of the inverse
/// expansion `∇^k u = ∇̂^k u + Σ_{i<k} b_i^k•∇̂^i u`, for `k ≤ k_max`.
#[derive(Debug, Clone)]
pub struct CorrectionFamilies {
    /// `a[k][i] = a_i^k ∈ T^i_k`.
    pub a: Vec<Vec<TensorField>>,
    /// `b[k][i] = b_i^k ∈ T^i_k`.
    pub b: Vec<Vec<TensorField>>,
}

impl CorrectionFamilies {
    /// Recursion `a_i^{k+1} = ∇a_i^k + a^k∘a_i^k + lift(a_{i−1}^k)`,
    /// `a_k^{k+1} = a^k + lift(a_{k−1}^k)`, `a_0^1 = 0`; the `b`-family by
    /// forward substitution of the unit lower-triangular system.
    pub fn new(conn: &LeviCivita, s: &TensorField, k_max: usize) -> Result<Self> {
        if k_max > MAX_CORRECTION_ORDER {
            return Err(Error::UnsupportedValence { contra: k_max, co: k_max, cap: MAX_CORRECTION_ORDER });
        }
        let grid = s.grid();
        let mut a: Vec<Vec<TensorField>> = vec![Vec::new()];
        if k_max >= 1 {
            a.push(vec![TensorField::zeros(grid, Valence::new(0, 1))?]);
        }
        for k in 1..k_max {
            let ak = conformal_action(s, k)?;
            let prev = &a[k];
            let mut next = Vec::with_capacity(k + 1);
            for i in 0..k {
                let mut t = conn.nabla(&prev[i])?.add(&ak.compose(&prev[i])?)?;
                if i >= 1 {
                    t = t.add(&prev[i - 1].lift()?)?;
                }
                next.push(t);
            }
            next.push(ak.add(&prev[k - 1].lift()?)?);
            a.push(next);
        }
        let mut b: Vec<Vec<TensorField>> = vec![Vec::new(); a.len()];
        for k in 1..a.len() {
            for l in 0..k {
                let mut t = a[k][l].scale(-1.0);
                for i in (l + 1)..k {
                    t = t.sub(&a[k][i].compose(&b[i][l])?)?;
                }
                b[k].push(t);
            }
        }
        Ok(CorrectionFamilies { a, b })
    }

    pub fn for_manifold(wm: &WeightedManifold, k_max: usize) -> Result<Self> {
        let s = s_tensor(wm.g(), &wm.dlog_rho()?)?;
        Self::new(wm.conn(), &s, k_max)
    }

    pub fn k_max(&self) -> usize {
        self.a.len() - 1
    }

    /// `[∇̂^k u]` from `[∇^k u]`.
    pub fn hat_from_plain(&self, jets: &[TensorField]) -> Result<Vec<TensorField>> {
        Self::expand(&self.a, jets)
    }

    /// `[∇^k u]` from `[∇̂^k u]`.
    pub fn plain_from_hat(&self, jets: &[TensorField]) -> Result<Vec<TensorField>> {
        Self::expand(&self.b, jets)
    }

    fn expand(c: &[Vec<TensorField>], jets: &[TensorField]) -> Result<Vec<TensorField>> {
        let kk = jets.len().min(c.len());
        (0..kk)
            .map(|k| {
                let mut t = jets[k].clone();
                for (i, ci) in c[k].iter().enumerate() {
                    t = t.add(&ci.dot(&jets[i])?)?;
                }
                Ok(t)
            })
            .collect()
    }
}

/// Coefficients `c_i^k ∈ T^i_k` with `∇̂^k(δu) = δ Σ_{i≤k} c_i^k•∇̂^i u`, where
/// `a = d(log δ)`: `c_k^k = id`, `c_i^{k+1} = ∇̂c_i^k + c_i^k ⊗ a + lift(c_{i−1}^k)`.
pub fn commutator_coefficients(conn_hat: &LeviCivita, a: &TensorField, k_max: usize) -> Result<Vec<Vec<TensorField>>> {
    let grid = a.grid();
    let mut c = vec![vec![TensorField::identity(grid, 0)?]];
    for k in 0..k_max {
        let prev = &c[k];
        let mut next = Vec::with_capacity(k + 2);
        for i in 0..=k {
            let mut t = conn_hat.nabla(&prev[i])?.add(&prev[i].tensor(a)?)?;
            if i >= 1 {
                t = t.add(&prev[i - 1].lift()?)?;
            }
            next.push(t);
        }
        next.push(TensorField::identity(grid, k + 1)?);
        c.push(next);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Axis, ChartGrid, ScalarField};
    use std::sync::Arc;

    fn grid2() -> Arc<ChartGrid> {
        Arc::new(ChartGrid::two_d(Axis::uniform(0.5, 1.5, 41).unwrap(), Axis::uniform(0.0, 1.0, 41).unwrap()).unwrap())
    }

    #[test]
    fn trivial_weight_gives_zero_tensor() {
        let grid = grid2();
        let g = MetricField::from_fn(&grid, |[x, y]| [[1.0 + x * x, 0.2 * y], [0.2 * y, 2.0]]).unwrap();
        let dlog = ScalarField::constant_scalar(&grid, 1.0).map(f64::ln).partial().unwrap();
        assert_eq!(s_tensor(&g, &dlog).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn one_dimensional_oracle() {
        let grid = Arc::new(ChartGrid::one_d(Axis::uniform(0.25, 1.0, 15001).unwrap()).unwrap());
        let g = MetricField::flat(&grid);
        let rho = ScalarField::scalar_fn(&grid, |[r, _]| r);
        let s = s_tensor(&g, &rho.map(f64::ln).partial().unwrap()).unwrap();
        let omega = TensorField::from_fn(&grid, Valence::new(0, 1), |_, o| o[0] = 1.0).unwrap();
        let so = s.dot(&omega).unwrap();
        // (S•dr)_rr = 1/r, equal to 2.0 at r = 0.5
        let n = (0..grid.len()).find(|&n| (grid.point(n)[0] - 0.5).abs() < 1e-12).unwrap();
        assert!((so.value(n) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn action_of_order_one_is_s() {
        let grid = grid2();
        let g = MetricField::from_fn(&grid, |[x, _]| [[x, 0.0], [0.0, x * x]]).unwrap();
        let rho = ScalarField::scalar_fn(&grid, |[x, y]| 0.3 + 0.2 * x * y);
        let s = s_tensor(&g, &rho.map(f64::ln).partial().unwrap()).unwrap();
        let a1 = conformal_action(&s, 1).unwrap();
        for n in [0, 100, 777] {
            for l in 0..2 {
                for j in 0..2 {
                    for d in 0..2 {
                        assert_eq!(a1.at(n)[l * 4 + j * 2 + d], s.at(n)[(l * 2 + d) * 2 + j]);
                    }
                }
            }
        }
        let fam = CorrectionFamilies::new(&LeviCivita::new(&g).unwrap(), &s, 2).unwrap();
        assert_eq!(fam.a[1][0].max_abs(), 0.0);
        assert_eq!(fam.a[2][1].sub(&a1).unwrap().max_abs(), 0.0);
    }
}
