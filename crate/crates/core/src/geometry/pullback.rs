use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::grid::{Axis, ChartGrid};
use crate::geometry::metric::MetricField;
use crate::geometry::tensor::{TensorField, Valence};

/// Smooth map between chart domains with an analytic Jacobian.
pub trait ChartMap: Sync + Send {
    /// Image of a source point.
    fn apply(&self, x: [f64; 2]) -> [f64; 2];
    /// `J[k][i] = ∂F^k/∂x^i` at a source point.
    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2];
}

/// The identity map.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl ChartMap for IdentityMap {
    fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        x
    }
    fn jacobian(&self, _: [f64; 2]) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [0.0, 1.0]]
    }
}

/// Composition `outer ∘ inner`.
pub struct Composed<'a> {
    pub outer: &'a dyn ChartMap,
    pub inner: &'a dyn ChartMap,
}

impl ChartMap for Composed<'_> {
    fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        self.outer.apply(self.inner.apply(x))
    }
    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let a = self.outer.jacobian(self.inner.apply(x));
        let b = self.inner.jacobian(x);
        let mut j = [[0.0; 2]; 2];
        for (k, row) in j.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v = a[k][0] * b[0][i] + a[k][1] * b[1][i];
            }
        }
        j
    }
}

/// Cubic Lagrange weights on the four nodes bracketing `x`.
fn cubic_weights(ax: &Axis, x: f64) -> ([usize; 4], [f64; 4]) {
    let n = ax.len();
    let c = ax.coords();
    if ax.is_periodic() {
        let h = ax.spacing();
        let p = ax.period().unwrap_or(h * n as f64);
        let rel = (x - c[0]).rem_euclid(p) / h;
        let i = rel.floor() as isize;
        let f = rel - i as f64;
        let idx = [i - 1, i, i + 1, i + 2].map(|k| k.rem_euclid(n as isize) as usize);
        let xs = [-1.0, 0.0, 1.0, 2.0];
        return (idx, lagrange(&xs, f));
    }
    let i = match c.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    let start = i.saturating_sub(1).min(n - 4);
    let idx = [start, start + 1, start + 2, start + 3];
    let xs = idx.map(|k| c[k]);
    // exact hit: return a delta so grid-coincident samples are reproduced bitwise
    if let Some(p) = xs.iter().position(|&v| v == x) {
        let mut w = [0.0; 4];
        w[p] = 1.0;
        return (idx, w);
    }
    (idx, lagrange(&xs, x))
}

fn lagrange(xs: &[f64; 4], x: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for (i, wi) in w.iter_mut().enumerate() {
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                *wi *= (x - xj) / (xs[i] - xj);
            }
        }
    }
    w
}

/// Evaluate all components of `a` at an arbitrary chart point by
/// (bi)cubic interpolation.
pub fn interpolate(a: &TensorField, y: [f64; 2], out: &mut [f64]) {
    let grid = a.grid();
    out.iter_mut().for_each(|v| *v = 0.0);
    let (i0, w0) = cubic_weights(grid.axis(0), y[0]);
    if grid.dim() == 1 {
        for (k, w) in i0.iter().zip(w0) {
            for (o, v) in out.iter_mut().zip(a.at(*k)) {
                *o += w * v;
            }
        }
        return;
    }
    let (i1, w1) = cubic_weights(grid.axis(1), y[1]);
    for (ka, wa) in i0.iter().zip(w0) {
        for (kb, wb) in i1.iter().zip(w1) {
            let w = wa * wb;
            if w != 0.0 {
                for (o, v) in out.iter_mut().zip(a.at(grid.node(*ka, *kb))) {
                    *o += w * v;
                }
            }
        }
    }
}

fn invert(j: [[f64; 2]; 2], m: usize) -> Option<[[f64; 2]; 2]> {
    if m == 1 {
        return (j[0][0] != 0.0 && j[0][0].is_finite()).then(|| [[1.0 / j[0][0], 0.0], [0.0, 0.0]]);
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    (det != 0.0 && det.is_finite())
        .then(|| [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]])
}

/// Pull back a field on the target grid along `map`, sampling at the nodes
/// of `source`.
///
/// Covariant slots transform with the Jacobian, contravariant slots with its
/// inverse (the pull-back of vector fields is the push-forward by `F^{-1}`).
pub fn pullback(map: &dyn ChartMap, a: &TensorField, source: &Arc<ChartGrid>) -> Result<TensorField> {
    let m = a.dim();
    if source.dim() != m {
        return Err(Error::InvalidParameter("source and target dimensions differ".into()));
    }
    let v = a.valence();
    let r = v.rank();
    let nc = a.ncomp();
    // detect singular Jacobians up front to report the node
    for node in 0..source.len() {
        if invert(map.jacobian(source.point(node)), m).is_none() {
            return Err(Error::SingularJacobian { node });
        }
    }
    TensorField::from_fn(source, v, |node, out| {
        let x = source.point(node);
        let jac = map.jacobian(x);
        let jinv = invert(jac, m).unwrap_or([[0.0; 2]; 2]);
        let mut y = vec![0.0; nc];
        interpolate(a, map.apply(x), &mut y);
        let mut tmp = vec![0.0; nc];
        for p in 0..r {
            let st = m.pow((r - 1 - p) as u32);
            tmp.copy_from_slice(&y);
            for (c, yc) in y.iter_mut().enumerate() {
                let digit = (c / st) % m;
                let base = c - digit * st;
                *yc = (0..m)
                    .map(|b| {
                        // covariant: Σ_k a_k J[k][i]; contravariant: Σ_k Jinv[i][k] a^k
                        let coef = if p < v.contra { jinv[digit][b] } else { jac[b][digit] };
                        coef * tmp[base + b * st]
                    })
                    .sum();
            }
        }
        out.copy_from_slice(&y);
    })
}

/// Pull back a metric.
pub fn pullback_metric(map: &dyn ChartMap, g: &MetricField, source: &Arc<ChartGrid>) -> Result<MetricField> {
    MetricField::new(pullback(map, g.cov(), source)?)
}

/// Scalar pull-back is composition; kept as a named entry point.
pub fn compose_scalar(map: &dyn ChartMap, u: &TensorField, source: &Arc<ChartGrid>) -> Result<TensorField> {
    if u.valence() != Valence::SCALAR {
        return Err(Error::InvalidParameter("compose_scalar expects a scalar field".into()));
    }
    pullback(map, u, source)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Shear;
    impl ChartMap for Shear {
        fn apply(&self, x: [f64; 2]) -> [f64; 2] {
            [x[0] + 0.1 * x[1], 0.5 * x[1] + 0.2]
        }
        fn jacobian(&self, _: [f64; 2]) -> [[f64; 2]; 2] {
            [[1.0, 0.1], [0.0, 0.5]]
        }
    }

    struct Collapse;
    impl ChartMap for Collapse {
        fn apply(&self, x: [f64; 2]) -> [f64; 2] {
            [x[0], 0.0]
        }
        fn jacobian(&self, _: [f64; 2]) -> [[f64; 2]; 2] {
            [[1.0, 0.0], [0.0, 0.0]]
        }
    }

    fn grid() -> Arc<ChartGrid> {
        Arc::new(ChartGrid::two_d(Axis::uniform(-1.0, 2.0, 31).unwrap(), Axis::uniform(-1.0, 2.0, 31).unwrap()).unwrap())
    }

    #[test]
    fn identity_pullback_is_identity() {
        let g = grid();
        let a = TensorField::from_fn(&g, Valence::new(1, 1), |n, c| {
            for (i, v) in c.iter_mut().enumerate() {
                *v = (n * 7 + i) as f64;
            }
        })
        .unwrap();
        assert_eq!(pullback(&IdentityMap, &a, &g).unwrap(), a);
    }

    #[test]
    fn composition_law() {
        let g = grid();
        let src = Arc::new(ChartGrid::two_d(Axis::uniform(0.0, 0.5, 6).unwrap(), Axis::uniform(0.0, 0.5, 6).unwrap()).unwrap());
        // quadratic 1-form, reproduced exactly by cubic interpolation
        let w = TensorField::from_fn(&g, Valence::new(0, 1), |n, c| {
            let [x, y] = g.point(n);
            c[0] = x * y + 1.0;
            c[1] = x * x - y;
        })
        .unwrap();
        let fg = Composed { outer: &Shear, inner: &Shear };
        let direct = pullback(&fg, &w, &src).unwrap();
        let mid = pullback(&Shear, &w, &g).unwrap();
        let twice = pullback(&Shear, &mid, &src).unwrap();
        assert!(direct.sub(&twice).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn singular_jacobian_reported() {
        let g = grid();
        let u = TensorField::constant_scalar(&g, 1.0);
        assert!(matches!(pullback(&Collapse, &u, &g), Err(Error::SingularJacobian { node: 0 })));
    }
}
