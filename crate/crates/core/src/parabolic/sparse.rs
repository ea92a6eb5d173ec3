//! Compressed sparse rows and a Jacobi-preconditioned BiCGSTAB.

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    par::sum_range(a.len(), |i| a[i] * b[i])
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
}

impl CsrMatrix {
    /// Square matrix from per-row `(column, value)` lists; duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if c >= n {
                    return Err(Error::InvalidParameter(format!("column {c} out of range for {n} rows")));
                }
                if indices.len() > indptr[indptr.len() - 1] && indices[indices.len() - 1] == c {
                    *values.last_mut().expect("nonempty") += v;
                } else {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix { n, indptr, indices, values })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix { n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        par::map_range(self.n, |i| self.row(i).map(|(c, v)| v * x[c]).sum())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).find(|&(c, _)| c == i).map_or(0.0, |e| e.1)).collect()
    }

    /// `alpha·self + beta·other` with the union sparsity pattern.
    pub fn combine(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<CsrMatrix> {
        if self.n != other.n {
            return Err(Error::GridMismatch);
        }
        let rows = (0..self.n)
            .map(|i| {
                self.row(i)
                    .map(|(c, v)| (c, alpha * v))
                    .chain(other.row(i).map(|(c, v)| (c, beta * v)))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(rows)
    }

    /// Replace row `i` by the given entries.
    pub fn with_rows_replaced(&self, replace: &[(usize, Vec<(usize, f64)>)]) -> Result<CsrMatrix> {
        let mut rows: Vec<Vec<(usize, f64)>> = (0..self.n).map(|i| self.row(i).collect()).collect();
        for (i, r) in replace {
            rows[*i] = r.clone();
        }
        CsrMatrix::from_rows(rows)
    }

    /// Solve `self·x = b` by BiCGSTAB with Jacobi preconditioning, starting
    /// from `x` and stopping at relative residual `tol`.
    pub fn bicgstab(&self, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<SolveStats> {
        let n = self.n;
        if b.len() != n || x.len() != n {
            return Err(Error::GridMismatch);
        }
        let inv_diag: Vec<f64> = self.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
        let bnorm = norm(b);
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveStats { iterations: 0, residual: 0.0 });
        }
        let ax = self.matvec(x);
        let mut r: Vec<f64> = (0..n).map(|i| b[i] - ax[i]).collect();
        let mut res = norm(&r) / bnorm;
        if res <= tol {
            return Ok(SolveStats { iterations: 0, residual: res });
        }
        let r0 = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        for it in 1..=max_iter {
            let rho_new = dot(&r0, &r);
            if rho_new == 0.0 || !rho_new.is_finite() {
                return Err(Error::SolveFailed { iterations: it, residual: res });
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            p = par::map_range(n, |i| r[i] + beta * (p[i] - omega * v[i]));
            let phat: Vec<f64> = par::map_range(n, |i| inv_diag[i] * p[i]);
            v = self.matvec(&phat);
            alpha = rho / dot(&r0, &v);
            let s: Vec<f64> = par::map_range(n, |i| r[i] - alpha * v[i]);
            if norm(&s) / bnorm <= tol {
                x.iter_mut().zip(&phat).for_each(|(xi, pi)| *xi += alpha * pi);
                let ax = self.matvec(x);
                res = norm(&par::map_range(n, |i| b[i] - ax[i])) / bnorm;
                return Ok(SolveStats { iterations: it, residual: res });
            }
            let shat: Vec<f64> = par::map_range(n, |i| inv_diag[i] * s[i]);
            let t = self.matvec(&shat);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            x.iter_mut().enumerate().for_each(|(i, xi)| *xi += alpha * phat[i] + omega * shat[i]);
            r = par::map_range(n, |i| s[i] - omega * t[i]);
            res = norm(&r) / bnorm;
            if !res.is_finite() {
                return Err(Error::SolveFailed { iterations: it, residual: res });
            }
            if res <= tol {
                return Ok(SolveStats { iterations: it, residual: res });
            }
            if omega == 0.0 {
                return Err(Error::SolveFailed { iterations: it, residual: res });
            }
        }
        Err(Error::SolveFailed { iterations: max_iter, residual: res })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn convection(n: usize) -> CsrMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -0.8));
                }
                r
            })
            .collect();
        CsrMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_rows(vec![vec![(1, 1.0), (0, 2.0), (1, 3.0)], vec![(1, 1.0)]]).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![6.0, 1.0]);
    }

    #[test]
    fn bicgstab_solves_nonsymmetric_system() {
        let a = convection(200);
        let xs: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin()).collect();
        let b = a.matvec(&xs);
        let mut x = vec![0.0; 200];
        let st = a.bicgstab(&b, &mut x, 1e-12, 5000).unwrap();
        assert!(st.residual <= 1e-12);
        let err = x.iter().zip(&xs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = convection(10);
        let mut x = vec![1.0; 10];
        a.bicgstab(&[0.0; 10], &mut x, 1e-10, 10).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }
}
