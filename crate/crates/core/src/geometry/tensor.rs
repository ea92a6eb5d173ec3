use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::grid::ChartGrid;
use crate::par;

/// Largest total rank `σ + τ` a field may carry.
///
/// The correction families `a_i^k` for `k = 3` need rank 5; one spare slot
/// keeps `∇` of those representable.
pub const MAX_RANK: usize = 6;

/// Tensor type `(σ, τ)`: `σ` contravariant and `τ` covariant slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Valence {
    pub contra: usize,
    pub co: usize,
}

impl Valence {
    pub const SCALAR: Valence = Valence { contra: 0, co: 0 };

    pub const fn new(contra: usize, co: usize) -> Self {
        Valence { contra, co }
    }

    pub const fn rank(self) -> usize {
        self.contra + self.co
    }

    pub(crate) fn check(self) -> Result<Self> {
        if self.rank() > MAX_RANK {
            Err(Error::UnsupportedValence { contra: self.contra, co: self.co, cap: MAX_RANK })
        } else {
            Ok(self)
        }
    }
}

/// Coordinate representation of a `(σ, τ)`-tensor field on a chart grid.
///
/// Components are stored node-major. Within a node, the flat component index
/// is the multi-index `(i_1..i_σ, j_1..j_τ)` read as a base-`m` number with the
/// first contravariant slot most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: Arc<ChartGrid>,
    valence: Valence,
    ncomp: usize,
    data: Vec<f64>,
}

/// Scalar fields are `(0,0)`-tensors.
pub type ScalarField = TensorField;

impl TensorField {
    pub fn zeros(grid: &Arc<ChartGrid>, valence: Valence) -> Result<Self> {
        let valence = valence.check()?;
        let ncomp = grid.dim().pow(valence.rank() as u32);
        Ok(TensorField { grid: Arc::clone(grid), valence, ncomp, data: vec![0.0; ncomp * grid.len()] })
    }

    /// Build a field from `f(node, components)`, evaluated in parallel.
    pub fn from_fn<F>(grid: &Arc<ChartGrid>, valence: Valence, f: F) -> Result<Self>
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let mut t = Self::zeros(grid, valence)?;
        let nc = t.ncomp;
        par::fill_chunks(&mut t.data, nc, f);
        Ok(t)
    }

    /// Scalar field from a function of the chart coordinates.
    pub fn scalar_fn<F>(grid: &Arc<ChartGrid>, f: F) -> Self
    where
        F: Fn([f64; 2]) -> f64 + Sync + Send,
    {
        let g = Arc::clone(grid);
        Self::from_fn(grid, Valence::SCALAR, move |n, c| c[0] = f(g.point(n))).expect("rank 0")
    }

    pub fn from_data(grid: &Arc<ChartGrid>, valence: Valence, data: Vec<f64>) -> Result<Self> {
        let t = Self::zeros(grid, valence)?;
        if data.len() != t.data.len() {
            return Err(Error::InvalidParameter(format!(
                "component array has length {}, expected {}",
                data.len(),
                t.data.len()
            )));
        }
        Ok(TensorField { data, ..t })
    }

    pub fn constant_scalar(grid: &Arc<ChartGrid>, value: f64) -> Self {
        TensorField { grid: Arc::clone(grid), valence: Valence::SCALAR, ncomp: 1, data: vec![value; grid.len()] }
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn rank(&self) -> usize {
        self.valence.rank()
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn at(&self, node: usize) -> &[f64] {
        &self.data[node * self.ncomp..(node + 1) * self.ncomp]
    }

    /// Value of a scalar field at a node.
    #[inline]
    pub fn value(&self, node: usize) -> f64 {
        self.data[node * self.ncomp]
    }

    /// Flat component index of a multi-index.
    pub fn comp_index(&self, slots: &[usize]) -> usize {
        debug_assert_eq!(slots.len(), self.rank());
        slots.iter().fold(0, |acc, &s| acc * self.dim() + s)
    }

    pub fn component(&self, node: usize, slots: &[usize]) -> f64 {
        self.at(node)[self.comp_index(slots)]
    }

    pub fn same_grid(&self, other: &TensorField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn same_shape(&self, other: &TensorField) -> Result<()> {
        self.same_grid(other)?;
        if self.valence != other.valence {
            return Err(Error::InvalidParameter(format!(
                "valence mismatch {:?} vs {:?}",
                self.valence, other.valence
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> TensorField {
        let mut out = self.clone();
        par::fill_chunks(&mut out.data, self.ncomp, |n, c| {
            for (o, v) in c.iter_mut().zip(self.at(n)) {
                *o = f(*v);
            }
        });
        out
    }

    pub fn scale(&self, s: f64) -> TensorField {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.axpy(-1.0, other)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &TensorField) -> Result<TensorField> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += s * b);
        Ok(out)
    }

    /// Nodewise multiplication by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Result<TensorField> {
        self.same_grid(s)?;
        if s.rank() != 0 {
            return Err(Error::InvalidParameter("multiplier must be a scalar field".into()));
        }
        let mut out = self.clone();
        par::fill_chunks(&mut out.data, self.ncomp, |n, c| {
            let f = s.value(n);
            c.iter_mut().for_each(|v| *v *= f);
        });
        Ok(out)
    }

    /// Maximum absolute component over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Partial derivatives with the derivative slot appended last: `(σ, τ+1)`.
    pub fn partial(&self) -> Result<TensorField> {
        let m = self.dim();
        let out_val = Valence::new(self.valence.contra, self.valence.co + 1).check()?;
        let nc = self.ncomp;
        let grid = Arc::clone(&self.grid);
        TensorField::from_fn(&self.grid, out_val, |node, out| {
            for d in 0..m {
                let st = grid.first_stencil(node, d);
                for c in 0..nc {
                    out[c * m + d] = st.apply(|k| self.data[k * nc + c]);
                }
            }
        })
    }

    /// Tensor product `self ⊗ other`, slot order: contravariant slots of
    /// `self` then `other`, covariant slots of `self` then `other`.
    pub fn tensor(&self, other: &TensorField) -> Result<TensorField> {
        self.same_grid(other)?;
        let m = self.dim();
        let (a, b) = (self.valence, other.valence);
        let val = Valence::new(a.contra + b.contra, a.co + b.co).check()?;
        let pa = m.pow(a.co as u32);
        let pb = m.pow(b.co as u32);
        let qa = m.pow(a.contra as u32);
        let qb = m.pow(b.contra as u32);
        TensorField::from_fn(&self.grid, val, |n, out| {
            let (x, y) = (self.at(n), other.at(n));
            for ia in 0..qa {
                for ib in 0..qb {
                    for ja in 0..pa {
                        for jb in 0..pb {
                            let o = ((ia * qb + ib) * pa + ja) * pb + jb;
                            out[o] = x[ia * pa + ja] * y[ib * pb + jb];
                        }
                    }
                }
            }
        })
    }

    /// Contraction `C^s_t` of contravariant slot `s` with covariant slot `t`
    /// (both 1-based).
    pub fn contract(&self, s: usize, t: usize) -> Result<TensorField> {
        let v = self.valence;
        if s == 0 || s > v.contra || t == 0 || t > v.co {
            return Err(Error::PositionOutOfRange(format!("C^{s}_{t} on valence ({},{})", v.contra, v.co)));
        }
        let m = self.dim();
        let r = v.rank();
        let val = Valence::new(v.contra - 1, v.co - 1);
        let sp = s - 1;
        let tp = v.contra + t - 1;
        let out_rank = r - 2;
        TensorField::from_fn(&self.grid, val, |n, out| {
            let x = self.at(n);
            let mut slots = vec![0usize; r];
            for (o, val) in out.iter_mut().enumerate() {
                // decode output multi-index into the free slots
                let mut rem = o;
                let mut free = vec![0usize; out_rank];
                for f in (0..out_rank).rev() {
                    free[f] = rem % m;
                    rem /= m;
                }
                let mut fi = 0;
                for (p, slot) in slots.iter_mut().enumerate() {
                    if p != sp && p != tp {
                        *slot = free[fi];
                        fi += 1;
                    }
                }
                let mut acc = 0.0;
                for k in 0..m {
                    slots[sp] = k;
                    slots[tp] = k;
                    acc += x[slots.iter().fold(0, |a, &q| a * m + q)];
                }
                *val = acc;
            }
        })
    }

    /// Complete contraction `a•b` of a `(σ,τ)`-field with a `(0,ρ)`-field:
    /// the trailing `ρ` contravariant slots of `a` are summed against all
    /// slots of `b`, giving a `(σ-ρ, τ)`-field.
    pub fn dot(&self, b: &TensorField) -> Result<TensorField> {
        self.same_grid(b)?;
        let (va, vb) = (self.valence, b.valence);
        if vb.contra != 0 {
            return Err(Error::InvalidParameter("complete contraction needs a covariant right factor".into()));
        }
        if vb.co > va.contra {
            return Err(Error::PositionOutOfRange(format!(
                "cannot contract {} slots against {} contravariant slots",
                vb.co, va.contra
            )));
        }
        let m = self.dim();
        let lead = m.pow((va.contra - vb.co) as u32);
        let k = m.pow(vb.co as u32);
        let co = m.pow(va.co as u32);
        TensorField::from_fn(&self.grid, Valence::new(va.contra - vb.co, va.co), |n, out| {
            let (x, y) = (self.at(n), b.at(n));
            for l in 0..lead {
                for j in 0..co {
                    let mut acc = 0.0;
                    for kk in 0..k {
                        acc += x[(l * k + kk) * co + j] * y[kk];
                    }
                    out[l * co + j] = acc;
                }
            }
        })
    }

    /// Composition of coefficient fields: for `a ∈ T^k_p` and `b ∈ T^i_k`
    /// returns `c ∈ T^i_p` with `c•v = a•(b•v)` for every `v ∈ T^0_i`.
    pub fn compose(&self, b: &TensorField) -> Result<TensorField> {
        self.same_grid(b)?;
        let (va, vb) = (self.valence, b.valence);
        if va.contra != vb.co {
            return Err(Error::InvalidParameter(format!(
                "compose: {} contravariant vs {} covariant slots",
                va.contra, vb.co
            )));
        }
        let m = self.dim();
        let kk = m.pow(va.contra as u32);
        let p = m.pow(va.co as u32);
        let i = m.pow(vb.contra as u32);
        TensorField::from_fn(&self.grid, Valence::new(vb.contra, va.co), |n, out| {
            let (x, y) = (self.at(n), b.at(n));
            for l in 0..i {
                for q in 0..p {
                    let mut acc = 0.0;
                    for j in 0..kk {
                        acc += x[j * p + q] * y[l * kk + j];
                    }
                    out[l * p + q] = acc;
                }
            }
        })
    }

    /// `a ⊗ δ` arranged so that `lift(a)•∇v = (a•v)` with the derivative slot
    /// carried through: for `a ∈ T^i_k` the result lies in `T^{i+1}_{k+1}`.
    pub fn lift(&self) -> Result<TensorField> {
        let v = self.valence;
        let m = self.dim();
        let val = Valence::new(v.contra + 1, v.co + 1).check()?;
        let ci = m.pow(v.contra as u32);
        let cj = m.pow(v.co as u32);
        TensorField::from_fn(&self.grid, val, |n, out| {
            let x = self.at(n);
            for l in 0..ci {
                for e in 0..m {
                    for j in 0..cj {
                        for d in 0..m {
                            let o = ((l * m + e) * cj + j) * m + d;
                            out[o] = if e == d { x[l * cj + j] } else { 0.0 };
                        }
                    }
                }
            }
        })
    }

    /// Identity coefficient `δ^{(i)}_{(j)} ∈ T^k_k`, so that `id•v = v`.
    pub fn identity(grid: &Arc<ChartGrid>, k: usize) -> Result<TensorField> {
        let m = grid.dim();
        let n = m.pow(k as u32);
        TensorField::from_fn(grid, Valence::new(k, k), |_, out| {
            for i in 0..n {
                out[i * n + i] = 1.0;
            }
        })
    }

    /// Restrict a scalar field to its values, one per node.
    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::Axis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid2() -> Arc<ChartGrid> {
        Arc::new(ChartGrid::two_d(Axis::uniform(0.0, 1.0, 4).unwrap(), Axis::uniform(0.0, 1.0, 5).unwrap()).unwrap())
    }

    fn random(grid: &Arc<ChartGrid>, v: Valence, seed: u64) -> TensorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = TensorField::zeros(grid, v).unwrap();
        t.data_mut().iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        t
    }

    #[test]
    fn valence_cap_is_enforced() {
        let g = grid2();
        assert!(matches!(
            TensorField::zeros(&g, Valence::new(3, 4)),
            Err(Error::UnsupportedValence { .. })
        ));
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        let g = grid2();
        let id = TensorField::identity(&g, 1).unwrap();
        let tr = id.contract(1, 1).unwrap();
        assert!(tr.values().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn contraction_matches_index_loop() {
        let g = grid2();
        let a = random(&g, Valence::new(1, 2), 7);
        for t in 1..=2 {
            let c = a.contract(1, t).unwrap();
            for n in 0..g.len() {
                for j in 0..2 {
                    let mut acc = 0.0;
                    for k in 0..2 {
                        let slots = if t == 1 { [k, k, j] } else { [k, j, k] };
                        acc += a.component(n, &slots);
                    }
                    assert_eq!(c.component(n, &[j]), acc);
                }
            }
        }
        assert!(a.contract(2, 1).is_err());
        assert!(a.contract(1, 3).is_err());
    }

    #[test]
    fn dot_matches_index_loop() {
        let g = grid2();
        let s = random(&g, Valence::new(1, 2), 3);
        let w = random(&g, Valence::new(0, 1), 4);
        let d = s.dot(&w).unwrap();
        for n in 0..g.len() {
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = 0.0;
                    for k in 0..2 {
                        acc += s.component(n, &[k, i, j]) * w.component(n, &[k]);
                    }
                    assert_eq!(d.component(n, &[i, j]), acc);
                }
            }
        }
        let scalar = TensorField::constant_scalar(&g, 2.5);
        assert_eq!(s.dot(&scalar).unwrap(), s.scale(2.5));
        assert!(w.dot(&s).is_err());
    }

    #[test]
    fn compose_and_lift_are_consistent_with_dot() {
        let g = grid2();
        let a = random(&g, Valence::new(2, 3), 11);
        let b = random(&g, Valence::new(1, 2), 12);
        let v = random(&g, Valence::new(0, 1), 13);
        let lhs = a.compose(&b).unwrap().dot(&v).unwrap();
        let rhs = a.dot(&b.dot(&v).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-14);

        let w = random(&g, Valence::new(0, 2), 14);
        let lifted = b.lift().unwrap().dot(&w).unwrap();
        for n in 0..g.len() {
            for p in 0..2 {
                for q in 0..2 {
                    for d in 0..2 {
                        let mut acc = 0.0;
                        for l in 0..2 {
                            acc += b.component(n, &[l, p, q]) * w.component(n, &[l, d]);
                        }
                        assert!((lifted.component(n, &[p, q, d]) - acc).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_product_slot_order() {
        let g = grid2();
        let a = random(&g, Valence::new(1, 1), 1);
        let b = random(&g, Valence::new(1, 0), 2);
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.valence(), Valence::new(2, 1));
        let n = 5;
        assert_eq!(t.component(n, &[1, 0, 1]), a.component(n, &[1, 1]) * b.component(n, &[0]));
    }
}
