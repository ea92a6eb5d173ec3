use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3-point finite-difference stencil: node indices and weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub idx: [usize; 3],
    pub w: [f64; 3],
}

impl Stencil {
    #[inline]
    pub fn apply(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.w[0] * f(self.idx[0]) + self.w[1] * f(self.idx[1]) + self.w[2] * f(self.idx[2])
    }
}

/// One coordinate axis of a chart grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    coords: Vec<f64>,
    periodic: bool,
    #[serde(skip)]
    first: Vec<Stencil>,
    #[serde(skip)]
    second: Vec<Stencil>,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl Axis {
    /// Non-periodic axis through the given strictly increasing nodes.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::build(coords, false)
    }

    /// Uniform non-periodic axis with `n` nodes on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("{n} nodes")));
        }
        let h = (b - a) / (n - 1) as f64;
        Self::new((0..n).map(|i| a + h * i as f64).collect())
    }

    /// Periodic axis with `n` equispaced nodes starting at `start`, period `period`.
    pub fn periodic(start: f64, period: f64, n: usize) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::InvalidGrid(format!("period {period}")));
        }
        let h = period / n as f64;
        Self::build((0..n).map(|i| start + h * i as f64).collect(), true)
    }

    fn build(coords: Vec<f64>, periodic: bool) -> Result<Self> {
        let n = coords.len();
        if n < 4 {
            return Err(Error::InvalidGrid(format!("axis needs at least 4 nodes, got {n}")));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite coordinate".into()));
        }
        if coords.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("coordinates must be strictly increasing".into()));
        }
        let mut axis = Axis { coords, periodic, first: vec![], second: vec![], weights: vec![] };
        if periodic {
            let h = axis.coords[1] - axis.coords[0];
            let uniform = axis
                .coords
                .windows(2)
                .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1.0));
            if !uniform {
                return Err(Error::InvalidGrid("periodic axes must be uniform".into()));
            }
        }
        axis.first = (0..n).map(|i| axis.first_stencil(i)).collect();
        axis.second = (0..n).map(|i| axis.second_stencil(i)).collect();
        axis.weights = axis.trapezoid();
        Ok(axis)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Spacing of a periodic (or any uniform) axis.
    pub fn spacing(&self) -> f64 {
        self.coords[1] - self.coords[0]
    }

    pub fn period(&self) -> Option<f64> {
        self.periodic.then(|| self.spacing() * self.len() as f64)
    }

    pub fn first_derivative(&self, i: usize) -> &Stencil {
        &self.first[i]
    }

    pub fn second_derivative(&self, i: usize) -> &Stencil {
        &self.second[i]
    }

    /// Trapezoidal quadrature weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    fn first_stencil(&self, i: usize) -> Stencil {
        let mut st = self.first_stencil_raw(i);
        // force exact annihilation of constants
        let pos = st.idx.iter().position(|&k| k == i).unwrap_or(1);
        st.w[pos] = 0.0;
        st.w[pos] = -st.w.iter().sum::<f64>();
        st
    }

    fn first_stencil_raw(&self, i: usize) -> Stencil {
        let n = self.len();
        let x = &self.coords;
        if self.periodic {
            let h = self.spacing();
            let (l, r) = ((i + n - 1) % n, (i + 1) % n);
            return Stencil { idx: [l, i, r], w: [-0.5 / h, 0.0, 0.5 / h] };
        }
        if i == 0 {
            let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
            Stencil {
                idx: [0, 1, 2],
                w: [
                    -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                    (h1 + h2) / (h1 * h2),
                    -h1 / (h2 * (h1 + h2)),
                ],
            }
        } else if i == n - 1 {
            let (h1, h2) = (x[n - 1] - x[n - 2], x[n - 2] - x[n - 3]);
            Stencil {
                idx: [n - 3, n - 2, n - 1],
                w: [
                    h1 / (h2 * (h1 + h2)),
                    -(h1 + h2) / (h1 * h2),
                    (2.0 * h1 + h2) / (h1 * (h1 + h2)),
                ],
            }
        } else {
            let (h1, h2) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            if (h2 - h1).abs() <= 1e-13 * h1 {
                let h = 0.5 * (h1 + h2);
                return Stencil { idx: [i - 1, i, i + 1], w: [-0.5 / h, 0.0, 0.5 / h] };
            }
            Stencil {
                idx: [i - 1, i, i + 1],
                w: [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))],
            }
        }
    }

    // Boundary rows use the interior stencil of the neighbouring node; only
    // the solver's Neumann closure reads them.
    fn second_stencil(&self, i: usize) -> Stencil {
        let n = self.len();
        let x = &self.coords;
        if self.periodic {
            let h = self.spacing();
            let (l, r) = ((i + n - 1) % n, (i + 1) % n);
            return Stencil { idx: [l, i, r], w: [1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)] };
        }
        let c = i.clamp(1, n - 2);
        let (h1, h2) = (x[c] - x[c - 1], x[c + 1] - x[c]);
        Stencil {
            idx: [c - 1, c, c + 1],
            w: [2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))],
        }
    }

    fn trapezoid(&self) -> Vec<f64> {
        let n = self.len();
        if self.periodic {
            return vec![self.spacing(); n];
        }
        let x = &self.coords;
        (0..n)
            .map(|i| {
                let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
                let right = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }
}

/// Tensor-product grid carrying chart coordinates (dimension 1 or 2).
///
/// Nodes are numbered row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGrid {
    axes: Vec<Axis>,
    cell: Vec<f64>,
}

impl ChartGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!("dimension {} not in {{1,2}}", axes.len())));
        }
        let n: usize = axes.iter().map(Axis::len).product();
        let mut cell = vec![0.0; n];
        for (node, c) in cell.iter_mut().enumerate() {
            *c = match axes.len() {
                1 => axes[0].weight(node),
                _ => {
                    let n1 = axes[1].len();
                    axes[0].weight(node / n1) * axes[1].weight(node % n1)
                }
            };
        }
        Ok(ChartGrid { axes, cell })
    }

    pub fn one_d(axis: Axis) -> Result<Self> {
        Self::new(vec![axis])
    }

    pub fn two_d(a0: Axis, a1: Axis) -> Result<Self> {
        Self::new(vec![a0, a1])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.cell.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell.is_empty()
    }

    pub fn axis(&self, a: usize) -> &Axis {
        &self.axes[a]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    /// Per-axis indices of a node.
    #[inline]
    pub fn multi_index(&self, node: usize) -> [usize; 2] {
        match self.axes.len() {
            1 => [node, 0],
            _ => {
                let n1 = self.axes[1].len();
                [node / n1, node % n1]
            }
        }
    }

    #[inline]
    pub fn node(&self, i0: usize, i1: usize) -> usize {
        match self.axes.len() {
            1 => i0,
            _ => i0 * self.axes[1].len() + i1,
        }
    }

    /// Chart coordinates of a node (unused slots are zero).
    #[inline]
    pub fn point(&self, node: usize) -> [f64; 2] {
        let [i0, i1] = self.multi_index(node);
        match self.axes.len() {
            1 => [self.axes[0].coords[i0], 0.0],
            _ => [self.axes[0].coords[i0], self.axes[1].coords[i1]],
        }
    }

    /// Trapezoidal cell measure of a node in coordinate space.
    #[inline]
    pub fn cell_measure(&self, node: usize) -> f64 {
        self.cell[node]
    }

    /// First-derivative stencil along `axis` at `node`, in global node indices.
    pub fn first_stencil(&self, node: usize, axis: usize) -> Stencil {
        self.lift_stencil(node, axis, *self.axes[axis].first_derivative(self.multi_index(node)[axis]))
    }

    /// Second-derivative stencil along `axis` at `node`, in global node indices.
    pub fn second_stencil(&self, node: usize, axis: usize) -> Stencil {
        self.lift_stencil(node, axis, *self.axes[axis].second_derivative(self.multi_index(node)[axis]))
    }

    fn lift_stencil(&self, node: usize, axis: usize, s: Stencil) -> Stencil {
        let [i0, i1] = self.multi_index(node);
        let idx = s.idx.map(|k| if axis == 0 { self.node(k, i1) } else { self.node(i0, k) });
        Stencil { idx, w: s.w }
    }

    /// Whether a node lies on a non-periodic edge of the grid.
    pub fn on_boundary(&self, node: usize) -> bool {
        let mi = self.multi_index(node);
        self.axes
            .iter()
            .enumerate()
            .any(|(a, ax)| !ax.periodic && (mi[a] == 0 || mi[a] == ax.len() - 1))
    }

    /// Grid with every non-periodic interval halved and periodic node counts doubled.
    pub fn refined(&self) -> Result<Self> {
        let axes = self
            .axes
            .iter()
            .map(|ax| {
                if ax.periodic {
                    Axis::periodic(ax.coords[0], ax.period().unwrap_or(1.0), 2 * ax.len())
                } else {
                    let mut c = Vec::with_capacity(2 * ax.len() - 1);
                    for w in ax.coords.windows(2) {
                        c.push(w[0]);
                        c.push(0.5 * (w[0] + w[1]));
                    }
                    c.push(*ax.coords.last().unwrap_or(&0.0));
                    Axis::new(c)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ChartGrid::new(axes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_unsorted_axes() {
        assert!(Axis::new(vec![0.0, 1.0, 2.0]).is_err());
        assert!(Axis::new(vec![0.0, 2.0, 1.0, 3.0]).is_err());
        assert!(ChartGrid::new(vec![]).is_err());
    }

    #[test]
    fn nonuniform_first_derivative_is_exact_for_quadratics() {
        let ax = Axis::new(vec![0.0, 0.1, 0.25, 0.5, 0.6, 1.0]).unwrap();
        let f = |x: f64| 3.0 * x * x - x + 2.0;
        for i in 0..ax.len() {
            let d = ax.first_derivative(i).apply(|k| f(ax.coords()[k]));
            let exact = 6.0 * ax.coords()[i] - 1.0;
            assert!((d - exact).abs() < 1e-12, "node {i}: {d} vs {exact}");
        }
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let ax = Axis::new(vec![0.0, 0.3, 0.35, 0.8, 1.0]).unwrap();
        let s: f64 = (0..ax.len()).map(|i| ax.weight(i) * (2.0 * ax.coords()[i] + 1.0)).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_weights_sum_to_period() {
        let ax = Axis::periodic(0.0, std::f64::consts::TAU, 16).unwrap();
        let s: f64 = (0..16).map(|i| ax.weight(i)).sum();
        assert!((s - std::f64::consts::TAU).abs() < 1e-13);
        assert_eq!(ax.first_derivative(0).idx, [15, 0, 1]);
    }

    #[test]
    fn refinement_keeps_coarse_nodes() {
        let g = ChartGrid::two_d(Axis::uniform(0.0, 1.0, 5).unwrap(), Axis::periodic(0.0, 1.0, 4).unwrap()).unwrap();
        let r = g.refined().unwrap();
        assert_eq!(r.shape(), vec![9, 8]);
        assert_eq!(r.point(r.node(2, 2)), g.point(g.node(1, 1)));
    }
}
