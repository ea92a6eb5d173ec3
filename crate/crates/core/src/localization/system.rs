use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{bundle_norm, integrate, Axis, ChartGrid, LeviCivita, MetricField, ScalarField, Valence};
use crate::localization::atlas::UrAtlas;
use crate::par;

/// Fixed bump `(1 − x²)⁴` on `(−1, 1)`, zero outside.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let y = 1.0 - x * x;
        (y * y) * (y * y)
    }
}

/// Cutoff `χ`: 1 on `[−1, 1]^m`, decaying to 0 on `[−2, 2]^m \ [−1, 1]^m`.
pub fn chi(x: [f64; 2], m: usize) -> f64 {
    (0..m)
        .map(|a| {
            let d = x[a].abs();
            if d <= 1.0 {
                1.0
            } else if d >= 2.0 {
                0.0
            } else {
                1.0 - crate::weighted::corpus::smooth_step(d - 1.0)
            }
        })
        .product()
}

/// Restriction of a global grid to one chart: the global nodes inside the
/// closed box and the local tensor grid in box coordinates.
#[derive(Debug, Clone)]
pub struct ChartPatch {
    pub chart: usize,
    pub local: Arc<ChartGrid>,
    /// Global node of each local node.
    pub nodes: Vec<usize>,
    /// `π_κ` at the local nodes.
    pub pi: Vec<f64>,
    /// `χ` at the local nodes.
    pub chi: Vec<f64>,
}

/// Localization system `{π_κ}` with `Σ π_κ² = 1` and the cutoff `χ`,
/// realized on a global cylinder grid.
#[derive(Debug, Clone)]
pub struct LocalizationSystem {
    grid: Arc<ChartGrid>,
    atlas: UrAtlas,
    patches: Vec<ChartPatch>,
}

fn axis_subset(axis: &Axis, center: f64, period: Option<f64>) -> Vec<(usize, f64)> {
    axis.coords()
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let mut d = x - center;
            if let Some(p) = period {
                d = (d + 0.5 * p).rem_euclid(p) - 0.5 * p;
            }
            (d.abs() <= 1.0 + 1e-12).then_some((i, d))
        })
        .collect()
}

impl LocalizationSystem {
    pub fn new(atlas: &UrAtlas, grid: &Arc<ChartGrid>) -> Result<Self> {
        let m = atlas.dim();
        if grid.dim() != m {
            return Err(Error::InvalidGrid(format!("atlas dimension {m}, grid dimension {}", grid.dim())));
        }
        // b_κ at the global nodes, accumulated as Σ b²
        let raw: Vec<(usize, Vec<(usize, usize)>, Vec<f64>, Vec<f64>, Vec<f64>)> = par::map_slice(atlas.charts(), |c| {
            let s = axis_subset(grid.axis(0), c.center[0], None);
            let t = if m == 2 {
                axis_subset(grid.axis(1), c.center[1], grid.axis(1).period())
            } else {
                vec![(0, 0.0)]
            };
            let mut t = t;
            t.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let mut pairs = Vec::with_capacity(s.len() * t.len());
            let mut b = Vec::with_capacity(s.len() * t.len());
            for &(i, x) in &s {
                for &(j, y) in &t {
                    pairs.push((i, j));
                    b.push(bump(x) * if m == 2 { bump(y) } else { 1.0 });
                }
            }
            let xs: Vec<f64> = s.iter().map(|p| p.1).collect();
            let ys: Vec<f64> = t.iter().map(|p| p.1).collect();
            (c.id, pairs, b, xs, ys)
        });
        let mut sum = vec![0.0f64; grid.len()];
        for (_, pairs, b, _, _) in &raw {
            for (&(i, j), &v) in pairs.iter().zip(b) {
                sum[grid.node(i, j)] += v * v;
            }
        }
        if let Some(node) = sum.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::UncoveredNode(node));
        }
        let mut patches = Vec::with_capacity(raw.len());
        for (id, pairs, b, xs, ys) in raw {
            let local = if m == 2 {
                ChartGrid::two_d(Axis::new(xs)?, Axis::new(ys)?)?
            } else {
                ChartGrid::one_d(Axis::new(xs)?)?
            };
            let local = Arc::new(local);
            let nodes: Vec<usize> = pairs.iter().map(|&(i, j)| grid.node(i, j)).collect();
            let pi: Vec<f64> = nodes.iter().zip(&b).map(|(&n, &v)| v / sum[n].sqrt()).collect();
            let chi: Vec<f64> = (0..local.len()).map(|n| chi(local.point(n), m)).collect();
            patches.push(ChartPatch { chart: id, local, nodes, pi, chi });
        }
        Ok(LocalizationSystem { grid: Arc::clone(grid), atlas: atlas.clone(), patches })
    }

    pub fn atlas(&self) -> &UrAtlas {
        &self.atlas
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn patches(&self) -> &[ChartPatch] {
        &self.patches
    }

    /// `max |Σ_κ π_κ² − 1|` over the grid.
    pub fn partition_defect(&self) -> f64 {
        let mut sum = vec![0.0f64; self.grid.len()];
        for p in &self.patches {
            for (&n, &v) in p.nodes.iter().zip(&p.pi) {
                sum[n] += v * v;
            }
        }
        sum.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max |χ π_κ − π_κ|` over all charts.
    pub fn cutoff_defect(&self) -> f64 {
        self.patches
            .iter()
            .flat_map(|p| p.pi.iter().zip(&p.chi).map(|(a, c)| (a * c - a).abs()))
            .fold(0.0, f64::max)
    }

    /// `ℛ^c u = (κ_*(π_κ u))_κ` on the local grids.
    pub fn coretract(&self, u: &ScalarField) -> Result<Vec<ScalarField>> {
        if !Arc::ptr_eq(u.grid(), &self.grid) && **u.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        par::map_slice(&self.patches, |p| {
            let data = p.nodes.iter().zip(&p.pi).map(|(&n, &w)| w * u.value(n)).collect();
            ScalarField::from_data(&p.local, Valence::SCALAR, data)
        })
        .into_iter()
        .collect()
    }

    /// `ℛ(v_κ) = Σ_κ π_κ κ^*(χ v_κ)`, summed in chart order.
    pub fn retract(&self, family: &[ScalarField]) -> Result<ScalarField> {
        if family.len() != self.patches.len() {
            return Err(Error::FamilyMismatch { expected: self.patches.len(), found: family.len() });
        }
        let mut out = vec![0.0f64; self.grid.len()];
        for (p, v) in self.patches.iter().zip(family) {
            if v.grid().len() != p.local.len() {
                return Err(Error::GridMismatch);
            }
            for (l, (&n, &w)) in p.nodes.iter().zip(&p.pi).enumerate() {
                out[n] += w * p.chi[l] * v.value(l);
            }
        }
        ScalarField::from_data(&self.grid, Valence::SCALAR, out)
    }

    /// `(Σ_κ ‖ℛ^c_κ u‖^q_{W_q^k(box)})^{1/q}` with flat box norms; also
    /// returns the per-chart norms.
    pub fn localized_norm(&self, u: &ScalarField, k: usize, q: f64) -> Result<(f64, Vec<f64>)> {
        if !(q >= 1.0) {
            return Err(Error::InvalidExponent(q));
        }
        let family = self.coretract(u)?;
        let per: Vec<f64> = par::map_slice(&family, |v| flat_sobolev_norm(v, k, q))
            .into_iter()
            .collect::<Result<_>>()?;
        let total = per.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q);
        Ok((total, per))
    }
}

/// `Σ_{i≤k} ‖|∂^i v|‖_{L_q}` with the Euclidean metric of the field's grid.
pub fn flat_sobolev_norm(v: &ScalarField, k: usize, q: f64) -> Result<f64> {
    let g = MetricField::flat(v.grid());
    let conn = LeviCivita::new(&g)?;
    conn.jets(v, k)?
        .iter()
        .map(|j| integrate(&bundle_norm(j, &g)?, &g, q))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusp::CuspBase;

    fn grid(ns: usize, nt: usize, s_max: f64) -> Arc<ChartGrid> {
        Arc::new(
            ChartGrid::two_d(Axis::uniform(0.0, s_max, ns).unwrap(), Axis::periodic(0.0, std::f64::consts::TAU, nt).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn partition_and_right_inverse() {
        let g = grid(161, 32, 4.0);
        let atlas = UrAtlas::cylinder(4.0, &CuspBase::Circle, 0.5).unwrap();
        let loc = LocalizationSystem::new(&atlas, &g).unwrap();
        assert!(loc.partition_defect() < 1e-12);
        assert_eq!(loc.cutoff_defect(), 0.0);
        let u = ScalarField::scalar_fn(&g, |[s, t]| (s * 1.3).sin() * (2.0 * t).cos() + 0.2);
        let back = loc.retract(&loc.coretract(&u).unwrap()).unwrap();
        assert!(back.sub(&u).unwrap().max_abs() < 1e-13);
        let zero = ScalarField::constant_scalar(&g, 0.0);
        assert!(loc.coretract(&zero).unwrap().iter().all(|v| v.max_abs() == 0.0));
        assert!(loc.retract(&[]).is_err());
    }

    #[test]
    fn single_chart_is_identity() {
        let g = Arc::new(ChartGrid::one_d(Axis::uniform(0.2, 1.8, 81).unwrap()).unwrap());
        let atlas = UrAtlas::with_centers(1.6, &CuspBase::Points { count: 1 }, 0.5, &[[1.0, 0.0]]).unwrap();
        let loc = LocalizationSystem::new(&atlas, &g).unwrap();
        assert!(loc.patches()[0].pi.iter().all(|&p| p == 1.0));
        let u = ScalarField::scalar_fn(&g, |[s, _]| (2.0 * s).cos());
        let (n, _) = loc.localized_norm(&u, 2, 2.0).unwrap();
        assert!((n - flat_sobolev_norm(&u, 2, 2.0).unwrap()).abs() < 1e-12);
        assert_eq!(loc.retract(&loc.coretract(&u).unwrap()).unwrap(), u);
    }
}
