use std::f64::consts::TAU;

use crate::cusp::CuspBase;
use crate::error::{Error, Result};

/// One chart: the box `c + (−1, 1)^m` in cylinder coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub id: usize,
    pub center: [f64; 2],
}

/// Axis-aligned atlas of translated unit boxes on `[0, s_max] × B`.
#[derive(Debug, Clone, PartialEq)]
pub struct UrAtlas {
    s_max: f64,
    base: CuspBase,
    overlap: f64,
    charts: Vec<Chart>,
}

fn centers(start: f64, length: f64, overlap: f64) -> Vec<f64> {
    // the r-shrunk boxes c + (−r, r) cover the interval
    let n = (length / (2.0 * overlap)).ceil().max(1.0) as usize;
    (0..n).map(|j| start + (j as f64 + 0.5) * length / n as f64).collect()
}

impl UrAtlas {
    /// `s_max > 2`, `r ∈ (0.3, 0.9)`.
    pub fn cylinder(s_max: f64, base: &CuspBase, overlap: f64) -> Result<Self> {
        base.validate()?;
        if !(s_max > 2.0) {
            return Err(Error::InvalidParameter(format!("atlas length {s_max} must exceed 2")));
        }
        if !(overlap > 0.3 && overlap < 0.9) {
            return Err(Error::InvalidParameter(format!("overlap {overlap} not in (0.3, 0.9)")));
        }
        let cs = centers(0.0, s_max, overlap);
        let ct = match *base {
            CuspBase::Circle => centers(0.0, TAU, overlap),
            CuspBase::Arc { theta0, theta1 } => centers(theta0, theta1 - theta0, overlap),
            CuspBase::Points { .. } => vec![0.0],
        };
        let mut charts = Vec::with_capacity(cs.len() * ct.len());
        for &s in &cs {
            for &t in &ct {
                charts.push(Chart { id: charts.len(), center: [s, t] });
            }
        }
        Ok(UrAtlas { s_max, base: base.clone(), overlap, charts })
    }

    /// Atlas with explicitly placed charts covering `[0, s_max] × B`.
    pub fn with_centers(s_max: f64, base: &CuspBase, overlap: f64, centers: &[[f64; 2]]) -> Result<Self> {
        base.validate()?;
        if centers.is_empty() {
            return Err(Error::InvalidParameter("atlas needs at least one chart".into()));
        }
        let charts = centers.iter().enumerate().map(|(id, &center)| Chart { id, center }).collect();
        Ok(UrAtlas { s_max, base: base.clone(), overlap, charts })
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn base(&self) -> &CuspBase {
        &self.base
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + 1
    }

    /// Local coordinates `p − c` of a point in chart `κ` (angles wrapped on a
    /// full circle), or `None` if the point lies outside the closed box.
    pub fn local(&self, chart: &Chart, p: [f64; 2]) -> Option<[f64; 2]> {
        let x0 = p[0] - chart.center[0];
        let mut x1 = if self.dim() == 2 { p[1] - chart.center[1] } else { 0.0 };
        if matches!(self.base, CuspBase::Circle) {
            x1 = (x1 + 0.5 * TAU).rem_euclid(TAU) - 0.5 * TAU;
        }
        let tol = 1e-12;
        (x0.abs() <= 1.0 + tol && x1.abs() <= 1.0 + tol).then_some([x0, x1])
    }

    /// Number of open boxes containing `p`.
    pub fn count(&self, p: [f64; 2]) -> usize {
        self.charts
            .iter()
            .filter(|c| self.local(c, p).is_some_and(|x| x[0].abs() < 1.0 && x[1].abs() < 1.0))
            .count()
    }

    /// Largest number of open boxes meeting at a point, scanned on a fine sample.
    pub fn multiplicity(&self) -> usize {
        let ns = 2000;
        let nt = if self.dim() == 2 { 400 } else { 1 };
        let (t0, tl) = match self.base {
            CuspBase::Circle => (0.0, TAU),
            CuspBase::Arc { theta0, theta1 } => (theta0, theta1 - theta0),
            CuspBase::Points { .. } => (0.0, 0.0),
        };
        let mut best = 0;
        for i in 0..=ns {
            let s = self.s_max * i as f64 / ns as f64;
            for j in 0..nt {
                let t = t0 + tl * (j as f64 + 0.5) / nt as f64;
                best = best.max(self.count([s, t]));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_examples() {
        let a = UrAtlas::cylinder(4.0, &CuspBase::Points { count: 1 }, 0.5).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.multiplicity(), 2);
        let c = UrAtlas::cylinder(4.0, &CuspBase::Circle, 0.6).unwrap();
        assert!(c.multiplicity() <= 4);
        assert!(UrAtlas::cylinder(1.5, &CuspBase::Circle, 0.5).is_err());
        assert!(UrAtlas::cylinder(4.0, &CuspBase::Circle, 0.95).is_err());
    }

    #[test]
    fn shrunk_boxes_cover() {
        let a = UrAtlas::cylinder(5.0, &CuspBase::Circle, 0.4).unwrap();
        let r = a.overlap();
        for i in 0..=200 {
            for j in 0..50 {
                let p = [5.0 * i as f64 / 200.0, TAU * j as f64 / 50.0];
                assert!(a
                    .charts()
                    .iter()
                    .any(|c| a.local(c, p).is_some_and(|x| x[0].abs() <= r + 1e-12 && x[1].abs() <= r + 1e-12)));
            }
        }
    }
}
