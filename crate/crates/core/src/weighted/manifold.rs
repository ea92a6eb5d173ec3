use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cusp::{CuspBase, GluedCusp, ModelCusp};
use crate::error::{Error, Result};
use crate::geometry::{ChartGrid, LeviCivita, MetricField, ScalarField};

/// Resolution of a truncated cylinder `[0, s_max] × B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderSpec {
    pub ns: usize,
    pub ntheta: usize,
    pub s_max: f64,
}

impl CylinderSpec {
    /// Halve both spacings.
    pub fn refined(&self, base: &CuspBase) -> Self {
        let ntheta = match base {
            CuspBase::Circle => 2 * self.ntheta,
            CuspBase::Arc { .. } => 2 * self.ntheta - 1,
            CuspBase::Points { .. } => self.ntheta,
        };
        CylinderSpec { ns: 2 * self.ns - 1, ntheta, s_max: self.s_max }
    }

    /// This grid refined `level` times.
    pub fn level(&self, base: &CuspBase, level: usize) -> Self {
        (0..level).fold(*self, |s, _| s.refined(base))
    }
}

/// A chart grid with a metric `g`, a singularity function `ρ`, the
/// regularized metric `ĝ = g/ρ²` and both Levi-Civita connections.
#[derive(Debug, Clone)]
pub struct WeightedManifold {
    g: MetricField,
    rho: ScalarField,
    ghat: MetricField,
    conn: LeviCivita,
    conn_hat: LeviCivita,
}

impl WeightedManifold {
    /// `ρ` must take values in `(0, 1]`.
    pub fn new(g: MetricField, rho: ScalarField) -> Result<Self> {
        g.cov().same_grid(&rho)?;
        for (node, &r) in rho.values().iter().enumerate() {
            if !(r > 0.0) {
                return Err(Error::NonPositiveWeight { node, value: r });
            }
            if r > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter(format!("weight {r} > 1 at node {node}")));
            }
        }
        let ghat = g.conformal_rescale(&rho)?;
        let conn = LeviCivita::new(&g)?;
        let conn_hat = LeviCivita::new(&ghat)?;
        Ok(WeightedManifold { g, rho, ghat, conn, conn_hat })
    }

    /// Model cusp in cylinder coordinates: `g = R(t(s))²(ds² + g_B)`, `ρ = r_Z`.
    pub fn cusp_cylinder(cusp: &ModelCusp, spec: &CylinderSpec) -> Result<Self> {
        let grid = cusp.cylinder_grid(spec.ns, spec.ntheta, spec.s_max)?;
        let rho = cusp.singularity_cylinder(&grid)?;
        let g = MetricField::new(MetricField::flat(&grid).cov().mul_scalar(&rho.map(|r| r * r))?)?;
        Self::new(g, rho)
    }

    /// Glued cusp in cylinder coordinates with the blended weight and metric.
    pub fn glued_cylinder(glued: &GluedCusp, spec: &CylinderSpec) -> Result<Self> {
        let grid = glued.cusp().cylinder_grid(spec.ns, spec.ntheta, spec.s_max)?;
        Self::new(glued.metric_cylinder(&grid)?, glued.rho_cylinder(&grid)?)
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        self.g.grid()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g(&self) -> &MetricField {
        &self.g
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn ghat(&self) -> &MetricField {
        &self.ghat
    }

    pub fn conn(&self) -> &LeviCivita {
        &self.conn
    }

    pub fn conn_hat(&self) -> &LeviCivita {
        &self.conn_hat
    }

    /// `d(log ρ)`.
    pub fn dlog_rho(&self) -> Result<crate::geometry::TensorField> {
        self.rho.map(f64::ln).partial()
    }
}
