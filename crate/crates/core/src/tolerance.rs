//! Central tolerance table.
//!
//! Every pass/fail threshold used by the checkers lives here. The CLI ships
//! the defaults as a JSON file and accepts partial overrides per run.

use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]` used for observed convergence orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Band { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Residual of the connection-difference and product-rule identities.
    pub connection_residual: f64,
    /// Minimal observed order of the connection residual under refinement.
    pub connection_order: f64,
    /// Round trip through the two correction systems.
    pub recursion_roundtrip: f64,
    /// Measure-change identity for order-zero norms.
    pub measure_change: f64,
    /// Relative drift of ratios under refinement (equivalence, isomorphism, commutator).
    pub ratio_drift: f64,
    /// Largest admissible equivalence constant for order-one and order-two norms.
    pub equivalence_bracket: f64,
    /// Right-inverse identity of the localization pair.
    pub retraction_identity: f64,
    /// Localized-vs-global norm constant.
    pub localization_bracket: f64,
    /// Relative agreement of localization brackets between atlases.
    pub atlas_agreement: f64,
    /// Cone metric equals its embedding pullback.
    pub cone_exact: f64,
    /// Regularized cusp metric against `ds² + g_B` in cylinder coordinates.
    pub desingularization: f64,
    /// Glued weight and metric against the model and outer data in their regions.
    pub glue_exact: f64,
    /// Cusp metric equivalence ratio against its closed form.
    pub cusp_ratio: f64,
    /// Analytic oracles (weighted integrals, arclength maps).
    pub analytic_oracle: f64,
    /// Partition-of-unity identity of localization systems.
    pub partition_of_unity: f64,
    /// Grid-max bound constants c(j) against analytic suprema.
    pub characteristic_bound: f64,
    /// Threshold the partial arclength integral must exceed at ε = 1e-8.
    pub divergence_threshold: f64,
    /// Relative variation of singularity bounds under grid doubling.
    pub singularity_drift: f64,
    /// Conjugation identity of the desingularized operator.
    pub conjugation: f64,
    pub time_order: Band,
    pub space_order: Band,
    /// Relative error of the heat-mode decay.
    pub heat_decay: f64,
    /// Relative drift of the maximal-regularity ratio.
    pub max_regularity_drift: f64,
    /// Linear solver relative residual.
    pub solver_tolerance: f64,
    pub solver_max_iterations: usize,
    /// Order-zero Kondratiev ratio.
    pub kondratiev_exact: f64,
    pub kondratiev_bracket: f64,
    pub kondratiev_drift: f64,
    /// Pointwise bracket of Cartesian against covariant derivative norms.
    pub cartesian_bracket: f64,
    /// Drift of embedding and multiplication constants.
    pub embedding_drift: f64,
    /// Ellipticity is certified when the smallest eigenvalue exceeds the bound minus this slack.
    pub ellipticity_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            connection_residual: 1e-5,
            connection_order: 1.8,
            recursion_roundtrip: 1e-6,
            measure_change: 1e-6,
            ratio_drift: 0.10,
            equivalence_bracket: 20.0,
            retraction_identity: 1e-6,
            localization_bracket: 8.0,
            atlas_agreement: 0.20,
            cone_exact: 1e-12,
            desingularization: 1e-10,
            glue_exact: 1e-12,
            cusp_ratio: 1e-6,
            analytic_oracle: 1e-6,
            partition_of_unity: 1e-12,
            characteristic_bound: 1e-9,
            divergence_threshold: 10.0,
            singularity_drift: 0.05,
            conjugation: 1e-5,
            time_order: Band::new(0.9, 1.1),
            space_order: Band::new(1.8, 2.2),
            heat_decay: 0.01,
            max_regularity_drift: 0.10,
            solver_tolerance: 1e-10,
            solver_max_iterations: 20_000,
            kondratiev_exact: 1e-6,
            kondratiev_bracket: 4.0,
            kondratiev_drift: 0.10,
            cartesian_bracket: 3.0,
            embedding_drift: 0.15,
            ellipticity_slack: 1e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_is_closed() {
        let b = Band::new(0.9, 1.1);
        assert!(b.contains(0.9) && b.contains(1.1) && !b.contains(1.2));
    }

    #[test]
    fn defaults_roundtrip_through_serde_shape() {
        let t = Tolerances::default();
        assert_eq!(t.time_order, Band::new(0.9, 1.1));
        assert!(t.connection_residual < t.ratio_drift);
    }
}
