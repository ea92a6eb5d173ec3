//! Cusp characteristics, model cusps and the glued singular manifold.

pub mod arclength;
pub mod checks;
pub mod characteristic;
pub mod glue;
pub mod model;

pub use arclength::{adaptive_quad, ArclengthMap};
pub use characteristic::{certification_grid, log_derivative_bounds, validate_characteristic, Characteristic, SampledProfile};
pub use glue::{Cutoff, GluedCusp};
pub use model::{metric_equivalence_ratio, singularity_bound, CuspBase, Flavor, Grading, ModelCusp};
