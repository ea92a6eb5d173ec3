//! Coordinate tensor calculus on chart grids.
//!
//! Fields carry their grid; every operation is a pure function of its inputs.
//! Derivatives use second-order three-point stencils (one-sided at
//! non-periodic edges, exact local spacings on graded grids) and integrals use
//! the trapezoidal rule weighted by `√g`.

pub mod connection;
pub mod grid;
pub mod io;
pub mod metric;
pub mod pullback;
pub mod tensor;

pub use connection::{
    bundle_norm, christoffel, covariant_derivative, integral, integrate, laplace_beltrami, laplace_divergence_form,
    LeviCivita,
};
pub use grid::{Axis, ChartGrid, Stencil};
pub use metric::{conformal_rescale, MetricField};
pub use pullback::{pullback, pullback_metric, ChartMap, Composed, IdentityMap};
pub use tensor::{ScalarField, TensorField, Valence, MAX_RANK};
