//! Desingularized parabolic problems on cusp cylinders.

pub mod checks;
pub mod mms;
pub mod mr;
pub mod operator;
pub mod solve;
pub mod sparse;

pub use operator::{boundary_rows, min_generalized_eigenvalue, CylinderOperator, Diffusion, DiffusionProblem};
pub use solve::{solve_hat, solve_ivp, Mass, Scheme, TimeStepping, Trajectory};
pub use sparse::{CsrMatrix, SolveStats};
pub use mms::Manufactured;
pub use mr::{maximal_regularity_functional, MrValue};
