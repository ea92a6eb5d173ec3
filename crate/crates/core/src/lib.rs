//! Weighted function spaces and parabolic problems on Riemannian manifolds
//! with cuspidal point singularities.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] coordinate tensor calculus on chart grids,
//! * [`cusp`] cusp characteristics, model cusps and their desingularization,
//! * [`localization`] atlases on the regularized cylinder and the
//!   retraction/coretraction pair,
//! * [`weighted`] weighted Sobolev norms, connection corrections and the
//!   numerical checks built on them,
//! * [`parabolic`] the reaction-diffusion solver on the regularized cylinder,
//! * [`kondratiev`] Kondratiev norms on planar conical domains.

pub mod cusp;
pub mod error;
pub mod geometry;
pub mod kondratiev;
pub mod localization;
pub mod par;
pub mod parabolic;
pub mod report;
pub mod tolerance;
pub mod weighted;

pub use error::{Error, Result};
