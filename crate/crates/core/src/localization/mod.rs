//! Uniformly regular atlases on the regularized cylinder, localization
//! systems and the retraction/coretraction pair.

pub mod atlas;
pub mod checks;
pub mod system;

pub use atlas::{Chart, UrAtlas};
pub use system::{bump, chi, flat_sobolev_norm, ChartPatch, LocalizationSystem};
