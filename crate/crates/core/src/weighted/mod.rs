//! Weighted Sobolev norms, the corrections linking `∇` and `∇̂`, and the
//! numerical checks built on them.

pub mod checks;
pub mod correction;
pub mod corpus;
pub mod manifold;
pub mod norms;

pub use correction::{commutator_coefficients, conformal_action, s_tensor, CorrectionFamilies};
pub use corpus::{Corpus, CorpusFunction, Shape};
pub use manifold::{CylinderSpec, WeightedManifold};
pub use norms::{hat_sobolev_norm, weight_map, weighted_sobolev_norm, Exponent, NormSpec};
