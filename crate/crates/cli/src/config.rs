//! Experiment configuration files.
//!
//! One JSON schema serves every command. A command picks its default checks
//! from the registry; each check reads the section it needs and fails with a
//! config error when that section is absent. Unknown keys are rejected
//! everywhere.

use std::path::Path;

use cuspfs::cusp::{Characteristic, CuspBase, Flavor, ModelCusp};
use cuspfs::cusp::checks::Labeled;
use cuspfs::kondratiev::ConicalDomain;
use cuspfs::parabolic::checks::MrCase;
use cuspfs::parabolic::Mass;
use cuspfs::tolerance::Tolerances;
use cuspfs::weighted::checks::{Embedding, Setting};
use cuspfs::weighted::{Corpus, CylinderSpec};
use serde::Deserialize;
use serde_json::Value;

use crate::ConfigError;

/// Default tolerance table shipped with the binary.
pub const DEFAULT_TOLERANCES: &str = include_str!("../data/tolerances.default.json");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Subset of registered check ids; defaults to every check of the command.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Partial overrides of the tolerance table.
    #[serde(default)]
    pub tolerances: Option<serde_json::Map<String, Value>>,
    #[serde(default)]
    pub cusp: Option<CuspSection>,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub weighted: Option<WeightedSection>,
    #[serde(default)]
    pub localization: Option<LocalizationSection>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub mr: Option<MrSection>,
    #[serde(default)]
    pub kondratiev: Option<KondratievSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CharSpec {
    Power { alpha: f64 },
    Exponential { alpha: f64, beta: f64 },
    Sampled { t: Vec<f64>, r: Vec<f64> },
}

impl CharSpec {
    pub fn build(&self) -> cuspfs::Result<Labeled> {
        Ok(match self {
            CharSpec::Power { alpha } => Labeled::new(format!("power{alpha}"), Characteristic::power(*alpha)?),
            CharSpec::Exponential { alpha, beta } => {
                Labeled::new(format!("exp{alpha}_{beta}"), Characteristic::exponential(*alpha, *beta)?)
            }
            CharSpec::Sampled { t, r } => Labeled::new(format!("sampled{}", t.len()), Characteristic::sampled(t, r)?),
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    #[default]
    Circle,
    Arc { theta0: f64, theta1: f64 },
    Points { count: usize },
}

impl BaseSpec {
    fn build(&self) -> CuspBase {
        match *self {
            BaseSpec::Circle => CuspBase::Circle,
            BaseSpec::Arc { theta0, theta1 } => CuspBase::Arc { theta0, theta1 },
            BaseSpec::Points { count } => CuspBase::Points { count },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspSection {
    pub characteristics: Vec<CharSpec>,
    /// Grid size of the singularity-bound check.
    #[serde(default = "default_singularity_nt")]
    pub singularity_nt: usize,
    /// Blend interval `[ε₀, ε₁]` of the glue check.
    #[serde(default = "default_glue")]
    pub glue: [f64; 2],
}

fn default_singularity_nt() -> usize {
    2001
}

fn default_glue() -> [f64; 2] {
    [0.25, 0.5]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// `(μ, λ, q)` triples of the weighted `L_q` example.
    pub lq_cases: Vec<[f64; 3]>,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { lq_cases: vec![[1.0, 0.0, 2.0], [2.0, 0.5, 1.0], [0.5, -0.5, 3.0]] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_support")]
    pub s_support: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { count: default_count(), s_support: default_support() }
    }
}

fn default_count() -> usize {
    12
}

fn default_support() -> f64 {
    2.0
}

/// Cusp cylinders `[0, s_max] × B` at a base resolution and its refinements.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub characteristics: Vec<CharSpec>,
    #[serde(default)]
    pub base: BaseSpec,
    pub grid: CylinderSpec,
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Double the angular resolution together with the radial one.
    #[serde(default = "default_true")]
    pub refine_theta: bool,
    #[serde(default)]
    pub corpus: CorpusSpec,
    /// Use `ρ ≡ 1` instead of the cusp singularity function.
    #[serde(default)]
    pub unit_weight: bool,
}

fn default_levels() -> usize {
    2
}

fn default_true() -> bool {
    true
}

impl GeometrySpec {
    pub fn settings(&self) -> cuspfs::Result<Vec<Setting>> {
        self.characteristics
            .iter()
            .map(|c| {
                let l = c.build()?;
                let flavor = if l.r.is_linear() { Flavor::Cone } else { Flavor::Cusp };
                let cusp = ModelCusp::new(l.r, self.base.build(), flavor, 1.0)?;
                check_grid(&self.grid)?;
                let st = Setting::new(l.label, cusp, self.grid, self.levels, self.refine_theta);
                Ok(if self.unit_weight { st.with_unit_weight() } else { st })
            })
            .collect()
    }

    pub fn corpus(&self, seed: u64) -> cuspfs::Result<Corpus> {
        Corpus::generate(seed, self.corpus.count, self.corpus.s_support)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbeddingSpec {
    Sobolev { s1: usize, q1: f64, s0: usize, q0: f64 },
    Morrey { k: usize, q: f64, t: usize },
    GagliardoNirenberg { q: f64 },
}

impl EmbeddingSpec {
    pub fn variant(self) -> Embedding {
        match self {
            EmbeddingSpec::Sobolev { s1, q1, s0, q0 } => Embedding::Sobolev { s1, q1, s0, q0 },
            EmbeddingSpec::Morrey { k, q, t } => Embedding::Morrey { k, q, t },
            EmbeddingSpec::GagliardoNirenberg { q } => Embedding::GagliardoNirenberg { q },
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplicationSpec {
    pub k: usize,
    pub q: f64,
    pub lambda0: f64,
    pub lambda1: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedSection {
    pub geometry: GeometrySpec,
    pub k: Vec<usize>,
    pub q: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `(λ₀, λ₁)` pairs with `λ₀ ≤ λ₁` for the monotonicity check.
    #[serde(default)]
    pub lambda_pairs: Vec<[f64; 2]>,
    #[serde(default)]
    pub embeddings: Vec<EmbeddingSpec>,
    #[serde(default)]
    pub multiplication: Option<MultiplicationSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationSection {
    pub geometry: GeometrySpec,
    /// Overlap parameters of the atlases compared by the agreement check.
    pub overlaps: Vec<f64>,
    pub k: Vec<usize>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeOrderSpec {
    pub grid: CylinderSpec,
    pub dts: [f64; 3],
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceOrderSpec {
    pub grid: CylinderSpec,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatSpec {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugationSpec {
    pub grid: CylinderSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub alpha: f64,
    pub lambda: f64,
    #[serde(default = "default_mass")]
    pub mass: MassSpec,
    pub time_order: TimeOrderSpec,
    pub space_order: SpaceOrderSpec,
    pub heat: HeatSpec,
    pub conjugation: ConjugationSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassSpec {
    Identity,
    Conjugated,
}

fn default_mass() -> MassSpec {
    MassSpec::Identity
}

impl MassSpec {
    pub fn mass(self) -> Mass {
        match self {
            MassSpec::Identity => Mass::Identity,
            MassSpec::Conjugated => Mass::Conjugated,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MrCaseSpec {
    pub alpha: f64,
    pub lambda: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MrSection {
    pub cases: Vec<MrCaseSpec>,
    pub grid: CylinderSpec,
    pub dts: [f64; 3],
}

impl MrSection {
    pub fn cases(&self) -> Vec<MrCase> {
        self.cases.iter().map(|c| MrCase { alpha: c.alpha, lambda: c.lambda, q: c.q }).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    /// Opening angle; `2π` is the punctured disk.
    pub theta1: f64,
    pub eps0: f64,
    pub eps1: f64,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    pub ntheta: usize,
}

fn default_r_min() -> f64 {
    1e-4
}

impl SectorSpec {
    pub fn domain(&self) -> cuspfs::Result<ConicalDomain> {
        let d = ConicalDomain { theta1: self.theta1, eps0: self.eps0, eps1: self.eps1, r_min: self.r_min };
        d.validate()?;
        if self.ntheta < 4 {
            return Err(cuspfs::Error::InvalidGrid(format!("ntheta = {} is too small for a sector", self.ntheta)));
        }
        Ok(d)
    }

    /// The same sector with another blend interval.
    pub fn reblended(&self, blend: [f64; 2]) -> SectorSpec {
        SectorSpec { eps0: blend[0], eps1: blend[1], ..self.clone() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KondratievSection {
    pub domains: Vec<SectorSpec>,
    pub nr: usize,
    /// Alternative blend interval `[ε₀, ε₁]` for the stability check.
    pub blend: [f64; 2],
    /// `(a, q)` pairs; the matching distance weight is `λ = a − 2/q`.
    pub cases: Vec<[f64; 2]>,
    pub k: Vec<usize>,
    #[serde(default = "default_count")]
    pub corpus_count: usize,
    /// Radial nodes of the oracle check.
    #[serde(default = "default_oracle_nr")]
    pub oracle_nr: usize,
}

fn default_oracle_nr() -> usize {
    6401
}

impl KondratievSection {
    pub fn cases(&self) -> Vec<(f64, f64)> {
        self.cases.iter().map(|c| (c[0], c[1])).collect()
    }
}

/// Read and parse a config file; every failure is a [`ConfigError`].
pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError(format!("malformed config: {e}")))
}

/// Shipped defaults with the config overrides applied on top.
pub fn tolerances(overrides: Option<&serde_json::Map<String, Value>>) -> Result<Tolerances, ConfigError> {
    let mut base: Value =
        serde_json::from_str(DEFAULT_TOLERANCES).map_err(|e| ConfigError(format!("default tolerance table: {e}")))?;
    if let (Some(obj), Some(over)) = (base.as_object_mut(), overrides) {
        for (k, v) in over {
            obj.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(base).map_err(|e| ConfigError(format!("tolerances: {e}")))
}

/// Reject resolutions no check can run on.
pub fn check_grid(g: &CylinderSpec) -> cuspfs::Result<()> {
    if g.ns < 3 || g.ntheta < 1 || !(g.s_max > 0.0 && g.s_max.is_finite()) {
        return Err(cuspfs::Error::InvalidGrid(format!("unusable cylinder resolution {g:?}")));
    }
    Ok(())
}
