//! Registered checks, the command that owns each one and the library
//! operation behind it.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    ValidateCharacteristic,
    CuspReport,
    Localization,
    NormEquivalence,
    Embedding,
    Multiplication,
    Solve,
    MrStudy,
    Kondratiev,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::ValidateCharacteristic,
        Command::CuspReport,
        Command::Localization,
        Command::NormEquivalence,
        Command::Embedding,
        Command::Multiplication,
        Command::Solve,
        Command::MrStudy,
        Command::Kondratiev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::ValidateCharacteristic => "validate-characteristic",
            Command::CuspReport => "cusp-report",
            Command::Localization => "localization",
            Command::NormEquivalence => "norm-equivalence",
            Command::Embedding => "embedding",
            Command::Multiplication => "multiplication",
            Command::Solve => "solve",
            Command::MrStudy => "mr-study",
            Command::Kondratiev => "kondratiev",
        }
    }

    /// Checks run when the config does not list any.
    pub fn default_checks(self) -> Vec<&'static str> {
        CHECKS.iter().filter(|c| c.command == self).map(|c| c.id).collect()
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// Config section a check reads its parameters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    None,
    Cusp,
    Oracle,
    Weighted,
    Localization,
    Solver,
    Mr,
    Kondratiev,
}

impl Section {
    pub fn key(self) -> &'static str {
        match self {
            Section::None => "",
            Section::Cusp => "cusp",
            Section::Oracle => "oracle",
            Section::Weighted => "weighted",
            Section::Localization => "localization",
            Section::Solver => "solver",
            Section::Mr => "mr",
            Section::Kondratiev => "kondratiev",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckInfo {
    pub id: &'static str,
    pub command: Command,
    pub section: Section,
    /// Library function that computes the check.
    pub operation: &'static str,
    pub description: &'static str,
}

const fn check(
    id: &'static str,
    command: Command,
    section: Section,
    operation: &'static str,
    description: &'static str,
) -> CheckInfo {
    CheckInfo { id, command, section, operation, description }
}

use Command as C;
use Section as S;

/// Sorted by id.
pub const CHECKS: &[CheckInfo] = &[
    check("cusp.arclength", C::CuspReport, S::None, "cusp::checks::arclength_oracle", "arclength maps of t and t^2 against -log s and 1/s - 1"),
    check("cusp.characteristic_bound", C::ValidateCharacteristic, S::Cusp, "cusp::checks::characteristic_bounds", "bound constants c(j) of each characteristic, with c(1) = alpha for power cusps"),
    check("cusp.cone_exact", C::CuspReport, S::None, "cusp::checks::cone_exactness", "cone metric equals the pullback of the Euclidean metric"),
    check("cusp.desingularization", C::CuspReport, S::Cusp, "cusp::checks::desingularization", "rescaled cusp metric equals ds^2 + dtheta^2 in cylinder coordinates"),
    check("cusp.divergence", C::ValidateCharacteristic, S::Cusp, "cusp::checks::divergence", "integral of 1/R from eps to 1 grows past the divergence threshold"),
    check("cusp.equivalence_ratio", C::CuspReport, S::None, "cusp::checks::cusp_ratio", "metric equivalence ratio of the quadratic cusp against 1 + 4t^2"),
    check("cusp.glue", C::CuspReport, S::Cusp, "cusp::checks::glue", "glued weight and metric agree with model and outer data off the blend"),
    check("cusp.singularity_bound", C::CuspReport, S::Cusp, "cusp::checks::singularity_stability", "singularity constants stable under grid doubling"),
    check("kondratiev.blend_stability", C::Kondratiev, S::Kondratiev, "kondratiev::blend_stability", "Kondratiev ratios change little when the blend interval moves"),
    check("kondratiev.bracket", C::Kondratiev, S::Kondratiev, "kondratiev::bracket", "Kondratiev against distance-weighted norms for k = 1, 2 within [1/C, C]"),
    check("kondratiev.cartesian_consistency", C::Kondratiev, S::Kondratiev, "kondratiev::cartesian_consistency", "Cartesian derivative sums against covariant derivative norms pointwise"),
    check("kondratiev.exact_k0", C::Kondratiev, S::Kondratiev, "kondratiev::exact_k0", "order-zero Kondratiev and distance-weighted norms coincide"),
    check("kondratiev.oracle", C::Kondratiev, S::Kondratiev, "kondratiev::oracle", "Kondratiev norms of closed-form functions against quadrature"),
    check("localization.atlas_agreement", C::Localization, S::Localization, "localization::checks::norm_bracket", "localized-norm brackets of two atlases agree"),
    check("localization.norm_bracket", C::Localization, S::Localization, "localization::checks::norm_bracket", "localized against global norms within [1/C, C], stable under refinement"),
    check("localization.right_inverse", C::Localization, S::Localization, "localization::checks::right_inverse", "retraction after coretraction is the identity"),
    check("parabolic.conjugation", C::Solve, S::Solver, "parabolic::checks::conjugation", "desingularized operator equals the conjugated original operator"),
    check("parabolic.ellipticity", C::Solve, S::None, "parabolic::checks::ellipticity_transport", "ellipticity bound carries over to the desingularized operator"),
    check("parabolic.heat_decay", C::Solve, S::Solver, "parabolic::checks::heat_decay", "single heat mode decays like exp(-t)"),
    check("parabolic.laplace_beltrami", C::Solve, S::None, "parabolic::checks::laplace_beltrami_examples", "Laplace-Beltrami operator on closed-form examples"),
    check("parabolic.linearity", C::Solve, S::None, "parabolic::checks::linearity", "solution map is linear in the data"),
    check("parabolic.mr_ratio", C::MrStudy, S::Mr, "parabolic::checks::mr_study", "maximal-regularity ratio stable under time and space refinement"),
    check("parabolic.principal_part", C::Solve, S::None, "parabolic::checks::principal_part", "principal part of the desingularized operator is the rescaled diffusion"),
    check("parabolic.space_order", C::Solve, S::Solver, "parabolic::checks::space_order", "observed spatial order of the manufactured-solution error"),
    check("parabolic.time_order", C::Solve, S::Solver, "parabolic::checks::time_order", "observed implicit Euler order of the manufactured-solution error"),
    check("weighted.commutator", C::NormEquivalence, S::Weighted, "weighted::checks::commutator", "weight commutator ratios bounded and stable under refinement"),
    check("weighted.connection_identity", C::NormEquivalence, S::Weighted, "weighted::checks::connection_identity", "connection difference and product rule residuals with their order"),
    check("weighted.gagliardo_nirenberg", C::Embedding, S::Weighted, "weighted::checks::embedding", "interpolation inequality ratio finite and stable under refinement"),
    check("weighted.isomorphism", C::NormEquivalence, S::Weighted, "weighted::checks::isomorphism", "weight map ratios bounded and stable under refinement"),
    check("weighted.lq_oracle", C::NormEquivalence, S::Oracle, "weighted::checks::lq_oracle", "weighted L_q norm of r^mu against its closed form"),
    check("weighted.measure_change", C::NormEquivalence, S::Weighted, "weighted::checks::measure_change", "order-zero weighted norm equals the rescaled-metric norm"),
    check("weighted.monotonicity", C::Embedding, S::Weighted, "weighted::checks::monotonicity", "weighted norms decrease as the weight index grows"),
    check("weighted.morrey", C::Embedding, S::Weighted, "weighted::checks::embedding", "embedding into bounded continuous functions, ratio stable"),
    check("weighted.multiplication", C::Multiplication, S::Weighted, "weighted::checks::multiplication", "product estimate ratio finite and stable under refinement"),
    check("weighted.norm_equivalence", C::NormEquivalence, S::Weighted, "weighted::checks::norm_equivalence", "weighted against rescaled-metric norms within [1/C, C]"),
    check("weighted.recursion_roundtrip", C::NormEquivalence, S::Weighted, "weighted::checks::recursion_roundtrip", "two correction recursions invert each other up to order 3"),
    check("weighted.sobolev", C::Embedding, S::Weighted, "weighted::checks::embedding", "Sobolev embedding ratio finite and stable under refinement"),
];

pub fn lookup(id: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.id == id)
}

/// `id  description` lines, sorted by id.
pub fn list_checks() -> String {
    let width = CHECKS.iter().map(|c| c.id.len()).max().unwrap_or(0);
    CHECKS.iter().map(|c| format!("{:width$}  {}\n", c.id, c.description)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_unique() {
        assert!(CHECKS.len() >= 14);
        assert!(CHECKS.windows(2).all(|w| w[0].id < w[1].id));
    }

    #[test]
    fn every_command_owns_a_check() {
        for c in Command::ALL {
            assert!(!c.default_checks().is_empty(), "{c}");
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
    }

    #[test]
    fn descriptions_are_single_lines() {
        assert!(CHECKS.iter().all(|c| !c.description.is_empty() && !c.description.contains('\n')));
    }
}
