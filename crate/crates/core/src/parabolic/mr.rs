//! Discrete maximal-regularity functional.

use crate::error::Result;
use crate::geometry::{ScalarField, Valence};
use crate::parabolic::operator::DiffusionProblem;
use crate::parabolic::solve::Trajectory;
use crate::weighted::{weighted_sobolev_norm, NormSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrValue {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or 0 for zero data.
    pub ratio: f64,
}

/// `lhs = ‖u‖_{L_q(J, W_q^{2,λ})} + ‖∂_t u‖_{L_q(J, L_q^{λ−2})}` and
/// `rhs = ‖f‖_{L_q(J, L_q^{λ−2})} + ‖u₀‖_{W_q^{2,λ}}`, with step-wise `q`-sums
/// `(Σ_{n≥1} Δt ‖·(tⁿ)‖^q)^{1/q}` and backward difference quotients for `∂_t u`.
///
/// The `W_q^{2,λ}` norm of `u₀` stands in for its trace-space norm.
pub fn maximal_regularity_functional(
    traj: &Trajectory,
    problem: &DiffusionProblem,
    q: f64,
    u0: &ScalarField,
    f: &dyn Fn(f64) -> Result<ScalarField>,
) -> Result<MrValue> {
    let wm = problem.manifold();
    let lam = problem.lambda();
    let w2 = NormSpec::new(2, lam, q)?;
    let l0 = NormSpec::new(0, lam - 2.0, q)?;
    let dt = traj.dt();
    let mut su = 0.0;
    let mut sdu = 0.0;
    let mut sf = 0.0;
    let mut prev = traj.u(problem, 0)?;
    for n in 1..traj.times.len() {
        let u = traj.u(problem, n)?;
        let du = ScalarField::from_data(
            wm.grid(),
            Valence::SCALAR,
            u.values().iter().zip(prev.values()).map(|(a, b)| (a - b) / dt).collect(),
        )?;
        su += dt * weighted_sobolev_norm(&u, wm, &w2)?.powf(q);
        sdu += dt * weighted_sobolev_norm(&du, wm, &l0)?.powf(q);
        sf += dt * weighted_sobolev_norm(&f(traj.times[n])?, wm, &l0)?.powf(q);
        prev = u;
    }
    let lhs = su.powf(1.0 / q) + sdu.powf(1.0 / q);
    let rhs = sf.powf(1.0 / q) + weighted_sobolev_norm(u0, wm, &w2)?;
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(MrValue { lhs, rhs, ratio })
}
