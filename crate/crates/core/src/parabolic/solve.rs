//! θ-scheme time stepping of the desingularized problem on the cylinder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, Valence};
use crate::par;
use crate::parabolic::operator::{boundary_rows, CylinderOperator, DiffusionProblem};
use crate::parabolic::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
}

impl Scheme {
    fn theta(self) -> f64 {
        match self {
            Scheme::ImplicitEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        }
    }
}

/// Coefficient of `∂_t û` on the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mass {
    /// `∂_t û + Â û = f̂`, the uniformly parabolic cylinder problem.
    Identity,
    /// `ρ² ∂_t û + Â û = f̂`, equivalent to `∂_t u + 𝒜u = f` under `u = ρ^λ û`.
    Conjugated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeStepping {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    #[serde(default = "default_mass")]
    pub mass: Mass,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_mass() -> Mass {
    Mass::Identity
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    20_000
}

impl TimeStepping {
    pub fn new(dt: f64, t_end: f64, scheme: Scheme) -> Self {
        TimeStepping { dt, t_end, scheme, mass: Mass::Identity, tol: default_tol(), max_iter: default_max_iter() }
    }

    pub fn mass(mut self, mass: Mass) -> Self {
        self.mass = mass;
        self
    }

    /// Number of uniform steps; `t_end` must be a multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.t_end > 0.0) || self.dt > self.t_end {
            return Err(Error::InvalidParameter(format!("time step {} for horizon {}", self.dt, self.t_end)));
        }
        let n = (self.t_end / self.dt).round();
        if ((n * self.dt) - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(Error::InvalidParameter(format!("horizon {} is not a multiple of {}", self.t_end, self.dt)));
        }
        Ok(n as usize)
    }
}

/// Solution on the uniform time grid `tⁿ = n·Δt`, in cylinder variables.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub uhat: Vec<Vec<f64>>,
    /// Iterations of each linear solve.
    pub iterations: Vec<usize>,
}

impl Trajectory {
    pub fn dt(&self) -> f64 {
        self.times.get(1).map_or(0.0, |t| t - self.times[0])
    }

    /// `u = ρ^λ û` at step `n`.
    pub fn u(&self, problem: &DiffusionProblem, n: usize) -> Result<ScalarField> {
        let wm = problem.manifold();
        let lam = problem.lambda();
        let rho = wm.rho();
        ScalarField::from_data(
            wm.grid(),
            Valence::SCALAR,
            par::map_range(rho.values().len(), |i| rho.value(i).powf(lam) * self.uhat[n][i]),
        )
    }

    /// `‖ûⁿ‖_∞` per step.
    pub fn step_norms(&self) -> Vec<f64> {
        self.uhat.iter().map(|v| v.iter().fold(0.0f64, |a, x| a.max(x.abs()))).collect()
    }
}

fn mass_vector(problem: &DiffusionProblem, mass: Mass) -> Vec<f64> {
    match mass {
        Mass::Identity => vec![1.0; problem.manifold().grid().len()],
        Mass::Conjugated => problem.manifold().rho().values().iter().map(|r| r * r).collect(),
    }
}

/// Step `(M + θΔt Â) ûⁿ⁺¹ = (M − (1−θ)Δt Â) ûⁿ + Δt(θ f̂ⁿ⁺¹ + (1−θ) f̂ⁿ)` with
/// the boundary rows imposed, from `û⁰ = uhat0`; `fhat(t)` gives nodal values.
pub fn solve_hat(
    problem: &DiffusionProblem,
    op: &CylinderOperator,
    uhat0: &[f64],
    fhat: &dyn Fn(f64) -> Result<Vec<f64>>,
    cfg: &TimeStepping,
) -> Result<Trajectory> {
    let steps = cfg.steps()?;
    let grid = problem.manifold().grid();
    let n = grid.len();
    if uhat0.len() != n {
        return Err(Error::GridMismatch);
    }
    let th = cfg.scheme.theta();
    let dt = cfg.dt;
    let a = op.matrix()?;
    let mass = CsrMatrix::from_rows(mass_vector(problem, cfg.mass).into_iter().enumerate().map(|(i, v)| vec![(i, v)]).collect())?;
    let bc = boundary_rows(grid);
    let lhs = mass.combine(1.0, &a, th * dt)?.with_rows_replaced(&bc)?;
    let explicit = mass.combine(1.0, &a, -(1.0 - th) * dt)?;
    let bc_nodes: Vec<usize> = bc.iter().map(|r| r.0).collect();

    let mut times = vec![0.0];
    let mut uhat = vec![uhat0.to_vec()];
    let mut iterations = Vec::with_capacity(steps);
    let mut f_old = if th < 1.0 { fhat(0.0)? } else { Vec::new() };
    for k in 0..steps {
        let t_new = (k + 1) as f64 * dt;
        let f_new = fhat(t_new)?;
        if f_new.len() != n {
            return Err(Error::GridMismatch);
        }
        let prev = &uhat[k];
        let ex = explicit.matvec(prev);
        let mut rhs: Vec<f64> = par::map_range(n, |i| {
            let f = if th < 1.0 { th * f_new[i] + (1.0 - th) * f_old[i] } else { f_new[i] };
            ex[i] + dt * f
        });
        for &i in &bc_nodes {
            rhs[i] = 0.0;
        }
        let mut x = prev.clone();
        let fail = |e: Error| Error::StepFailed { step: k + 1, time: t_new, source: Box::new(e) };
        let st = lhs.bicgstab(&rhs, &mut x, cfg.tol, cfg.max_iter).map_err(fail)?;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(fail(Error::NonFinite(format!("solution at node {i}"))));
        }
        iterations.push(st.iterations);
        times.push(t_new);
        uhat.push(x);
        f_old = f_new;
    }
    Ok(Trajectory { times, uhat, iterations })
}

/// Solve `∂_t u + 𝒜u = f`, `u(0) = u₀`, through the cylinder: `û⁰ = ρ^{−λ}u₀`,
/// `f̂ = ρ^{2−λ}f`, and `u = ρ^λ û` (see [`Trajectory::u`]).
pub fn solve_ivp(
    problem: &DiffusionProblem,
    op: &CylinderOperator,
    u0: &ScalarField,
    f: &dyn Fn(f64) -> Result<ScalarField>,
    cfg: &TimeStepping,
) -> Result<Trajectory> {
    let rho = problem.manifold().rho();
    let lam = problem.lambda();
    let uhat0: Vec<f64> = u0.values().iter().zip(rho.values()).map(|(u, r)| u * r.powf(-lam)).collect();
    let scale: Vec<f64> = rho.values().iter().map(|r| r.powf(2.0 - lam)).collect();
    let fhat = |t: f64| -> Result<Vec<f64>> {
        let v = f(t)?;
        Ok(v.values().iter().zip(&scale).map(|(a, b)| a * b).collect())
    };
    solve_hat(problem, op, &uhat0, &fhat, cfg)
}
