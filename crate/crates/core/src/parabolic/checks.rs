//! Checks of the desingularized operator, the time stepping and the
//! maximal-regularity functional.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::cusp::{Characteristic, CuspBase, Flavor, ModelCusp};
use crate::error::Result;
use crate::geometry::{laplace_beltrami, laplace_divergence_form, Axis, ChartGrid, LeviCivita, MetricField, ScalarField, Valence};
use crate::par;
use crate::parabolic::mms::Manufactured;
use crate::parabolic::mr::{maximal_regularity_functional, MrValue};
use crate::parabolic::operator::{CylinderOperator, Diffusion, DiffusionProblem};
use crate::parabolic::solve::{solve_hat, Mass, Scheme, TimeStepping, Trajectory};
use crate::report::{drift, CheckResult, Row};
use crate::tolerance::{Band, Tolerances};
use crate::weighted::{CylinderSpec, WeightedManifold};

/// Final time of the manufactured-solution runs.
pub const T_END: f64 = 0.5;

/// Power cusp `t^α` over the circle with radius cap 1 (a cone for `α = 1`).
pub fn power_cusp(alpha: f64) -> Result<ModelCusp> {
    let r = Characteristic::power(alpha)?;
    let flavor = if r.is_linear() { Flavor::Cone } else { Flavor::Cusp };
    ModelCusp::new(r, CuspBase::Circle, flavor, 1.0)
}

fn interior(grid: &ChartGrid, margin: usize) -> Vec<usize> {
    (0..grid.len())
        .filter(|&n| {
            let mi = grid.multi_index(n);
            grid.axes().iter().enumerate().all(|(a, ax)| ax.is_periodic() || (mi[a] >= margin && mi[a] + margin < ax.len()))
        })
        .collect()
}

fn patch(x: (f64, f64), y: (f64, f64), n: usize) -> Result<Arc<ChartGrid>> {
    Ok(Arc::new(ChartGrid::two_d(Axis::uniform(x.0, x.1, n)?, Axis::uniform(y.0, y.1, n)?)?))
}

/// `Δu = g*•∇²u` on three closed-form examples, against the exact value and
/// against the divergence form, on interior nodes of small patches.
pub fn laplace_beltrami_examples(tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.laplace_beltrami";
    type Example = (&'static str, Arc<ChartGrid>, fn([f64; 2]) -> [[f64; 2]; 2], fn([f64; 2]) -> f64, fn([f64; 2]) -> f64);
    let examples: Vec<Example> = vec![
        ("flat", patch((-1.0, 1.0), (-1.0, 1.0), 41)?, |_| [[1.0, 0.0], [0.0, 1.0]], |[x, y]| x * x + y * y, |_| 4.0),
        ("cylinder", patch((1.0, 1.1), (0.5, 0.6), 101)?, |_| [[1.0, 0.0], [0.0, 1.0]], |[s, t]| s.sin() * t.sin(), |[s, t]| {
            -2.0 * s.sin() * t.sin()
        }),
        ("cone", patch((1.0, 1.1), (0.0, 0.1), 101)?, |[t, _]| [[1.0, 0.0], [0.0, t * t]], |[t, _]| t * t, |_| 4.0),
    ];
    let mut parts = Vec::new();
    let mut rows = Vec::new();
    for (label, grid, metric, u, exact) in examples {
        let g = MetricField::from_fn(&grid, metric)?;
        let conn = LeviCivita::new(&g)?;
        let uf = ScalarField::scalar_fn(&grid, u);
        let lb = laplace_beltrami(&uf, &conn)?;
        let dv = laplace_divergence_form(&uf, &g)?;
        let nodes = interior(&grid, 2);
        let err = nodes.iter().map(|&n| (lb.value(n) - exact(grid.point(n))).abs()).fold(0.0, f64::max);
        let cross = nodes.iter().map(|&n| (lb.value(n) - dv.value(n)).abs()).fold(0.0, f64::max);
        rows.push(Row::new(ID, format!("{label}/exact"), err));
        rows.push(Row::new(ID, format!("{label}/divergence_form"), cross));
        parts.push(CheckResult::at_most(ID, err.max(cross), tol.connection_residual, vec![]).note(label));
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok(out)
}

/// Principal part and trivial weight: with `a = id`, `â₂ = ĝ*` on a power
/// cusp, and for `λ = 0`, `ρ ≡ 1` the operator is `−Δ` (all coefficients and
/// the action on a smooth function).
pub fn principal_part(tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.principal_part";
    let mut rows = Vec::new();
    let cusp = power_cusp(2.0)?;
    let wm = WeightedManifold::cusp_cylinder(&cusp, &CylinderSpec { ns: 61, ntheta: 16, s_max: 6.0 })?;
    let a = Diffusion::Identity.field(&wm)?;
    let mut worst = 0.0f64;
    for &lambda in &[0.0, 1.0] {
        let p = DiffusionProblem::new(wm.clone(), a.clone(), lambda)?;
        let op = CylinderOperator::new(&p, tol.ellipticity_slack)?;
        let e = op.a2.sub(wm.ghat().inv())?.max_abs();
        rows.push(Row::new(ID, "power2/a2_vs_ghat_inv", e).lambda(lambda));
        worst = worst.max(e);
    }
    let grid = Arc::new(ChartGrid::two_d(Axis::uniform(0.0, 3.0, 61)?, Axis::periodic(0.0, TAU, 16)?)?);
    let flat = WeightedManifold::new(MetricField::flat(&grid), ScalarField::constant_scalar(&grid, 1.0))?;
    let p = DiffusionProblem::new(flat.clone(), Diffusion::Identity.field(&flat)?, 0.0)?;
    let op = CylinderOperator::new(&p, tol.ellipticity_slack)?;
    let coeff = op.a2.sub(flat.g().inv())?.max_abs().max(op.a1.max_abs()).max(op.a0.max_abs());
    let u = ScalarField::scalar_fn(&grid, |[s, t]| (1.3 * s).sin() * (2.0 * t).cos());
    let lap = laplace_beltrami(&u, flat.conn())?;
    let action = op.apply(&u)?.add(&lap)?.max_abs() / lap.max_abs();
    rows.push(Row::new(ID, "flat/coefficients", coeff));
    rows.push(Row::new(ID, "flat/action", action));
    worst = worst.max(coeff).max(action);
    Ok(CheckResult::at_most(ID, worst, tol.desingularization, rows))
}

/// `â₂` is elliptic with the constant certified for `a`, for anisotropic
/// diffusion on power cusps.
pub fn ellipticity_transport(tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.ellipticity";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &alpha in &[1.0, 2.0] {
        let cusp = power_cusp(alpha)?;
        let wm = WeightedManifold::cusp_cylinder(&cusp, &CylinderSpec { ns: 61, ntheta: 16, s_max: 6.0 })?;
        for &amp in &[0.0, 0.5, 1.0] {
            let a = Diffusion::Anisotropic { amplitude: amp }.field(&wm)?;
            let p = DiffusionProblem::new(wm.clone(), a, 0.5)?;
            let op = CylinderOperator::new(&p, tol.ellipticity_slack)?;
            let gap = (p.ellipticity() - op.ellipticity()).max(0.0);
            rows.push(Row::new(ID, format!("power{alpha}/amp{amp}"), op.ellipticity()).ratio(p.ellipticity()));
            worst = worst.max(gap);
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.ellipticity_slack, rows))
}

/// Discrepancy field `Â_h û − ρ^{2−λ}𝒜_h(ρ^λ û)` at every node.
fn conjugation_defect(wm: &WeightedManifold, amp: f64, lambda: f64, tol: &Tolerances) -> Result<(Vec<f64>, Vec<f64>)> {
    let uhat = ScalarField::scalar_fn(wm.grid(), |[s, t]| (0.8 * s).sin() * (1.0 + 0.4 * (t + 0.3).cos()) + 0.2 * (0.5 * s).cos());
    let a = Diffusion::Anisotropic { amplitude: amp }.field(wm)?;
    let p = DiffusionProblem::new(wm.clone(), a, lambda)?;
    let op = CylinderOperator::new(&p, tol.ellipticity_slack)?;
    let lhs = op.matrix()?.matvec(uhat.values());
    let rhs = p.apply_direct(&uhat)?.into_data();
    Ok((lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect(), rhs))
}

/// Conjugation identity `Â∘P^{−λ} = P^{2−λ}∘𝒜`: the finite-difference
/// `Â_h û` against `ρ^{2−λ}𝒜(ρ^λ û)` evaluated in the original variables.
///
/// Both sides carry their own `O(h²)` truncation error, so the discrepancy is
/// computed on `spec` and on its refinement and Richardson-extrapolated on the
/// coarse interior nodes; the value is the extrapolated discrepancy relative to
/// `max|Â û|`. Rows also give the raw discrepancies.
pub fn conjugation(spec: &CylinderSpec, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.conjugation";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &alpha in &[1.0, 2.0] {
        let cusp = power_cusp(alpha)?;
        let coarse = WeightedManifold::cusp_cylinder(&cusp, spec)?;
        let fine = WeightedManifold::cusp_cylinder(&cusp, &spec.refined(cusp.base()))?;
        let (cg, fg) = (coarse.grid(), fine.grid());
        let nodes = interior(cg, 2);
        let inject = |n: usize| {
            let [i, j] = cg.multi_index(n);
            fg.node(2 * i, 2 * j)
        };
        for &(amp, lambda) in &[(0.0, 0.0), (0.5, -1.0), (0.5, 1.5)] {
            let (dc, rc) = conjugation_defect(&coarse, amp, lambda, tol)?;
            let (df, _) = conjugation_defect(&fine, amp, lambda, tol)?;
            let scale = nodes.iter().map(|&n| rc[n].abs()).fold(0.0, f64::max);
            let raw_c = nodes.iter().map(|&n| dc[n].abs()).fold(0.0, f64::max) / scale;
            let raw_f = nodes.iter().map(|&n| df[inject(n)].abs()).fold(0.0, f64::max) / scale;
            let ext = nodes.iter().map(|&n| ((4.0 * df[inject(n)] - dc[n]) / 3.0).abs()).fold(0.0, f64::max) / scale;
            let fid = format!("power{alpha}/amp{amp}");
            rows.push(Row::new(ID, format!("{fid}/raw"), raw_c).lambda(lambda).level(0));
            rows.push(Row::new(ID, format!("{fid}/raw"), raw_f).lambda(lambda).level(1));
            rows.push(Row::new(ID, format!("{fid}/extrapolated"), ext).lambda(lambda).ratio(raw_c / raw_f).level(1));
            worst = worst.max(ext);
        }
    }
    Ok(CheckResult::at_most(ID, worst, tol.conjugation, rows))
}

/// Problem, operator and manufactured run on a power cusp with `a = id`.
pub struct MmsSetup {
    pub cusp: ModelCusp,
    pub problem: DiffusionProblem,
    pub op: CylinderOperator,
    pub mms: Manufactured,
}

impl MmsSetup {
    pub fn new(alpha: f64, spec: &CylinderSpec, lambda: f64, tol: &Tolerances) -> Result<Self> {
        let cusp = power_cusp(alpha)?;
        let wm = WeightedManifold::cusp_cylinder(&cusp, spec)?;
        let a = Diffusion::Identity.field(&wm)?;
        let problem = DiffusionProblem::new(wm, a, lambda)?;
        let op = CylinderOperator::new(&problem, tol.ellipticity_slack)?;
        Ok(MmsSetup { cusp, problem, op, mms: Manufactured::default() })
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        self.problem.manifold().grid()
    }

    pub fn fhat(&self, mass: Mass, t: f64) -> Result<Vec<f64>> {
        let rho = self.problem.manifold().rho().values();
        self.mms.fhat(&self.cusp, self.grid(), rho, self.problem.lambda(), mass, t)
    }

    pub fn run(&self, cfg: &TimeStepping) -> Result<Trajectory> {
        let u0 = self.mms.uhat(self.grid(), 0.0);
        solve_hat(&self.problem, &self.op, &u0, &|t| self.fhat(cfg.mass, t), cfg)
    }

    /// `(Σ_n Δt ‖ûⁿ − û*(tⁿ)‖²_{L₂})^{1/2}` over `n ≥ 1`.
    pub fn error(&self, traj: &Trajectory) -> f64 {
        let grid = self.grid();
        let dt = traj.dt();
        let sum: f64 = traj
            .times
            .iter()
            .zip(&traj.uhat)
            .skip(1)
            .map(|(&t, u)| {
                let ex = self.mms.uhat(grid, t);
                dt * (0..grid.len()).map(|n| grid.cell_measure(n) * (u[n] - ex[n]).powi(2)).sum::<f64>()
            })
            .sum();
        sum.sqrt()
    }
}

fn stepping(dt: f64, scheme: Scheme, mass: Mass, tol: &Tolerances) -> TimeStepping {
    TimeStepping { tol: tol.solver_tolerance, max_iter: tol.solver_max_iterations, ..TimeStepping::new(dt, T_END, scheme).mass(mass) }
}

fn band_result(id: &str, order: f64, band: Band, rows: Vec<Row>) -> CheckResult {
    CheckResult::at_least(id, order, band.lo, rows)
        .with_pass(band.contains(order))
        .note(format!("band [{}, {}]", band.lo, band.hi))
}

/// Discrete `L₂(J × M̂)` distance between a coarse trajectory and a finer one
/// sampled at the coarse times and nodes.
fn distance(grid: &ChartGrid, coarse: &Trajectory, fine: &Trajectory, node_map: &dyn Fn(usize) -> usize) -> f64 {
    let stride = ((coarse.dt() / fine.dt()).round() as usize).max(1);
    let dt = coarse.dt();
    let sum: f64 = (1..coarse.times.len())
        .map(|k| {
            let (a, b) = (&coarse.uhat[k], &fine.uhat[k * stride]);
            dt * (0..grid.len()).map(|n| grid.cell_measure(n) * (a[n] - b[node_map(n)]).powi(2)).sum::<f64>()
        })
        .sum();
    sum.sqrt()
}

/// Observed implicit-Euler time order from the Richardson triple
/// `log₂(‖u_Δt − u_{Δt/2}‖ / ‖u_{Δt/2} − u_{Δt/4}‖)` on a fixed grid.
pub fn time_order(alpha: f64, lambda: f64, spec: &CylinderSpec, dts: [f64; 3], mass: Mass, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.time_order";
    let setup = MmsSetup::new(alpha, spec, lambda, tol)?;
    let runs: Vec<Result<Trajectory>> = par::map_slice(&dts, |&dt| setup.run(&stepping(dt, Scheme::ImplicitEuler, mass, tol)));
    let runs: Vec<Trajectory> = runs.into_iter().collect::<Result<_>>()?;
    let id = |n: usize| n;
    let d1 = distance(setup.grid(), &runs[0], &runs[1], &id);
    let d2 = distance(setup.grid(), &runs[1], &runs[2], &id);
    let p = (d1 / d2).log2();
    let mut rows = Vec::new();
    for (level, (r, dt)) in runs.iter().zip(dts).enumerate() {
        rows.push(Row::new(ID, format!("power{alpha}/error/dt{dt}"), setup.error(r)).lambda(lambda).level(level));
    }
    rows.push(Row::new(ID, format!("power{alpha}/richardson"), p).lambda(lambda).ratio(d1 / d2));
    Ok(band_result(ID, p, tol.time_order, rows))
}

/// Observed spatial order from the Richardson triple over three nested
/// cylinder grids, Crank-Nicolson with a common small step.
pub fn space_order(alpha: f64, lambda: f64, base: &CylinderSpec, dt: f64, mass: Mass, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.space_order";
    let cusp = power_cusp(alpha)?;
    let specs: Vec<CylinderSpec> = (0..3).map(|l| base.level(cusp.base(), l)).collect();
    let runs: Vec<Result<(MmsSetup, Trajectory)>> = par::map_slice(&specs, |sp| {
        let s = MmsSetup::new(alpha, sp, lambda, tol)?;
        let t = s.run(&stepping(dt, Scheme::CrankNicolson, mass, tol))?;
        Ok((s, t))
    });
    let runs: Vec<(MmsSetup, Trajectory)> = runs.into_iter().collect::<Result<_>>()?;
    let injection = |coarse: &ChartGrid, fine: &ChartGrid| {
        let (c, f) = (coarse.clone(), fine.clone());
        move |n: usize| {
            let [i, j] = c.multi_index(n);
            if c.dim() == 1 {
                2 * i
            } else {
                f.node(2 * i, 2 * j)
            }
        }
    };
    let m01 = injection(runs[0].0.grid(), runs[1].0.grid());
    let m12 = injection(runs[1].0.grid(), runs[2].0.grid());
    let d1 = distance(runs[0].0.grid(), &runs[0].1, &runs[1].1, &m01);
    let d2 = distance(runs[1].0.grid(), &runs[1].1, &runs[2].1, &m12);
    let p = (d1 / d2).log2();
    let mut rows = Vec::new();
    for (level, (s, t)) in runs.iter().enumerate() {
        rows.push(Row::new(ID, format!("power{alpha}/error/ns{}", specs[level].ns), s.error(t)).lambda(lambda).level(level));
    }
    rows.push(Row::new(ID, format!("power{alpha}/richardson"), p).lambda(lambda).ratio(d1 / d2));
    Ok(band_result(ID, p, tol.space_order, rows))
}

/// Heat mode `u₀ = sin θ` on a flat torus (`ρ ≡ 1`): `u(T) = e^{−T} sin θ`.
pub fn heat_decay(n: usize, dt: f64, t_end: f64, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.heat_decay";
    let grid = Arc::new(ChartGrid::two_d(Axis::periodic(0.0, TAU, n)?, Axis::periodic(0.0, TAU, n)?)?);
    let wm = WeightedManifold::new(MetricField::flat(&grid), ScalarField::constant_scalar(&grid, 1.0))?;
    let p = DiffusionProblem::new(wm.clone(), Diffusion::Identity.field(&wm)?, 0.0)?;
    let op = CylinderOperator::new(&p, tol.ellipticity_slack)?;
    let u0: Vec<f64> = (0..grid.len()).map(|k| grid.point(k)[1].sin()).collect();
    let zero = vec![0.0; grid.len()];
    let cfg = TimeStepping { tol: tol.solver_tolerance, max_iter: tol.solver_max_iterations, ..TimeStepping::new(dt, t_end, Scheme::ImplicitEuler) };
    let traj = solve_hat(&p, &op, &u0, &|_| Ok(zero.clone()), &cfg)?;
    let last = traj.uhat.last().expect("initial value");
    // amplitude by projection onto the mode
    let num: f64 = last.iter().zip(&u0).map(|(a, b)| a * b).sum();
    let den: f64 = u0.iter().map(|b| b * b).sum();
    let amp = num / den;
    let exact = (-t_end).exp();
    let err = (amp - exact).abs() / exact;
    let rows = vec![Row::new(ID, "torus/sin_theta", amp).ratio(amp / exact)];
    Ok(CheckResult::at_most(ID, err, tol.heat_decay, rows))
}

/// Doubling `(f̂, û₀)` doubles the solution, and zero data gives zero.
pub fn linearity(tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "parabolic.linearity";
    let setup = MmsSetup::new(2.0, &CylinderSpec { ns: 31, ntheta: 8, s_max: Manufactured::S_MAX }, 1.0, tol)?;
    let cfg = stepping(0.05, Scheme::CrankNicolson, Mass::Identity, tol);
    let one = setup.run(&cfg)?;
    let u0: Vec<f64> = setup.mms.uhat(setup.grid(), 0.0).iter().map(|v| 2.0 * v).collect();
    let two = solve_hat(&setup.problem, &setup.op, &u0, &|t| Ok(setup.fhat(Mass::Identity, t)?.iter().map(|v| 2.0 * v).collect()), &cfg)?;
    let scale = one.step_norms().into_iter().fold(0.0, f64::max);
    let dev = one
        .uhat
        .iter()
        .zip(&two.uhat)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (2.0 * x - y).abs()))
        .fold(0.0, f64::max)
        / scale;
    let zeros = vec![0.0; setup.grid().len()];
    let z = solve_hat(&setup.problem, &setup.op, &zeros, &|_| Ok(zeros.clone()), &cfg)?;
    let zmax = z.step_norms().into_iter().fold(0.0, f64::max);
    let rows = vec![Row::new(ID, "double_data", dev), Row::new(ID, "zero_data", zmax)];
    // relative deviation is limited by the iterative solve tolerance
    Ok(CheckResult::at_most(ID, dev.max(zmax), 100.0 * tol.solver_tolerance, rows))
}

/// One maximal-regularity run: base resolution, two finer steps and two finer grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrCase {
    pub alpha: f64,
    pub lambda: f64,
    pub q: f64,
}

/// Ratio `lhs/rhs` of the maximal-regularity functional for the manufactured
/// data on `(base, dts[0])`, `(base, dts[1..])` and the two refined grids.
pub fn mr_ratios(case: MrCase, base: &CylinderSpec, dts: [f64; 3], tol: &Tolerances) -> Result<Vec<(String, usize, MrValue)>> {
    let cusp = power_cusp(case.alpha)?;
    let runs: Vec<(String, CylinderSpec, f64, usize)> = vec![
        ("base".into(), *base, dts[0], 0),
        (format!("dt{}", dts[1]), *base, dts[1], 1),
        (format!("dt{}", dts[2]), *base, dts[2], 2),
        ("space1".into(), base.level(cusp.base(), 1), dts[0], 1),
        ("space2".into(), base.level(cusp.base(), 2), dts[0], 2),
    ];
    par::map_slice(&runs, |(label, spec, dt, level)| {
        let setup = MmsSetup::new(case.alpha, spec, case.lambda, tol)?;
        let cfg = stepping(*dt, Scheme::ImplicitEuler, Mass::Identity, tol);
        let traj = setup.run(&cfg)?;
        let wm = setup.problem.manifold();
        let lam = case.lambda;
        let rho = wm.rho();
        let u0 = ScalarField::from_data(
            wm.grid(),
            Valence::SCALAR,
            setup.mms.uhat(wm.grid(), 0.0).iter().zip(rho.values()).map(|(u, r)| r.powf(lam) * u).collect(),
        )?;
        // f = ρ^{λ−2} f̂
        let source = |t: f64| -> Result<ScalarField> {
            let fh = setup.fhat(Mass::Identity, t)?;
            ScalarField::from_data(wm.grid(), Valence::SCALAR, fh.iter().zip(rho.values()).map(|(f, r)| r.powf(lam - 2.0) * f).collect())
        };
        let v = maximal_regularity_functional(&traj, &setup.problem, case.q, &u0, &source)?;
        Ok((label.clone(), *level, v))
    })
    .into_iter()
    .collect()
}

/// Every run of a maximal-regularity study, labelled as in [`mr_ratios`].
pub type MrRuns = Vec<(MrCase, Vec<(String, usize, MrValue)>)>;

/// Refinement stability of the maximal-regularity ratio over a family of cases.
pub fn mr_study(cases: &[MrCase], base: &CylinderSpec, dts: [f64; 3], tol: &Tolerances) -> Result<(CheckResult, MrRuns)> {
    const ID: &str = "parabolic.mr_ratio";
    let all: Vec<Result<Vec<(String, usize, MrValue)>>> = par::map_slice(cases, |c| mr_ratios(*c, base, dts, tol));
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    let mut runs = Vec::new();
    for (c, res) in cases.iter().zip(all) {
        let res = res?;
        let base_ratio = res[0].2.ratio;
        let worst = res.iter().map(|r| drift(base_ratio, r.2.ratio)).fold(0.0, f64::max);
        let fid = format!("power{}", c.alpha);
        for (label, level, v) in &res {
            rows.push(Row::new(ID, format!("{fid}/{label}"), v.lhs).q(c.q).lambda(c.lambda).ratio(v.ratio).level(*level));
        }
        parts.push(
            CheckResult::at_most(ID, worst, tol.max_regularity_drift, vec![])
                .note(format!("{fid} λ={} q={} C={base_ratio:.4}", c.lambda, c.q)),
        );
        runs.push((*c, res));
    }
    let mut out = CheckResult::merge(ID, parts);
    out.rows = rows;
    Ok((out, runs))
}

/// The eight cases `(λ, q, α) ∈ {0, 1} × {2, 4} × {1, 2}`.
pub fn mr_cases() -> Vec<MrCase> {
    let mut out = Vec::new();
    for &lambda in &[0.0, 1.0] {
        for &q in &[2.0, 4.0] {
            for &alpha in &[1.0, 2.0] {
                out.push(MrCase { alpha, lambda, q });
            }
        }
    }
    out
}
