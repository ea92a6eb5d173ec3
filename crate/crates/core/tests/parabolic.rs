use cuspfs::geometry::ScalarField;
use cuspfs::parabolic::checks::{heat_decay, time_order, MmsSetup, T_END};
use cuspfs::parabolic::{maximal_regularity_functional, solve_ivp, CsrMatrix, Mass, Scheme, TimeStepping};
use cuspfs::tolerance::Tolerances;
use cuspfs::weighted::CylinderSpec;
use cuspfs::Error;
use proptest::prelude::*;

fn setup(lambda: f64) -> MmsSetup {
    MmsSetup::new(2.0, &CylinderSpec { ns: 31, ntheta: 4, s_max: 6.0 }, lambda, &Tolerances::default()).unwrap()
}

#[test]
fn zero_data_gives_zero_solution_and_ratio() {
    let s = setup(1.0);
    let grid = s.grid().clone();
    let zero = ScalarField::constant_scalar(&grid, 0.0);
    let f = |_t: f64| Ok(ScalarField::constant_scalar(&grid, 0.0));
    let cfg = TimeStepping::new(0.05, T_END, Scheme::ImplicitEuler);
    let traj = solve_ivp(&s.problem, &s.op, &zero, &f, &cfg).unwrap();
    assert!(traj.step_norms().iter().all(|v| *v == 0.0));
    let mr = maximal_regularity_functional(&traj, &s.problem, 2.0, &zero, &f).unwrap();
    assert_eq!((mr.lhs, mr.rhs, mr.ratio), (0.0, 0.0, 0.0));
}

#[test]
fn conjugated_mass_is_first_order_too() {
    let tol = Tolerances::default();
    let r = time_order(2.0, 1.0, &CylinderSpec { ns: 61, ntheta: 8, s_max: 6.0 }, [4e-3, 2e-3, 1e-3], Mass::Conjugated, &tol)
        .unwrap();
    assert!(tol.time_order.contains(r.value), "order {}", r.value);
}

#[test]
fn heat_mode_decays_like_exp() {
    let r = heat_decay(32, 1e-3, 0.5, &Tolerances::default()).unwrap();
    assert!(r.pass, "{}", r.value);
}

/// Final-time gap between steps `dt` and `dt/2`; spatial error cancels.
fn halving_gap(s: &MmsSetup, dt: f64, scheme: Scheme) -> f64 {
    let a = s.run(&TimeStepping::new(dt, T_END, scheme)).unwrap();
    let b = s.run(&TimeStepping::new(dt / 2.0, T_END, scheme)).unwrap();
    let (ua, ub) = (a.uhat.last().unwrap(), b.uhat.last().unwrap());
    ua.iter().zip(ub).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn crank_nicolson_is_second_order_in_time() {
    let s = setup(0.0);
    let ie = halving_gap(&s, 0.05, Scheme::ImplicitEuler) / halving_gap(&s, 0.025, Scheme::ImplicitEuler);
    let cn = halving_gap(&s, 0.05, Scheme::CrankNicolson) / halving_gap(&s, 0.025, Scheme::CrankNicolson);
    assert!((1.6..2.5).contains(&ie), "implicit Euler {ie}");
    assert!(cn > 3.2, "Crank-Nicolson {cn}");
}

#[test]
fn step_must_divide_the_horizon() {
    assert!(matches!(TimeStepping::new(0.3, 0.5, Scheme::ImplicitEuler).steps(), Err(Error::InvalidParameter(_))));
    assert_eq!(TimeStepping::new(0.1, 0.5, Scheme::ImplicitEuler).steps().unwrap(), 5);
}

#[test]
fn solver_breakdown_names_the_step() {
    let s = setup(1.0);
    let mut cfg = TimeStepping::new(0.1, T_END, Scheme::ImplicitEuler);
    cfg.max_iter = 1;
    cfg.tol = 1e-15;
    match s.run(&cfg) {
        Err(Error::StepFailed { step, source, .. }) => {
            assert_eq!(step, 1);
            assert!(matches!(*source, Error::SolveFailed { .. }));
        }
        other => panic!("expected a step failure, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solution_map_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let s = setup(0.5);
        let grid = s.grid().clone();
        let u1 = ScalarField::scalar_fn(&grid, |[x, t]| (x * (6.0 - x)).max(0.0) * (1.0 + 0.2 * t.cos()) * (-x).exp());
        let u2 = ScalarField::scalar_fn(&grid, |[x, _]| x.sin() * (-x).exp());
        let f = |_t: f64| Ok(ScalarField::constant_scalar(&grid, 0.0));
        let cfg = TimeStepping::new(0.1, T_END, Scheme::ImplicitEuler);
        let run = |u: &ScalarField| solve_ivp(&s.problem, &s.op, u, &f, &cfg).unwrap();
        let combo = u1.scale(a).add(&u2.scale(b)).unwrap();
        let (t1, t2, tc) = (run(&u1), run(&u2), run(&combo));
        let last = t1.uhat.len() - 1;
        let scale = t1.step_norms()[last].max(t2.step_norms()[last]).max(1.0);
        for i in 0..grid.len() {
            let lin = a * t1.uhat[last][i] + b * t2.uhat[last][i];
            prop_assert!((tc.uhat[last][i] - lin).abs() < 1e-7 * scale);
        }
    }

    #[test]
    fn bicgstab_meets_its_tolerance(n in 5usize..60, seed in 0u64..1000) {
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                let off = ((seed + i as u64) % 7) as f64 / 10.0;
                let mut r = vec![(i, 4.0 + off)];
                if i > 0 { r.push((i - 1, -1.0)); }
                if i + 1 < n { r.push((i + 1, -1.0 + off)); }
                r
            })
            .collect();
        let a = CsrMatrix::from_rows(rows).unwrap();
        let b: Vec<f64> = (0..n).map(|i| ((i as u64 * 31 + seed) % 11) as f64 - 5.0).collect();
        let mut x = vec![0.0; n];
        let st = a.bicgstab(&b, &mut x, 1e-12, 500).unwrap();
        let r = a.matvec(&x);
        let res: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-10 * nb.max(1e-300), "residual {res}, stats {st:?}");
    }
}
