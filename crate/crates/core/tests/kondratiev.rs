use std::f64::consts::{PI, TAU};

use cuspfs::cusp::{adaptive_quad, Cutoff};
use cuspfs::kondratiev::{cone_corpus, distance_norm, equivalence_ratios, kondratiev_norm, matching_lambda, ConicalDomain};
use proptest::prelude::*;

fn delta(c: &Cutoff, r: f64) -> f64 {
    let w = c.eval(r);
    (1.0 - w) * r + w
}

/// `u = x` on the punctured disk: `‖δ^{−a}x‖₂ + ‖δ^{1−a}‖₂` (the second
/// derivatives vanish), by quadrature of the radial integrals.
#[test]
fn linear_function_matches_closed_form() {
    let dom = ConicalDomain::disk(0.25, 0.5).unwrap();
    let d = dom.discretize(801, 64).unwrap();
    let c = Cutoff::new(0.25, 0.5).unwrap();
    let u = d.sample(|r, t| r * t.cos());
    for a in [0.0, 0.5, 1.0] {
        let i0 = adaptive_quad(|r| delta(&c, r).powf(-2.0 * a) * r.powi(3), dom.r_min, 1.0, 1e-12).unwrap();
        let i1 = adaptive_quad(|r| delta(&c, r).powf(2.0 - 2.0 * a) * r, dom.r_min, 1.0, 1e-12).unwrap();
        let exact = (PI * i0).sqrt() + (TAU * i1).sqrt();
        let k = kondratiev_norm(&u, &d, 2, a, 2.0).unwrap();
        assert!((k / exact - 1.0).abs() < 1e-3, "a = {a}: {k} vs {exact}");
    }
}

#[test]
fn order_zero_norms_coincide() {
    let d = ConicalDomain::new(1.5 * PI, 0.25, 0.5).unwrap().discretize(101, 33).unwrap();
    let u = d.sample(|r, t| r.powf(1.5) * (1.0 + t.sin()));
    for (a, q) in [(1.0, 2.0), (0.5, 1.0), (1.5, 4.0)] {
        let k = kondratiev_norm(&u, &d, 0, a, q).unwrap();
        let w = distance_norm(&u, &d, 0, matching_lambda(a, q), q).unwrap();
        assert!((k / w - 1.0).abs() < 1e-12, "{k} vs {w}");
    }
}

#[test]
fn domains_are_validated() {
    assert!(ConicalDomain::new(7.0, 0.25, 0.5).is_err());
    assert!(ConicalDomain::new(PI, 0.5, 0.25).is_err());
    assert!(ConicalDomain::new(PI, 0.25, 1.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ratios_are_finite_and_positive(seed in 0u64..500, theta1 in 1.0f64..6.2) {
        let d = ConicalDomain::new(theta1, 0.25, 0.5).unwrap().discretize(61, 17).unwrap();
        let corpus = cone_corpus(seed, 12).unwrap();
        for k in 0..=2 {
            for r in equivalence_ratios(&d, &corpus, k, 1.0, 2.0).unwrap() {
                prop_assert!(r.is_finite() && r > 0.0);
            }
        }
    }
}
