use std::sync::Arc;

use cuspfs::geometry::{integrate, Axis, ChartGrid, MetricField, ScalarField, TensorField, Valence};
use proptest::prelude::*;

fn rect(a: f64, b: f64, n: usize) -> Arc<ChartGrid> {
    Arc::new(ChartGrid::two_d(Axis::uniform(0.0, a, n).unwrap(), Axis::uniform(0.0, b, n).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trapezoid_area_is_exact(a in 0.5f64..3.0, b in 0.5f64..3.0, n in 5usize..30) {
        let g = rect(a, b, n);
        let one = ScalarField::constant_scalar(&g, 1.0);
        let area = integrate(&one, &MetricField::flat(&g), 1.0).unwrap();
        prop_assert!((area - a * b).abs() < 1e-12 * a * b);
    }

    #[test]
    fn affine_gradients_are_exact(c0 in -2.0f64..2.0, cx in -2.0f64..2.0, cy in -2.0f64..2.0) {
        let g = rect(1.0, 2.0, 11);
        let u = ScalarField::scalar_fn(&g, |[x, y]| c0 + cx * x + cy * y);
        let du = u.partial().unwrap();
        for n in 0..g.len() {
            prop_assert!((du.component(n, &[0]) - cx).abs() < 1e-12);
            prop_assert!((du.component(n, &[1]) - cy).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_combinations(s in -3.0f64..3.0, seed in 0u64..1000) {
        let g = rect(1.0, 1.0, 6);
        let f = |k: u64| TensorField::from_fn(&g, Valence::new(0, 2), |n, out| {
            let p = g.point(n);
            for (i, o) in out.iter_mut().enumerate() {
                *o = ((seed + k) as f64 + p[0] * 3.0 + p[1] * 5.0 + i as f64).sin();
            }
        }).unwrap();
        let (a, b) = (f(0), f(1));
        let back = a.axpy(s, &b).unwrap().axpy(-s, &b).unwrap();
        prop_assert!(back.sub(&a).unwrap().max_abs() < 1e-12);
        prop_assert!((a.scale(s).max_abs() - s.abs() * a.max_abs()).abs() < 1e-12);
    }

    #[test]
    fn constant_conformal_factor_scales_volume(c in 0.1f64..1.0) {
        let g = rect(1.0, 1.0, 9);
        let flat = MetricField::flat(&g);
        let rho = ScalarField::constant_scalar(&g, c);
        let hat = flat.conformal_rescale(&rho).unwrap();
        let one = ScalarField::constant_scalar(&g, 1.0);
        let v = integrate(&one, &hat, 1.0).unwrap();
        prop_assert!((v - c.powi(-2)).abs() < 1e-10 * c.powi(-2));
    }
}
