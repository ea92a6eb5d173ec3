use cuspfs::cusp::{
    certification_grid, validate_characteristic, ArclengthMap, Characteristic, CuspBase, Cutoff, Flavor, ModelCusp,
};
use cuspfs::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_bound_constant_is_alpha(alpha in 1.0f64..4.0) {
        let r = Characteristic::power(alpha).unwrap();
        let c = validate_characteristic(&r, 1, &certification_grid()).unwrap();
        prop_assert!((c[0] - alpha).abs() < 1e-9, "c(1) = {} for alpha = {alpha}", c[0]);
    }

    #[test]
    fn cutoff_is_monotone_and_flat_outside(e0 in 0.1f64..0.5, w in 0.05f64..0.5, t in 0.0f64..1.0) {
        let c = Cutoff::new(e0, e0 + w).unwrap();
        let x = t * (e0 + w + 0.2);
        let v = c.eval(x);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(c.derivative(x) >= -1e-12);
        if x <= e0 {
            prop_assert_eq!(v, 0.0);
        }
        if x >= e0 + w {
            prop_assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn arclength_inverse_round_trip(alpha in 1.0f64..3.0, t in 1e-3f64..0.9) {
        let map = ArclengthMap::new(Characteristic::power(alpha).unwrap());
        let s = map.rho(t).unwrap();
        let back = map.inverse(s).unwrap();
        prop_assert!((back - t).abs() < 1e-8 * t.max(1e-2), "{t} -> {s} -> {back}");
    }
}

#[test]
fn sublinear_powers_are_rejected() {
    assert!(matches!(Characteristic::power(0.5), Err(Error::InvalidCharacteristic(_))));
}

#[test]
fn cone_needs_the_linear_characteristic() {
    let r = Characteristic::power(2.0).unwrap();
    assert!(matches!(ModelCusp::new(r, CuspBase::Circle, Flavor::Cone, 1.0), Err(Error::IncompatibleFlavor(_))));
}

#[test]
fn exponential_cusp_integral_diverges() {
    let r = Characteristic::exponential(1.0, 1.0).unwrap();
    let v = r.certify_divergence(10.0).unwrap();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}
