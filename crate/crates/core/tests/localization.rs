use cuspfs::cusp::{Characteristic, CuspBase, Flavor, ModelCusp};
use cuspfs::geometry::ScalarField;
use cuspfs::localization::{LocalizationSystem, UrAtlas};
use cuspfs::weighted::{CylinderSpec, WeightedManifold};
use proptest::prelude::*;

fn manifold() -> WeightedManifold {
    let cusp = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
    WeightedManifold::cusp_cylinder(&cusp, &CylinderSpec { ns: 41, ntheta: 16, s_max: 4.0 }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn partition_and_right_inverse(overlap in 0.3f64..0.7, a in -1.0f64..1.0, b in 0.5f64..3.0) {
        let wm = manifold();
        let atlas = UrAtlas::cylinder(4.0, &CuspBase::Circle, overlap).unwrap();
        let loc = LocalizationSystem::new(&atlas, wm.grid()).unwrap();
        prop_assert!(loc.partition_defect() < 1e-12);
        let u = ScalarField::scalar_fn(wm.grid(), |[s, t]| (-b * s).exp() * (1.0 + a * (2.0 * t).sin()));
        let back = loc.retract(&loc.coretract(&u).unwrap()).unwrap();
        prop_assert!(back.sub(&u).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn localized_norm_of_zero_is_zero() {
    let wm = manifold();
    let atlas = UrAtlas::cylinder(4.0, &CuspBase::Circle, 0.5).unwrap();
    let loc = LocalizationSystem::new(&atlas, wm.grid()).unwrap();
    let zero = ScalarField::constant_scalar(wm.grid(), 0.0);
    let (n, parts) = loc.localized_norm(&zero, 2, 2.0).unwrap();
    assert_eq!(n, 0.0);
    assert!(parts.iter().all(|p| *p == 0.0));
}
