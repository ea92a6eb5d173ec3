use cuspfs::cusp::{Characteristic, CuspBase, Flavor, ModelCusp};
use cuspfs::geometry::ScalarField;
use cuspfs::weighted::checks::Setting;
use cuspfs::weighted::norms::{hat_from_pointwise, pointwise_jets, weighted_from_pointwise};
use cuspfs::weighted::{weighted_sobolev_norm, Corpus, CylinderSpec, Exponent, NormSpec, WeightedManifold};
use proptest::prelude::*;

fn manifold(alpha: f64) -> WeightedManifold {
    let cusp = ModelCusp::new(Characteristic::power(alpha).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
    WeightedManifold::cusp_cylinder(&cusp, &CylinderSpec { ns: 61, ntheta: 8, s_max: 4.0 }).unwrap()
}

fn sample(wm: &WeightedManifold, a: f64) -> ScalarField {
    ScalarField::scalar_fn(wm.grid(), |[s, t]| (-(s - 1.0).powi(2)).exp() * (1.0 + a * t.cos()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norms_are_absolutely_homogeneous(c in -5.0f64..5.0, k in 0usize..3, q in 1.0f64..4.0, lambda in -1.0f64..2.0) {
        let wm = manifold(2.0);
        let u = sample(&wm, 0.3);
        let spec = NormSpec::new(k, lambda, q).unwrap();
        let n = weighted_sobolev_norm(&u, &wm, &spec).unwrap();
        let nc = weighted_sobolev_norm(&u.scale(c), &wm, &spec).unwrap();
        prop_assert!((nc - c.abs() * n).abs() <= 1e-12 * n.max(1.0));
    }

    #[test]
    fn norms_grow_with_the_weight_index(l0 in -1.0f64..1.5, dl in 0.0f64..1.5, k in 0usize..3, q in 1.0f64..3.0) {
        let wm = manifold(1.5);
        let u = sample(&wm, 0.5);
        let pw = pointwise_jets(&u, wm.conn(), k).unwrap();
        let q = Exponent::finite(q).unwrap();
        let n0 = weighted_from_pointwise(&pw, &wm, l0, q).unwrap();
        let n1 = weighted_from_pointwise(&pw, &wm, l0 + dl, q).unwrap();
        prop_assert!(n0 <= n1 * (1.0 + 1e-12));
    }

    #[test]
    fn order_zero_norm_is_the_rescaled_metric_norm(q in 1.0f64..4.0, a in 0.0f64..0.9) {
        let wm = manifold(2.0);
        let u = sample(&wm, a);
        let w = weighted_sobolev_norm(&u, &wm, &NormSpec::new(0, 0.0, q).unwrap()).unwrap();
        let pw = pointwise_jets(&u, wm.conn_hat(), 0).unwrap();
        let h = hat_from_pointwise(&pw, &wm, Exponent::finite(q).unwrap()).unwrap();
        prop_assert!((w / h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corpus_is_determined_by_the_seed(seed in 0u64..10_000) {
        let a = Corpus::generate(seed, 12, 2.0).unwrap();
        let b = Corpus::generate(seed, 12, 2.0).unwrap();
        prop_assert_eq!(a.functions(), b.functions());
    }
}

#[test]
fn unit_weight_makes_both_norms_agree() {
    let cusp = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
    let st = Setting::new("unit", cusp, CylinderSpec { ns: 61, ntheta: 8, s_max: 4.0 }, 1, false).with_unit_weight();
    let wm = st.manifold(0).unwrap();
    let u = sample(&wm, 0.4);
    for k in 0..3 {
        let w = weighted_sobolev_norm(&u, &wm, &NormSpec::new(k, 0.7, 2.0).unwrap()).unwrap();
        let pw = pointwise_jets(&u, wm.conn_hat(), k).unwrap();
        let h = hat_from_pointwise(&pw, &wm, Exponent::finite(2.0).unwrap()).unwrap();
        assert!((w / h - 1.0).abs() < 1e-12, "k = {k}: {w} vs {h}");
    }
}

#[test]
fn small_corpora_are_rejected() {
    assert!(Corpus::generate(1, 3, 2.0).is_err());
}
