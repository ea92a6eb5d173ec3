//! Multi-threaded against single-threaded execution of the data-parallel core.
//!
//! With the default `parallel` feature both variants run the rayon code paths,
//! once in a one-thread pool and once in the global pool. Building with
//! `--no-default-features` benches the sequential fallback in both slots.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cuspfs::cusp::{Characteristic, CuspBase, Flavor, ModelCusp};
use cuspfs::parabolic::checks::MmsSetup;
use cuspfs::parabolic::{Mass, Scheme, TimeStepping};
use cuspfs::tolerance::Tolerances;
use cuspfs::weighted::{weighted_sobolev_norm, CylinderSpec, NormSpec, WeightedManifold};
use std::hint::black_box;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let n = rayon::current_num_threads().max(2);
    [1, n]
        .into_iter()
        .map(|t| (format!("threads={t}"), rayon::ThreadPoolBuilder::new().num_threads(t).build().expect("pool")))
        .collect()
}

fn norms(c: &mut Criterion) {
    let cusp = ModelCusp::new(Characteristic::power(2.0).unwrap(), CuspBase::Circle, Flavor::Cusp, 1.0).unwrap();
    let wm = WeightedManifold::cusp_cylinder(&cusp, &CylinderSpec { ns: 401, ntheta: 64, s_max: 4.0 }).unwrap();
    let u = cuspfs::geometry::ScalarField::scalar_fn(wm.grid(), |[s, t]| (-s).exp() * (1.0 + 0.3 * (2.0 * t).cos()));
    let spec = NormSpec::new(2, 0.5, 2.0).unwrap();
    let mut group = c.benchmark_group("weighted_norm_k2");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| pool.install(|| black_box(weighted_sobolev_norm(&u, &wm, &spec).unwrap())))
        });
    }
    group.finish();
}

fn implicit_steps(c: &mut Criterion) {
    let tol = Tolerances::default();
    let setup = MmsSetup::new(2.0, &CylinderSpec { ns: 241, ntheta: 32, s_max: 6.0 }, 1.0, &tol).unwrap();
    let cfg = TimeStepping::new(0.05, 0.5, Scheme::ImplicitEuler).mass(Mass::Identity);
    let mut group = c.benchmark_group("implicit_euler_10_steps");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| pool.install(|| black_box(setup.run(&cfg).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, norms, implicit_steps);
criterion_main!(benches);
