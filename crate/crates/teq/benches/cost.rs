//! Workload benches for the data-parallel kernels. Run with the default
//! features for the rayon path and with `--no-default-features` for the
//! sequential baseline; criterion keeps comparable baselines across runs.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use teq::matcore::Tolerance;
use teq::povm::{certificate_search, povm_cost, EnumerationBudget};
use teq::presets::rank2_povm;
use teq::random::random_povm;
use teq::ucost::maxnorm_unitary;
use teq::usd::{coherent_usd_bound, fig5_sweep, optimal_usd_povm, CoherentFamilySpec};
use teq::C64;

fn bench_certificate_search(c: &mut Criterion) {
    let tol = Tolerance::default();
    let budget = EnumerationBudget::default();
    let mut group = c.benchmark_group("certificate_search");
    for (n, k) in [(3usize, 8usize), (4, 10)] {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let povm = random_povm(&mut rng, n, k, &tol).unwrap();
        group.bench_function(format!("n{n}_k{k}"), |b| {
            b.iter(|| certificate_search(&povm, &budget, &tol).unwrap())
        });
    }
    group.finish();
}

fn bench_povm_cost(c: &mut Criterion) {
    let tol = Tolerance::default();
    let budget = EnumerationBudget::default();
    let povm = rank2_povm(0.4, &tol).unwrap();
    c.bench_function("povm_cost/rank2", |b| {
        b.iter(|| povm_cost(&povm, &budget, &tol).unwrap())
    });
}

fn bench_fig5(c: &mut Criterion) {
    c.bench_function("fig5_sweep/default_grid", |b| {
        b.iter(|| fig5_sweep(&[0.1, 0.5, 1.0, 3.0], 2..=30, 50))
    });
    c.bench_function("coherent_bound/k30", |b| {
        b.iter(|| coherent_usd_bound(1.0, 30, 50).unwrap())
    });
}

fn bench_usd_dense(c: &mut Criterion) {
    let tol = Tolerance::default();
    let spec = CoherentFamilySpec {
        alpha: C64::new(1.0, 0.0),
        k_bar: 8,
        trunc_dim: 50,
    };
    let (family, _) = spec.build(&tol).unwrap();
    c.bench_function("usd_dense_povm/x1_k8_trunc50", |b| {
        b.iter(|| optimal_usd_povm(&family, &tol).unwrap())
    });
}

fn bench_maxnorm(c: &mut Criterion) {
    let tol = Tolerance::default();
    c.bench_function("maxnorm_unitary/dim32", |b| {
        b.iter_batched(
            || {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                teq::random::random_unitary(&mut rng, 32)
            },
            |u| maxnorm_unitary(&u, &tol).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_certificate_search,
    bench_povm_cost,
    bench_fig5,
    bench_usd_dense,
    bench_maxnorm
);
criterion_main!(benches);
