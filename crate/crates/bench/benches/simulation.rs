use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use switchdyn::bistable::{self, DoubleWellConfig};
use switchdyn::dde::{tail_stats, DdeConfig};
use switchdyn::switching::{sample_intervals, sample_until, DistributionSpec};
use switchdyn::telegraph::{iterate_switch_values, upper_bound_estimate, TelegraphForce};

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampling");
    for (name, spec) in [
        ("exponential", DistributionSpec::Exponential { rate: 100.0 }),
        (
            "gamma",
            DistributionSpec::Gamma {
                shape: 2.0,
                rate: 200.0,
            },
        ),
        (
            "beta",
            DistributionSpec::Beta {
                alpha: 2.0,
                beta: 50.0,
            },
        ),
        (
            "lognormal",
            DistributionSpec::LogNormal {
                mu: -4.0,
                sigma: 1.0,
            },
        ),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| sample_intervals(black_box(&spec), 100_000, 42).unwrap())
        });
    }
    group.finish();
}

fn bench_switch_iteration(c: &mut Criterion) {
    let seq =
        sample_intervals(&DistributionSpec::Exponential { rate: 100.0 }, 1_000_000, 7).unwrap();
    let force = TelegraphForce::new(seq);
    c.bench_function("switch_values_1e6", |b| {
        b.iter(|| {
            let values = iterate_switch_values(black_box(&force), 1.0).unwrap();
            upper_bound_estimate(&values, 0.5).unwrap().k_f
        })
    });
}

fn bench_dde(c: &mut Criterion) {
    let config = DdeConfig {
        horizon: 100.0,
        burn_in_time: 10.0,
        ..DdeConfig::new(52.0)
    };
    c.bench_function("dde_1e5_steps", |b| {
        b.iter(|| tail_stats(black_box(&config)).unwrap())
    });
}

fn bench_double_well(c: &mut Criterion) {
    let config = DoubleWellConfig {
        horizon: 10.0,
        n_realizations: 1,
        ..DoubleWellConfig::new(-3.0, 11)
    };
    let seq = sample_until(&config.interval_spec(), config.horizon + config.step, 5).unwrap();
    c.bench_function("double_well_1e4_steps", |b| {
        b.iter(|| bistable::simulate_double_well(black_box(&config), &seq).unwrap())
    });
}

criterion_group!(
    benches,
    bench_sampling,
    bench_switch_iteration,
    bench_dde,
    bench_double_well
);
criterion_main!(benches);
