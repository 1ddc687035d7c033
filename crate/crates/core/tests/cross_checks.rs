//! Cross-module and oracle checks that are too heavy for unit tests:
//! dense-grid suprema, step-refinement stability, and the double-well
//! sample points that bracket the stability threshold.

mod common;

use switchdyn::analysis::lin_spaced;
use switchdyn::bistable::{self, DoubleWellConfig};
use switchdyn::dde::{integrate_dde, sign_change_stats, tail_stats, DdeConfig};
use switchdyn::seeds::derive_seed;
use switchdyn::switching::{sample_intervals, DistributionSpec};
use switchdyn::telegraph::{
    exact_solution_at, iterate_switch_values, upper_bound_estimate, TelegraphForce,
};

/// The tail maximum over switch values equals the supremum of the
/// continuous solution sampled densely over the same window.
#[test]
fn bound_estimate_matches_dense_grid_supremum() {
    let n = 1_000_000usize;
    let seq = sample_intervals(&DistributionSpec::Exponential { rate: 100.0 }, n, 7).unwrap();
    let force = TelegraphForce::new(seq);
    let values = iterate_switch_values(&force, 1.0).unwrap();
    let estimate = upper_bound_estimate(&values, 0.5).unwrap();

    // Sample every post-burn-in interval at its endpoints and 10 interior
    // points; monotone segments make the grid supremum exact.
    let times = force.sequence().times();
    let start = n / 2 + 1;
    let mut grid_sup = 0.0_f64;
    for k in start..n {
        let (a, b) = (times[k], times[k + 1]);
        for j in 0..=10 {
            // The last sample stays strictly inside the half-open interval.
            let frac = if j == 10 { 1.0 - 1e-9 } else { j as f64 / 10.0 };
            let t = a + (b - a) * frac;
            grid_sup = grid_sup.max(exact_solution_at(&force, &values, t).unwrap().abs());
        }
    }
    assert!(
        (grid_sup - estimate.k_f).abs() <= 1e-6,
        "grid sup {grid_sup} vs estimate {}",
        estimate.k_f
    );
}

/// Halving the integration step changes the measured sign-change
/// frequency by less than 2% (five feedback values, long records so the
/// chaotic counting noise sits well below the bound).
#[test]
fn dde_step_refinement_stability() {
    for beta in [5.0, 10.0, 20.0, 30.0, 40.0] {
        let mut frequencies = Vec::new();
        for step in [1e-3, 5e-4] {
            let config = DdeConfig {
                step,
                horizon: 30_000.0,
                burn_in_time: 1_000.0,
                ..DdeConfig::new(beta)
            };
            frequencies.push(tail_stats(&config).unwrap().frequency);
        }
        let rel = (frequencies[1] - frequencies[0]).abs() / frequencies[0];
        assert!(
            rel < 0.02,
            "beta {beta}: f_d moved {:.2}% on refinement",
            100.0 * rel
        );
    }
}

/// The streaming sweep statistics agree with the stored-trajectory path
/// at an acceptance-sized beta (short horizon).
#[test]
fn dde_chaotic_point_statistics() {
    let config = DdeConfig {
        horizon: 2_000.0,
        burn_in_time: 200.0,
        ..DdeConfig::new(52.0)
    };
    let stats = tail_stats(&config).unwrap();
    // Frequency near 0.9 * sqrt(52) with a generous band; bound well
    // inside (0, 1).
    let expected = 0.9 * 52.0_f64.sqrt();
    assert!(
        (stats.frequency - expected).abs() / expected < 0.15,
        "frequency {} vs {expected}",
        stats.frequency
    );
    assert!(stats.upper_bound > 0.05 && stats.upper_bound < 0.5);

    let traj = integrate_dde(&config).unwrap();
    let stored = sign_change_stats(&traj, 200.0).unwrap();
    assert_eq!(stored.change_times.len(), stats.changes);
}

/// Survival behaviour at the two sample locations that bracket the
/// stability threshold: the lower one never escapes, the upper one does.
#[test]
fn double_well_sample_points_bracket_threshold() {
    let quiet = DoubleWellConfig {
        n_realizations: 20,
        ..DoubleWellConfig::new(-4.538, derive_seed(1, 400))
    };
    let times = bistable::survival_times(&quiet).unwrap();
    let stayed = times.iter().filter(|t| **t == quiet.horizon).count();
    assert!(
        stayed >= 10,
        "mu = -4.538 should mostly stay in the home basin, {stayed}/20 stayed"
    );

    let noisy = DoubleWellConfig {
        n_realizations: 20,
        ..DoubleWellConfig::new(-3.7401, derive_seed(1, 401))
    };
    let times = bistable::survival_times(&noisy).unwrap();
    let escaped = times.iter().filter(|t| **t < noisy.horizon).count();
    assert!(
        escaped >= 10,
        "mu = -3.7401 should mostly escape, {escaped}/20 escaped"
    );
}

/// The sweep's frequency column spans (1, e^5.5) over mu in (-6, -0.5).
#[test]
fn mu_sweep_frequency_span() {
    let template = DoubleWellConfig {
        n_realizations: 1,
        horizon: 5.0,
        ..DoubleWellConfig::new(0.0, 3)
    };
    let sweep = bistable::mu_sweep(&lin_spaced(-6.0, -0.5, 5), &template).unwrap();
    let first = &sweep.rows()[0];
    let last = &sweep.rows()[sweep.rows().len() - 1];
    assert!((first[1] - 5.5_f64.exp()).abs() < 1e-12);
    assert!((last[1] - 1.0).abs() < 1e-12);
}
