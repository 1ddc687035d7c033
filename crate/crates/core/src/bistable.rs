//! Double-well dynamics `dx/dt = -phi'(x) + F(t)` under telegraph forcing.
//!
//! The potential `phi(x) = x^2 - 2x^3 + x^4` has minima at `x = 0` and
//! `x = 1` separated by a barrier at `x = 0.5` of height `phi(0.5) =
//! 0.0625`. The forcing switches between +1 and -1 at intervals drawn
//! from a lognormal law with `sigma = 1`, so the parameter `mu` sets the
//! switching frequency `f_d = e^{-(mu + 1/2)}`.
//!
//! Fast switching keeps the state pinned near the starting well; slow
//! switching lets it climb over the barrier. The experiment measures the
//! average survival time (AST) of the `x = 0` basin, defined as the mean
//! first up-crossing time of the barrier capped at the horizon, and
//! occupancy histograms of the trajectory.
//!
//! Integration is fourth-order Runge-Kutta with steps aligned to the
//! switch times: a step that would straddle a switch is split, so the
//! force is constant inside every step.

use rayon::prelude::*;

use crate::analysis::SweepResult;
use crate::error::{Error, Result};
use crate::seeds::derive_seed;
use crate::switching::{sample_until, DistributionSpec, SwitchSequence};
use crate::trajectory::Trajectory;

/// Barrier position separating the two wells.
pub const BARRIER: f64 = 0.5;

/// Double-well potential `x^2 - 2x^3 + x^4`.
pub fn potential(x: f64) -> f64 {
    x * x - 2.0 * x * x * x + x * x * x * x
}

/// Gradient `2x - 6x^2 + 4x^3 = 2x(1 - x)(1 - 2x)`.
pub fn potential_gradient(x: f64) -> f64 {
    2.0 * x - 6.0 * x * x + 4.0 * x * x * x
}

/// Configuration of one double-well experiment point.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleWellConfig {
    /// Lognormal location parameter of the switch intervals.
    pub mu: f64,
    /// Lognormal scale parameter; the experiment fixes 1.
    pub sigma: f64,
    /// Total simulated time per realization.
    pub horizon: f64,
    /// Nominal integration step (steps shrink to land on switch times).
    pub step: f64,
    /// Escape threshold between the wells.
    pub barrier: f64,
    /// Monte Carlo realizations per estimate.
    pub n_realizations: usize,
    /// Master seed; realizations use derived child seeds.
    pub seed: u64,
}

impl DoubleWellConfig {
    /// Experiment defaults: horizon 120, step 1e-3, barrier 0.5, 200
    /// realizations.
    pub fn new(mu: f64, seed: u64) -> Self {
        Self {
            mu,
            sigma: 1.0,
            horizon: 120.0,
            step: 1e-3,
            barrier: BARRIER,
            n_realizations: 200,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::param(
                "mu",
                format!("must be finite, got {}", self.mu),
            ));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param(
                "sigma",
                format!("must be strictly positive, got {}", self.sigma),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::param(
                "horizon",
                format!("must be strictly positive, got {}", self.horizon),
            ));
        }
        if !(self.step > 0.0 && self.step < self.horizon) {
            return Err(Error::param(
                "step",
                format!("must lie in (0, horizon), got {}", self.step),
            ));
        }
        if !(self.barrier > 0.0 && self.barrier < 1.0) {
            return Err(Error::param(
                "barrier",
                format!(
                    "must lie strictly between the wells 0 and 1, got {}",
                    self.barrier
                ),
            ));
        }
        if self.n_realizations == 0 {
            return Err(Error::param("n_realizations", "must be at least 1"));
        }
        Ok(())
    }

    /// Interval law induced by `(mu, sigma)`.
    pub fn interval_spec(&self) -> DistributionSpec {
        DistributionSpec::LogNormal {
            mu: self.mu,
            sigma: self.sigma,
        }
    }

    /// Theoretical switching frequency `e^{-(mu + sigma^2/2)}`.
    pub fn switching_frequency(&self) -> f64 {
        (-(self.mu + 0.5 * self.sigma * self.sigma)).exp()
    }
}

/// Outcome of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeRecord {
    /// First time the state crosses the barrier from below, if any
    /// happened within the horizon.
    pub first_crossing_time: Option<f64>,
    /// Child seed the realization was generated from.
    pub seed: u64,
}

impl EscapeRecord {
    /// Survival time: the crossing time, or the horizon when no escape
    /// occurred.
    pub fn survival_time(&self, horizon: f64) -> f64 {
        self.first_crossing_time.unwrap_or(horizon)
    }
}

/// One RK4 step of `dx/dt = -phi'(x) + f` with constant force `f`.
#[inline]
fn rk4_step(x: f64, f: f64, h: f64) -> f64 {
    let k1 = f - potential_gradient(x);
    let k2 = f - potential_gradient(x + 0.5 * h * k1);
    let k3 = f - potential_gradient(x + 0.5 * h * k2);
    let k4 = f - potential_gradient(x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Drives one trajectory from `x(0) = 0`, invoking the observer after
/// every accepted step with `(t, x)`. Returns the first barrier
/// up-crossing time, if one occurred.
///
/// The observer also sees the initial sample `(0, 0)`. When `stop_at_escape`
/// is set, integration ends right after the crossing step.
fn drive(
    config: &DoubleWellConfig,
    seq: &SwitchSequence,
    stop_at_escape: bool,
    mut observe: impl FnMut(f64, f64),
) -> Result<Option<f64>> {
    config.validate()?;
    if seq.horizon() < config.horizon {
        return Err(Error::ShortSequence {
            covered: seq.horizon(),
            horizon: config.horizon,
        });
    }
    let mut x = 0.0;
    let mut t = 0.0;
    let mut crossing = None;
    observe(t, x);
    'outer: for (k, &t_next_switch) in seq.times().iter().enumerate().skip(1) {
        let force = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let segment_end = t_next_switch.min(config.horizon);
        loop {
            let remaining = segment_end - t;
            if remaining <= 0.0 {
                break;
            }
            // Split the step straddling the segment end so the force is
            // constant within every step; land on the end exactly.
            let last = remaining <= config.step;
            let h = if last { remaining } else { config.step };
            let x_new = rk4_step(x, force, h);
            let t_new = if last { segment_end } else { t + h };
            if crossing.is_none() && x < config.barrier && x_new >= config.barrier {
                // Linear interpolation inside the step.
                let frac = (config.barrier - x) / (x_new - x);
                crossing = Some(t + frac * h);
                if stop_at_escape {
                    observe(t_new, x_new);
                    break 'outer;
                }
            }
            x = x_new;
            t = t_new;
            observe(t, x);
        }
        if t >= config.horizon {
            break;
        }
    }
    Ok(crossing)
}

/// Integrates one realization against an explicit switch sequence and
/// returns the full trajectory.
///
/// The sequence must cover the horizon; generate it with
/// [`sample_until`] or extend it before calling.
pub fn simulate_double_well(config: &DoubleWellConfig, seq: &SwitchSequence) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    drive(config, seq, false, |t, x| {
        times.push(t);
        states.push(x);
    })?;
    Trajectory::new(times, states)
}

/// Runs one realization with the given child seed and reports its escape.
pub fn escape_record(config: &DoubleWellConfig, child_seed: u64) -> Result<EscapeRecord> {
    // Margin of one step so the final step never outruns the sequence.
    let seq = sample_until(
        &config.interval_spec(),
        config.horizon + config.step,
        child_seed,
    )?;
    let crossing = drive(config, &seq, true, |_, _| {})?;
    Ok(EscapeRecord {
        first_crossing_time: crossing,
        seed: child_seed,
    })
}

/// Survival times of all realizations, in realization order.
pub fn survival_times(config: &DoubleWellConfig) -> Result<Vec<f64>> {
    config.validate()?;
    (0..config.n_realizations)
        .into_par_iter()
        .map(|r| {
            let record = escape_record(config, derive_seed(config.seed, r as u64))?;
            Ok(record.survival_time(config.horizon))
        })
        .collect()
}

/// Average survival time of the `x = 0` basin: mean first-passage time
/// over the barrier, with non-escaping realizations counted at the
/// horizon.
pub fn average_survival_time(config: &DoubleWellConfig) -> Result<f64> {
    let times = survival_times(config)?;
    Ok(times.iter().sum::<f64>() / times.len() as f64)
}

/// Normalized occupancy histogram.
#[derive(Debug, Clone)]
pub struct Histogram {
    /// Bin edges, `bins + 1` entries.
    pub edges: Vec<f64>,
    /// Probability density per bin; `sum(density * width) = 1`.
    pub density: Vec<f64>,
    /// Samples accumulated.
    pub n_samples: usize,
}

impl Histogram {
    /// Center of bin `i`.
    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Index of the bin containing `x`, if inside the range.
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let (lo, hi) = (self.edges[0], *self.edges.last().unwrap());
        if !(x >= lo && x <= hi) {
            return None;
        }
        let n = self.density.len();
        let i = ((x - lo) / (hi - lo) * n as f64) as usize;
        Some(i.min(n - 1))
    }

    /// Indices of local maxima, merged by prominence: two maxima count as
    /// separate peaks only when the valley between them dips at least 5%
    /// of the tallest bin below the lower of the two. Filters the
    /// bin-to-bin sampling noise of Monte Carlo histograms.
    pub fn peaks(&self) -> Vec<usize> {
        let d = &self.density;
        let threshold = 0.05 * d.iter().cloned().fold(0.0, f64::max);
        let mut candidates: Vec<usize> = (0..d.len())
            .filter(|&i| {
                let left = if i == 0 { f64::NEG_INFINITY } else { d[i - 1] };
                let right = if i + 1 == d.len() {
                    f64::NEG_INFINITY
                } else {
                    d[i + 1]
                };
                d[i] >= threshold && d[i] > left && d[i] >= right
            })
            .collect();
        candidates.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap().then(a.cmp(&b)));
        let mut accepted: Vec<usize> = Vec::new();
        'next: for &i in &candidates {
            for &j in &accepted {
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let valley = d[lo..=hi].iter().cloned().fold(f64::INFINITY, f64::min);
                if d[i].min(d[j]) - valley < threshold {
                    continue 'next; // same hill as an already-accepted peak
                }
            }
            accepted.push(i);
        }
        accepted.sort_unstable();
        accepted
    }

    /// True when two peaks lie on opposite sides of `barrier`.
    pub fn is_bimodal_across(&self, barrier: f64) -> bool {
        let peaks = self.peaks();
        let left = peaks.iter().any(|&i| self.center(i) < barrier);
        let right = peaks.iter().any(|&i| self.center(i) > barrier);
        left && right
    }
}

/// Time spacing of occupancy samples fed to the histogram.
const DENSITY_SAMPLE_DT: f64 = 0.01;

/// Occupancy histogram of `x(t)` over the post-burn-in window, pooled
/// across all realizations.
///
/// Samples are taken every [`DENSITY_SAMPLE_DT`] time units after a
/// burn-in of 10% of the horizon; the bin range spans the pooled sample
/// extent. The returned density integrates to 1.
pub fn trajectory_density(config: &DoubleWellConfig, bins: usize) -> Result<Histogram> {
    config.validate()?;
    if bins < 10 {
        return Err(Error::param(
            "bins",
            format!("must be at least 10, got {bins}"),
        ));
    }
    let burn_in = 0.1 * config.horizon;
    let per_realization: Vec<Vec<f64>> = (0..config.n_realizations)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let child = derive_seed(config.seed, r as u64);
            let seq = sample_until(&config.interval_spec(), config.horizon + config.step, child)?;
            let mut samples = Vec::new();
            let mut next_sample = burn_in;
            drive(config, &seq, false, |t, x| {
                if t >= next_sample {
                    samples.push(x);
                    next_sample += DENSITY_SAMPLE_DT;
                }
            })?;
            Ok(samples)
        })
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = per_realization.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(Error::Usage("no occupancy samples after burn-in".into()));
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Degenerate spread still needs a nonzero bin width.
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in &samples {
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = samples.len() as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram {
        edges,
        density,
        n_samples: samples.len(),
    })
}

/// Sweeps `mu`, one AST estimate per grid point.
///
/// Row columns: `mu`, `f_d = e^{-(mu + 1/2)}`, `ast`.
pub fn mu_sweep(mus: &[f64], template: &DoubleWellConfig) -> Result<SweepResult> {
    if mus.is_empty() {
        return Err(Error::Usage(
            "mu sweep needs at least one grid point".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = mus
        .iter()
        .enumerate()
        .map(|(i, &mu)| -> Result<Vec<f64>> {
            let config = DoubleWellConfig {
                mu,
                seed: derive_seed(template.seed, i as u64),
                ..template.clone()
            };
            let ast = average_survival_time(&config)?;
            Ok(vec![mu, config.switching_frequency(), ast])
        })
        .collect::<Result<_>>()?;
    let mut result = SweepResult::new(["mu", "f_d", "ast"], rows);
    result.add_metadata("sigma", template.sigma.to_string());
    result.add_metadata("horizon", template.horizon.to_string());
    result.add_metadata("step", template.step.to_string());
    result.add_metadata("n_realizations", template.n_realizations.to_string());
    result.add_metadata("master_seed", template.seed.to_string());
    Ok(result)
}

/// Largest swept `mu` whose AST still equals the horizon (no escape in
/// any realization), if one exists. Rows must come from [`mu_sweep`].
pub fn stability_threshold(sweep: &SweepResult, horizon: f64) -> Option<f64> {
    sweep
        .rows()
        .iter()
        .filter(|row| row[2] >= horizon)
        .map(|row| row[0])
        .fold(None, |acc, mu| Some(acc.map_or(mu, |m: f64| m.max(mu))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::switching::SwitchSequence;

    #[test]
    fn potential_critical_points() {
        assert_eq!(potential_gradient(0.0), 0.0);
        assert_eq!(potential_gradient(0.5), 0.0);
        assert_eq!(potential_gradient(1.0), 0.0);
        assert_eq!(potential(0.0), 0.0);
        assert_eq!(potential(1.0), 0.0);
        assert!((potential(0.5) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_difference() {
        // Central difference as an independent check of the algebra.
        let h = 1e-5;
        let mut x = -1.5;
        while x <= 2.5 {
            let fd = (potential(x + h) - potential(x - h)) / (2.0 * h);
            assert!(
                (fd - potential_gradient(x)).abs() < 1e-8,
                "mismatch at x = {x}"
            );
            x += 0.037;
        }
    }

    /// Bisection root of `potential_gradient(x) = target` in `[lo, hi]`.
    fn gradient_root(target: f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = |x: f64| potential_gradient(x) - target;
        assert!(g(lo) * g(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn frozen_force_config(mu: f64) -> DoubleWellConfig {
        DoubleWellConfig {
            horizon: 40.0,
            n_realizations: 1,
            ..DoubleWellConfig::new(mu, 1)
        }
    }

    #[test]
    fn frozen_positive_force_settles_at_shifted_fixed_point() {
        // One huge interval keeps F = +1 for the whole run.
        let config = frozen_force_config(0.0);
        let seq = SwitchSequence::from_intervals(
            vec![1000.0],
            DistributionSpec::Constant { d: 1000.0 },
            0,
        )
        .unwrap();
        let traj = simulate_double_well(&config, &seq).unwrap();
        let root = gradient_root(1.0, 1.0, 2.0);
        let x_end = *traj.states().last().unwrap();
        assert!(
            (x_end - root).abs() < 1e-6,
            "x settled at {x_end}, root {root}"
        );
    }

    #[test]
    fn frozen_negative_force_settles_at_negative_fixed_point() {
        // First interval is consumed instantly so the second (odd) one
        // carries F = -1 for the remainder of the run.
        let config = frozen_force_config(0.0);
        let seq = SwitchSequence::from_intervals(
            vec![1e-6, 1000.0],
            DistributionSpec::Constant { d: 1000.0 },
            0,
        )
        .unwrap();
        let traj = simulate_double_well(&config, &seq).unwrap();
        let root = gradient_root(-1.0, -1.0, 0.0);
        let x_end = *traj.states().last().unwrap();
        assert!(
            (x_end - root).abs() < 1e-6,
            "x settled at {x_end}, root {root}"
        );
    }

    #[test]
    fn short_sequence_is_rejected() {
        let config = frozen_force_config(0.0);
        let seq = SwitchSequence::from_intervals(
            vec![1.0, 1.0],
            DistributionSpec::Constant { d: 1.0 },
            0,
        )
        .unwrap();
        assert!(matches!(
            simulate_double_well(&config, &seq),
            Err(Error::ShortSequence { .. })
        ));
    }

    #[test]
    fn fast_switching_stays_in_home_basin() {
        let config = DoubleWellConfig {
            n_realizations: 4,
            ..DoubleWellConfig::new(-6.0, 9)
        };
        let times = survival_times(&config).unwrap();
        assert!(times.iter().all(|t| *t == config.horizon), "{times:?}");
    }

    #[test]
    fn slow_switching_escapes_quickly() {
        let config = DoubleWellConfig {
            n_realizations: 8,
            ..DoubleWellConfig::new(-0.5, 10)
        };
        let ast = average_survival_time(&config).unwrap();
        assert!(ast < config.horizon * 0.5, "ast = {ast}");
    }

    #[test]
    fn survival_is_deterministic_per_seed() {
        let config = DoubleWellConfig {
            n_realizations: 6,
            horizon: 30.0,
            ..DoubleWellConfig::new(-2.0, 77)
        };
        let a = survival_times(&config).unwrap();
        let b = survival_times(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn linearized_amplitude_matches_telegraph_bound() {
        // At the well the curvature is phi''(0) = 2, so small forcing obeys
        // dx/dt = -2x + F. Rescaling time maps this to the unit-damping
        // iteration over doubled intervals with amplitude 1/2; the run's
        // peak amplitude must agree within a factor of 3.
        let config = DoubleWellConfig {
            horizon: 60.0,
            n_realizations: 1,
            ..DoubleWellConfig::new(-5.5, 5)
        };
        let child = derive_seed(config.seed, 0);
        let seq =
            sample_until(&config.interval_spec(), config.horizon + config.step, child).unwrap();
        let traj = simulate_double_well(&config, &seq).unwrap();
        let peak = traj
            .states()
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()));

        let doubled: Vec<f64> = seq.intervals().iter().map(|d| 2.0 * d).collect();
        let ref_seq =
            SwitchSequence::from_intervals(doubled, DistributionSpec::Constant { d: 1.0 }, child)
                .unwrap();
        let values = crate::telegraph::iterate_switch_values(
            &crate::telegraph::TelegraphForce::new(ref_seq),
            1.0,
        )
        .unwrap();
        let bound = 0.5
            * crate::telegraph::upper_bound_estimate(&values, 0.0)
                .unwrap()
                .k_f;
        assert!(
            peak < 3.0 * bound && peak > bound / 3.0,
            "peak {peak} vs linearized bound {bound}"
        );
    }

    #[test]
    fn density_is_normalized_and_unimodal_when_pinned() {
        let config = DoubleWellConfig {
            n_realizations: 4,
            horizon: 60.0,
            ..DoubleWellConfig::new(-6.0, 3)
        };
        let hist = trajectory_density(&config, 50).unwrap();
        let mass: f64 = hist
            .density
            .iter()
            .enumerate()
            .map(|(i, d)| d * (hist.edges[i + 1] - hist.edges[i]))
            .sum();
        assert!((mass - 1.0).abs() < 1e-12, "mass = {mass}");
        assert_eq!(hist.peaks().len(), 1, "density {:?}", hist.density);
        // Everything stays near the home well.
        assert!(hist.edges[0] > -0.3 && *hist.edges.last().unwrap() < 0.5);
    }

    #[test]
    fn bins_below_ten_rejected() {
        let config = DoubleWellConfig::new(-3.0, 1);
        assert!(trajectory_density(&config, 9).is_err());
    }
}
