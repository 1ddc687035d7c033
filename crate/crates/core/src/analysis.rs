//! Power-law fitting and the sweep experiments built on it.
//!
//! The central quantity is the log-log slope of the amplitude bound
//! against the switching frequency. Fits are ordinary least squares of
//! `log10 K` on `log10 f`, restricted to the high-frequency window
//! `f >= 10` where the bound has left its low-frequency saturation at 1.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seeds::derive_seed;
use crate::switching::{sample_intervals, spec_for_target, DistributionSpec, Family};
use crate::telegraph::{iterate_switch_values, upper_bound_estimate, TelegraphForce};

/// Frequencies below this are excluded from slope fits: the bound
/// saturates toward 1 there and the power law only holds asymptotically.
pub const FIT_WINDOW_MIN_FREQUENCY: f64 = 10.0;

/// Fits with a coefficient of determination below this are flagged.
pub const FIT_QUALITY_FLOOR: f64 = 0.98;

/// Result of a log-log least-squares fit `log10 K = slope * log10 f + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    /// Intercept `c` in base-10 logs.
    pub log_intercept: f64,
    /// Coefficient of determination of the fit, in [0, 1].
    pub r_squared: f64,
    /// Points the fit used.
    pub n_points: usize,
    /// Frequency range `(min, max)` of the fitted points.
    pub f_range: (f64, f64),
}

impl PowerLawFit {
    /// True when the fit falls below [`FIT_QUALITY_FLOOR`]; flagged, not
    /// rejected, so callers can distinguish "no power law" from a noisy
    /// one.
    pub fn flagged(&self) -> bool {
        self.r_squared < FIT_QUALITY_FLOOR
    }
}

/// Ordinary least squares of `log10 K` against `log10 f`.
///
/// Needs at least three strictly positive points.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Usage(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((f, k)) = points
        .iter()
        .find(|(f, k)| !(f.is_finite() && *f > 0.0 && k.is_finite() && *k > 0.0))
    {
        return Err(Error::param(
            "points",
            format!("must be strictly positive, found ({f}, {k})"),
        ));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(f, k)| (f.log10(), k.log10())).collect();
    let x_min = logs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if x_max - x_min <= 1e-12 * x_max.abs().max(1.0) {
        return Err(Error::Usage(
            "fit points are degenerate in frequency".into(),
        ));
    }
    // Two passes: centered sums keep the residual variance accurate even
    // when y barely varies around a large mean.
    let x_bar = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let y_bar = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut s_xx, mut s_xy, mut s_yy) = (0.0, 0.0, 0.0);
    for &(x, y) in &logs {
        let (dx, dy) = (x - x_bar, y - y_bar);
        s_xx += dx * dx;
        s_xy += dx * dy;
        s_yy += dy * dy;
    }
    let slope = s_xy / s_xx;
    let intercept = y_bar - slope * x_bar;
    // A constant response leaves nothing to explain; its centered spread
    // bottoms out at rounding noise, so compare against that scale.
    let y_noise = f64::EPSILON * y_bar.abs().max(1.0);
    let r_squared = if s_yy <= n * y_noise * y_noise {
        1.0
    } else {
        ((s_xy * s_xy) / (s_xx * s_yy)).clamp(0.0, 1.0)
    };
    let f_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let f_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerLawFit {
        slope,
        log_intercept: intercept,
        r_squared,
        n_points: points.len(),
        f_range: (f_min, f_max),
    })
}

/// Restricts sweep points to the high-frequency fit window and fits.
pub fn fit_high_frequency(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let window: Vec<(f64, f64)> = points
        .iter()
        .filter(|(f, _)| *f >= FIT_WINDOW_MIN_FREQUENCY)
        .copied()
        .collect();
    fit_power_law(&window)
}

/// A table of sweep rows plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    metadata: Vec<(String, String)>,
}

impl SweepResult {
    pub fn new<const N: usize>(columns: [&str; N], rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == N));
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            metadata: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn add_metadata(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// (f, K) pairs drawn from two named columns, skipping non-finite
    /// entries (infeasible rows are stored as NaN).
    pub fn points(&self, f_column: &str, k_column: &str) -> Vec<(f64, f64)> {
        let (fi, ki) = match (self.column(f_column), self.column(k_column)) {
            (Some(fi), Some(ki)) => (fi, ki),
            _ => return Vec::new(),
        };
        self.rows
            .iter()
            .filter(|r| r[fi].is_finite() && r[ki].is_finite())
            .map(|r| (r[fi], r[ki]))
            .collect()
    }

    /// Serializes the rows as CSV: one header line, comma delimiter, 17
    /// significant digits per value so reruns are byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for value in row {
                if !first {
                    out.push(',');
                }
                out.push_str(&format_float(*value));
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed-precision float formatting used by every emitted table:
/// scientific notation with 17 significant digits.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Per-point amplitude bound: draws `events` intervals from `spec` and
/// runs the exact switch-value recursion.
pub fn bound_for_spec(spec: &DistributionSpec, events: usize, seed: u64) -> Result<f64> {
    let seq = sample_intervals(spec, events, seed)?;
    let values = iterate_switch_values(&TelegraphForce::new(seq), 1.0)?;
    Ok(upper_bound_estimate(&values, 0.5)?.k_f)
}

/// `n` points spaced uniformly between `lo` and `hi`, endpoints included.
pub fn lin_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` points spaced log-uniformly between `lo` and `hi` (both positive),
/// endpoints included.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Builds the per-family parameter grid of the distribution sweeps, each
/// point yielding `(parameter, spec)`.
///
/// Exponential sweeps the rate over (1, 1000); gamma and beta fix their
/// first shape at 2 and sweep the second parameter over (1, 1000), all
/// log-uniformly; lognormal fixes `sigma = 1` and sweeps `mu` uniformly
/// over (-10, -0.5), which is log-uniform in frequency.
pub fn family_grid(family: Family, points: usize) -> Result<Vec<(f64, DistributionSpec)>> {
    if points < 2 {
        return Err(Error::param("points", "grid needs at least 2 points"));
    }
    Ok(match family {
        Family::Exponential => log_spaced(1.0, 1000.0, points)
            .into_iter()
            .map(|rate| (rate, DistributionSpec::Exponential { rate }))
            .collect(),
        Family::Gamma => log_spaced(1.0, 1000.0, points)
            .into_iter()
            .map(|rate| (rate, DistributionSpec::Gamma { shape: 2.0, rate }))
            .collect(),
        Family::Beta => log_spaced(1.0, 1000.0, points)
            .into_iter()
            .map(|beta| (beta, DistributionSpec::Beta { alpha: 2.0, beta }))
            .collect(),
        Family::LogNormal => lin_spaced(-10.0, -0.5, points)
            .into_iter()
            .map(|mu| (mu, DistributionSpec::LogNormal { mu, sigma: 1.0 }))
            .collect(),
        Family::Constant => {
            return Err(Error::Usage(
                "constant intervals are swept by the dedicated constant sweep".into(),
            ))
        }
    })
}

/// Sweeps one interval family over its parameter grid and estimates the
/// amplitude bound at every point.
///
/// Row columns: `parameter`, `f_d` (theoretical `1/mean`), `K_F`. Grid
/// points run in parallel with child seeds derived from `seed` in grid
/// order, so output is independent of scheduling.
pub fn distribution_sweep(
    family: Family,
    points: usize,
    events_per_point: usize,
    seed: u64,
) -> Result<SweepResult> {
    let grid = family_grid(family, points)?;
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, (parameter, spec))| -> Result<Vec<f64>> {
            let f_d = 1.0 / spec.theoretical_moments()?.mean;
            let k_f = bound_for_spec(spec, events_per_point, derive_seed(seed, i as u64))?;
            Ok(vec![*parameter, f_d, k_f])
        })
        .collect::<Result<_>>()?;
    let mut result = SweepResult::new(["parameter", "f_d", "K_F"], rows);
    result.add_metadata("family", family.name());
    result.add_metadata("events_per_point", events_per_point.to_string());
    result.add_metadata("master_seed", seed.to_string());
    result.add_metadata("burn_in_fraction", "0.5");
    Ok(result)
}

/// One CV level of a [`cv_sweep`]: the sampled points and their fit.
#[derive(Debug, Clone)]
pub struct CvSweepEntry {
    pub cv: f64,
    /// `(f, Some(K))` for feasible points, `(f, None)` where the family
    /// cannot represent the (cv, mean) pair.
    pub points: Vec<(f64, Option<f64>)>,
    /// High-frequency window fit over the feasible points, when at least
    /// three exist.
    pub fit: Option<PowerLawFit>,
}

impl CvSweepEntry {
    pub fn feasible_points(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|(f, k)| k.map(|k| (*f, k)))
            .collect()
    }
}

/// Sweeps the coefficient of variation at fixed per-point mean.
///
/// For every `cv` and every frequency `f` in the grid, the interval law
/// is built by [`spec_for_target`] with mean `1/f`, so frequency is
/// controlled independently of CV. Infeasible `(family, cv, mean)`
/// combinations are recorded as points without a bound rather than
/// dropped.
pub fn cv_sweep(
    family: Family,
    cvs: &[f64],
    frequencies: &[f64],
    events_per_point: usize,
    seed: u64,
) -> Result<Vec<CvSweepEntry>> {
    if !matches!(family, Family::Gamma | Family::Beta | Family::LogNormal) {
        return Err(Error::Usage(format!(
            "cv sweep applies to gamma, beta, and lognormal intervals, not {family}"
        )));
    }
    if let Some(bad) = frequencies.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::param(
            "frequencies",
            format!("must be strictly positive, found {bad}"),
        ));
    }
    cvs.iter()
        .enumerate()
        .map(|(ci, &cv)| -> Result<CvSweepEntry> {
            let points: Vec<(f64, Option<f64>)> = frequencies
                .par_iter()
                .enumerate()
                .map(|(fi, &f)| -> Result<(f64, Option<f64>)> {
                    let spec = match spec_for_target(family, cv, 1.0 / f) {
                        Ok(spec) => spec,
                        Err(Error::Infeasible(_)) => return Ok((f, None)),
                        Err(e) => return Err(e),
                    };
                    let child = derive_seed(seed, (ci * frequencies.len() + fi) as u64);
                    Ok((f, Some(bound_for_spec(&spec, events_per_point, child)?)))
                })
                .collect::<Result<_>>()?;
            let feasible: Vec<(f64, f64)> = points
                .iter()
                .filter_map(|(f, k)| k.map(|k| (*f, k)))
                .collect();
            let fit = if feasible
                .iter()
                .filter(|(f, _)| *f >= FIT_WINDOW_MIN_FREQUENCY)
                .count()
                >= 3
            {
                Some(fit_high_frequency(&feasible)?)
            } else {
                None
            };
            Ok(CvSweepEntry { cv, points, fit })
        })
        .collect()
}

/// Flattens a CV sweep into a table with columns `cv`, `f_d`, `K_F`;
/// infeasible points carry `K_F = NaN`.
pub fn cv_sweep_table(family: Family, entries: &[CvSweepEntry], seed: u64) -> SweepResult {
    let rows: Vec<Vec<f64>> = entries
        .iter()
        .flat_map(|entry| {
            entry
                .points
                .iter()
                .map(move |(f, k)| vec![entry.cv, *f, k.unwrap_or(f64::NAN)])
        })
        .collect();
    let mut result = SweepResult::new(["cv", "f_d", "K_F"], rows);
    result.add_metadata("family", family.name());
    result.add_metadata("master_seed", seed.to_string());
    result
}
