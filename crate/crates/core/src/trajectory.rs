//! Time-stamped scalar trajectories and sign-change detection.

use crate::error::{Error, Result};

/// Samples of a scalar state over time. Times are strictly increasing;
/// integrators on a uniform grid produce uniformly spaced times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<f64>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Usage(format!(
                "times ({}) and states ({}) differ in length",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Usage(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    /// Iterates (time, state) pairs.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.states.iter().copied())
    }
}

/// Zero crossings of a sampled signal and their mean rate.
#[derive(Debug, Clone)]
pub struct SignChangeStats {
    /// Crossing times, strictly increasing.
    pub change_times: Vec<f64>,
    /// Crossings per unit time over the observation window.
    pub frequency: f64,
    /// Length of the observation window the frequency refers to.
    pub window: f64,
}

/// Streaming zero-crossing detector.
///
/// A crossing is recorded when consecutive samples have opposite signs
/// (timestamped by linear interpolation), or when a sample is exactly zero
/// while the previous one was not (one crossing at that node). A signal
/// that is identically zero has no crossings.
#[derive(Debug, Clone)]
pub struct SignChangeAccumulator {
    changes: Vec<f64>,
    prev: Option<(f64, f64)>,
}

impl SignChangeAccumulator {
    pub fn new() -> Self {
        Self {
            changes: Vec::new(),
            prev: None,
        }
    }

    pub fn push(&mut self, t: f64, v: f64) {
        if let Some((t0, v0)) = self.prev {
            if v == 0.0 {
                if v0 != 0.0 {
                    self.changes.push(t);
                }
            } else if v0 != 0.0 && (v0 > 0.0) != (v > 0.0) {
                // Interpolate the crossing between the bracketing nodes.
                self.changes.push(t0 + (t - t0) * (v0 / (v0 - v)));
            }
        }
        self.prev = Some((t, v));
    }

    pub fn changes(&self) -> &[f64] {
        &self.changes
    }

    pub fn count(&self) -> usize {
        self.changes.len()
    }

    pub fn into_changes(self) -> Vec<f64> {
        self.changes
    }
}

impl Default for SignChangeAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Counts sign changes of a trajectory after `burn_in_time`.
///
/// Every flip counts (not flip pairs); the frequency is the flip count
/// divided by the post-burn-in window length.
pub fn sign_change_stats(traj: &Trajectory, burn_in_time: f64) -> Result<SignChangeStats> {
    let first = traj.times().partition_point(|t| *t < burn_in_time);
    if first + 2 > traj.len() {
        return Err(Error::Usage(format!(
            "burn-in {burn_in_time} leaves fewer than two samples to compare"
        )));
    }
    let mut acc = SignChangeAccumulator::new();
    for (t, v) in traj.samples().skip(first) {
        acc.push(t, v);
    }
    let window = traj.end_time() - traj.times()[first];
    let count = acc.count();
    Ok(SignChangeStats {
        change_times: acc.into_changes(),
        frequency: count as f64 / window,
        window,
    })
}
