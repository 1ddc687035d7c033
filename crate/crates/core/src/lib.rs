//! Simulation of a linearly damped state driven by a random telegraph
//! force, and the experiments that measure how its asymptotic amplitude
//! bound scales with the switching frequency.
//!
//! The crate is organized around the pipeline used by every experiment:
//!
//! * [`switching`]: seeded generation of random switch-interval
//!   sequences (constant, exponential, gamma, beta, lognormal) with
//!   closed-form moments and moment inversion.
//! * [`telegraph`]: event-exact propagation of `dv/dt = -v + F(t)`
//!   through the switch times, the amplitude-bound estimator, and the
//!   closed form for periodic forcing.
//! * [`dde`]: the delayed-feedback oscillator whose chaotic solution
//!   provides a self-generated switching force.
//! * [`bistable`]: a double-well system driven by telegraph forcing;
//!   survival times of the home basin and occupancy densities.
//! * [`analysis`]: log-log power-law fits and the frequency/CV sweep
//!   experiments.
//! * [`seeds`]: counter-based derivation of per-grid-point seeds from a
//!   master seed.
//!
//! All operations are deterministic given their configuration and seed;
//! sweeps parallelize over grid points without affecting results.

pub mod analysis;
pub mod bistable;
pub mod dde;
pub mod error;
pub mod seeds;
pub mod switching;
pub mod telegraph;
pub mod trajectory;

pub use analysis::{
    cv_sweep, distribution_sweep, fit_power_law, CvSweepEntry, PowerLawFit, SweepResult,
};
pub use bistable::{average_survival_time, DoubleWellConfig, EscapeRecord, Histogram};
pub use dde::{integrate_dde, DdeConfig, InitialHistory};
pub use error::{Error, Result};
pub use switching::{
    empirical_frequency, sample_intervals, spec_for_target, theoretical_moments, DistributionSpec,
    Family, SwitchSequence,
};
pub use telegraph::{
    analytic_bound_constant, constant_d_sweep, exact_solution_at, force_at, iterate_switch_values,
    upper_bound_estimate, BoundEstimate, SwitchValues, TelegraphForce,
};
pub use trajectory::{sign_change_stats, SignChangeStats, Trajectory};
