//! Shared test oracles, kept independent of the library's closed-form
//! propagation path: a generic fixed-step fourth-order integrator that
//! knows nothing about the exact solution.

// Each integration test compiles its own copy; not all of them use
// every helper.
#![allow(dead_code)]

use switchdyn::switching::SwitchSequence;

/// One classical RK4 step of `dv/dt = force - v`.
pub fn rk4_linear_step(v: f64, force: f64, h: f64) -> f64 {
    let k1 = force - v;
    let k2 = force - (v + 0.5 * h * k1);
    let k3 = force - (v + 0.5 * h * k2);
    let k4 = force - (v + h * k3);
    v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `dv/dt = -v + F(t)` from `v(0) = 0` across every interval
/// of the sequence with steps of at most `h_max`, splitting so each step
/// stays inside one interval. Returns `v` at every switch time
/// (`n + 1` values, the initial one included).
pub fn rk4_switch_values(seq: &SwitchSequence, h_max: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(seq.len() + 1);
    let mut v = 0.0;
    values.push(v);
    for (k, &d) in seq.intervals().iter().enumerate() {
        let force = if k % 2 == 0 { 1.0 } else { -1.0 };
        v = rk4_over_interval(v, force, d, h_max);
        values.push(v);
    }
    values
}

/// Integrates one constant-force span of length `d`.
pub fn rk4_over_interval(mut v: f64, force: f64, d: f64, h_max: f64) -> f64 {
    let steps = (d / h_max).ceil().max(1.0) as usize;
    let h = d / steps as f64;
    for _ in 0..steps {
        v = rk4_linear_step(v, force, h);
    }
    v
}
