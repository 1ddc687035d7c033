//! Random switch-interval sequences.
//!
//! The forcing studied by this crate flips sign at times `t_0 = 0 < t_1 <
//! t_2 < ...` defined by positive gaps `d_k = t_{k+1} - t_k` drawn i.i.d.
//! from one of five interval laws:
//!
//! | family      | parameters | mean           | variance                  | CV              |
//! |-------------|------------|----------------|---------------------------|-----------------|
//! | constant    | d          | d              | 0                         | 0               |
//! | exponential | λ          | 1/λ            | 1/λ²                      | 1               |
//! | gamma       | α, β       | α/β            | α/β²                      | 1/√α            |
//! | beta        | α, β       | α/(α+β)        | αβ/((α+β)²(α+β+1))        | √(β/(α(α+β+1))) |
//! | lognormal   | μ, σ       | e^(μ+σ²/2)     | (e^(σ²)−1)·e^(2μ+σ²)      | √(e^(σ²)−1)     |
//!
//! Sampling is reproducible: every sequence is generated by a ChaCha8
//! stream seeded from a 64-bit seed, with variates drawn through
//! `rand_distr`. Identical `(spec, count, seed)` triples give bit-identical
//! sequences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};

/// Interval-distribution family, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Constant,
    Exponential,
    Gamma,
    Beta,
    LogNormal,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Exponential => "exponential",
            Family::Gamma => "gamma",
            Family::Beta => "beta",
            Family::LogNormal => "lognormal",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized interval law.
///
/// All shape/rate/scale parameters must be strictly positive; the
/// lognormal location `mu` may be any finite real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    /// Every interval equals `d` (a periodic force).
    Constant { d: f64 },
    /// Exponential with rate `rate` (mean `1/rate`).
    Exponential { rate: f64 },
    /// Gamma with shape `shape` and rate `rate` (mean `shape/rate`).
    Gamma { shape: f64, rate: f64 },
    /// Beta on (0, 1) with shape parameters `alpha`, `beta`.
    Beta { alpha: f64, beta: f64 },
    /// Lognormal: `ln d ~ N(mu, sigma²)`.
    LogNormal { mu: f64, sigma: f64 },
}

/// Closed-form moments of an interval law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// Coefficient of variation: standard deviation over mean.
    pub cv: f64,
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be strictly positive, got {value}"),
        ))
    }
}

fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {value}")))
    }
}

impl DistributionSpec {
    /// Checks the parameter constraints, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Constant { d } => require_positive("d", d),
            DistributionSpec::Exponential { rate } => require_positive("rate", rate),
            DistributionSpec::Gamma { shape, rate } => {
                require_positive("shape", shape)?;
                require_positive("rate", rate)
            }
            DistributionSpec::Beta { alpha, beta } => {
                require_positive("alpha", alpha)?;
                require_positive("beta", beta)
            }
            DistributionSpec::LogNormal { mu, sigma } => {
                require_finite("mu", mu)?;
                require_positive("sigma", sigma)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            DistributionSpec::Constant { .. } => Family::Constant,
            DistributionSpec::Exponential { .. } => Family::Exponential,
            DistributionSpec::Gamma { .. } => Family::Gamma,
            DistributionSpec::Beta { .. } => Family::Beta,
            DistributionSpec::LogNormal { .. } => Family::LogNormal,
        }
    }

    /// Closed-form mean, variance, and CV of the interval law.
    pub fn theoretical_moments(&self) -> Result<Moments> {
        self.validate()?;
        Ok(match *self {
            DistributionSpec::Constant { d } => Moments {
                mean: d,
                variance: 0.0,
                cv: 0.0,
            },
            DistributionSpec::Exponential { rate } => Moments {
                mean: 1.0 / rate,
                variance: 1.0 / (rate * rate),
                cv: 1.0,
            },
            DistributionSpec::Gamma { shape, rate } => Moments {
                mean: shape / rate,
                variance: shape / (rate * rate),
                cv: 1.0 / shape.sqrt(),
            },
            DistributionSpec::Beta { alpha, beta } => {
                let s = alpha + beta;
                Moments {
                    mean: alpha / s,
                    variance: alpha * beta / (s * s * (s + 1.0)),
                    cv: (beta / (alpha * (s + 1.0))).sqrt(),
                }
            }
            DistributionSpec::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                Moments {
                    mean: (mu + 0.5 * s2).exp(),
                    variance: s2.exp_m1() * (2.0 * mu + s2).exp(),
                    cv: s2.exp_m1().sqrt(),
                }
            }
        })
    }

    /// Short human-readable parameter string, used in sweep metadata.
    pub fn describe(&self) -> String {
        match *self {
            DistributionSpec::Constant { d } => format!("constant(d={d})"),
            DistributionSpec::Exponential { rate } => format!("exponential(rate={rate})"),
            DistributionSpec::Gamma { shape, rate } => {
                format!("gamma(shape={shape}, rate={rate})")
            }
            DistributionSpec::Beta { alpha, beta } => format!("beta(alpha={alpha}, beta={beta})"),
            DistributionSpec::LogNormal { mu, sigma } => {
                format!("lognormal(mu={mu}, sigma={sigma})")
            }
        }
    }
}

/// Free-function form of [`DistributionSpec::theoretical_moments`].
pub fn theoretical_moments(spec: &DistributionSpec) -> Result<Moments> {
    spec.theoretical_moments()
}

/// Inverts the moment formulas: builds a spec of the given family whose
/// theoretical mean and CV match the targets.
///
/// Feasibility varies by family: gamma and lognormal reach any `cv > 0`;
/// beta requires `cv² < (1 - mean)/mean` with `mean` in (0, 1); constant
/// requires `cv = 0` and exponential `cv = 1`.
pub fn spec_for_target(family: Family, cv: f64, mean: f64) -> Result<DistributionSpec> {
    require_positive("mean", mean)?;
    if !cv.is_finite() || cv < 0.0 {
        return Err(Error::param(
            "cv",
            format!("must be non-negative, got {cv}"),
        ));
    }
    // Exact representation tolerance for the degenerate families.
    const EXACT: f64 = 1e-12;
    match family {
        Family::Constant => {
            if cv > EXACT {
                return Err(Error::Infeasible(format!(
                    "constant intervals have cv = 0, cannot reach cv = {cv}"
                )));
            }
            Ok(DistributionSpec::Constant { d: mean })
        }
        Family::Exponential => {
            if (cv - 1.0).abs() > EXACT {
                return Err(Error::Infeasible(format!(
                    "exponential intervals have cv = 1, cannot reach cv = {cv}"
                )));
            }
            Ok(DistributionSpec::Exponential { rate: 1.0 / mean })
        }
        Family::Gamma => {
            if cv <= 0.0 {
                return Err(Error::Infeasible(
                    "gamma requires cv > 0 (use the constant family for cv = 0)".into(),
                ));
            }
            let shape = 1.0 / (cv * cv);
            Ok(DistributionSpec::Gamma {
                shape,
                rate: shape / mean,
            })
        }
        Family::Beta => {
            if mean >= 1.0 {
                return Err(Error::Infeasible(format!(
                    "beta intervals lie in (0, 1); mean {mean} is out of range"
                )));
            }
            if cv <= 0.0 {
                return Err(Error::Infeasible(
                    "beta requires cv > 0 (use the constant family for cv = 0)".into(),
                ));
            }
            // cv² = (1 - m)/(alpha + m) solved for alpha.
            let alpha = (1.0 - mean) / (cv * cv) - mean;
            if alpha <= 0.0 {
                let bound = ((1.0 - mean) / mean).sqrt();
                return Err(Error::Infeasible(format!(
                    "beta with mean {mean} requires cv < {bound:.6}, got {cv}"
                )));
            }
            Ok(DistributionSpec::Beta {
                alpha,
                beta: alpha * (1.0 - mean) / mean,
            })
        }
        Family::LogNormal => {
            if cv <= 0.0 {
                return Err(Error::Infeasible(
                    "lognormal requires cv > 0 (use the constant family for cv = 0)".into(),
                ));
            }
            let s2 = (1.0 + cv * cv).ln();
            Ok(DistributionSpec::LogNormal {
                mu: mean.ln() - 0.5 * s2,
                sigma: s2.sqrt(),
            })
        }
    }
}

enum SamplerKind {
    Constant(f64),
    Exponential(rand_distr::Exp<f64>),
    Gamma(rand_distr::Gamma<f64>),
    Beta(rand_distr::Beta<f64>),
    LogNormal(rand_distr::LogNormal<f64>),
}

/// A seeded stream of intervals from one spec.
///
/// Draws that are not strictly positive (possible through floating-point
/// underflow, e.g. beta or tiny-shape gamma variates rounding to 0) are
/// rejected and redrawn, so every emitted interval satisfies `d > 0`.
pub struct IntervalSampler {
    kind: SamplerKind,
    rng: ChaCha8Rng,
}

impl IntervalSampler {
    pub fn new(spec: &DistributionSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let kind = match *spec {
            DistributionSpec::Constant { d } => SamplerKind::Constant(d),
            DistributionSpec::Exponential { rate } => {
                SamplerKind::Exponential(rand_distr::Exp::new(rate).expect("validated rate"))
            }
            DistributionSpec::Gamma { shape, rate } => SamplerKind::Gamma(
                rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated shape/rate"),
            ),
            DistributionSpec::Beta { alpha, beta } => {
                SamplerKind::Beta(rand_distr::Beta::new(alpha, beta).expect("validated shapes"))
            }
            DistributionSpec::LogNormal { mu, sigma } => SamplerKind::LogNormal(
                rand_distr::LogNormal::new(mu, sigma).expect("validated mu/sigma"),
            ),
        };
        Ok(Self {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Next strictly positive interval.
    pub fn next_interval(&mut self) -> f64 {
        loop {
            let d = match &self.kind {
                SamplerKind::Constant(d) => *d,
                SamplerKind::Exponential(e) => e.sample(&mut self.rng),
                SamplerKind::Gamma(g) => g.sample(&mut self.rng),
                SamplerKind::Beta(b) => b.sample(&mut self.rng),
                SamplerKind::LogNormal(l) => l.sample(&mut self.rng),
            };
            if d > 0.0 && d.is_finite() {
                return d;
            }
        }
    }
}

/// A realized sequence of switch intervals and the switch times they induce.
///
/// `times` always starts at 0 and satisfies `times[k+1] = times[k] +
/// intervals[k]` exactly (prefix sums in f64).
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSequence {
    intervals: Vec<f64>,
    times: Vec<f64>,
    seed: u64,
    spec: DistributionSpec,
}

impl SwitchSequence {
    /// Builds a sequence from explicit intervals. Every interval must be
    /// strictly positive.
    pub fn from_intervals(intervals: Vec<f64>, spec: DistributionSpec, seed: u64) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Usage(
                "switch sequence needs at least one interval".into(),
            ));
        }
        if let Some(bad) = intervals.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::param(
                "intervals",
                format!("must all be strictly positive, found {bad}"),
            ));
        }
        let mut times = Vec::with_capacity(intervals.len() + 1);
        let mut t = 0.0;
        times.push(t);
        for d in &intervals {
            t += d;
            times.push(t);
        }
        Ok(Self {
            intervals,
            times,
            seed,
            spec,
        })
    }

    pub fn intervals(&self) -> &[f64] {
        &self.intervals
    }

    /// Switch times `t_0 = 0, t_1, ..., t_n`; one longer than `intervals`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Last generated switch time (the horizon of the sequence).
    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("times never empty")
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }
}

/// Draws `count` i.i.d. intervals from `spec`.
///
/// Deterministic: the same `(spec, count, seed)` always yields the same
/// sequence, independent of platform and thread scheduling.
pub fn sample_intervals(
    spec: &DistributionSpec,
    count: usize,
    seed: u64,
) -> Result<SwitchSequence> {
    if count == 0 {
        return Err(Error::Usage("interval count must be at least 1".into()));
    }
    let mut sampler = IntervalSampler::new(spec, seed)?;
    let intervals: Vec<f64> = (0..count).map(|_| sampler.next_interval()).collect();
    SwitchSequence::from_intervals(intervals, *spec, seed)
}

/// Draws intervals until the switch times cover `min_horizon`.
pub fn sample_until(
    spec: &DistributionSpec,
    min_horizon: f64,
    seed: u64,
) -> Result<SwitchSequence> {
    require_positive("min_horizon", min_horizon)?;
    let mut sampler = IntervalSampler::new(spec, seed)?;
    let mut intervals = Vec::new();
    let mut total = 0.0;
    while total < min_horizon {
        let d = sampler.next_interval();
        total += d;
        intervals.push(d);
    }
    SwitchSequence::from_intervals(intervals, *spec, seed)
}

/// Empirical switching frequency `1 / mean(d_k)` of a realized sequence.
pub fn empirical_frequency(seq: &SwitchSequence) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::Usage(
            "empirical frequency of an empty sequence is undefined".into(),
        ));
    }
    // horizon() is the exact prefix sum of the intervals.
    Ok(seq.len() as f64 / seq.horizon())
}
