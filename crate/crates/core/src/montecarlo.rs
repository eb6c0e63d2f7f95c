//! Monte-Carlo estimators that simulate the channel model directly, used to
//! cross-check the analytic metrics.
//!
//! Samples are split into fixed-size chunks, each drawn from its own ChaCha
//! stream keyed by `(seed, purpose, chunk)`, and reduced by integer counts,
//! so results do not depend on the number of worker threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::link::{sample_channel, substream, ChannelDraw, NoiseProfile, ScenarioId, Scheme, TransmitConfig};
use crate::metrics::{self, MetricsError};
use crate::numerics::ToleranceSpec;

pub const MIN_SAMPLES: u64 = 1_000;
const CHUNK: u64 = 1 << 16;
/// Rejection sampling gives up after this many attempts per wanted sample.
const MAX_ATTEMPT_RATIO: u64 = 100;
const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: u64, min: u64 },
    #[error("conditioning starved: {accepted} of {attempts} draws accepted, acceptance below 1%")]
    Starvation { accepted: u64, attempts: u64 },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub type Result<T> = std::result::Result<T, McError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        let mean = hits as f64 / n as f64;
        Self {
            mean,
            half_width: Z95 * (mean * (1.0 - mean) / n as f64).sqrt(),
            n,
            seed,
        }
    }

    /// Agreement rule: within three half-widths, plus one count of slack so
    /// that exact 0/1 probabilities (zero half-width) are not held to equality.
    pub fn agrees_with(&self, value: f64) -> bool {
        (self.mean - value).abs() <= 3.0 * self.half_width + 1.0 / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionEstimate {
    pub p_fa: McEstimate,
    pub p_md: McEstimate,
    pub cop: McEstimate,
}

#[derive(Clone, Copy)]
#[repr(u64)]
enum Purpose {
    Transmission = 1,
    Secrecy = 2,
    Silent = 3,
    Transmitting = 4,
}

fn stream_id(purpose: Purpose, chunk: u64) -> u64 {
    ((purpose as u64) << 40) | chunk
}

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        Err(McError::TooFewSamples { n, min: MIN_SAMPLES })
    } else {
        Ok(())
    }
}

fn chunk_sizes(n: u64) -> Vec<(u64, u64)> {
    (0..n.div_ceil(CHUNK)).map(|c| (c, CHUNK.min(n - c * CHUNK))).collect()
}

/// Counts draws satisfying `hit`, chunk by chunk.
fn count(seed: u64, purpose: Purpose, n: u64, hit: impl Fn(&ChannelDraw) -> bool + Sync) -> u64 {
    chunk_sizes(n)
        .into_par_iter()
        .map(|(chunk, size)| {
            let mut rng = substream(seed, stream_id(purpose, chunk));
            (0..size).filter(|_| hit(&sample_channel(&mut rng))).count() as u64
        })
        .sum()
}

fn bob_capacity(scenario: ScenarioId, noise: &NoiseProfile, cfg: &TransmitConfig, g_ab: f64) -> f64 {
    let p = cfg.pa();
    let sinr = match scenario.scheme {
        Scheme::PowerControl => p * g_ab / noise.sigma_b2(),
        Scheme::ArtificialNoise => {
            let rho = cfg.rho();
            rho * p * g_ab / ((1.0 - rho) * p * g_ab + noise.sigma_b2())
        }
    };
    sinr.ln_1p() / std::f64::consts::LN_2
}

/// Eve's capacity; in the friend relationship Willie forwards his signal and
/// the two act as one two-antenna receiver.
fn eve_capacity(scenario: ScenarioId, noise: &NoiseProfile, cfg: &TransmitConfig, d: &ChannelDraw) -> f64 {
    let p = cfg.pa();
    let (gain, noise_power) = if scenario.is_friend() {
        (d.g_ae + d.g_aw, noise.sigma_e2() + noise.sigma_w2())
    } else {
        (d.g_ae, noise.sigma_e2())
    };
    let sinr = match scenario.scheme {
        Scheme::PowerControl => p * gain / noise_power,
        Scheme::ArtificialNoise => {
            let rho = cfg.rho();
            rho * p * gain / ((1.0 - rho) * p * gain + noise_power)
        }
    };
    sinr.ln_1p() / std::f64::consts::LN_2
}

/// Fraction of draws for which Bob's capacity supports the target rate.
pub fn estimate_tp(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    cfg: &TransmitConfig,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(n)?;
    let rs = cfg.rs();
    let hits = count(seed, Purpose::Transmission, n, |d| {
        bob_capacity(scenario, noise, cfg, d.g_ab) >= rs
    });
    Ok(McEstimate::from_counts(hits, n, seed))
}

/// Fraction of transmitting slots (Bob's capacity at least the rate) whose
/// secrecy capacity falls short of the rate; `n` counts accepted draws.
pub fn estimate_sop(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    cfg: &TransmitConfig,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(n)?;
    let rs = cfg.rs();
    let per_chunk: Vec<std::result::Result<u64, (u64, u64)>> = chunk_sizes(n)
        .into_par_iter()
        .map(|(chunk, quota)| {
            let mut rng = substream(seed, stream_id(Purpose::Secrecy, chunk));
            let (mut accepted, mut attempts, mut outages) = (0u64, 0u64, 0u64);
            while accepted < quota {
                if attempts >= MAX_ATTEMPT_RATIO * quota {
                    return Err((accepted, attempts));
                }
                attempts += 1;
                let d = sample_channel(&mut rng);
                let c_b = bob_capacity(scenario, noise, cfg, d.g_ab);
                if c_b < rs {
                    continue;
                }
                accepted += 1;
                if c_b - eve_capacity(scenario, noise, cfg, &d) < rs {
                    outages += 1;
                }
            }
            Ok(outages)
        })
        .collect();
    let mut outages = 0;
    for r in per_chunk {
        match r {
            Ok(k) => outages += k,
            Err((accepted, attempts)) => return Err(McError::Starvation { accepted, attempts }),
        }
    }
    Ok(McEstimate::from_counts(outages, n, seed))
}

/// Willie's average received power in the large-block limit.
fn willie_power(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    cfg: &TransmitConfig,
    d: &ChannelDraw,
    transmitting: bool,
) -> f64 {
    let (gain, floor) = if scenario.is_friend() {
        (d.g_aw + d.g_ae, noise.sigma_w2() + noise.sigma_e2())
    } else {
        (d.g_aw, noise.sigma_w2())
    };
    let emitted = match (transmitting, scenario.scheme) {
        (true, _) => cfg.pa(),
        (false, Scheme::PowerControl) => 0.0,
        // Artificial noise is emitted even in silent slots.
        (false, Scheme::ArtificialNoise) => (1.0 - cfg.rho()) * cfg.pa(),
    };
    emitted * gain + floor
}

/// False alarm from silent-slot draws, missed detection from independent
/// transmitting-slot draws, and their combined COP.
pub fn estimate_detection(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    cfg: &TransmitConfig,
    theta: f64,
    n: u64,
    seed: u64,
) -> Result<DetectionEstimate> {
    check_samples(n)?;
    let alarms = count(seed, Purpose::Silent, n, |d| {
        willie_power(scenario, noise, cfg, d, false) >= theta
    });
    let misses = count(seed, Purpose::Transmitting, n, |d| {
        willie_power(scenario, noise, cfg, d, true) < theta
    });
    let p_fa = McEstimate::from_counts(alarms, n, seed);
    let p_md = McEstimate::from_counts(misses, n, seed);
    let cop = McEstimate {
        mean: (1.0 - (p_fa.mean + p_md.mean)).clamp(0.0, 1.0),
        half_width: p_fa.half_width.hypot(p_md.half_width),
        n,
        seed,
    };
    Ok(DetectionEstimate { p_fa, p_md, cop })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Tp,
    Sop,
    Cop,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::Tp => "tp",
            Metric::Sop => "sop",
            Metric::Cop => "cop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub metric: Metric,
    pub analytic: f64,
    pub estimate: McEstimate,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub scenario: ScenarioId,
    pub comparisons: Vec<Comparison>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(|c| c.pass)
    }

    /// Shifts every analytic value by `delta` and re-judges, to exercise the harness.
    pub fn perturb(&self, delta: f64) -> Self {
        let comparisons = self
            .comparisons
            .iter()
            .map(|c| {
                let analytic = c.analytic + delta;
                Comparison {
                    analytic,
                    pass: c.estimate.agrees_with(analytic),
                    ..*c
                }
            })
            .collect();
        Self {
            scenario: self.scenario,
            comparisons,
        }
    }
}

/// Compares analytic TP, SOP and COP at Willie's optimal threshold against
/// simulation.
pub fn validate_scenario(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    cfg: &TransmitConfig,
    n: u64,
    seed: u64,
) -> Result<ValidationReport> {
    check_samples(n)?;
    let rho = match scenario.scheme {
        Scheme::PowerControl => 1.0,
        Scheme::ArtificialNoise => cfg.rho(),
    };
    let cfg = TransmitConfig::new(cfg.pa(), rho, cfg.rs()).expect("re-validated copy of a valid config");
    let tp = metrics::tp(scenario, noise, &cfg);
    let sop = metrics::sop(scenario, noise, &cfg, &ToleranceSpec::QUADRATURE)?;
    let theta = metrics::theta_star(scenario, noise, cfg.pa(), rho);
    let cop = metrics::cop(scenario, noise, cfg.pa(), rho, theta);

    let judged = |metric, analytic: f64, estimate: McEstimate| Comparison {
        metric,
        analytic,
        estimate,
        pass: estimate.agrees_with(analytic),
    };
    let comparisons = vec![
        judged(Metric::Tp, tp, estimate_tp(scenario, noise, &cfg, n, seed)?),
        judged(Metric::Sop, sop, estimate_sop(scenario, noise, &cfg, n, seed)?),
        judged(
            Metric::Cop,
            cop,
            estimate_detection(scenario, noise, &cfg, theta, n, seed)?.cop,
        ),
    ];
    Ok(ValidationReport { scenario, comparisons })
}
