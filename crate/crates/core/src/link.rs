//! Link parameters, the scenario taxonomy and the seeded Rayleigh channel sampler.
//!
//! All powers are linear; decibels only appear at the boundary through
//! [`db_to_linear`] and [`linear_to_db`]. Channel gains are unit-mean
//! exponential (Rayleigh fading, unit path loss).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be strictly positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
    #[error("unknown scenario {0:?} (expected one of ip, ia, fp, fa)")]
    UnknownScenario(String),
}

fn positive(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ParamError::NotPositive { name, value })
    }
}

fn open_unit(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(ParamError::OutOfRange {
            name,
            range: "(0, 1)",
            value,
        })
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Noise powers at Bob, Willie and Eve, plus the detection margin `upsilon`
/// that places Willie's threshold just above the noise floor in the
/// power-control scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseProfile {
    sigma_b2: f64,
    sigma_w2: f64,
    sigma_e2: f64,
    upsilon: f64,
}

impl NoiseProfile {
    pub fn new(sigma_b2: f64, sigma_w2: f64, sigma_e2: f64, upsilon: f64) -> Result<Self, ParamError> {
        Ok(Self {
            sigma_b2: positive("sigma_b2", sigma_b2)?,
            sigma_w2: positive("sigma_w2", sigma_w2)?,
            sigma_e2: positive("sigma_e2", sigma_e2)?,
            upsilon: positive("upsilon", upsilon)?,
        })
    }

    /// Noise powers given in dB; `upsilon` stays linear.
    pub fn from_db(sigma_b_db: f64, sigma_w_db: f64, sigma_e_db: f64, upsilon: f64) -> Result<Self, ParamError> {
        Self::new(
            db_to_linear(sigma_b_db),
            db_to_linear(sigma_w_db),
            db_to_linear(sigma_e_db),
            upsilon,
        )
    }

    pub fn sigma_b2(&self) -> f64 {
        self.sigma_b2
    }

    pub fn sigma_w2(&self) -> f64 {
        self.sigma_w2
    }

    pub fn sigma_e2(&self) -> f64 {
        self.sigma_e2
    }

    pub fn upsilon(&self) -> f64 {
        self.upsilon
    }

    /// Pooled attacker noise `sigma_w2 + sigma_e2` seen when Willie and Eve share signals.
    pub fn pooled_attacker_noise(&self) -> f64 {
        self.sigma_w2 + self.sigma_e2
    }
}

impl Default for NoiseProfile {
    /// `sigma_b2 = -20 dB`, `sigma_w2 = sigma_e2 = 0 dB`, `upsilon = 0.01`.
    fn default() -> Self {
        Self::from_db(-20.0, 0.0, 0.0, 0.01).expect("default noise profile is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relationship {
    /// Willie and Eve attack separately.
    Independence,
    /// Willie and Eve pool their received signals.
    Friend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Alice hides in the noise by choosing her transmit power.
    PowerControl,
    /// Alice splits a fixed power between message and artificial noise.
    ArtificialNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScenarioId {
    pub relationship: Relationship,
    pub scheme: Scheme,
}

impl ScenarioId {
    pub const IP: ScenarioId = ScenarioId::new(Relationship::Independence, Scheme::PowerControl);
    pub const IA: ScenarioId = ScenarioId::new(Relationship::Independence, Scheme::ArtificialNoise);
    pub const FP: ScenarioId = ScenarioId::new(Relationship::Friend, Scheme::PowerControl);
    pub const FA: ScenarioId = ScenarioId::new(Relationship::Friend, Scheme::ArtificialNoise);

    pub const ALL: [ScenarioId; 4] = [Self::IP, Self::IA, Self::FP, Self::FA];

    pub const fn new(relationship: Relationship, scheme: Scheme) -> Self {
        Self { relationship, scheme }
    }

    pub fn is_friend(&self) -> bool {
        self.relationship == Relationship::Friend
    }

    pub fn uses_artificial_noise(&self) -> bool {
        self.scheme == Scheme::ArtificialNoise
    }

    pub fn abbreviation(&self) -> &'static str {
        match (self.relationship, self.scheme) {
            (Relationship::Independence, Scheme::PowerControl) => "IP",
            (Relationship::Independence, Scheme::ArtificialNoise) => "IA",
            (Relationship::Friend, Scheme::PowerControl) => "FP",
            (Relationship::Friend, Scheme::ArtificialNoise) => "FA",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbreviation())
    }
}

impl FromStr for ScenarioId {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ip" => Ok(Self::IP),
            "ia" => Ok(Self::IA),
            "fp" => Ok(Self::FP),
            "fa" => Ok(Self::FA),
            _ => Err(ParamError::UnknownScenario(s.to_string())),
        }
    }
}

/// Transmit power `pa`, message power fraction `rho` (1 means no artificial
/// noise) and target secrecy rate `rs` in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitConfig {
    pa: f64,
    rho: f64,
    rs: f64,
}

impl TransmitConfig {
    pub fn new(pa: f64, rho: f64, rs: f64) -> Result<Self, ParamError> {
        let pa = positive("pa", pa)?;
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(ParamError::OutOfRange {
                name: "rho",
                range: "(0, 1]",
                value: rho,
            });
        }
        if !(rs >= 0.0 && rs.is_finite()) {
            return Err(ParamError::OutOfRange {
                name: "rs",
                range: "[0, inf)",
                value: rs,
            });
        }
        Ok(Self { pa, rho, rs })
    }

    /// Power-control configuration (`rho = 1`).
    pub fn power_control(pa: f64, rs: f64) -> Result<Self, ParamError> {
        Self::new(pa, 1.0, rs)
    }

    pub fn pa(&self) -> f64 {
        self.pa
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rs(&self) -> f64 {
        self.rs
    }
}

/// Bounds on covertness outage, secrecy outage and `1 - TP`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityConstraints {
    eps_c: f64,
    eps_s: f64,
    eps_t: f64,
}

impl SecurityConstraints {
    pub fn new(eps_c: f64, eps_s: f64, eps_t: f64) -> Result<Self, ParamError> {
        Ok(Self {
            eps_c: open_unit("eps_c", eps_c)?,
            eps_s: open_unit("eps_s", eps_s)?,
            eps_t: open_unit("eps_t", eps_t)?,
        })
    }

    pub fn eps_c(&self) -> f64 {
        self.eps_c
    }

    pub fn eps_s(&self) -> f64 {
        self.eps_s
    }

    pub fn eps_t(&self) -> f64 {
        self.eps_t
    }
}

/// One slot's channel gains `|h_ab|^2`, `|h_ae|^2`, `|h_aw|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g_ab: f64,
    pub g_ae: f64,
    pub g_aw: f64,
}

/// Three independent unit-mean exponential gains.
pub fn sample_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelDraw {
    ChannelDraw {
        g_ab: rng.sample(Exp1),
        g_ae: rng.sample(Exp1),
        g_aw: rng.sample(Exp1),
    }
}

/// Independent generator for worker/chunk `stream` under a common `seed`.
///
/// ChaCha streams share the key derived from `seed` and differ in the nonce,
/// so every `(seed, stream)` pair yields a distinct, reproducible sequence.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
