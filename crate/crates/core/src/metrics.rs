//! Closed-form transmission, secrecy outage and covertness outage probabilities.
//!
//! Willie runs a threshold test on the average received power; in the
//! large-block limit that power is the exact mean `P_a |h|^2 + noise`, so
//! every detection probability below is an exponential (independence) or a
//! shape-2 gamma (friend, two pooled antennas) tail.
//!
//! The secrecy outage of the artificial-noise schemes has no elementary
//! closed form and is evaluated by adaptive quadrature.

use std::f64::consts::LN_2;

use thiserror::Error;

use crate::link::{NoiseProfile, Relationship, ScenarioId, Scheme, TransmitConfig};
use crate::numerics::{integrate_1d, integrate_triangle, NumericsError, ToleranceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    /// `2^rs (1 - rho) >= 1`: Alice never transmits, so the conditional SOP is undefined.
    #[error("target rate {rs} is at or above the capacity ceiling for rho = {rho}")]
    CapacityCeiling { rs: f64, rho: f64 },
    #[error("{name} out of range: {value}")]
    InvalidInput { name: &'static str, value: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Willie's two error probabilities at a given threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionErrors {
    pub p_fa: f64,
    pub p_md: f64,
}

impl DetectionErrors {
    /// Covertness outage: neither a false alarm nor a missed detection.
    pub fn cop(&self) -> f64 {
        1.0 - (self.p_fa + self.p_md)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub tp: f64,
    pub cop: f64,
    pub sop: f64,
}

/// `2^rs - 1` without cancellation for small rates.
pub(crate) fn two_pow_minus_one(rs: f64) -> f64 {
    if rs < 0.5 {
        (rs * LN_2).exp_m1()
    } else {
        rs.exp2() - 1.0
    }
}

/// `log2(1 / (1 - rho))`: Bob's capacity never reaches this rate when a
/// fraction `1 - rho` of the power is artificial noise. Infinite for `rho = 1`.
pub fn rate_ceiling(rho: f64) -> f64 {
    -(-rho).ln_1p() / LN_2
}

fn above_ceiling(rho: f64, rs: f64) -> bool {
    rho < 1.0 && rs.exp2() * (1.0 - rho) >= 1.0
}

/// `P(X1 + X2 <= u)` for two independent unit exponentials: `1 - (1 + u) e^-u`.
pub(crate) fn gamma2_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u < 0.25 {
        // sum_{k>=2} (-1)^k (k-1) u^k / k!
        let mut power = u * u / 2.0;
        let mut sum = 0.0;
        let mut k = 2.0;
        while k < 40.0 {
            let term = (k - 1.0) * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            k += 1.0;
            power *= -u / k;
        }
        sum
    } else {
        1.0 - (1.0 + u) * (-u).exp()
    }
}

/// `P(X1 + X2 >= v) = (1 + v) e^-v`.
pub(crate) fn gamma2_tail(v: f64) -> f64 {
    if v <= 0.0 {
        1.0
    } else if v.is_infinite() {
        0.0
    } else {
        (1.0 + v) * (-v).exp()
    }
}

pub fn tp_pc(noise: &NoiseProfile, pa: f64, rs: f64) -> f64 {
    (-two_pow_minus_one(rs) * noise.sigma_b2() / pa).exp()
}

/// Transmission probability with artificial noise; exactly 0 at or above the
/// capacity ceiling.
pub fn tp_an(noise: &NoiseProfile, pa: f64, rho: f64, rs: f64) -> f64 {
    if above_ceiling(rho, rs) {
        return 0.0;
    }
    let q = two_pow_minus_one(rs);
    let margin = rho - q * (1.0 - rho);
    if margin <= 0.0 {
        return 0.0;
    }
    (-q * noise.sigma_b2() / (pa * margin)).exp()
}

pub fn sop_ip(noise: &NoiseProfile, rs: f64) -> f64 {
    let x = rs.exp2() * noise.sigma_b2();
    x / (x + noise.sigma_e2())
}

pub fn sop_fp(noise: &NoiseProfile, rs: f64) -> f64 {
    let x = rs.exp2() * noise.sigma_b2();
    let c = noise.pooled_attacker_noise();
    x * (x + 2.0 * c) / ((x + c) * (x + c))
}

/// Quantities shared by the two artificial-noise SOP integrals.
struct AnSopTerms {
    /// `2^rs + rho - 1`
    lead: f64,
    /// `2^rs - 1`
    q: f64,
    /// `1 - (1 - rho) 2^rs`, positive below the capacity ceiling.
    headroom: f64,
}

impl AnSopTerms {
    fn new(rho: f64, rs: f64) -> Self {
        let q = two_pow_minus_one(rs);
        let t = q + 1.0;
        Self {
            lead: t + rho - 1.0,
            q,
            headroom: 1.0 - (1.0 - rho) * t,
        }
    }

    /// Upper limit of the outer integration variable for attacker noise `noise_att`.
    fn upper_limit(&self, rho: f64, pa: f64, noise_att: f64) -> f64 {
        self.headroom * noise_att / (self.q * (1.0 - rho) * pa)
    }

    /// Denominator `c - d s` of the exponent is written with these two parts.
    fn den_parts(&self, rho: f64, pa: f64, noise_att: f64) -> (f64, f64) {
        (self.headroom * pa * noise_att, self.q * (1.0 - rho) * pa * pa)
    }

    /// `a c + b d` for numerator `a s + b`; see [`Self::exponent`].
    fn cross(&self, rho: f64, pa: f64, noise_att: f64) -> f64 {
        let (c, d) = self.den_parts(rho, pa, noise_att);
        self.lead * pa * c + self.q * noise_att * d
    }

    /// Slope magnitude of [`Self::exponent`] at `s = 0`. The exponent is zero
    /// there, decreasing and concave, so it stays below `-decay_rate * s`.
    fn decay_rate(&self, rho: f64, pa: f64, sigma_b2: f64, noise_att: f64) -> f64 {
        let (c, _) = self.den_parts(rho, pa, noise_att);
        1.0 + sigma_b2 * self.cross(rho, pa, noise_att) / (c * c)
    }

    /// Truncated upper limit: past `TAIL_MARGIN / decay_rate` the integrand is
    /// below `e^-TAIL_MARGIN`. Keeping the window tight matters because the
    /// mass can sit in a spike far narrower than `Phi`.
    fn truncated_limit(&self, rho: f64, pa: f64, sigma_b2: f64, noise_att: f64) -> f64 {
        let phi = self.upper_limit(rho, pa, noise_att);
        phi.min(TAIL_MARGIN / self.decay_rate(rho, pa, sigma_b2, noise_att))
    }

    /// Conditional integrand exponent at total attacker gain `s`.
    ///
    /// The printed prefactor and integrand exponents, regrouped so that the
    /// `1 / (1 - 2^rs)` terms cancel, are
    /// `-ln TP - s - sigma_b2 (a s + b) / (c - d s)` with `a = (2^rs+rho-1) P`,
    /// `b = (2^rs-1) N`, `c = (1-(1-rho)2^rs) P N` and `d = (2^rs-1)(1-rho) P^2`.
    /// Since `-ln TP = sigma_b2 b / c`, the constant parts cancel exactly,
    /// leaving `-s - sigma_b2 s (a c + b d) / (c (c - d s))`. Near the
    /// capacity ceiling `-ln TP` is huge, and subtracting it numerically
    /// would leave rounding noise of order one in the exponent.
    fn exponent(&self, s: f64, rho: f64, pa: f64, sigma_b2: f64, noise_att: f64) -> f64 {
        let (c, d) = self.den_parts(rho, pa, noise_att);
        let den = c - d * s;
        if den <= 0.0 {
            return f64::NEG_INFINITY;
        }
        -s - sigma_b2 * s * self.cross(rho, pa, noise_att) / (c * den)
    }
}

/// The SOP is `1 - kept mass`, so the mass needs absolute rather than
/// relative accuracy once it becomes tiny.
fn sop_tolerance(tol: &ToleranceSpec) -> ToleranceSpec {
    ToleranceSpec::fixed(
        tol.rel_tol(),
        tol.abs_tol().max(1e-2 * tol.rel_tol()),
        tol.max_iterations(),
    )
}

/// Truncating where the exponent bound reaches `-margin` drops at most
/// `e^-margin` of mass (times a polynomial factor).
const TAIL_MARGIN: f64 = 60.0;

fn check_an_inputs(pa: f64, rho: f64, rs: f64) -> Result<()> {
    if !(pa > 0.0 && pa.is_finite()) {
        return Err(MetricsError::InvalidInput { name: "pa", value: pa });
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(MetricsError::InvalidInput {
            name: "rho",
            value: rho,
        });
    }
    if !(rs >= 0.0 && rs.is_finite()) {
        return Err(MetricsError::InvalidInput { name: "rs", value: rs });
    }
    if above_ceiling(rho, rs) {
        return Err(MetricsError::CapacityCeiling { rs, rho });
    }
    Ok(())
}

/// Secrecy outage, independence relationship with artificial noise.
///
/// At `rs = 0` this returns the right limit `P(SNR_b < SNR_e)`, and at
/// `rho = 1` it reduces to [`sop_ip`].
pub fn sop_ia(noise: &NoiseProfile, pa: f64, rho: f64, rs: f64, tol: &ToleranceSpec) -> Result<f64> {
    check_an_inputs(pa, rho, rs)?;
    if rho == 1.0 || rs == 0.0 {
        return Ok(sop_ip(noise, rs));
    }
    let terms = AnSopTerms::new(rho, rs);
    let se = noise.sigma_e2();
    let sb = noise.sigma_b2();
    let upper = terms.truncated_limit(rho, pa, sb, se);
    let kept = integrate_1d(
        |y| terms.exponent(y, rho, pa, sb, se).exp(),
        0.0,
        upper,
        &sop_tolerance(tol),
    )?;
    Ok((1.0 - kept).clamp(0.0, 1.0))
}

/// Secrecy outage, friend relationship with artificial noise; a double
/// integral over the triangle `y + z <= Phi` of the pooled attacker gains.
pub fn sop_fa(noise: &NoiseProfile, pa: f64, rho: f64, rs: f64, tol: &ToleranceSpec) -> Result<f64> {
    check_an_inputs(pa, rho, rs)?;
    if rho == 1.0 || rs == 0.0 {
        return Ok(sop_fp(noise, rs));
    }
    let terms = AnSopTerms::new(rho, rs);
    let c = noise.pooled_attacker_noise();
    let sb = noise.sigma_b2();
    let upper = terms.truncated_limit(rho, pa, sb, c);
    let kept = integrate_triangle(
        |y, z| terms.exponent(y + z, rho, pa, sb, c).exp(),
        upper,
        &sop_tolerance(tol),
    )?;
    Ok((1.0 - kept).clamp(0.0, 1.0))
}

/// Noise floor of Willie's statistic when Alice emits nothing.
fn detection_floor(scenario: ScenarioId, noise: &NoiseProfile) -> f64 {
    match scenario.relationship {
        Relationship::Independence => noise.sigma_w2(),
        Relationship::Friend => noise.pooled_attacker_noise(),
    }
}

/// Willie's COP-maximising threshold.
///
/// For the power-control schemes the COP decreases in the threshold above
/// the floor, so the threshold sits `upsilon` above it. With artificial noise
/// the stationary point is closed form; for `rho >= 1` there is no artificial
/// noise and the power-control threshold is used.
pub fn theta_star(scenario: ScenarioId, noise: &NoiseProfile, pa: f64, rho: f64) -> f64 {
    let floor = detection_floor(scenario, noise);
    let multiplier = match scenario.relationship {
        Relationship::Independence => 1.0,
        Relationship::Friend => 2.0,
    };
    match scenario.scheme {
        Scheme::ArtificialNoise if rho < 1.0 => floor + multiplier * (1.0 - rho) * pa * (-(-rho).ln_1p()) / rho,
        _ => floor + noise.upsilon(),
    }
}

pub fn detection_errors(scenario: ScenarioId, noise: &NoiseProfile, pa: f64, rho: f64, theta: f64) -> DetectionErrors {
    let floor = detection_floor(scenario, noise);
    if theta <= floor {
        return DetectionErrors { p_fa: 1.0, p_md: 0.0 };
    }
    let excess = theta - floor;
    let u = excess / pa;
    let p_md = match scenario.relationship {
        Relationship::Independence => -(-u).exp_m1(),
        Relationship::Friend => gamma2_cdf(u),
    };
    let p_fa = match scenario.scheme {
        Scheme::PowerControl => 0.0,
        Scheme::ArtificialNoise => {
            let v = excess / ((1.0 - rho) * pa);
            match scenario.relationship {
                Relationship::Independence => (-v).exp(),
                Relationship::Friend => gamma2_tail(v),
            }
        }
    };
    DetectionErrors { p_fa, p_md }
}

pub fn cop(scenario: ScenarioId, noise: &NoiseProfile, pa: f64, rho: f64, theta: f64) -> f64 {
    detection_errors(scenario, noise, pa, rho, theta).cop()
}

/// COP against Willie's optimal threshold, in reduced closed form.
///
/// Power control: `e^-t` (IP) or `(1 + t) e^-t` (FP) with `t = upsilon / pa`.
/// Artificial noise: a function of `rho` alone, `rho (1-rho)^((1-rho)/rho)`
/// (IA) and the gamma-2 analogue for FA.
pub fn cop_at_optimal_theta(scenario: ScenarioId, noise: &NoiseProfile, pa: f64, rho: f64) -> f64 {
    let pc = |friend: bool| {
        let t = noise.upsilon() / pa;
        if friend {
            gamma2_tail(t)
        } else {
            (-t).exp()
        }
    };
    match (scenario.scheme, scenario.relationship) {
        (Scheme::PowerControl, rel) => pc(rel == Relationship::Friend),
        (Scheme::ArtificialNoise, rel) if rho >= 1.0 => pc(rel == Relationship::Friend),
        (Scheme::ArtificialNoise, Relationship::Independence) => reduced_cop_ia(rho),
        (Scheme::ArtificialNoise, Relationship::Friend) => reduced_cop_fa(rho),
    }
}

pub(crate) fn reduced_cop_ia(rho: f64) -> f64 {
    rho * ((1.0 - rho) / rho * (-rho).ln_1p()).exp()
}

pub(crate) fn reduced_cop_fa(rho: f64) -> f64 {
    let l = -(-rho).ln_1p() / rho;
    let a = 2.0 * (1.0 - rho) * l;
    let b = 2.0 * l;
    gamma2_tail(a) - gamma2_tail(b)
}

pub fn tp(scenario: ScenarioId, noise: &NoiseProfile, cfg: &TransmitConfig) -> f64 {
    match scenario.scheme {
        Scheme::PowerControl => tp_pc(noise, cfg.pa(), cfg.rs()),
        Scheme::ArtificialNoise => tp_an(noise, cfg.pa(), cfg.rho(), cfg.rs()),
    }
}

pub fn sop(scenario: ScenarioId, noise: &NoiseProfile, cfg: &TransmitConfig, tol: &ToleranceSpec) -> Result<f64> {
    match (scenario.scheme, scenario.relationship) {
        (Scheme::PowerControl, Relationship::Independence) => Ok(sop_ip(noise, cfg.rs())),
        (Scheme::PowerControl, Relationship::Friend) => Ok(sop_fp(noise, cfg.rs())),
        (Scheme::ArtificialNoise, Relationship::Independence) => sop_ia(noise, cfg.pa(), cfg.rho(), cfg.rs(), tol),
        (Scheme::ArtificialNoise, Relationship::Friend) => sop_fa(noise, cfg.pa(), cfg.rho(), cfg.rs(), tol),
    }
}

/// TP, COP at Willie's optimal threshold, and SOP for one operating point.
pub fn metric_set(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    cfg: &TransmitConfig,
    tol: &ToleranceSpec,
) -> Result<MetricSet> {
    let theta = theta_star(scenario, noise, cfg.pa(), cfg.rho());
    Ok(MetricSet {
        tp: tp(scenario, noise, cfg),
        cop: cop(scenario, noise, cfg.pa(), cfg.rho(), theta),
        sop: sop(scenario, noise, cfg, tol)?,
    })
}
