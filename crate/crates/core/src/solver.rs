//! Covert secrecy rate maximisation.
//!
//! Power control optimises `(P_a, R_s)`; artificial noise fixes `P_a` and
//! optimises `(rho, R_s)`. In both cases the covertness constraint alone
//! pins the power variable, after which the rate is the smallest of three
//! candidates: the unconstrained stationary point of `R_s * TP`, the largest
//! rate meeting the SOP bound and the largest rate meeting the TP bound.

use std::cell::RefCell;
use std::f64::consts::{E, LN_2};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::link::{NoiseProfile, ScenarioId, Scheme, SecurityConstraints, TransmitConfig};
use crate::metrics::{self, reduced_cop_fa, reduced_cop_ia, MetricsError};
use crate::numerics::{find_root_bracket, lambert_w0, lambert_wm1, maximize_1d, NumericsError, ToleranceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("artificial-noise scenario {0} needs a fixed transmit power")]
    MissingPower(ScenarioId),
    #[error("transmit power must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("grid needs at least {min} points per axis, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("{stage} failed: {source}")]
    Numerics {
        stage: &'static str,
        #[source]
        source: NumericsError,
    },
    #[error("{stage} failed: {source}")]
    Metrics {
        stage: &'static str,
        #[source]
        source: MetricsError,
    },
}

pub type Result<T> = std::result::Result<T, SolverError>;

fn numerics_err(stage: &'static str) -> impl FnOnce(NumericsError) -> SolverError {
    move |source| SolverError::Numerics { stage, source }
}

fn metrics_err(stage: &'static str) -> impl FnOnce(MetricsError) -> SolverError {
    move |source| SolverError::Metrics { stage, source }
}

/// Which candidate set the optimal rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Stationary,
    SecrecyBound,
    TransmissionBound,
    Infeasible,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::Stationary,
        Regime::SecrecyBound,
        Regime::TransmissionBound,
        Regime::Infeasible,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Stationary => "stationary",
            Regime::SecrecyBound => "secrecy_bound",
            Regime::TransmissionBound => "transmission_bound",
            Regime::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Rate candidates at the covertness-limited power.
///
/// `r_sop` is non-positive when even a vanishing rate leaks too often.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsCandidates {
    pub r_stationary: f64,
    pub r_sop: f64,
    pub r_tp: f64,
}

impl RsCandidates {
    pub fn is_feasible(&self) -> bool {
        self.r_sop.min(self.r_tp) > 0.0
    }

    /// Smallest candidate, ties within 1e-9 going to the earlier label in
    /// the order stationary, secrecy, transmission.
    pub fn select(&self) -> (f64, Regime) {
        let ordered = [
            (self.r_stationary, Regime::Stationary),
            (self.r_sop, Regime::SecrecyBound),
            (self.r_tp, Regime::TransmissionBound),
        ];
        let smallest = self.r_stationary.min(self.r_sop).min(self.r_tp);
        ordered
            .into_iter()
            .find(|(r, _)| *r <= smallest + 1e-9)
            .unwrap_or((smallest, Regime::Stationary))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsrSolution {
    pub csr: f64,
    pub rs_opt: f64,
    /// Optimal `P_a` for power control, optimal `rho` for artificial noise.
    pub power_opt: f64,
    pub regime: Regime,
    pub tp_at_opt: f64,
    pub cop_at_opt: f64,
    pub sop_at_opt: f64,
    /// Present for the closed-form and semi-numeric solvers.
    pub candidates: Option<RsCandidates>,
}

/// Root finding on the power variable must leave a COP residual below 1e-9.
const RHO_TOL: ToleranceSpec = ToleranceSpec::fixed(1e-13, 1e-15, 400);
const RATE_TOL: ToleranceSpec = ToleranceSpec::fixed(1e-12, 0.0, 400);
/// SOP accuracy used inside the solver so the binding constraint is met to ~1e-10.
pub const SOLVER_QUADRATURE: ToleranceSpec = ToleranceSpec::fixed(1e-11, 0.0, 4000);

const RHO_LO: f64 = 1e-9;
const RHO_HI: f64 = 1.0 - 1e-9;
const RATE_EDGE: f64 = 1e-9;

fn pc_power(scenario: ScenarioId, noise: &NoiseProfile, eps_c: f64) -> f64 {
    if scenario.is_friend() {
        let w = lambert_wm1(-eps_c / E).expect("-eps_c/e lies in the lower-branch domain for eps_c in (0,1)");
        -noise.upsilon() / (1.0 + w)
    } else {
        -noise.upsilon() / eps_c.ln()
    }
}

fn pc_rate_candidates(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    power: f64,
    cons: &SecurityConstraints,
) -> RsCandidates {
    let sb = noise.sigma_b2();
    let eps_s = cons.eps_s();
    let r_sop = if scenario.is_friend() {
        let c = noise.pooled_attacker_noise();
        let root = (1.0 - eps_s).sqrt();
        (c * (1.0 - root) / (sb * root)).log2()
    } else {
        (noise.sigma_e2() * eps_s / ((1.0 - eps_s) * sb)).log2()
    };
    let r_tp = (1.0 - power * (-cons.eps_t()).ln_1p() / sb).log2();
    let r_stationary = lambert_w0(power / sb).expect("positive argument") / LN_2;
    RsCandidates {
        r_stationary,
        r_sop,
        r_tp,
    }
}

fn solve_pc(scenario: ScenarioId, noise: &NoiseProfile, cons: &SecurityConstraints) -> CsrSolution {
    let power = pc_power(scenario, noise, cons.eps_c());
    let candidates = pc_rate_candidates(scenario, noise, power, cons);
    let (rs, regime) = if candidates.is_feasible() {
        candidates.select()
    } else {
        (0.0, Regime::Infeasible)
    };
    let tp = metrics::tp_pc(noise, power, rs);
    let sop = if scenario.is_friend() {
        metrics::sop_fp(noise, rs)
    } else {
        metrics::sop_ip(noise, rs)
    };
    CsrSolution {
        csr: if regime == Regime::Infeasible { 0.0 } else { rs * tp },
        rs_opt: rs,
        power_opt: power,
        regime,
        tp_at_opt: tp,
        cop_at_opt: metrics::cop_at_optimal_theta(scenario, noise, power, 1.0),
        sop_at_opt: sop,
        candidates: Some(candidates),
    }
}

/// Independence relationship, power control: closed form.
pub fn solve_ip(noise: &NoiseProfile, cons: &SecurityConstraints) -> CsrSolution {
    solve_pc(ScenarioId::IP, noise, cons)
}

/// Friend relationship, power control: closed form via the lower Lambert branch.
pub fn solve_fp(noise: &NoiseProfile, cons: &SecurityConstraints) -> CsrSolution {
    solve_pc(ScenarioId::FP, noise, cons)
}

/// Largest `rho` meeting the covertness bound, for an increasing reduced COP.
///
/// `None` when even the smallest searched `rho` is too detectable. When the
/// bound never binds on the search interval the upper end is returned.
fn covertness_limited_rho(reduced_cop: impl Fn(f64) -> f64, eps_c: f64) -> Result<Option<f64>> {
    let f = |rho: f64| reduced_cop(rho) - eps_c;
    if f(RHO_LO) > 0.0 {
        return Ok(None);
    }
    if f(RHO_HI) <= 0.0 {
        return Ok(Some(RHO_HI));
    }
    let bracket = find_root_bracket(f, RHO_LO, RHO_HI, &RHO_TOL).map_err(numerics_err("covertness root"))?;
    step_to_feasible(|rho| Ok(f(rho)), bracket.root, RHO_LO).map(Some)
}

/// Moves a root of an increasing `excess` down until `excess <= 0`, in
/// geometrically growing steps starting at a few ulps.
fn step_to_feasible(mut excess: impl FnMut(f64) -> Result<f64>, root: f64, floor: f64) -> Result<f64> {
    let mut step = 4.0 * f64::EPSILON * root.abs().max(f64::MIN_POSITIVE);
    let mut x = root;
    while excess(x)? > 0.0 {
        x = root - step;
        if x <= floor {
            return Ok(floor);
        }
        step *= 2.0;
    }
    Ok(x)
}

/// Covertness-limited `rho` for the given artificial-noise scenario.
pub fn optimal_rho(scenario: ScenarioId, cons: &SecurityConstraints) -> Result<Option<f64>> {
    if scenario.is_friend() {
        let sup_grid = ToleranceSpec::fixed(1e-10, 0.0, 400);
        let (_, sup) = maximize_1d(reduced_cop_fa, RHO_LO, RHO_HI, &sup_grid);
        if cons.eps_c() >= sup {
            return Ok(Some(RHO_HI));
        }
        covertness_limited_rho(reduced_cop_fa, cons.eps_c())
    } else {
        covertness_limited_rho(reduced_cop_ia, cons.eps_c())
    }
}

fn an_sop(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    pa: f64,
    rho: f64,
    rs: f64,
    tol: &ToleranceSpec,
) -> metrics::Result<f64> {
    if scenario.is_friend() {
        metrics::sop_fa(noise, pa, rho, rs, tol)
    } else {
        metrics::sop_ia(noise, pa, rho, rs, tol)
    }
}

/// `-ln TP` for the artificial-noise scheme below the capacity ceiling.
fn an_log_inv_tp(noise: &NoiseProfile, pa: f64, rho: f64, rs: f64) -> f64 {
    let q = metrics::two_pow_minus_one(rs);
    q * noise.sigma_b2() / (pa * (rho - q * (1.0 - rho)))
}

fn an_rate_candidates(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    pa: f64,
    rho: f64,
    cons: &SecurityConstraints,
) -> Result<RsCandidates> {
    let sb = noise.sigma_b2();
    let ceiling = metrics::rate_ceiling(rho);
    let lo = RATE_EDGE;
    let hi = ceiling - RATE_EDGE * ceiling.max(1.0);

    let l = (-cons.eps_t()).ln_1p();
    let r_tp = ((pa * l - sb) / ((1.0 - rho) * pa * l - sb)).log2();

    // Stationary point of ln(R) - (-ln TP(R)), by central differences.
    let log_objective = |r: f64| r.ln() - an_log_inv_tp(noise, pa, rho, r);
    let slope = |r: f64| {
        let h = (1e-6 * r.max(1.0)).min(0.5 * (ceiling - r)).min(0.5 * r);
        (log_objective(r + h) - log_objective(r - h)) / (2.0 * h)
    };
    let r_stationary = if slope(hi) >= 0.0 {
        hi
    } else {
        find_root_bracket(slope, lo, hi, &RATE_TOL)
            .map_err(numerics_err("stationary-rate root"))?
            .root
    };

    let eps_s = cons.eps_s();
    let tol = SOLVER_QUADRATURE;
    let sop_at = |r: f64| an_sop(scenario, noise, pa, rho, r, &tol);
    let r_sop = if sop_at(lo).map_err(metrics_err("secrecy bound"))? > eps_s {
        0.0
    } else if sop_at(hi).map_err(metrics_err("secrecy bound"))? < eps_s {
        hi
    } else {
        let failure = RefCell::new(None);
        let excess = |r: f64| match sop_at(r) {
            Ok(v) => v - eps_s,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let bracket = find_root_bracket(excess, lo, hi, &RATE_TOL);
        if let Some(e) = failure.into_inner() {
            return Err(metrics_err("secrecy-rate root")(e));
        }
        let bracket = bracket.map_err(numerics_err("secrecy-rate root"))?;
        step_to_feasible(
            |r| sop_at(r).map(|v| v - eps_s).map_err(metrics_err("secrecy bound")),
            bracket.root,
            lo,
        )?
    };
    Ok(RsCandidates {
        r_stationary,
        r_sop,
        r_tp,
    })
}

fn check_power(pa: f64) -> Result<()> {
    if pa > 0.0 && pa.is_finite() {
        Ok(())
    } else {
        Err(SolverError::InvalidPower(pa))
    }
}

fn infeasible(power_opt: f64, candidates: Option<RsCandidates>) -> CsrSolution {
    CsrSolution {
        csr: 0.0,
        rs_opt: 0.0,
        power_opt,
        regime: Regime::Infeasible,
        tp_at_opt: 1.0,
        cop_at_opt: f64::NAN,
        sop_at_opt: f64::NAN,
        candidates,
    }
}

fn solve_an(scenario: ScenarioId, noise: &NoiseProfile, pa: f64, cons: &SecurityConstraints) -> Result<CsrSolution> {
    check_power(pa)?;
    let Some(rho) = optimal_rho(scenario, cons)? else {
        return Ok(infeasible(RHO_LO, None));
    };
    let candidates = an_rate_candidates(scenario, noise, pa, rho, cons)?;
    let cop = metrics::cop_at_optimal_theta(scenario, noise, pa, rho);
    if !candidates.is_feasible() {
        let mut sol = infeasible(rho, Some(candidates));
        sol.cop_at_opt = cop;
        return Ok(sol);
    }
    let (rs, regime) = candidates.select();
    let tp = metrics::tp_an(noise, pa, rho, rs);
    let sop =
        an_sop(scenario, noise, pa, rho, rs, &SOLVER_QUADRATURE).map_err(metrics_err("secrecy outage at optimum"))?;
    Ok(CsrSolution {
        csr: rs * tp,
        rs_opt: rs,
        power_opt: rho,
        regime,
        tp_at_opt: tp,
        cop_at_opt: cop,
        sop_at_opt: sop,
        candidates: Some(candidates),
    })
}

/// Independence relationship, artificial noise, fixed total power `pa`.
pub fn solve_ia(noise: &NoiseProfile, pa: f64, cons: &SecurityConstraints) -> Result<CsrSolution> {
    solve_an(ScenarioId::IA, noise, pa, cons)
}

/// Friend relationship, artificial noise, fixed total power `pa`.
pub fn solve_fa(noise: &NoiseProfile, pa: f64, cons: &SecurityConstraints) -> Result<CsrSolution> {
    solve_an(ScenarioId::FA, noise, pa, cons)
}

/// Dispatch on scenario; `pa` is required for the artificial-noise schemes
/// and ignored for power control.
pub fn solve(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    pa: Option<f64>,
    cons: &SecurityConstraints,
) -> Result<CsrSolution> {
    match scenario.scheme {
        Scheme::PowerControl => Ok(solve_pc(scenario, noise, cons)),
        Scheme::ArtificialNoise => {
            let pa = pa.ok_or(SolverError::MissingPower(scenario))?;
            solve_an(scenario, noise, pa, cons)
        }
    }
}

/// Decision grid of the brute-force reference optimiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    power_points: usize,
    rate_points: usize,
    refinements: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 200;
    const ZOOM_POINTS: usize = 21;
    /// Half-width of the first refinement window, in coarse grid cells.
    const ZOOM_REACH: f64 = 3.0;

    pub fn new(power_points: usize, rate_points: usize, refinements: usize) -> Result<Self> {
        for got in [power_points, rate_points] {
            if got < Self::MIN_POINTS {
                return Err(SolverError::GridTooSmall {
                    min: Self::MIN_POINTS,
                    got,
                });
            }
        }
        Ok(Self {
            power_points,
            rate_points,
            refinements,
        })
    }

    pub fn power_points(&self) -> usize {
        self.power_points
    }

    pub fn rate_points(&self) -> usize {
        self.rate_points
    }

    pub fn refinements(&self) -> usize {
        self.refinements
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            power_points: 200,
            rate_points: 200,
            refinements: 36,
        }
    }
}

/// Search coordinates: `u` is `log10 P_a` (power control) or `rho`
/// (artificial noise); `v` is `log10 R_s`.
struct Problem<'a> {
    scenario: ScenarioId,
    noise: &'a NoiseProfile,
    pa: f64,
    cons: &'a SecurityConstraints,
    u_range: (f64, f64),
    v_range: (f64, f64),
}

#[derive(Debug, Clone, Copy)]
struct Point {
    u: f64,
    v: f64,
    objective: f64,
}

impl Problem<'_> {
    fn power_and_rho(&self, u: f64) -> (f64, f64) {
        match self.scenario.scheme {
            Scheme::PowerControl => (10f64.powf(u), 1.0),
            Scheme::ArtificialNoise => (self.pa, u),
        }
    }

    /// A rate no optimum can exceed at power coordinate `u`: the stationary
    /// rate is below `log2(1 + P/sigma_b2)`, and AN rates stay below the ceiling.
    fn max_rate(&self, u: f64) -> f64 {
        match self.scenario.scheme {
            Scheme::PowerControl => (1.0 + 10.0 * 10f64.powf(u) / self.noise.sigma_b2()).log2(),
            Scheme::ArtificialNoise => metrics::rate_ceiling(u),
        }
    }

    fn config(&self, u: f64, v: f64) -> TransmitConfig {
        let (power, rho) = self.power_and_rho(u);
        TransmitConfig::new(power, rho, 10f64.powf(v)).expect("grid points stay inside the parameter domain")
    }

    fn sop_ok(&self, cfg: &TransmitConfig) -> Result<bool> {
        let sop = metrics::sop(self.scenario, self.noise, cfg, &SOLVER_QUADRATURE)
            .map_err(metrics_err("reference secrecy outage"))?;
        Ok(sop <= self.cons.eps_s())
    }

    /// Best feasible point of one row of rates, or `None`.
    ///
    /// COP depends on `u` only and TP decreases in the rate, so both are
    /// checked exhaustively. SOP increases in the rate, so its feasible set
    /// is a prefix of the row, located by bisection.
    fn best_in_row(&self, u: f64, vs: &[f64]) -> Result<Option<Point>> {
        let (power, rho) = self.power_and_rho(u);
        let theta = metrics::theta_star(self.scenario, self.noise, power, rho);
        if metrics::cop(self.scenario, self.noise, power, rho, theta) > self.cons.eps_c() {
            return Ok(None);
        }
        let configs: Vec<TransmitConfig> = vs.iter().map(|&v| self.config(u, v)).collect();
        let tp_floor = 1.0 - self.cons.eps_t();
        let tp_ok = configs
            .iter()
            .take_while(|cfg| metrics::tp(self.scenario, self.noise, cfg) >= tp_floor)
            .count();
        if tp_ok == 0 || !self.sop_ok(&configs[0])? {
            return Ok(None);
        }
        // Invariant: configs[lo] meets the SOP bound, configs[hi] does not.
        let mut lo = 0;
        if self.sop_ok(&configs[tp_ok - 1])? {
            lo = tp_ok - 1;
        } else {
            let mut hi = tp_ok - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.sop_ok(&configs[mid])? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let mut best: Option<Point> = None;
        for (k, cfg) in configs.iter().enumerate().take(lo + 1) {
            let objective = cfg.rs() * metrics::tp(self.scenario, self.noise, cfg);
            if best.is_none_or(|b| objective > b.objective) {
                best = Some(Point { u, v: vs[k], objective });
            }
        }
        Ok(best)
    }

    fn best_on_grid(&self, us: &[f64], vs: &[f64]) -> Result<Option<Point>> {
        let rows: Vec<Option<Point>> = us.par_iter().map(|&u| self.best_in_row(u, vs)).collect::<Result<_>>()?;
        // First strictly greater wins, so ties resolve to the lowest index.
        Ok(rows
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<Point>, p| match acc {
                Some(a) if a.objective >= p.objective => Some(a),
                _ => Some(p),
            }))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Brute-force optimiser used as an independent check of the closed forms.
///
/// Evaluates `R_s * TP` on a `(power, rate)` grid, discards points that
/// violate any constraint, then repeatedly re-grids the neighbourhood of the
/// running best. The power axis is log-spaced over `upsilon * [1e-3, 1e3]`
/// for power control and linear in `rho` over `(0, 1)` for artificial noise;
/// the rate axis is log-spaced over six decades below the largest rate any
/// grid row could support.
pub fn solve_reference(
    scenario: ScenarioId,
    noise: &NoiseProfile,
    pa: Option<f64>,
    cons: &SecurityConstraints,
    grid: &GridSpec,
) -> Result<CsrSolution> {
    let (pa, u_range) = match scenario.scheme {
        Scheme::PowerControl => {
            let centre = noise.upsilon().log10();
            (f64::NAN, (centre - 3.0, centre + 3.0))
        }
        Scheme::ArtificialNoise => {
            let pa = pa.ok_or(SolverError::MissingPower(scenario))?;
            check_power(pa)?;
            let step = 1.0 / grid.power_points as f64;
            (pa, (step, 1.0 - 1e-6))
        }
    };
    let mut problem = Problem {
        scenario,
        noise,
        pa,
        cons,
        u_range,
        v_range: (0.0, 0.0),
    };
    let top = problem.max_rate(u_range.1).log10();
    problem.v_range = (top - 6.0, top);

    let us = linspace(u_range.0, u_range.1, grid.power_points);
    let vs = linspace(problem.v_range.0, problem.v_range.1, grid.rate_points);
    let Some(mut best) = problem.best_on_grid(&us, &vs)? else {
        return Ok(infeasible(f64::NAN, None));
    };
    // Each pass re-grids a window around the running best, then halves it.
    let mut du = GridSpec::ZOOM_REACH * (u_range.1 - u_range.0) / (grid.power_points - 1) as f64;
    let mut dv = GridSpec::ZOOM_REACH * (problem.v_range.1 - problem.v_range.0) / (grid.rate_points - 1) as f64;
    for _ in 0..grid.refinements {
        let us = linspace(
            (best.u - du).max(problem.u_range.0),
            (best.u + du).min(problem.u_range.1),
            GridSpec::ZOOM_POINTS,
        );
        let vs = linspace(
            (best.v - dv).max(problem.v_range.0),
            (best.v + dv).min(problem.v_range.1),
            GridSpec::ZOOM_POINTS,
        );
        if let Some(p) = problem.best_on_grid(&us, &vs)? {
            if p.objective > best.objective {
                best = p;
            }
        }
        du *= 0.5;
        dv *= 0.5;
    }

    let cfg = problem.config(best.u, best.v);
    let tp = metrics::tp(scenario, noise, &cfg);
    let sop =
        metrics::sop(scenario, noise, &cfg, &SOLVER_QUADRATURE).map_err(metrics_err("reference secrecy outage"))?;
    let theta = metrics::theta_star(scenario, noise, cfg.pa(), cfg.rho());
    let regime = if (sop - cons.eps_s()).abs() <= 1e-4 * cons.eps_s() {
        Regime::SecrecyBound
    } else if (tp - (1.0 - cons.eps_t())).abs() <= 1e-4 * cons.eps_t() {
        Regime::TransmissionBound
    } else {
        Regime::Stationary
    };
    Ok(CsrSolution {
        csr: best.objective,
        rs_opt: cfg.rs(),
        power_opt: match scenario.scheme {
            Scheme::PowerControl => cfg.pa(),
            Scheme::ArtificialNoise => cfg.rho(),
        },
        regime,
        tp_at_opt: tp,
        cop_at_opt: metrics::cop(scenario, noise, cfg.pa(), cfg.rho(), theta),
        sop_at_opt: sop,
        candidates: None,
    })
}
