//! Parameter sweeps over the CSR solvers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use covert_core::link::db_to_linear;
use covert_core::montecarlo::{validate_scenario, Comparison};
use covert_core::solver::solve;
use covert_core::{CsrSolution, NoiseProfile, Regime, ScenarioId, SecurityConstraints, TransmitConfig};
use rayon::prelude::*;

use crate::LabError;

/// Sweepable inputs. Powers and noise levels are in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    EpsC,
    EpsS,
    EpsT,
    Upsilon,
    SigmaBDb,
    SigmaWDb,
    SigmaEDb,
    PaDb,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::EpsC,
        Param::EpsS,
        Param::EpsT,
        Param::Upsilon,
        Param::SigmaBDb,
        Param::SigmaWDb,
        Param::SigmaEDb,
        Param::PaDb,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Param::EpsC => "eps_c",
            Param::EpsS => "eps_s",
            Param::EpsT => "eps_t",
            Param::Upsilon => "upsilon",
            Param::SigmaBDb => "sigma_b_db",
            Param::SigmaWDb => "sigma_w_db",
            Param::SigmaEDb => "sigma_e_db",
            Param::PaDb => "pa_db",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Param {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.key() == s.trim())
            .ok_or_else(|| LabError::Config(format!("unknown parameter `{}`", s.trim())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let t = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Logarithmic => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Parses `start:stop:steps[:linear|log]`.
    pub fn parse(param: Param, text: &str) -> Result<Self, LabError> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(LabError::Config(format!(
                "axis `{param}` expects start:stop:steps[:spacing], got `{text}`"
            )));
        }
        let number = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| LabError::Config(format!("axis `{param}`: `{s}` is not a number")))
        };
        let steps = parts[2]
            .parse::<usize>()
            .map_err(|_| LabError::Config(format!("axis `{param}`: `{}` is not a step count", parts[2])))?;
        let spacing = match parts.get(3).copied().unwrap_or("linear") {
            "linear" | "lin" => Spacing::Linear,
            "log" | "logarithmic" => Spacing::Logarithmic,
            other => return Err(LabError::Config(format!("axis `{param}`: unknown spacing `{other}`"))),
        };
        Ok(Self {
            param,
            start: number(parts[0])?,
            stop: number(parts[1])?,
            steps,
            spacing,
        })
    }
}

/// A discrete second dimension; several parameters may move together, one
/// tuple per series member.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub params: Vec<Param>,
    pub values: Vec<Vec<f64>>,
}

impl Series {
    pub fn label(&self, index: usize) -> String {
        self.params
            .iter()
            .zip(&self.values[index])
            .map(|(p, v)| format!("{p}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
}

/// Provenance line carried into CSV comments.
#[derive(Debug, Clone, PartialEq)]
pub struct Note {
    pub text: String,
    pub assumed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub scenarios: Vec<ScenarioId>,
    pub fixed: BTreeMap<Param, f64>,
    pub axis: Axis,
    pub series: Option<Series>,
    pub validation: Option<McSettings>,
    pub notes: Vec<Note>,
}

/// Every input of one solve, in the units the user supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct PointParams(BTreeMap<Param, f64>);

impl PointParams {
    pub fn get(&self, p: Param) -> Option<f64> {
        self.0.get(&p).copied()
    }

    fn require(&self, p: Param) -> Result<f64, LabError> {
        self.get(p)
            .ok_or_else(|| LabError::Config(format!("missing parameter `{p}`")))
    }

    pub fn noise(&self) -> Result<NoiseProfile, LabError> {
        NoiseProfile::from_db(
            self.require(Param::SigmaBDb)?,
            self.require(Param::SigmaWDb)?,
            self.require(Param::SigmaEDb)?,
            self.require(Param::Upsilon)?,
        )
        .map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn constraints(&self) -> Result<SecurityConstraints, LabError> {
        SecurityConstraints::new(
            self.require(Param::EpsC)?,
            self.require(Param::EpsS)?,
            self.require(Param::EpsT)?,
        )
        .map_err(|e| LabError::Config(e.to_string()))
    }

    /// Linear AN transmit power, required only for artificial-noise scenarios.
    pub fn pa(&self, scenario: ScenarioId) -> Result<Option<f64>, LabError> {
        if scenario.uses_artificial_noise() {
            let db = self.require(Param::PaDb)?;
            if !db.is_finite() {
                return Err(LabError::Config(format!("pa_db must be finite, got {db}")));
            }
            Ok(Some(db_to_linear(db)))
        } else {
            Ok(self.get(Param::PaDb).map(db_to_linear))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: ScenarioId,
    pub series_label: String,
    pub axis_index: usize,
    pub axis_param: Param,
    pub axis_value: f64,
    pub params: PointParams,
    pub solution: CsrSolution,
    /// TP, SOP and COP comparisons at the optimum, when validation is on.
    pub validation: Option<Vec<Comparison>>,
}

struct Job {
    scenario: ScenarioId,
    series: Option<usize>,
    axis_index: usize,
    axis_value: f64,
    params: PointParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        self.jobs().map(|_| ())
    }

    fn jobs(&self) -> Result<Vec<Job>, LabError> {
        if self.scenarios.is_empty() {
            return Err(LabError::Config("no scenarios given".into()));
        }
        let axis = &self.axis;
        if axis.steps < 2 {
            return Err(LabError::Config(format!(
                "axis `{}` needs at least 2 steps, got {}",
                axis.param, axis.steps
            )));
        }
        if axis.start.is_nan() || axis.stop.is_nan() || axis.start >= axis.stop {
            return Err(LabError::Config(format!(
                "axis `{}` needs start < stop, got {} and {}",
                axis.param, axis.start, axis.stop
            )));
        }
        if axis.spacing == Spacing::Logarithmic && axis.start <= 0.0 {
            return Err(LabError::Config(format!(
                "logarithmic axis `{}` must start above 0",
                axis.param
            )));
        }
        if self.fixed.contains_key(&axis.param) {
            return Err(LabError::Config(format!("`{}` is both swept and fixed", axis.param)));
        }
        if let Some(series) = &self.series {
            for p in &series.params {
                if self.fixed.contains_key(p) || *p == axis.param {
                    return Err(LabError::Config(format!(
                        "series parameter `{p}` is also fixed or swept"
                    )));
                }
            }
            if series.values.is_empty() || series.values.iter().any(|v| v.len() != series.params.len()) {
                return Err(LabError::Config(
                    "series values must be non-empty tuples matching the series parameters".into(),
                ));
            }
        }

        let members: Vec<Option<usize>> = match &self.series {
            Some(s) => (0..s.values.len()).map(Some).collect(),
            None => vec![None],
        };
        let mut jobs = Vec::new();
        for &scenario in &self.scenarios {
            for &member in &members {
                for (axis_index, &axis_value) in axis.values().iter().enumerate() {
                    let mut map = self.fixed.clone();
                    map.insert(axis.param, axis_value);
                    if let (Some(series), Some(m)) = (&self.series, member) {
                        for (p, v) in series.params.iter().zip(&series.values[m]) {
                            map.insert(*p, *v);
                        }
                    }
                    let params = PointParams(map);
                    params.noise()?;
                    params.constraints()?;
                    params.pa(scenario)?;
                    jobs.push(Job {
                        scenario,
                        series: member,
                        axis_index,
                        axis_value,
                        params,
                    });
                }
            }
        }
        Ok(jobs)
    }
}

/// Worker count from `COVERT_LAB_THREADS`, else the machine's parallelism.
pub fn worker_count() -> usize {
    std::env::var("COVERT_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_job(job: &Job, spec: &SweepSpec) -> Result<ResultRow, LabError> {
    let noise = job.params.noise()?;
    let cons = job.params.constraints()?;
    let pa = job.params.pa(job.scenario)?;
    let solution = solve(job.scenario, &noise, pa, &cons).map_err(|source| LabError::Solve {
        scenario: job.scenario,
        point: job.axis_index,
        source,
    })?;
    let validation = match spec.validation {
        Some(mc) if solution.regime != Regime::Infeasible => {
            let cfg = if job.scenario.uses_artificial_noise() {
                TransmitConfig::new(pa.unwrap_or(f64::NAN), solution.power_opt, solution.rs_opt)
            } else {
                TransmitConfig::power_control(solution.power_opt, solution.rs_opt)
            }
            .map_err(|e| LabError::Config(e.to_string()))?;
            let report = validate_scenario(job.scenario, &noise, &cfg, mc.samples, mc.seed)?;
            Some(report.comparisons)
        }
        _ => None,
    };
    Ok(ResultRow {
        scenario: job.scenario,
        series_label: match (&spec.series, job.series) {
            (Some(s), Some(m)) => s.label(m),
            _ => String::new(),
        },
        axis_index: job.axis_index,
        axis_param: spec.axis.param,
        axis_value: job.axis_value,
        params: job.params.clone(),
        solution,
        validation,
    })
}

/// Solves every (scenario, series member, axis point) and returns the rows
/// in that nesting order, independent of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>, LabError> {
    let jobs = spec.jobs()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| LabError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(|job| run_job(job, spec)).collect())
}
