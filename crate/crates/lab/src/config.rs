//! Flat `key = value` sweep configuration.
//!
//! ```text
//! # comment
//! name = demo
//! scenarios = ip, fp
//! eps_s = 0.1
//! axis.eps_c = 0.01:0.5:50:linear
//! series.upsilon = 0.01, 0.001
//! series.eps_s+eps_t = 0.03/0.5, 0.02/0.1
//! validation.samples = 100000
//! validation.seed = 7
//! ```
//!
//! Later lines override earlier ones, so command-line overrides can simply be
//! appended.

use std::collections::BTreeMap;

use covert_core::ScenarioId;

use crate::sweep::{Axis, McSettings, Param, Series, SweepSpec};
use crate::LabError;

fn err(line: usize, msg: impl std::fmt::Display) -> LabError {
    LabError::Config(format!("line {line}: {msg}"))
}

fn number(line: usize, key: &str, text: &str) -> Result<f64, LabError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| err(line, format!("`{key}`: `{}` is not a number", text.trim())))
}

/// Parses a config text into a sweep spec. Every parameter a scenario needs
/// must be given; nothing is defaulted.
pub fn parse_config(text: &str) -> Result<SweepSpec, LabError> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(err(line, "empty key"));
        }
        // an axis replaces any previous axis
        if key.starts_with("axis.") {
            entries.retain(|existing, _| !existing.starts_with("axis."));
        }
        if key.starts_with("series.") {
            entries.retain(|existing, _| !existing.starts_with("series."));
        }
        entries.insert(key.to_string(), (line, value.trim().to_string()));
    }

    let mut name = String::from("sweep");
    let mut scenarios = Vec::new();
    let mut fixed = BTreeMap::new();
    let mut axis = None;
    let mut series = None;
    let (mut samples, mut seed) = (None, None);

    for (key, (line, value)) in &entries {
        let line = *line;
        if key == "name" {
            name = value.clone();
        } else if key == "scenarios" || key == "scenario" {
            scenarios = value
                .split(',')
                .map(|s| s.parse::<ScenarioId>().map_err(|e| err(line, e)))
                .collect::<Result<_, _>>()?;
        } else if let Some(p) = key.strip_prefix("axis.") {
            let param: Param = p.parse().map_err(|e| err(line, e))?;
            axis = Some(Axis::parse(param, value).map_err(|e| err(line, e))?);
        } else if let Some(ps) = key.strip_prefix("series.") {
            let params: Vec<Param> = ps
                .split('+')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| err(line, e))?;
            let values = value
                .split(',')
                .map(|tuple| {
                    let vals: Vec<f64> = tuple
                        .split('/')
                        .map(|v| number(line, key, v))
                        .collect::<Result<_, _>>()?;
                    if vals.len() != params.len() {
                        return Err(err(
                            line,
                            format!("`{key}`: `{}` needs {} values", tuple.trim(), params.len()),
                        ));
                    }
                    Ok(vals)
                })
                .collect::<Result<_, _>>()?;
            series = Some(Series { params, values });
        } else if key == "validation.samples" {
            samples = Some(
                value
                    .parse::<u64>()
                    .map_err(|_| err(line, format!("`{key}`: `{value}` is not a count")))?,
            );
        } else if key == "validation.seed" {
            seed = Some(
                value
                    .parse::<u64>()
                    .map_err(|_| err(line, format!("`{key}`: `{value}` is not a seed")))?,
            );
        } else {
            let param: Param = key.parse().map_err(|e| err(line, e))?;
            fixed.insert(param, number(line, key, value)?);
        }
    }

    let axis = axis.ok_or_else(|| LabError::Config("missing `axis.<parameter>` entry".into()))?;
    let validation = match (samples, seed) {
        (Some(samples), seed) => Some(McSettings {
            samples,
            seed: seed.unwrap_or(0),
        }),
        (None, Some(_)) => {
            return Err(LabError::Config(
                "`validation.seed` given without `validation.samples`".into(),
            ))
        }
        (None, None) => None,
    };
    let spec = SweepSpec {
        name,
        scenarios,
        fixed,
        axis,
        series,
        validation,
        notes: Vec::new(),
    };
    Ok(spec)
}
