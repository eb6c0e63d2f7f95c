//! CSV output with `#` provenance comments.

use std::fmt::Write as _;
use std::path::Path;

use covert_core::link::db_to_linear;
use covert_core::montecarlo::Metric;
use covert_core::Regime;

use crate::sweep::{Param, ResultRow, SweepSpec};
use crate::LabError;

/// Slack allowed when re-checking constraints on emitted rows.
const CONSTRAINT_SLACK: f64 = 1e-9;

pub const BASE_COLUMNS: [&str; 22] = [
    "scenario",
    "series",
    "axis_index",
    "eps_c",
    "eps_s",
    "eps_t",
    "upsilon",
    "sigma_b_db",
    "sigma_b2",
    "sigma_w_db",
    "sigma_w2",
    "sigma_e_db",
    "sigma_e2",
    "pa_db",
    "pa",
    "csr",
    "rs_opt",
    "power_opt",
    "regime",
    "tp_opt",
    "cop_opt",
    "sop_opt",
];

const MC_METRICS: [Metric; 3] = [Metric::Tp, Metric::Sop, Metric::Cop];

/// Twelve significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.11e}")
    }
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn check_constraints(index: usize, row: &ResultRow) -> Result<(), LabError> {
    let sol = &row.solution;
    if sol.regime == Regime::Infeasible {
        return Ok(());
    }
    let bound = |p: Param| row.params.get(p).unwrap_or(f64::NAN);
    let violations = [
        (
            sol.cop_at_opt <= bound(Param::EpsC) + CONSTRAINT_SLACK,
            "cop",
            sol.cop_at_opt,
            bound(Param::EpsC),
        ),
        (
            sol.sop_at_opt <= bound(Param::EpsS) + CONSTRAINT_SLACK,
            "sop",
            sol.sop_at_opt,
            bound(Param::EpsS),
        ),
        (
            sol.tp_at_opt >= 1.0 - bound(Param::EpsT) - CONSTRAINT_SLACK,
            "tp",
            sol.tp_at_opt,
            1.0 - bound(Param::EpsT),
        ),
    ];
    match violations.into_iter().find(|(ok, ..)| !ok) {
        Some((_, name, value, limit)) => Err(LabError::ConstraintViolation {
            row: index,
            detail: format!("{} {name} = {value} against bound {limit}", row.scenario),
        }),
        None => Ok(()),
    }
}

/// Renders rows as CSV text: provenance comments, header, one line per row.
pub fn render_csv(spec: &SweepSpec, rows: &[ResultRow]) -> Result<String, LabError> {
    if rows.is_empty() {
        return Err(LabError::EmptyRows);
    }
    let with_mc = rows.iter().any(|r| r.validation.is_some());
    let mut out = String::new();
    let axis = &spec.axis;
    let _ = writeln!(out, "# sweep: {}", spec.name);
    let _ = writeln!(
        out,
        "# axis: {} from {} to {}, {} points, {:?}",
        axis.param, axis.start, axis.stop, axis.steps, axis.spacing
    );
    for note in &spec.notes {
        let kind = if note.assumed { "assumed" } else { "stated" };
        let _ = writeln!(out, "# {kind}: {}", note.text);
    }
    if let Some(mc) = spec.validation {
        let _ = writeln!(out, "# validation: {} samples, seed {}", mc.samples, mc.seed);
    }

    let mut header: Vec<String> = BASE_COLUMNS.iter().map(|c| c.to_string()).collect();
    if with_mc {
        for m in MC_METRICS {
            for field in ["mean", "half_width", "pass"] {
                header.push(format!("mc_{}_{field}", m.label()));
            }
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');

    for (index, row) in rows.iter().enumerate() {
        check_constraints(index, row)?;
        let p = |param: Param| row.params.get(param);
        let db_pair = |param: Param| [opt_number(p(param)), opt_number(p(param).map(db_to_linear))];
        let sol = &row.solution;
        let mut fields = vec![
            row.scenario.to_string(),
            row.series_label.clone(),
            row.axis_index.to_string(),
            opt_number(p(Param::EpsC)),
            opt_number(p(Param::EpsS)),
            opt_number(p(Param::EpsT)),
            opt_number(p(Param::Upsilon)),
        ];
        fields.extend(db_pair(Param::SigmaBDb));
        fields.extend(db_pair(Param::SigmaWDb));
        fields.extend(db_pair(Param::SigmaEDb));
        fields.extend(db_pair(Param::PaDb));
        fields.extend([
            format_number(sol.csr),
            format_number(sol.rs_opt),
            format_number(sol.power_opt),
            sol.regime.label().to_string(),
            format_number(sol.tp_at_opt),
            format_number(sol.cop_at_opt),
            format_number(sol.sop_at_opt),
        ]);
        if with_mc {
            for m in MC_METRICS {
                let found = row.validation.as_ref().and_then(|cs| cs.iter().find(|c| c.metric == m));
                match found {
                    Some(c) => fields.extend([
                        format_number(c.estimate.mean),
                        format_number(c.estimate.half_width),
                        c.pass.to_string(),
                    ]),
                    None => fields.extend([String::new(), String::new(), String::new()]),
                }
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(spec: &SweepSpec, rows: &[ResultRow], path: &Path) -> Result<(), LabError> {
    let text = render_csv(spec, rows)?;
    std::fs::write(path, text).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recipes::figure_recipe;
    use crate::sweep::{run_sweep, Axis, Spacing};

    fn small_spec() -> SweepSpec {
        let mut spec = figure_recipe("fig8_pc").unwrap();
        spec.axis = Axis {
            param: Param::EpsC,
            start: 0.01,
            stop: 0.5,
            steps: 2,
            spacing: Spacing::Linear,
        };
        spec.series = None;
        spec.fixed.insert(Param::Upsilon, 0.01);
        spec.scenarios.truncate(1);
        spec
    }

    #[test]
    fn number_format_has_twelve_significant_digits() {
        assert_eq!(format_number(0.1), "1.00000000000e-1");
        assert_eq!(format_number(-1234.5), "-1.23450000000e3");
        assert_eq!(format_number(f64::NAN), "NaN");
        let x = std::f64::consts::PI * 1e-7;
        let back: f64 = format_number(x).parse().unwrap();
        assert!((back / x - 1.0).abs() < 1e-11);
    }

    #[test]
    fn two_rows_give_header_plus_two_lines() {
        let spec = small_spec();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        let text = render_csv(&spec, &rows).unwrap();
        assert!(text.ends_with('\n'));
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert_eq!(data[0], BASE_COLUMNS.join(","));
        assert!(text.contains("# assumed: "));
    }

    #[test]
    fn empty_rows_are_rejected() {
        assert!(matches!(render_csv(&small_spec(), &[]), Err(LabError::EmptyRows)));
    }

    #[test]
    fn constraint_violation_is_caught_at_emission() {
        let spec = small_spec();
        let mut rows = run_sweep(&spec).unwrap();
        let row = rows
            .iter_mut()
            .find(|r| r.solution.regime != Regime::Infeasible)
            .unwrap();
        row.solution.sop_at_opt = 0.5;
        assert!(matches!(
            render_csv(&spec, &rows),
            Err(LabError::ConstraintViolation { .. })
        ));
    }
}
