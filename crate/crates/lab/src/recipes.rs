//! Built-in sweeps reproducing the published CSR figures.
//!
//! Settings the text states are recorded as plain notes; anything it leaves
//! open (axis ranges, unlisted curve settings) is flagged `assumed`.

use std::collections::BTreeMap;

use covert_core::ScenarioId;

use crate::sweep::{Axis, Note, Param, Series, Spacing, SweepSpec};
use crate::LabError;

pub const RECIPE_IDS: [&str; 20] = [
    "fig2_ip",
    "fig2_fp",
    "fig3_ia",
    "fig3_fa",
    "fig4_ip",
    "fig4_fp",
    "fig5_ia",
    "fig5_fa",
    "fig6_ip",
    "fig6_fp",
    "fig7_ia",
    "fig7_fa",
    "fig8_pc",
    "fig8_an",
    "fig9_ind",
    "fig9_fri",
    "fig10_ind",
    "fig10_fri",
    "fig11_ind",
    "fig11_fri",
];

/// Shared link setting: `upsilon = 0.01`, Bob at -20 dB, Willie and Eve at 0 dB.
pub fn base_fixed() -> BTreeMap<Param, f64> {
    BTreeMap::from([
        (Param::Upsilon, 0.01),
        (Param::SigmaBDb, -20.0),
        (Param::SigmaWDb, 0.0),
        (Param::SigmaEDb, 0.0),
    ])
}

fn stated(text: impl Into<String>) -> Note {
    Note {
        text: text.into(),
        assumed: false,
    }
}

fn assumed(text: impl Into<String>) -> Note {
    Note {
        text: text.into(),
        assumed: true,
    }
}

fn axis(param: Param, start: f64, stop: f64, steps: usize, spacing: Spacing) -> Axis {
    Axis {
        param,
        start,
        stop,
        steps,
        spacing,
    }
}

fn eps_c_axis() -> Axis {
    axis(Param::EpsC, 0.01, 0.5, 50, Spacing::Linear)
}

fn eps_t_axis() -> Axis {
    axis(Param::EpsT, 0.01, 0.5, 50, Spacing::Linear)
}

fn pairs(a: Param, b: Param, values: &[[f64; 2]]) -> Series {
    Series {
        params: vec![a, b],
        values: values.iter().map(|v| v.to_vec()).collect(),
    }
}

fn scenario_pair(suffix: &str, pc: bool) -> Option<Vec<ScenarioId>> {
    let s = match (suffix, pc) {
        ("ip", true) => ScenarioId::IP,
        ("fp", true) => ScenarioId::FP,
        ("ia", false) => ScenarioId::IA,
        ("fa", false) => ScenarioId::FA,
        _ => return None,
    };
    Some(vec![s])
}

/// Looks up a recipe by id, e.g. `fig8_pc`.
pub fn figure_recipe(id: &str) -> Result<SweepSpec, LabError> {
    let unknown = || LabError::UnknownRecipe(id.to_string());
    let (fig, suffix) = id.split_once('_').ok_or_else(unknown)?;
    let mut fixed = base_fixed();
    let mut notes = vec![stated(
        "upsilon 0.01, sigma_b -20 dB, sigma_w = sigma_e = 0 dB unless overridden",
    )];

    let (scenarios, axis, series) = match fig {
        "fig2" | "fig3" => {
            let pc = fig == "fig2";
            let scenarios = scenario_pair(suffix, pc).ok_or_else(unknown)?;
            if !pc {
                fixed.insert(Param::PaDb, -20.0);
                notes.push(stated("pa -20 dB"));
            }
            notes.push(stated("curve eps_s 0.03, eps_t 0.5"));
            notes.push(stated("curve eps_s 0.02, eps_t 0.1"));
            notes.push(assumed("third curve eps_s 0.1, eps_t 0.3"));
            if !pc {
                notes.push(assumed("curve settings reused from the power-control figure"));
            }
            notes.push(assumed("eps_c axis 0.01..0.5, 50 linear points"));
            let series = pairs(Param::EpsS, Param::EpsT, &[[0.03, 0.5], [0.02, 0.1], [0.1, 0.3]]);
            (scenarios, eps_c_axis(), Some(series))
        }
        "fig4" | "fig5" => {
            let pc = fig == "fig4";
            let scenarios = scenario_pair(suffix, pc).ok_or_else(unknown)?;
            if pc {
                fixed.insert(Param::SigmaBDb, -30.0);
                notes.push(stated("sigma_b -30 dB"));
            } else {
                fixed.insert(Param::SigmaBDb, -31.0);
                fixed.insert(Param::PaDb, -20.0);
                notes.push(stated("sigma_b -31 dB, pa -20 dB"));
            }
            notes.push(stated("curve eps_c 0.01, eps_t 0.01"));
            notes.push(assumed("curves eps_c 0.1, eps_t 0.1 and eps_c 0.3, eps_t 0.3"));
            notes.push(assumed("eps_s axis 0.0005..0.05, 60 logarithmic points"));
            let series = pairs(Param::EpsC, Param::EpsT, &[[0.01, 0.01], [0.1, 0.1], [0.3, 0.3]]);
            (
                scenarios,
                axis(Param::EpsS, 0.0005, 0.05, 60, Spacing::Logarithmic),
                Some(series),
            )
        }
        "fig6" | "fig7" => {
            let pc = fig == "fig6";
            let scenarios = scenario_pair(suffix, pc).ok_or_else(unknown)?;
            if !pc {
                fixed.insert(Param::PaDb, -20.0);
                notes.push(stated("pa -20 dB"));
            }
            notes.push(assumed("curves (eps_c, eps_s) = (0.3, 0.02), (0.05, 0.05), (0.1, 0.3)"));
            notes.push(assumed("eps_t axis 0.01..0.5, 50 linear points"));
            let series = pairs(Param::EpsC, Param::EpsS, &[[0.3, 0.02], [0.05, 0.05], [0.1, 0.3]]);
            (scenarios, eps_t_axis(), Some(series))
        }
        "fig8" => {
            fixed.insert(Param::EpsS, 0.1);
            fixed.insert(Param::EpsT, 0.1);
            notes.push(stated("eps_s = eps_t = 0.1"));
            notes.push(assumed("eps_c axis 0.01..0.5, 50 linear points"));
            let (scenarios, series) = match suffix {
                "pc" => {
                    fixed.remove(&Param::Upsilon);
                    notes.push(stated("curves upsilon 0.01 and 0.001"));
                    (
                        vec![ScenarioId::IP, ScenarioId::FP],
                        Series {
                            params: vec![Param::Upsilon],
                            values: vec![vec![0.01], vec![0.001]],
                        },
                    )
                }
                "an" => {
                    notes.push(stated("curves pa -5 dB and -20 dB"));
                    (
                        vec![ScenarioId::IA, ScenarioId::FA],
                        Series {
                            params: vec![Param::PaDb],
                            values: vec![vec![-5.0], vec![-20.0]],
                        },
                    )
                }
                _ => return Err(unknown()),
            };
            (scenarios, eps_c_axis(), Some(series))
        }
        "fig9" | "fig10" | "fig11" => {
            let scenarios = match suffix {
                "ind" => vec![ScenarioId::IP, ScenarioId::IA],
                "fri" => vec![ScenarioId::FP, ScenarioId::FA],
                _ => return Err(unknown()),
            };
            let (held, axis) = match fig {
                "fig9" => ([Param::EpsS, Param::EpsT], eps_c_axis()),
                "fig10" => (
                    [Param::EpsC, Param::EpsT],
                    axis(Param::EpsS, 0.01, 0.5, 50, Spacing::Linear),
                ),
                _ => ([Param::EpsC, Param::EpsS], eps_t_axis()),
            };
            for p in held {
                fixed.insert(p, 0.1);
            }
            notes.push(stated(format!("{} = {} = 0.1", held[0], held[1])));
            notes.push(stated("artificial-noise curves at pa -20 dB and -15 dB"));
            notes.push(assumed(format!(
                "{} axis {}..{}, {} linear points",
                axis.param, axis.start, axis.stop, axis.steps
            )));
            notes.push(assumed("power-control rows repeat for each pa value"));
            let series = Series {
                params: vec![Param::PaDb],
                values: vec![vec![-20.0], vec![-15.0]],
            };
            (scenarios, axis, Some(series))
        }
        _ => return Err(unknown()),
    };

    let spec = SweepSpec {
        name: id.to_string(),
        scenarios,
        fixed,
        axis,
        series,
        validation: None,
        notes,
    };
    spec.validate()?;
    Ok(spec)
}
