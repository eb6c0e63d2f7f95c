use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use covert_core::link::db_to_linear;
use covert_core::metrics::{detection_errors, metric_set, theta_star};
use covert_core::montecarlo::validate_scenario;
use covert_core::solver::solve;
use covert_core::{NoiseProfile, ScenarioId, SecurityConstraints, ToleranceSpec, TransmitConfig};

use crate::config::parse_config;
use crate::csv::{emit_csv, format_number, render_csv};
use crate::recipes::{figure_recipe, RECIPE_IDS};
use crate::svg::{emit_svg, PlotSpec};
use crate::sweep::{run_sweep, McSettings, ResultRow, SweepSpec};
use crate::{LabError, EXIT_CONFIG, EXIT_VALIDATION};

#[derive(Debug, Parser)]
#[command(
    name = "covert-lab",
    version,
    about = "Covertness and secrecy experiments under Rayleigh fading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// TP, SOP and COP at one operating point.
    Metrics(MetricsArgs),
    /// Solve for the covert secrecy rate at one constraint setting.
    Csr(CsrArgs),
    /// Run a sweep from a config file and/or `--set key=value` lines.
    Sweep(SweepArgs),
    /// Run a built-in figure recipe.
    Figure(FigureArgs),
    /// Check analytic TP, SOP and COP against Monte Carlo.
    Validate(ValidateArgs),
}

/// Noise levels in dB, `upsilon` linear.
#[derive(Debug, Args)]
struct LinkArgs {
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    sigma_b_db: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sigma_w_db: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sigma_e_db: f64,
    #[arg(long, default_value_t = 0.01)]
    upsilon: f64,
}

impl LinkArgs {
    fn noise(&self) -> Result<NoiseProfile, LabError> {
        NoiseProfile::from_db(self.sigma_b_db, self.sigma_w_db, self.sigma_e_db, self.upsilon)
            .map_err(|e| LabError::Config(e.to_string()))
    }
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    scenario: ScenarioId,
    #[command(flatten)]
    link: LinkArgs,
    /// Transmit power in dB.
    #[arg(long, allow_negative_numbers = true)]
    pa_db: f64,
    /// Message power fraction; 1 for power control, required for artificial noise.
    #[arg(long)]
    rho: Option<f64>,
    /// Target secrecy rate, bits per channel use.
    #[arg(long)]
    rs: f64,
    /// Willie's power threshold (linear); defaults to his optimal one.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Debug, Args)]
struct CsrArgs {
    #[arg(long)]
    scenario: ScenarioId,
    #[command(flatten)]
    link: LinkArgs,
    #[arg(long)]
    eps_c: f64,
    #[arg(long)]
    eps_s: f64,
    #[arg(long)]
    eps_t: f64,
    /// Transmit power in dB, required for artificial-noise scenarios.
    #[arg(long, allow_negative_numbers = true)]
    pa_db: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` config lines, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    sets: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// Recipe id, or `list`.
    id: String,
    #[command(flatten)]
    output: OutputArgs,
    /// Monte Carlo check at every feasible optimum with this many samples.
    #[arg(long)]
    validate_samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: ScenarioId,
    #[command(flatten)]
    link: LinkArgs,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    pa_db: f64,
    /// Defaults to 0.75 for artificial noise; ignored for power control.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    rs: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Shift every analytic value by this amount before judging.
    #[arg(long, allow_negative_numbers = true)]
    perturb: Option<f64>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stdout_err(source: std::io::Error) -> LabError {
    LabError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn transmit_config(scenario: ScenarioId, pa: f64, rho: Option<f64>, rs: f64) -> Result<TransmitConfig, LabError> {
    let rho = if scenario.uses_artificial_noise() {
        rho.ok_or_else(|| LabError::Config(format!("--rho is required for {scenario}")))?
    } else {
        1.0
    };
    TransmitConfig::new(pa, rho, rs).map_err(|e| LabError::Config(e.to_string()))
}

fn print_pairs(out: &mut dyn Write, pairs: &[(&str, String)]) -> Result<(), LabError> {
    for (k, v) in pairs {
        writeln!(out, "{k} = {v}").map_err(stdout_err)?;
    }
    Ok(())
}

fn cmd_metrics(a: &MetricsArgs, out: &mut dyn Write) -> Result<i32, LabError> {
    let noise = a.link.noise()?;
    let cfg = transmit_config(a.scenario, db_to_linear(a.pa_db), a.rho, a.rs)?;
    let set = metric_set(a.scenario, &noise, &cfg, &ToleranceSpec::QUADRATURE)?;
    let theta = a
        .theta
        .unwrap_or_else(|| theta_star(a.scenario, &noise, cfg.pa(), cfg.rho()));
    let errors = detection_errors(a.scenario, &noise, cfg.pa(), cfg.rho(), theta);
    print_pairs(
        out,
        &[
            ("scenario", a.scenario.to_string()),
            ("tp", format_number(set.tp)),
            ("sop", format_number(set.sop)),
            ("theta", format_number(theta)),
            ("p_fa", format_number(errors.p_fa)),
            ("p_md", format_number(errors.p_md)),
            ("cop", format_number(errors.cop())),
        ],
    )?;
    Ok(0)
}

fn cmd_csr(a: &CsrArgs, out: &mut dyn Write) -> Result<i32, LabError> {
    let noise = a.link.noise()?;
    let cons = SecurityConstraints::new(a.eps_c, a.eps_s, a.eps_t).map_err(|e| LabError::Config(e.to_string()))?;
    if a.scenario.uses_artificial_noise() && a.pa_db.is_none() {
        return Err(LabError::Config(format!("--pa-db is required for {}", a.scenario)));
    }
    let pa = if a.scenario.uses_artificial_noise() {
        a.pa_db.map(db_to_linear)
    } else {
        None
    };
    let sol = solve(a.scenario, &noise, pa, &cons).map_err(|source| LabError::Solve {
        scenario: a.scenario,
        point: 0,
        source,
    })?;
    let mut pairs = vec![
        ("scenario", a.scenario.to_string()),
        ("csr", format_number(sol.csr)),
        ("rs_opt", format_number(sol.rs_opt)),
        ("power_opt", format_number(sol.power_opt)),
        ("regime", sol.regime.to_string()),
        ("tp_opt", format_number(sol.tp_at_opt)),
        ("cop_opt", format_number(sol.cop_at_opt)),
        ("sop_opt", format_number(sol.sop_at_opt)),
    ];
    if let Some(c) = sol.candidates {
        pairs.push(("r_stationary", format_number(c.r_stationary)));
        pairs.push(("r_sop", format_number(c.r_sop)));
        pairs.push(("r_tp", format_number(c.r_tp)));
    }
    print_pairs(out, &pairs)?;
    Ok(0)
}

/// Writes CSV (file or stdout) and optional SVG, then reports any failed
/// Monte Carlo comparisons through the exit status.
fn finish_sweep(
    spec: &SweepSpec,
    rows: &[ResultRow],
    output: &OutputArgs,
    out: &mut dyn Write,
) -> Result<i32, LabError> {
    match &output.out {
        Some(path) => emit_csv(spec, rows, path)?,
        None => out.write_all(render_csv(spec, rows)?.as_bytes()).map_err(stdout_err)?,
    }
    if let Some(path) = &output.svg {
        emit_svg(rows, &PlotSpec::for_rows(&spec.name, rows), path)?;
    }
    let failed = rows
        .iter()
        .filter_map(|r| r.validation.as_ref())
        .flatten()
        .any(|c| !c.pass);
    Ok(if failed { EXIT_VALIDATION } else { 0 })
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32, LabError> {
    let mut text = match &a.config {
        Some(path) => std::fs::read_to_string(path).map_err(io_err(path))?,
        None => String::new(),
    };
    for line in &a.sets {
        text.push('\n');
        text.push_str(line);
    }
    let spec = parse_config(&text)?;
    let rows = run_sweep(&spec)?;
    finish_sweep(&spec, &rows, &a.output, out)
}

fn cmd_figure(a: &FigureArgs, out: &mut dyn Write) -> Result<i32, LabError> {
    if a.id == "list" {
        for id in RECIPE_IDS {
            writeln!(out, "{id}").map_err(stdout_err)?;
        }
        return Ok(0);
    }
    let mut spec = figure_recipe(&a.id)?;
    if let Some(samples) = a.validate_samples {
        spec.validation = Some(McSettings { samples, seed: a.seed });
    }
    let rows = run_sweep(&spec)?;
    finish_sweep(&spec, &rows, &a.output, out)
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32, LabError> {
    let noise = a.link.noise()?;
    let cfg = transmit_config(a.scenario, db_to_linear(a.pa_db), Some(a.rho.unwrap_or(0.75)), a.rs)?;
    let mut report = validate_scenario(a.scenario, &noise, &cfg, a.samples, a.seed)?;
    if let Some(delta) = a.perturb {
        report = report.perturb(delta);
    }
    for c in &report.comparisons {
        writeln!(
            out,
            "{} analytic={} mc={} half_width={} {}",
            c.metric.label(),
            format_number(c.analytic),
            format_number(c.estimate.mean),
            format_number(c.estimate.half_width),
            if c.pass { "PASS" } else { "FAIL" }
        )
        .map_err(stdout_err)?;
    }
    let passed = report.passed();
    writeln!(out, "result = {}", if passed { "pass" } else { "fail" }).map_err(stdout_err)?;
    Ok(if passed { 0 } else { EXIT_VALIDATION })
}

/// Runs the CLI on `args` (program name first) and returns the exit status:
/// 0 on success, 1 on usage or configuration errors, 2 when Monte Carlo
/// validation fails.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_CONFIG
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Metrics(a) => cmd_metrics(a, out),
        Command::Csr(a) => cmd_csr(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Figure(a) => cmd_figure(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
