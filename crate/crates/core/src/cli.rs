//! Command-line driver.
//!
//! Exit codes: 0 success or passing verdict, 1 internal failure or failing
//! invariance verdict, 2 usage or parse error, 3 domain violation (curve not
//! simple, inversion center on the curve, and similar).

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::closed_forms::n_ellipse;
use crate::curve_spec::{CurveSpec, OpSpec};
use crate::error::Error;
use crate::geometry::{check_simple, Curve, SimplicityReport};
use crate::intersection::{asymptotic_fit, log_spaced, IntersectionConfig};
use crate::invariance::InvarianceReport;
use crate::output::{csv_document, fmt_g15, number_row, with_manifest, RunManifest, TOOL_NAME, TOOL_VERSION};
use crate::quadrature::{integrate_n, QuadratureConfig, SIMPLICITY_THRESHOLD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "curverad", version, about = "Photon-number integral of closed curves")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Initial grid size per torus direction.
    #[arg(long, global = true, default_value_t = 64)]
    pub grid: usize,
    /// Largest grid tried before giving up.
    #[arg(long, global = true, default_value_t = 8192)]
    pub max_grid: usize,
    /// Relative agreement between successive grids.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "CURVERAD_THREADS")]
    pub threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate n for one curve (JSON).
    Compute {
        /// Curve spec: a file path or inline JSON.
        #[arg(long)]
        curve: String,
    },
    /// Sweep ellipses over the axis ratio ξ (CSV).
    SweepEllipse {
        #[arg(long, default_value_t = 0.2)]
        xi_min: f64,
        #[arg(long, default_value_t = 1.0)]
        xi_max: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
    /// Compare n before and after a transform (JSON).
    Invariance {
        #[arg(long)]
        curve: String,
        /// One transform op or an array of ops, as a path or inline JSON.
        #[arg(long)]
        transform: String,
        /// Relative deviation accepted as invariant.
        #[arg(long, default_value_t = 1e-6)]
        pass_tol: f64,
    },
    /// Local contribution of two crossing straight pieces (CSV).
    Intersection {
        /// Crossing angle: a number or an expression such as `pi/4`, `3pi/4`.
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value_t = 1e-4)]
        mu_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        mu_max: f64,
        #[arg(long, default_value_t = 13)]
        steps: usize,
    },
    /// Self-intersection screen (JSON).
    CheckSimple {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn internal(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Unsupported(_) => EXIT_USAGE,
            Error::Domain(_) | Error::NotSimple { .. } => EXIT_DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Text to emit and the exit code to finish with.
struct Outcome {
    body: String,
    code: i32,
}

/// Runs a parsed command line; `argv` is recorded in the manifest.
pub fn run(cli: Cli, argv: String) -> i32 {
    match execute(&cli, argv) {
        Ok(outcome) => match emit(&cli.global, &outcome.body) {
            Ok(()) => outcome.code,
            Err(e) => report(&e),
        },
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("curverad: {}", e.message);
    e.code
}

fn emit(global: &GlobalArgs, body: &str) -> Result<(), CliError> {
    match &global.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli, argv: String) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    }
    let config = QuadratureConfig {
        initial_grid: g.grid,
        max_grid: g.max_grid,
        rel_tol: g.tol,
        ..QuadratureConfig::default()
    };
    config.validate()?;
    let mut manifest = RunManifest {
        tool: TOOL_NAME,
        tool_version: TOOL_VERSION,
        command: argv,
        curve: None,
        config: json!(config),
        threads: rayon::current_num_threads(),
        wall_time_s: 0.0,
    };
    let start = Instant::now();
    match &cli.command {
        Command::Compute { curve } => {
            let (spec, raw) = load_curve(curve)?;
            manifest.curve = Some(raw);
            let result = compute(&spec, &config)?;
            if !result.converged {
                eprintln!("curverad: warning: not converged to --tol by grid {}", result.grid);
            }
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            Ok(Outcome {
                body: json_body(&result, &manifest),
                code: EXIT_OK,
            })
        }
        Command::SweepEllipse { xi_min, xi_max, steps } => {
            let rows = sweep_ellipse(*xi_min, *xi_max, *steps, &config)?;
            manifest.config = json!({ "quadrature": config, "xi_min": xi_min, "xi_max": xi_max, "steps": steps });
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            let rows: Vec<Vec<String>> = rows.iter().map(|r| number_row(r)).collect();
            let body = csv_document(&manifest, &["xi", "n_numeric", "n_closed", "rel_err"], &rows, &[]);
            Ok(Outcome { body, code: EXIT_OK })
        }
        Command::Invariance {
            curve,
            transform,
            pass_tol,
        } => {
            let (spec, raw) = load_curve(curve)?;
            let ops = load_ops(transform)?;
            manifest.curve = Some(raw);
            manifest.config = json!({ "quadrature": config, "pass_tol": pass_tol, "transform": ops });
            let report = invariance(&spec, &ops, *pass_tol, &config)?;
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            let code = if report.pass { EXIT_OK } else { EXIT_FAILURE };
            Ok(Outcome {
                body: json_body(&report, &manifest),
                code,
            })
        }
        Command::Intersection {
            phi,
            mu_min,
            mu_max,
            steps,
        } => {
            let phi = parse_angle(phi)?;
            let defaults = IntersectionConfig::new(1.0, phi)?;
            manifest.config = json!({
                "phi": phi, "mu_min": mu_min, "mu_max": mu_max, "steps": steps,
                "gauss_order": defaults.order, "panel_width": defaults.panel_width,
            });
            let (rows, footer) = intersection(phi, *mu_min, *mu_max, *steps)?;
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            for line in &footer {
                eprintln!("{line}");
            }
            let header = [
                "phi",
                "mu",
                "I_numeric",
                "model",
                "coefficient_fit",
                "coefficient_exact",
                "rel_err",
            ];
            Ok(Outcome {
                body: csv_document(&manifest, &header, &rows, &footer),
                code: EXIT_OK,
            })
        }
        Command::CheckSimple { curve, samples } => {
            let (spec, raw) = load_curve(curve)?;
            manifest.curve = Some(raw);
            manifest.config = json!({ "samples": samples, "threshold": SIMPLICITY_THRESHOLD });
            let report = SimpleVerdict::new(check_simple(&spec.build()?, *samples)?);
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            let code = if report.simple { EXIT_OK } else { EXIT_DOMAIN };
            Ok(Outcome {
                body: json_body(&report, &manifest),
                code,
            })
        }
    }
}

fn json_body<T: Serialize>(result: &T, manifest: &RunManifest) -> String {
    let mut s = serde_json::to_string_pretty(&with_manifest(result, manifest)).expect("serializable");
    s.push('\n');
    s
}

/// Reads inline JSON (anything starting with `{` or `[`) or a file.
fn read_json_arg(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::usage(format!("cannot read {arg}: {e}")))
    }
}

fn load_curve(arg: &str) -> Result<(CurveSpec, Value), CliError> {
    let text = read_json_arg(arg)?;
    let spec = CurveSpec::from_json(&text)?;
    let raw = serde_json::to_value(&spec).expect("serializable spec");
    Ok((spec, raw))
}

fn load_ops(arg: &str) -> Result<Vec<OpSpec>, CliError> {
    let text = read_json_arg(arg)?;
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad transform spec: {e}")))
    } else {
        Ok(vec![OpSpec::from_json(&text)?])
    }
}

/// Parses `1.2`, `pi`, `-pi/2`, `3pi/4`, `3*pi/4`, `0.25pi`.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::usage(format!("cannot parse angle '{s}'"));
    let t: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let angle = value / den;
    if angle.is_finite() {
        Ok(angle)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Serialize)]
struct ComputeResult {
    n: f64,
    grid: usize,
    error_estimate: f64,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<f64>,
    /// Relative deviation from `closed_form`.
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation: Option<f64>,
    history: Vec<(usize, f64)>,
}

fn compute(spec: &CurveSpec, config: &QuadratureConfig) -> Result<ComputeResult, CliError> {
    let curve = spec.build()?;
    let q = integrate_n(&curve, config)?;
    let closed_form = closed_form_for(&curve)?;
    Ok(ComputeResult {
        n: q.value,
        grid: q.grid,
        error_estimate: q.error_estimate,
        converged: q.converged,
        closed_form,
        deviation: closed_form.map(|c| (q.value - c).abs() / c),
        history: q.history,
    })
}

fn closed_form_for(curve: &Curve) -> Result<Option<f64>, CliError> {
    match curve.ellipse_axes() {
        Some((a, b)) => Ok(Some(n_ellipse(b / a)?)),
        None => Ok(None),
    }
}

fn sweep_ellipse(xi_min: f64, xi_max: f64, steps: usize, config: &QuadratureConfig) -> Result<Vec<[f64; 4]>, CliError> {
    if !(xi_min > 0.0 && xi_min <= xi_max && xi_max <= 1.0) {
        return Err(CliError::usage(format!(
            "need 0 < xi-min <= xi-max <= 1, got [{xi_min}, {xi_max}]"
        )));
    }
    if steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    if steps == 1 && xi_min != xi_max {
        return Err(CliError::usage("--steps 1 needs xi-min = xi-max"));
    }
    let xis: Vec<f64> = (0..steps)
        .map(|k| {
            if steps == 1 {
                xi_min
            } else {
                xi_min + (xi_max - xi_min) * k as f64 / (steps - 1) as f64
            }
        })
        .collect();
    xis.iter()
        .map(|&xi| {
            let q = integrate_n(&Curve::ellipse(1.0, xi)?, config)?;
            if !q.converged {
                eprintln!("curverad: warning: xi = {xi} not converged by grid {}", q.grid);
            }
            let closed = n_ellipse(xi)?;
            Ok([xi, q.value, closed, (q.value - closed).abs() / closed])
        })
        .collect()
}

fn invariance(
    spec: &CurveSpec,
    ops: &[OpSpec],
    pass_tol: f64,
    config: &QuadratureConfig,
) -> Result<InvarianceReport, CliError> {
    if !(pass_tol > 0.0) {
        return Err(CliError::usage(format!("--pass-tol must be positive, got {pass_tol}")));
    }
    if ops.is_empty() {
        return Err(CliError::usage("transform list is empty"));
    }
    let curve = spec.build()?;
    let mut image = curve.clone();
    let mut names = Vec::with_capacity(ops.len());
    for op in ops {
        let t = op.to_transform(image.dimension())?;
        names.push(t.describe());
        image = image.apply(&t)?;
    }
    let before = integrate_n(&curve, config)?;
    let after = integrate_n(&image, config)?;
    for (label, q) in [("original", &before), ("transformed", &after)] {
        if !q.converged {
            eprintln!("curverad: warning: {label} curve not converged by grid {}", q.grid);
        }
    }
    Ok(InvarianceReport::new(
        names.join(" then "),
        before.value,
        after.value,
        pass_tol,
    ))
}

fn intersection(phi: f64, mu_min: f64, mu_max: f64, steps: usize) -> Result<(Vec<Vec<String>>, Vec<String>), CliError> {
    if !(mu_min > 0.0 && mu_min < mu_max && mu_max.is_finite()) {
        return Err(CliError::usage(format!(
            "need 0 < mu-min < mu-max, got [{mu_min}, {mu_max}]"
        )));
    }
    if steps < 3 {
        return Err(CliError::usage("--steps must be at least 3 for the asymptotic fit"));
    }
    let mus = log_spaced(mu_max, mu_min, steps);
    let fit = asymptotic_fit(phi, &mus)?;
    let model = fit.model.as_str().to_string();
    let rows = fit
        .samples
        .iter()
        .map(|&(mu, value)| {
            vec![
                fmt_g15(phi),
                fmt_g15(mu),
                fmt_g15(value),
                model.clone(),
                fmt_g15(fit.coefficient_fit),
                fmt_g15(fit.coefficient_exact),
                fmt_g15(fit.rel_err),
            ]
        })
        .collect();
    let footer = vec![format!(
        "fit: model={} coefficient_fit={} coefficient_exact={} rel_err={} intercept={}",
        model,
        fmt_g15(fit.coefficient_fit),
        fmt_g15(fit.coefficient_exact),
        fmt_g15(fit.rel_err),
        fmt_g15(fit.intercept)
    )];
    Ok((rows, footer))
}

#[derive(Debug, Serialize)]
struct SimpleVerdict {
    #[serde(flatten)]
    report: SimplicityReport,
    threshold: f64,
    simple: bool,
}

impl SimpleVerdict {
    fn new(report: SimplicityReport) -> Self {
        let simple = report.normalized_ratio >= SIMPLICITY_THRESHOLD;
        Self {
            report,
            threshold: SIMPLICITY_THRESHOLD,
            simple,
        }
    }
}
