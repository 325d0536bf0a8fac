//! Command-line front end: single evaluations, z sweeps, dispatcher
//! calibration, and reaction-rate assembly, all emitting deterministic CSV.
//!
//! Exit codes: 0 success, 2 bad usage (rejected inputs), 3 numerical failure
//! on a valid request.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gamow::calibrate::run_calibration;
use gamow::config::Config;
use gamow::error::Error;
use gamow::eval::{choose_method, evaluate, EvalResult, Method};
use gamow::params::{IntegralKind, IntegralParams};
use gamow::rate::{assemble_rate, RateModifier, RateResult, ReactionSpec};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gamow",
    version,
    about = "Barrier integrals and thermonuclear reaction rates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one integral at one parameter point.
    Eval(EvalArgs),
    /// Evaluate one integral across a range of z values.
    Sweep(SweepArgs),
    /// Measure dispatcher tuning constants and emit them as a config file.
    Calibrate(CalibrateArgs),
    /// Assemble a reaction rate from S-factor Taylor coefficients.
    Rate(RateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegralArg {
    I1,
    I2,
    I3,
    I4,
}

impl IntegralArg {
    fn kind(self) -> IntegralKind {
        match self {
            IntegralArg::I1 => IntegralKind::I1,
            IntegralArg::I2 => IntegralKind::I2,
            IntegralArg::I3 => IntegralKind::I3,
            IntegralArg::I4 => IntegralKind::I4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Series,
    Asymptotic,
    Quadrature,
    Auto,
}

impl MethodArg {
    fn method(self) -> Option<Method> {
        match self {
            MethodArg::Series => Some(Method::Series),
            MethodArg::Asymptotic => Some(Method::Asymptotic),
            MethodArg::Quadrature => Some(Method::Quadrature),
            MethodArg::Auto => None,
        }
    }
}

/// Parameters shared by eval and sweep; optional fields apply only to the
/// integrals that use them and are rejected elsewhere.
#[derive(Args)]
struct CommonParams {
    /// Which integral to evaluate.
    #[arg(long, value_enum)]
    integral: IntegralArg,
    /// Integrand power (integer for the series route, any value otherwise).
    #[arg(long)]
    nu: f64,
    /// Upper cutoff in kT units (i2 only).
    #[arg(long)]
    d: Option<f64>,
    /// Screening shift in kT units (i3 only).
    #[arg(long)]
    t: Option<f64>,
    /// Depletion amplitude (i4 only).
    #[arg(long)]
    b: Option<f64>,
    /// Depletion exponent (i4 only).
    #[arg(long)]
    delta: Option<f64>,
    /// Evaluation method; auto picks per point and records why.
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Relative tolerance target.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Tuning constants file (overrides built-in defaults).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonParams {
    fn params_at(&self, z: f64) -> IntegralParams {
        IntegralParams {
            kind: self.integral.kind(),
            z,
            nu: self.nu,
            d: self.d,
            t: self.t,
            b: self.b,
            delta: self.delta,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Barrier strength.
    #[arg(long)]
    z: f64,
    #[command(flatten)]
    common: CommonParams,
}

#[derive(Args)]
struct SweepArgs {
    /// First z value.
    #[arg(long)]
    z_min: f64,
    /// Last z value (inclusive).
    #[arg(long)]
    z_max: f64,
    /// Number of grid points, at least 2.
    #[arg(long)]
    points: u32,
    /// Space the grid geometrically instead of linearly.
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    common: CommonParams,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Write the measured constants here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    /// Charge number of the first nucleus.
    #[arg(long)]
    z1: u32,
    /// Charge number of the second nucleus.
    #[arg(long)]
    z2: u32,
    /// Reduced mass in atomic mass units.
    #[arg(long)]
    mu: f64,
    /// Plasma temperature in kelvin.
    #[arg(long)]
    temperature: f64,
    /// S(0) in keV barn.
    #[arg(long)]
    s0: f64,
    /// S'(0) in barn.
    #[arg(long, default_value_t = 0.0)]
    s1: f64,
    /// S''(0) in barn per keV.
    #[arg(long, default_value_t = 0.0)]
    s2: f64,
    /// Ignore collisions above this center-of-mass energy (keV).
    #[arg(long)]
    cutoff_kev: Option<f64>,
    /// Debye screening length (cm).
    #[arg(long)]
    screening_length_cm: Option<f64>,
    /// Tail-depletion amplitude; requires --deplete-delta.
    #[arg(long)]
    deplete_b: Option<f64>,
    /// Tail-depletion exponent; requires --deplete-b.
    #[arg(long)]
    deplete_delta: Option<f64>,
    /// Relative tolerance for the underlying integrals.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Tuning constants file (overrides built-in defaults).
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // clap exits 2 on usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    let outcome = match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Calibrate(a) => cmd_calibrate(a),
        Cmd::Rate(a) => cmd_rate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

const EVAL_HEADER: &str = "integral,z,nu,d,t,b,delta,method,tol,value,estimated_error,trust,reason";

fn eval_row(p: &IntegralParams, tol: f64, r: &EvalResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        p.kind,
        fmt_f(p.z),
        fmt_f(p.nu),
        fmt_opt(p.d),
        fmt_opt(p.t),
        fmt_opt(p.b),
        fmt_opt(p.delta),
        r.method,
        fmt_f(tol),
        fmt_f(r.value),
        fmt_f(r.estimated_error),
        r.trust.as_str(),
        csv_field(&r.reason)
    )
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let p = args.common.params_at(args.z);
    let r = evaluate(&p, args.common.method.method(), args.common.tol, &cfg)?;
    let mut out = String::from(EVAL_HEADER);
    out.push('\n');
    out.push_str(&eval_row(&p, args.common.tol, &r));
    out.push('\n');
    emit(args.common.output.as_deref(), &out)
}

fn sweep_grid(z_min: f64, z_max: f64, points: u32, log: bool) -> Result<Vec<f64>, Error> {
    if points < 2 {
        return Err(Error::invalid(format!(
            "a sweep needs at least 2 points, got {points}"
        )));
    }
    if !z_min.is_finite() || !z_max.is_finite() || z_min >= z_max {
        return Err(Error::invalid(format!(
            "need z-min < z-max, got {z_min} and {z_max}"
        )));
    }
    if log && z_min <= 0.0 {
        return Err(Error::invalid("geometric spacing needs z-min > 0"));
    }
    let n = points as usize;
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let f = i as f64 / (n - 1) as f64;
        let z = if log {
            (z_min.ln() + f * (z_max.ln() - z_min.ln())).exp()
        } else {
            z_min + f * (z_max - z_min)
        };
        grid.push(z);
    }
    // The endpoints are exact regardless of rounding in between.
    grid[0] = z_min;
    grid[n - 1] = z_max;
    Ok(grid)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let grid = sweep_grid(args.z_min, args.z_max, args.points, args.log)?;
    let method = args.common.method.method();
    let tol = args.common.tol;

    // Validate once up front so a bad parameter combination is a usage
    // error before any work happens.
    args.common.params_at(grid[0]).validate()?;

    let results: Vec<Result<(IntegralParams, EvalResult), Error>> = grid
        .par_iter()
        .map(|&z| {
            let p = args.common.params_at(z);
            evaluate(&p, method, tol, &cfg).map(|r| (p, r))
        })
        .collect();

    let mut out = String::from(EVAL_HEADER);
    out.push('\n');
    for item in results {
        let (p, r) = item?;
        out.push_str(&eval_row(&p, tol, &r));
        out.push('\n');
    }
    emit(args.common.output.as_deref(), &out)
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), Error> {
    let mut log = |line: String| eprintln!("{line}");
    let cfg = run_calibration(Some(&mut log))?;
    let mut text = String::new();
    for (k, v) in cfg.iter() {
        text.push_str(&format!("{k} = {v:.17e}\n"));
    }
    emit(args.output.as_deref(), &text)
}

const RATE_HEADER: &str = "z1,z2,mu_amu,temperature_k,s0_kev_barn,s1_barn,s2_barn_per_kev,\
modifier,cutoff_kev,screening_length_cm,deplete_b,deplete_delta,z,kt_kev,gamow_peak_kev,\
cutoff_d,shift_t,methods,trust,rate_cm3_per_s";

fn rate_row(args: &RateArgs, modifier: &RateModifier, r: &RateResult) -> String {
    let modifier_name = match modifier {
        RateModifier::None => "none",
        RateModifier::CutoffKev(_) => "cutoff",
        RateModifier::ScreeningLengthCm(_) => "screening",
        RateModifier::Depletion { .. } => "depletion",
    };
    let methods = format!("{}|{}|{}", r.methods[0], r.methods[1], r.methods[2]);
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        args.z1,
        args.z2,
        fmt_f(args.mu),
        fmt_f(args.temperature),
        fmt_f(args.s0),
        fmt_f(args.s1),
        fmt_f(args.s2),
        modifier_name,
        fmt_opt(args.cutoff_kev),
        fmt_opt(args.screening_length_cm),
        fmt_opt(args.deplete_b),
        fmt_opt(args.deplete_delta),
        fmt_f(r.z),
        fmt_f(r.kt_kev),
        fmt_f(r.gamow_peak_kev),
        fmt_opt(r.cutoff_d),
        fmt_opt(r.shift_t),
        methods,
        r.trust.as_str(),
        fmt_f(r.rate_cm3_per_s)
    )
}

fn rate_modifier(args: &RateArgs) -> Result<RateModifier, Error> {
    let mut chosen = Vec::new();
    if args.cutoff_kev.is_some() {
        chosen.push("--cutoff-kev");
    }
    if args.screening_length_cm.is_some() {
        chosen.push("--screening-length-cm");
    }
    if args.deplete_b.is_some() || args.deplete_delta.is_some() {
        chosen.push("--deplete-b/--deplete-delta");
    }
    if chosen.len() > 1 {
        return Err(Error::invalid(format!(
            "modifiers are mutually exclusive, got {}",
            chosen.join(" and ")
        )));
    }
    if let Some(e) = args.cutoff_kev {
        return Ok(RateModifier::CutoffKev(e));
    }
    if let Some(l) = args.screening_length_cm {
        return Ok(RateModifier::ScreeningLengthCm(l));
    }
    match (args.deplete_b, args.deplete_delta) {
        (Some(b), Some(delta)) => Ok(RateModifier::Depletion { b, delta }),
        (Some(_), None) => Err(Error::invalid("--deplete-b needs --deplete-delta")),
        (None, Some(_)) => Err(Error::invalid("--deplete-delta needs --deplete-b")),
        (None, None) => Ok(RateModifier::None),
    }
}

fn cmd_rate(args: RateArgs) -> Result<(), Error> {
    let cfg = Config::load(args.config.as_deref())?;
    let spec = ReactionSpec {
        z1: args.z1,
        z2: args.z2,
        mu_amu: args.mu,
        s0: args.s0,
        s1: args.s1,
        s2: args.s2,
    };
    let modifier = rate_modifier(&args)?;
    let r = assemble_rate(&spec, args.temperature, &modifier, args.tol, &cfg)?;
    let mut out = String::from(RATE_HEADER);
    out.push('\n');
    out.push_str(&rate_row(&args, &modifier, &r));
    out.push('\n');
    emit(args.output.as_deref(), &out)
}
