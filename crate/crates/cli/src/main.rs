//! `cp-angular`: eigenvalues, coefficient tables, monodromy polynomials,
//! characteristic trajectories and verification suites from the command line.

mod golden;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cp_angular::characteristics::{transport_value, tv_from_coords};
use cp_angular::closed_forms::equal_parameter_eigenvalue;
use cp_angular::delta_solver::{delta, eigenvalue_delta, working_order};
use cp_angular::monodromy::monodromy_polynomial;
use cp_angular::series_expansion::{format_sci6, series_coefficients, series_eval_munu};
use cp_angular::theta_solver::{eigenvalue_theta, theta_scalar, TRACKING_ORDER};
use cp_angular::{localization_interval, Error, ModelParams, SpectralIndex};
use num_complex::Complex64;
use serde_json::json;

use crate::output::{emit, json_text};
use crate::verify::Suite;

/// Environment variable overriding the default tolerance.
const TOL_ENV: &str = "CPANGULAR_TOL";
const DEFAULT_TOL: f64 = 1e-12;
const MAX_SERIES_ORDER: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "cp-angular", version, about = "Spectral toolkit for the Chandrasekhar-Page angular equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one eigenvalue lambda_j(kappa; mu, nu).
    Eigen(EigenArgs),
    /// Emit the expansion coefficients c_{m,n} for m + n <= max order.
    SeriesTable(SeriesArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Monodromy polynomial and its roots for half-integer kappa.
    Monodromy(MonodromyArgs),
    /// Integrate a characteristic curve carrying an eigenvalue; CSV output.
    Trajectory(TrajectoryArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Tolerance (default 1e-12, or the CPANGULAR_TOL environment variable).
    #[arg(long)]
    tol: Option<f64>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EigenMethod {
    Delta,
    Theta,
    Series,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Irrational {
    Sqrt2,
}

#[derive(Args, Debug)]
struct EigenArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, allow_hyphen_values = true)]
    j: i32,
    #[arg(long, value_enum, default_value_t = EigenMethod::Delta)]
    method: EigenMethod,
    /// Line nu = tau mu for the closed form; inferred when omitted.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<i32>,
    /// Truncation order of the series method.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum, default_value_t = TextFormat::Json)]
    format: TextFormat,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(long, conflicts_with = "kappa_irrational")]
    kappa: Option<f64>,
    /// Use an irrational kappa instead of --kappa.
    #[arg(long, value_enum)]
    kappa_irrational: Option<Irrational>,
    #[arg(long, allow_hyphen_values = true)]
    j: i32,
    #[arg(long, default_value_t = 8)]
    max_order: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MonodromyArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, allow_hyphen_values = true)]
    nu: f64,
    /// Eigenvalue index; the starting value is computed with the delta method.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "w0", required_unless_present = "w0")]
    j: Option<i32>,
    /// Starting value of w instead of an eigenvalue.
    #[arg(long, allow_hyphen_values = true)]
    w0: Option<f64>,
    /// Final value of t; defaults to 1.5 times the starting t.
    #[arg(long)]
    t1: Option<f64>,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidIndex => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(format!("i/o: {e}"))
    }
}

type CliResult = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn tolerance(flag: Option<f64>) -> std::result::Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| usage(format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0 && tol < 1.0) {
        return Err(usage(format!("tolerance {tol} must lie in (0, 1)")));
    }
    Ok(tol)
}

fn index(j: i32) -> std::result::Result<SpectralIndex, Failure> {
    SpectralIndex::new(j).map_err(|_| usage("--j must be nonzero"))
}

// Newton correction |F / F'| of a real function at x.
fn newton_step(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-6 * (1.0 + x.abs());
    let d = (f(x + h) - f(x - h)) / (2.0 * h);
    (f(x) / d).abs()
}

fn cmd_eigen(a: EigenArgs) -> CliResult {
    let tol = tolerance(a.common.tol)?;
    let j = index(a.j)?;
    let p = ModelParams::new(a.kappa, a.mu, a.nu)?;
    if a.tau.is_some() && a.method != EigenMethod::Closed {
        return Err(usage("--tau is only valid with --method closed"));
    }
    if a.order.is_some() && a.method != EigenMethod::Series {
        return Err(usage("--order is only valid with --method series"));
    }
    let (lambda, order, flagged) = match a.method {
        EigenMethod::Delta => {
            let e = eigenvalue_delta(&p, j, tol)?;
            (e.value, e.order, e.flagged)
        }
        EigenMethod::Theta => {
            let e = eigenvalue_theta(&p, j, tol)?;
            (e.value, e.order, e.flagged)
        }
        EigenMethod::Series => {
            let order = a.order.unwrap_or(8);
            if order > MAX_SERIES_ORDER {
                return Err(usage(format!("--order {order} exceeds {MAX_SERIES_ORDER}")));
            }
            let t = series_coefficients(a.kappa, j, order)?;
            (series_eval_munu(&t, a.mu, a.nu).value, order, false)
        }
        EigenMethod::Closed => {
            let tau = match a.tau {
                Some(t) if t == 1 || t == -1 => t,
                Some(t) => return Err(usage(format!("--tau {t} must be 1 or -1"))),
                None if a.nu == a.mu => 1,
                None if a.nu == -a.mu => -1,
                None => return Err(usage("closed form needs nu = +-mu")),
            };
            if a.nu != f64::from(tau) * a.mu {
                return Err(usage(format!("closed form with tau = {tau} needs nu = {tau} * mu")));
            }
            (equal_parameter_eigenvalue(a.kappa, j, tau, a.mu)?, 0, false)
        }
    };
    let d_order = working_order(&p, lambda);
    let delta_res = newton_step(|x| delta(&p, Complex64::new(x, 0.0), d_order).value.re, lambda);
    let th_order = if a.method == EigenMethod::Theta { order } else { TRACKING_ORDER };
    let theta_res = newton_step(|x| theta_scalar(&p, x, th_order).0, lambda);
    let iv = localization_interval(&p, j);
    let method = format!("{:?}", a.method).to_lowercase();
    let text = match a.format {
        TextFormat::Json => json_text(json!({
            "lambda": lambda,
            "j": a.j,
            "method": method,
            "order": order,
            "flagged": flagged,
            "residuals": {"delta_at_root": delta_res, "theta_at_root": theta_res},
            "localization_interval": {"center": iv.center, "radius": iv.radius, "lo": iv.lo(), "hi": iv.hi()},
        })),
        TextFormat::Text => format!(
            "lambda = {:.9}  (j = {}, method {method}, order {order}{})\n",
            output::sig9(lambda),
            a.j,
            if flagged { ", flagged" } else { "" }
        ),
    };
    emit(&text, a.common.output.as_deref())?;
    Ok(())
}

fn cmd_series_table(a: SeriesArgs) -> CliResult {
    let kappa = match (a.kappa, a.kappa_irrational) {
        (Some(k), None) => k,
        (None, Some(Irrational::Sqrt2)) => std::f64::consts::SQRT_2,
        _ => return Err(usage("give exactly one of --kappa and --kappa-irrational")),
    };
    if a.max_order > MAX_SERIES_ORDER {
        return Err(usage(format!("--max-order {} exceeds {MAX_SERIES_ORDER}", a.max_order)));
    }
    let t = series_coefficients(kappa, index(a.j)?, a.max_order)?;
    let text = match a.format {
        TableFormat::Csv => {
            let mut s = String::from("m,n,value\n");
            for m in 0..=a.max_order {
                for n in 0..=(a.max_order - m) {
                    s.push_str(&format!("{m},{n},{}\n", format_sci6(t.c(m, n))));
                }
            }
            s
        }
        TableFormat::Json => {
            let rows: Vec<_> = (0..=a.max_order)
                .flat_map(|m| (0..=(a.max_order - m)).map(move |n| (m, n)))
                .map(|(m, n)| json!({"m": m, "n": n, "value": t.c(m, n)}))
                .collect();
            let resonant: Vec<_> = t.resonant.iter().map(|&(l, m, n)| json!([l, m, n])).collect();
            json_text(json!({
                "kappa": kappa,
                "j": a.j,
                "max_order": a.max_order,
                "coefficients": rows,
                "resonant": resonant,
            }))
        }
    };
    emit(&text, a.output.as_deref())?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let report = verify::run(a.suite)?;
    let text = json_text(serde_json::to_value(&report).expect("serializable"));
    emit(&text, a.output.as_deref())?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Failure::Numerical(format!("failed checks: {}", failed.join(", "))))
    }
}

fn cmd_monodromy(a: MonodromyArgs) -> CliResult {
    let tol = tolerance(a.common.tol)?;
    let p = monodromy_polynomial(a.kappa, a.mu, a.nu)?;
    let j = p.to_json(tol)?;
    let text = json_text(json!({
        "kappa": j.kappa,
        "k": j.k,
        "mu": j.mu,
        "nu": j.nu,
        "coefficients": j.coefficients,
        "roots": j.roots,
    }));
    emit(&text, a.common.output.as_deref())?;
    Ok(())
}

fn cmd_trajectory(a: TrajectoryArgs) -> CliResult {
    let tol = tolerance(a.common.tol)?;
    let w0 = match (a.w0, a.j) {
        (Some(w), _) => w,
        (None, Some(j)) => eigenvalue_delta(&ModelParams::new(a.kappa, a.mu, a.nu)?, index(j)?, tol.min(1e-12))?.value,
        (None, None) => return Err(usage("give --j or --w0")),
    };
    let (t0, _, _) = tv_from_coords(a.mu, a.nu)?;
    let t1 = a.t1.unwrap_or(1.5 * t0);
    let tr = transport_value(a.kappa, w0, (a.mu, a.nu), t1, tol)?;
    emit(&tr.trajectory.to_csv(), a.common.output.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let r = match cli.command {
        Command::Eigen(a) => cmd_eigen(a),
        Command::SeriesTable(a) => cmd_series_table(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Monodromy(a) => cmd_monodromy(a),
        Command::Trajectory(a) => cmd_trajectory(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
