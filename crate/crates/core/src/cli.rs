//! The `gconvex` command line: one JSON report on stdout per invocation.
//!
//! Exit codes: 0 success, 2 bad input (parse error, bad flag), 3 internal
//! error, 4 no connection constructor applies, 5 pole of the connection.
//! Failures print `{"error": {...}}` on stderr.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify, count_isolated_critical_points, to_quadratic_form, CriticalCount};
use crate::connection::{
    construct_no_critical, construct_quadratic_flat, verify_hessian_target, zero_target, Connection, ExprMatrix,
};
use crate::density::{
    monomial_density_exact, psd_ball_fraction, sample_quadratic, sample_separable, sample_univariate, write_csv,
    CsvRow,
};
use crate::geoverify::{convexity_along, integrate_geodesic, GeodesicError};
use crate::holonomy::{lc_check, HolonomyError};
use crate::polycore::{
    infer_variables, parse_expression, parse_rational_expression, qserde, PolyError, Polynomial, Rational,
};

pub const SCHEMA_VERSION: u32 = 1;

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INTERNAL: i32 = 3;
    pub const NO_CONSTRUCTOR: i32 = 4;
    pub const POLE: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "gconvex", version, about = "Geodesic convexity of polynomials: verdicts, connections, holonomy, density")]
pub struct Cli {
    /// Indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for floating checks.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether some connection makes the polynomial g-convex.
    Classify(ExprArgs),
    /// Build Christoffel symbols under which the Hessian equals a target.
    Connect(ConnectArgs),
    /// Levi-Civita test for a connection at a point.
    Holonomy(HolonomyArgs),
    /// Density of g-convex polynomials in a random family.
    Density(DensityArgs),
    /// Integrate a geodesic and test convexity of the polynomial along it.
    Geodesic(GeodesicArgs),
}

#[derive(Debug, Args)]
pub struct ExprArgs {
    pub expr: String,
    /// Comma-separated variable order; inferred from the expression if absent.
    #[arg(long)]
    pub vars: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConnectArgs {
    #[command(flatten)]
    pub input: ExprArgs,
    /// `zero`, or a JSON array of rows of expression strings.
    #[arg(long, default_value = "zero")]
    pub target: String,
    /// Build the no-critical-point connection even when the classifier cannot
    /// rule out critical points.
    #[arg(long)]
    pub assume_no_critical: bool,
}

#[derive(Debug, Args)]
pub struct HolonomyArgs {
    /// Connection file (JSON).
    #[arg(required_unless_present = "inline", conflicts_with = "inline")]
    pub file: Option<PathBuf>,
    /// Connection JSON given directly.
    #[arg(long)]
    pub inline: Option<String>,
    /// Comma-separated coordinates: integers, `p/q` or decimals.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Univariate,
    Quadratic,
    Monomial,
    Separable,
    Psdball,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    pub family: FamilyArg,
    #[arg(short = 'n', default_value_t = 1)]
    pub n: usize,
    #[arg(short = 'd', default_value_t = 3)]
    pub d: u32,
    #[arg(short = 'r', default_value_t = 1.0)]
    pub r: f64,
    /// `d=a..b` (inclusive) or `d=a,b,c`; `n=` likewise.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Also write the rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub input: ExprArgs,
    /// Connection file; the zero connection when absent.
    #[arg(long, conflicts_with = "construct")]
    pub connection: Option<PathBuf>,
    /// Use the connection `connect` would build for the expression.
    #[arg(long)]
    pub construct: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: String,
    #[arg(short = 'T', long = "time", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Include every grid point of the path.
    #[arg(long)]
    pub full_path: bool,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn new(code: i32, kind: &'static str, message: impl ToString) -> Self {
        Failure { code, kind, message: message.to_string() }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"code": self.code, "kind": self.kind, "message": self.message}})
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::new(exit::USAGE, "usage", e)
}

fn parse_failure(e: PolyError) -> Failure {
    Failure::new(exit::USAGE, "parse", e)
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: Value,
    pub result: Value,
    pub timing_ms: f64,
    pub seed: u64,
}

/// Outcome of one invocation: the process exit code and what to print.
pub struct Outcome {
    pub code: i32,
    pub stdout: Option<String>,
    pub stderr: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: exit::OK, stdout: Some(e.to_string()), stderr: None };
            }
            let f = usage(e.to_string().trim_end());
            return Outcome { code: f.code, stdout: None, stderr: Some(f.to_json().to_string()) };
        }
    };
    let pretty = cli.pretty;
    match execute(&cli) {
        Ok(report) => {
            let text = if pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("report serializes");
            Outcome { code: exit::OK, stdout: Some(text), stderr: None }
        }
        Err(f) => Outcome { code: f.code, stdout: None, stderr: Some(f.to_json().to_string()) },
    }
}

pub fn execute(cli: &Cli) -> Result<Report, Failure> {
    let start = Instant::now();
    let (command, input, result) = match &cli.command {
        Command::Classify(a) => ("classify", expr_echo(a), cmd_classify(a)?),
        Command::Connect(a) => ("connect", expr_echo(&a.input), cmd_connect(a)?),
        Command::Holonomy(a) => ("holonomy", json!({"file": a.file, "point": a.point}), cmd_holonomy(a)?),
        Command::Density(a) => (
            "density",
            json!({"family": format!("{:?}", a.family).to_lowercase(), "n": a.n, "d": a.d, "r": a.r,
                   "trials": cli.trials, "sweep": a.sweep}),
            cmd_density(a, cli.trials, cli.seed)?,
        ),
        Command::Geodesic(a) => (
            "geodesic",
            json!({"expr": a.input.expr, "x0": a.x0, "v0": a.v0, "T": a.t_end, "steps": a.steps}),
            cmd_geodesic(a, cli.tol)?,
        ),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command,
        input,
        result,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
        seed: cli.seed,
    })
}

fn expr_echo(a: &ExprArgs) -> Value {
    json!({"expr": a.expr, "vars": a.vars})
}

fn variables(a: &ExprArgs) -> Result<Vec<String>, Failure> {
    match &a.vars {
        Some(v) => Ok(v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
        None => infer_variables(&a.expr).map_err(parse_failure),
    }
}

fn polynomial(a: &ExprArgs) -> Result<(Polynomial, Vec<String>), Failure> {
    let vars = variables(a)?;
    let f = parse_expression(&a.expr, &vars).map_err(parse_failure)?;
    Ok((f, vars))
}

fn to_value<T: Serialize>(t: &T) -> Result<Value, Failure> {
    serde_json::to_value(t).map_err(|e| Failure::new(exit::INTERNAL, "internal", e))
}

pub fn cmd_classify(a: &ExprArgs) -> Result<Value, Failure> {
    let (f, vars) = polynomial(a)?;
    let verdict = classify(&f);
    Ok(json!({"variables": vars, "polynomial": f.to_string_with(&vars), "verdict": to_value(&verdict)?}))
}

fn parse_target(text: &str, n: usize, vars: &[String]) -> Result<ExprMatrix, Failure> {
    if text.trim() == "zero" {
        return Ok(zero_target(n));
    }
    let rows: Vec<Vec<String>> = serde_json::from_str(text).map_err(usage)?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(usage(format!("target must be {n}x{n}")));
    }
    rows.iter()
        .map(|r| r.iter().map(|s| parse_rational_expression(s, vars).map_err(parse_failure)).collect())
        .collect()
}

/// The connection `connect` builds, with the constructor's name.
fn build_connection(
    f: &Polynomial,
    target: &ExprMatrix,
    assume_no_critical: bool,
) -> Result<(Connection, &'static str), Failure> {
    let n = f.nvars();
    let zero = target.iter().flatten().all(|e| e.is_zero());
    if zero && f.total_degree().unwrap_or(0) <= 2 {
        let q = to_quadratic_form(f).expect("degree at most 2");
        if q.has_no_critical_point() {
            let c = construct_quadratic_flat(&q).map_err(|e| Failure::new(exit::INTERNAL, "internal", e))?;
            return Ok((c, "quadratic_flat"));
        }
    }
    match count_isolated_critical_points(f).count {
        CriticalCount::Finite(0) => {}
        CriticalCount::Unknown(_) if assume_no_critical => {}
        other => {
            let why = match other {
                CriticalCount::Unknown(r) => format!("cannot rule out critical points ({r}); pass --assume-no-critical"),
                _ => "the function has critical points".to_string(),
            };
            return Err(Failure::new(exit::NO_CONSTRUCTOR, "no_constructor", why));
        }
    }
    debug_assert_eq!(target.len(), n);
    construct_no_critical(f, target)
        .map(|c| (c, "no_critical"))
        .map_err(|e| Failure::new(exit::NO_CONSTRUCTOR, "no_constructor", e))
}

pub fn cmd_connect(a: &ConnectArgs) -> Result<Value, Failure> {
    let (f, vars) = polynomial(&a.input)?;
    let target = parse_target(&a.target, f.nvars(), &vars)?;
    let (conn, constructor) = build_connection(&f, &target, a.assume_no_critical)?;
    let check = verify_hessian_target(&f, &conn, &target).map_err(|e| Failure::new(exit::INTERNAL, "internal", e))?;
    Ok(json!({
        "constructor": constructor,
        "connection": conn.to_json(Some(&vars)),
        "hessian_check": to_value(&check)?,
    }))
}

/// Integers, `p/q`, or decimals such as `-0.25`, all exact.
pub fn parse_exact(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some(q) = qserde::parse_rational(t) {
        return Some(q);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.')?;
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let q = Rational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Some(if neg { -q } else { q })
}

fn parse_point(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| parse_exact(s).ok_or_else(|| usage(format!("bad coordinate '{}'", s.trim()))))
        .collect()
}

/// A connection file, or a whole `connect` report carrying one.
fn connection_from_text(text: &str) -> Result<Connection, Failure> {
    if let Ok(doc) = serde_json::from_str::<Value>(text) {
        if let Some(inner) = doc.get("result").and_then(|r| r.get("connection")) {
            return Connection::from_json(&inner.to_string()).map_err(usage);
        }
    }
    Connection::from_json(text).map_err(usage)
}

fn read_connection(path: &PathBuf) -> Result<Connection, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    connection_from_text(&text)
}

pub fn cmd_holonomy(a: &HolonomyArgs) -> Result<Value, Failure> {
    let conn = match (&a.file, &a.inline) {
        (_, Some(text)) => connection_from_text(text)?,
        (Some(path), None) => read_connection(path)?,
        (None, None) => return Err(usage("a connection file or --inline is required")),
    };
    let x = parse_point(&a.point)?;
    if x.len() != conn.n() {
        return Err(usage(format!("point has {} coordinates, connection dimension is {}", x.len(), conn.n())));
    }
    match lc_check(&conn, &x) {
        Ok(report) => Ok(json!({"lc_report": to_value(&report)?})),
        Err(HolonomyError::PoleAtPoint) => Err(Failure::new(exit::POLE, "pole", HolonomyError::PoleAtPoint)),
        Err(e) => Err(Failure::new(exit::INTERNAL, "internal", e)),
    }
}

/// `d=3..63`, `d=3,7,15` or `n=1..4`.
pub fn parse_sweep(text: &str) -> Result<(char, Vec<u64>), Failure> {
    let (key, values) = text.split_once('=').ok_or_else(|| usage("sweep must look like d=a..b"))?;
    let key = match key.trim() {
        "d" => 'd',
        "n" => 'n',
        other => return Err(usage(format!("cannot sweep '{other}'"))),
    };
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| usage(format!("bad sweep value '{s}'")));
    let list = match values.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(usage("empty sweep range"));
            }
            (lo..=hi).collect()
        }
        None => values.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
    };
    Ok((key, list))
}

pub fn cmd_density(a: &DensityArgs, trials: u64, seed: u64) -> Result<Value, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let points: Vec<(usize, u32)> = match &a.sweep {
        None => vec![(a.n, a.d)],
        Some(s) => {
            let (key, vals) = parse_sweep(s)?;
            vals.into_iter()
                .map(|v| if key == 'd' { (a.n, v as u32) } else { (v as usize, a.d) })
                .collect()
        }
    };
    if points.iter().any(|&(n, d)| n == 0 || d == 0) {
        return Err(usage("n and d must be at least 1"));
    }
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for (n, d) in points {
        match a.family {
            FamilyArg::Monomial => {
                let m = monomial_density_exact(n, d);
                csv_rows.push(CsvRow::from(&m));
                rows.push(to_value(&m)?);
            }
            family => {
                let report = match family {
                    FamilyArg::Univariate => sample_univariate(d, a.r, trials, seed),
                    FamilyArg::Quadratic => sample_quadratic(n, a.r, trials, seed),
                    FamilyArg::Separable => sample_separable(n, d, a.r, trials, seed),
                    FamilyArg::Psdball => psd_ball_fraction(n, trials, seed),
                    FamilyArg::Monomial => unreachable!(),
                };
                csv_rows.push(CsvRow::from(&report));
                rows.push(to_value(&report)?);
            }
        }
    }
    if let Some(path) = &a.csv {
        let file = std::fs::File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        write_csv(file, &csv_rows).map_err(|e| Failure::new(exit::INTERNAL, "internal", e))?;
    }
    Ok(json!({"rows": rows}))
}

fn parse_floats(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{}'", s.trim()))))
        .collect()
}

pub fn cmd_geodesic(a: &GeodesicArgs, tol: f64) -> Result<Value, Failure> {
    let (f, vars) = polynomial(&a.input)?;
    let n = f.nvars();
    let conn = if a.construct {
        build_connection(&f, &zero_target(n), false)?.0
    } else if let Some(path) = &a.connection {
        read_connection(path)?
    } else {
        Connection::zero(n)
    };
    if conn.n() != n {
        return Err(usage(format!("connection dimension {} but {} variables", conn.n(), n)));
    }
    let (x0, v0) = (parse_floats(&a.x0)?, parse_floats(&a.v0)?);
    let path = integrate_geodesic(&conn, &x0, &v0, a.t_end, a.steps).map_err(|e| match e {
        GeodesicError::PoleEncountered { .. } => Failure::new(exit::POLE, "pole", e),
        GeodesicError::NonFinite { .. } => Failure::new(exit::INTERNAL, "non_finite", e),
        GeodesicError::DimensionMismatch { .. } => usage(e),
    })?;
    let convexity = convexity_along(&f, &path, tol);
    let mut out = json!({
        "variables": vars,
        "endpoint": path.endpoint(),
        "end_velocity": path.velocities.last(),
        "grid_points": path.len(),
        "convexity": to_value(&convexity)?,
    });
    if a.full_path {
        out["path"] = to_value(&path)?;
    }
    Ok(out)
}
