//! `invk`: evaluate, combine and verify replicative invariant functions.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use invk_core::algebra::convolve;
use invk_core::covering::{covering_identity_check, is_disjoint_covering, parse_system};
use invk_core::verify::{self, GridSpec, KnownIntegral, Parity, VerificationReport};
use invk_core::{make, make_from_spec, parse_params, CatalogId, Error, InvariantFunction};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "invk", version, about = "Replicative invariant functions: evaluation, algebra and verification")]
#[command(after_help = "Exit codes: 0 ok, 1 check failed, 2 usage or domain error, 3 numerical non-convergence.\n\
Environment: INVK_THREADS caps the worker thread count.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a catalog entry at one point
    Eval(EvalArgs),
    /// Check identities on a seeded grid
    Verify(VerifyArgs),
    /// Evaluate the convolution product g*h at one point
    Convolve(ConvolveArgs),
    /// Compute a classical log-integral and compare with its closed form
    Integral(IntegralArgs),
    /// Decide whether residue classes form a disjoint covering system
    Covering(CoveringArgs),
    /// Tabulate a catalog entry over an x range as CSV
    Table(TableArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FnSelector {
    /// Catalog entry (E1, E2, E3a, E3b, E4, E5, E6c, E6s, E7, ..., E14)
    #[arg(long = "fn", value_name = "ID")]
    id: CatalogId,
    /// Entry parameters as k=v pairs, e.g. a=2 or r=1/2,theta=0
    #[arg(long, default_value = "")]
    params: String,
}

impl FnSelector {
    fn build(&self) -> Result<InvariantFunction, Error> {
        make(self.id, &parse_params(&self.params)?)
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    f: FnSelector,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Invariance,
    Exchange,
    IntegralLimit,
    StepLimit,
    YDerivative,
    Parity,
}

#[derive(Args)]
struct GridArgs {
    /// RNG seed for the sample grid
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random (x, y) samples
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Largest n in the invariance sums
    #[arg(long, default_value_t = 10)]
    nmax: usize,
}

impl GridArgs {
    fn grid(&self) -> GridSpec {
        GridSpec::default().with_seed(self.seed).with_samples(self.samples).with_n_max(self.nmax)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog entry to check
    #[arg(long = "fn", value_name = "ID", conflicts_with = "all", required_unless_present = "all")]
    id: Option<CatalogId>,
    /// Entry parameters as k=v pairs
    #[arg(long, default_value = "", requires = "id")]
    params: String,
    /// Run the full battery over every catalog entry and theorem
    #[arg(long)]
    all: bool,
    /// Identity to check for --fn
    #[arg(long, value_enum, default_value = "invariance", requires = "id")]
    property: Property,
    /// m for --property exchange
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// n for --property exchange
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Assumed parity for --property parity
    #[arg(long, default_value = "even")]
    parity: Parity,
    /// Pass threshold [default: 1e-8, or 1e-6 for series-defined functions]
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ConvolveArgs {
    /// First operand, e.g. E2:m=1
    #[arg(long)]
    g: String,
    /// Second operand, e.g. E9:r=0.5
    #[arg(long)]
    h: String,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    y: f64,
    /// Quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegralName {
    Euler,
    Poisson,
    Raabe,
}

#[derive(Args)]
struct IntegralArgs {
    #[arg(long, value_enum)]
    name: IntegralName,
    /// r=... for poisson, a=... for raabe
    #[arg(long, default_value = "")]
    params: String,
    /// Largest accepted |value - expected|
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CoveringArgs {
    /// Residue classes as a/n,a/n,...
    #[arg(long, allow_hyphen_values = true)]
    check: String,
    /// Also check the covering identity for --fn at (--x, --y)
    #[arg(long, requires = "id")]
    certify: bool,
    #[arg(long = "fn", value_name = "ID", requires = "certify")]
    id: Option<CatalogId>,
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    y: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    f: FnSelector,
    #[arg(long)]
    y: f64,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    x1: f64,
    /// Number of intervals; steps + 1 rows are written
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Output format (CSV by default)
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_convergence() { EXIT_NONCONVERGENCE } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_USAGE, message: format!("i/o error: {e}") }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure { code: EXIT_USAGE, message: format!("csv error: {e}") }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| usage(format!("csv error: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Plain decimal for moderate magnitudes, scientific notation otherwise.
fn num(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && v.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn finite_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn require_finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be finite, got {v}")))
    }
}

fn eval(a: &EvalArgs) -> Result<u8, Failure> {
    require_finite("x", a.x)?;
    let f = a.f.build()?;
    let v = f.eval(a.x, a.y)?;
    let text = match a.output.format {
        Format::Json => json_text(&json!({ "value": finite_number(v) })),
        Format::Csv => csv_text(&["x", "y", "value"], &[vec![num(a.x), num(a.y), num(v)]])?,
    };
    emit(&text, a.output.out.as_ref())?;
    Ok(0)
}

fn report_rows(reports: &[VerificationReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.property.clone(),
                r.function.clone(),
                r.samples.to_string(),
                num(r.max_abs_error),
                num(r.tolerance),
                r.pass.to_string(),
                r.flags.join(";"),
            ]
        })
        .collect()
}

fn write_reports(reports: &[VerificationReport], single: bool, output: &Output) -> Result<(), Failure> {
    let text = match output.format {
        Format::Json => {
            let mut s = if single {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            }
            .expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv_text(
            &["property", "function", "samples", "max_abs_error", "tolerance", "pass", "flags"],
            &report_rows(reports),
        )?,
    };
    emit(&text, output.out.as_ref())
}

fn verify(a: &VerifyArgs) -> Result<u8, Failure> {
    let grid = a.grid.grid();
    grid.validate()?;
    let reports = if a.all {
        if a.tol.is_some() {
            return Err(usage("--tol applies to --fn; the --all battery uses fixed thresholds"));
        }
        verify::run_all(&grid)?
    } else {
        let id = a.id.ok_or_else(|| usage("either --fn or --all is required"))?;
        let f = make(id, &parse_params(&a.params)?)?;
        let tol = a.tol.unwrap_or(if f.traits().series_defined {
            verify::SERIES_TOL
        } else {
            verify::CLOSED_FORM_TOL
        });
        if tol.is_nan() || tol < 0.0 {
            return Err(usage(format!("--tol must be non-negative, got {tol}")));
        }
        let r = match a.property {
            Property::Invariance => verify::check_invariance(&f, &grid, tol),
            Property::Exchange => verify::check_exchange(&f, a.m, a.n, &grid, tol),
            Property::IntegralLimit => verify::check_integral_limit(&f, &grid, tol),
            Property::StepLimit => verify::check_step_limit(&f, &grid, tol),
            Property::YDerivative => verify::check_y_derivative_identities(&f, &grid, tol),
            Property::Parity => verify::check_parity(&f, a.parity, &grid, tol),
        };
        if r.has_flag("grid-error") {
            return Err(usage(format!("no admissible sample grid for {}", f.label())));
        }
        vec![r]
    };
    write_reports(&reports, !a.all, &a.output)?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { EXIT_FAILED })
}

fn convolve_cmd(a: &ConvolveArgs) -> Result<u8, Failure> {
    require_finite("x", a.x)?;
    let g = make_from_spec(&a.g)?;
    let h = make_from_spec(&a.h)?;
    let v = convolve(&g, &h, a.tol)?.eval(a.x, a.y)?;
    let text = match a.output.format {
        Format::Json => json_text(&json!({ "value": finite_number(v) })),
        Format::Csv => csv_text(&["x", "y", "value"], &[vec![num(a.x), num(a.y), num(v)]])?,
    };
    emit(&text, a.output.out.as_ref())?;
    Ok(0)
}

fn integral(a: &IntegralArgs) -> Result<u8, Failure> {
    let name = match a.name {
        IntegralName::Euler => "euler",
        IntegralName::Poisson => "poisson",
        IntegralName::Raabe => "raabe",
    };
    let k = KnownIntegral::from_name(name, &parse_params(&a.params)?)?;
    let qtol = (a.tol * 1e-2).max(1e-11);
    let v = k.compute(qtol)?;
    if !v.converged {
        return Err(Failure {
            code: EXIT_NONCONVERGENCE,
            message: format!("{name}: quadrature error estimate {} above {qtol}", v.error_estimate),
        });
    }
    let text = match a.output.format {
        Format::Json => json_text(&json!({
            "name": name,
            "value": v.value,
            "expected": v.expected,
            "error": v.error,
            "error_estimate": v.error_estimate,
        })),
        Format::Csv => csv_text(
            &["name", "value", "expected", "error"],
            &[vec![name.into(), num(v.value), num(v.expected), num(v.error)]],
        )?,
    };
    emit(&text, a.output.out.as_ref())?;
    Ok(if v.error <= a.tol { 0 } else { EXIT_FAILED })
}

fn covering(a: &CoveringArgs) -> Result<u8, Failure> {
    let sys = parse_system(&a.check)?;
    let d = is_disjoint_covering(&sys)?;
    let mut v = serde_json::to_value(&d).expect("decision serializes");
    let mut ok = d.accepted;
    if a.certify {
        let id = a.id.ok_or_else(|| usage("--certify needs --fn"))?;
        let f = make(id, &parse_params(&a.params)?)?;
        if d.accepted {
            let r = covering_identity_check(&sys, &f, a.x, a.y, a.tol)?;
            ok &= r.pass;
            v["certificate"] = serde_json::to_value(&r).expect("report serializes");
        }
    }
    let text = match a.output.format {
        Format::Json => json_text(&v),
        Format::Csv => csv_text(
            &["accepted", "lcm", "witness", "density"],
            &[vec![
                d.accepted.to_string(),
                d.lcm.to_string(),
                d.witness.map(|w| w.to_string()).unwrap_or_default(),
                d.density.clone(),
            ]],
        )?,
    };
    emit(&text, a.output.out.as_ref())?;
    Ok(if ok { 0 } else { EXIT_FAILED })
}

fn table(a: &TableArgs) -> Result<u8, Failure> {
    require_finite("x0", a.x0)?;
    require_finite("x1", a.x1)?;
    if a.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let f = a.f.build()?;
    let xs: Vec<f64> = (0..=a.steps)
        .map(|i| a.x0 + (a.x1 - a.x0) * i as f64 / a.steps as f64)
        .collect();
    let mut values = Vec::with_capacity(xs.len());
    for &x in &xs {
        values.push(match f.eval(x, a.y) {
            Ok(v) => v,
            Err(Error::Pole(_)) | Err(Error::InvalidInput(_)) => f64::NAN,
            Err(e) => return Err(e.into()),
        });
    }
    let text = match a.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = xs.iter().zip(&values).map(|(x, v)| vec![num(*x), num(*v)]).collect();
            csv_text(&["x", "value"], &rows)?
        }
        Format::Json => json_text(&Value::Array(
            xs.iter()
                .zip(&values)
                .map(|(x, v)| json!({ "x": x, "value": finite_number(*v) }))
                .collect(),
        )),
    };
    emit(&text, a.out.as_ref())?;
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("INVK_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("INVK_THREADS must be a positive integer, got '{text}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Verify(a) => verify(a),
        Command::Convolve(a) => convolve_cmd(a),
        Command::Integral(a) => integral(a),
        Command::Covering(a) => covering(a),
        Command::Table(a) => table(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("invk: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
