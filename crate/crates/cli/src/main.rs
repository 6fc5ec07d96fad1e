//! Command-line front end: validate, evaluate, simulate and check covariance
//! models on compact two-point homogeneous spaces.
//!
//! Exit codes: 0 success, 1 invalid model or failed check, 2 parse or usage
//! error, 3 unsupported geometry.

mod points;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twopoint::rng::DEFAULT_SEED;
use twopoint::simulate::write_realization;
use twopoint::spectral::{
    angular_power_spectrum, read_model, truncation_bound, validate, ValidityReport, DEFAULT_PROBE_LAGS,
};
use twopoint::verify::{run_checks, CheckOptions, DEFAULT_MC_SPACES};
use twopoint::{eval_cov, CovarianceSeries, Error, Model, SpaceParams, Simulator};

#[derive(Parser, Debug)]
#[command(name = "twopoint", version, about = "Isotropic random fields on compact two-point homogeneous spaces")]
struct Cli {
    /// Maximum number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a model file defines a valid covariance.
    Validate(ValidateArgs),
    /// Tabulate C(ρ; t) on a grid of distances and lags.
    EvalCov(EvalArgs),
    /// Simulate one realization and write values.csv plus metadata.json.
    Simulate(SimulateArgs),
    /// Run the numerical identity suite.
    Check(CheckArgs),
    /// Tabulate the angular power spectrum B_n / dim H_n.
    Spectrum(SpectrumArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Probe lags for spatio-temporal models, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lags: Option<Vec<f64>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Distance grid `a:b:n` (n evenly spaced values; `pi` is accepted).
    #[arg(long, default_value = "0:pi:101")]
    rho_grid: String,
    /// Time lags, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    lags: Vec<f64>,
    /// Truncation degree (default: all stored degrees).
    #[arg(long)]
    trunc: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    /// `random:K`, `fibonacci:K` (sphere:2 only) or a coordinate file.
    #[arg(long, default_value = "random:100")]
    points: String,
    /// Times for spatio-temporal models, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    times: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Truncation degree (default: all stored degrees).
    #[arg(long)]
    trunc: Option<usize>,
    /// Must match the model's space when given.
    #[arg(long)]
    space: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Spaces for the Monte-Carlo oracles, comma separated.
    #[arg(long, value_delimiter = ',')]
    space: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte-Carlo samples per oracle.
    #[arg(long, default_value_t = 100_000)]
    replicates: usize,
    /// Multiplies every a_n (fault injection for testing the suite itself).
    #[arg(long, hide = true, default_value_t = 1.0)]
    perturb_a: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    output: Output,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    /// Library error, mapped to an exit code by kind.
    Lib(Error),
    /// The command ran but its verdict is negative (invalid model, failed check).
    Negative(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedGeometry(_) => 3,
        Error::InvalidModel(_) | Error::Indefinite { .. } | Error::Numeric(_) => 1,
        _ => 2,
    }
}

type CmdResult = Result<(), Failure>;

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure::Lib(Error::Input(format!("{}: {e}", path.display())))
}

fn emit(output: &Output, text: &str) -> CmdResult {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises") + "\n"
}

fn require_valid(model: &Model) -> CmdResult {
    let report = validate(model, &DEFAULT_PROBE_LAGS)?;
    if report.valid {
        Ok(())
    } else {
        Err(Failure::Negative(describe_invalid(&report)))
    }
}

fn describe_invalid(report: &ValidityReport) -> String {
    let v = report.first().expect("invalid report has a violation");
    format!(
        "model is invalid: {} violation(s), first {:?} at degree {} (lag {})",
        report.violations.len(),
        v.kind,
        v.degree,
        v.lag
    )
}

fn cmd_validate(args: &ValidateArgs) -> CmdResult {
    let model = read_model(&args.model)?;
    let lags = args.lags.clone().unwrap_or_else(|| DEFAULT_PROBE_LAGS.to_vec());
    let report = validate(&model, &lags)?;
    let text = match args.output.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("degree,lag,kind,magnitude\n");
            for v in &report.violations {
                s += &format!("{},{},{},{}\n", v.degree, v.lag, format!("{:?}", v.kind).to_lowercase(), v.magnitude);
            }
            s
        }
    };
    emit(&args.output, &text)?;
    if report.valid {
        Ok(())
    } else {
        Err(Failure::Negative(describe_invalid(&report)))
    }
}

/// Parses `a:b:n` into `n` evenly spaced values from `a` to `b`.
fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Usage(format!("bad grid '{spec}', expected a:b:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let num = |s: &str| -> Result<f64, Error> {
        match s.trim() {
            "pi" => Ok(std::f64::consts::PI),
            t => t.parse().map_err(|_| bad()),
        }
    };
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()),
    }
}

#[derive(Serialize)]
struct CovRow {
    rho: f64,
    lag: f64,
    i: usize,
    j: usize,
    value: f64,
    tail_bound: f64,
}

fn trunc_for(model: &Model, trunc: Option<usize>) -> usize {
    trunc.unwrap_or_else(|| model.max_degree())
}

fn cmd_eval_cov(args: &EvalArgs) -> CmdResult {
    let model = read_model(&args.model)?;
    require_valid(&model)?;
    let grid = parse_grid(&args.rho_grid)?;
    let trunc = trunc_for(&model, args.trunc);
    let bound = truncation_bound(&model, trunc);
    let m = model.dim();
    let mut rows = Vec::with_capacity(grid.len() * args.lags.len() * m * m);
    for &rho in &grid {
        for &lag in &args.lags {
            let c = eval_cov(&model, rho, lag, trunc)?;
            for i in 0..m {
                for j in 0..m {
                    rows.push(CovRow { rho, lag, i, j, value: c[(i, j)], tail_bound: bound });
                }
            }
        }
    }
    let text = match args.output.format {
        Format::Json => to_json(&rows),
        Format::Csv => rows.iter().fold(String::from("rho,lag,component_i,component_j,value,tail_bound\n"), |s, r| {
            s + &format!("{},{},{},{},{},{}\n", r.rho, r.lag, r.i, r.j, r.value, r.tail_bound)
        }),
    };
    emit(&args.output, &text)
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let model = read_model(&args.model)?;
    if let Some(s) = &args.space {
        let requested: SpaceParams = s.parse()?;
        if &requested != model.space() {
            return Err(Error::Usage(format!("--space {requested} does not match the model space {}", model.space())).into());
        }
    }
    let space = model.space().clone();
    // Fail on geometry before touching the point specifier.
    space.base_point()?;
    let points = points::resolve(&args.points, &space, args.seed)?;
    let trunc = trunc_for(&model, args.trunc);
    let times = match (&model, &args.times) {
        (Model::Spatial(_), Some(_)) => {
            return Err(Error::Usage("--times applies to spatio-temporal models only".into()).into())
        }
        (_, t) => t.clone(),
    };
    let realization = Simulator::new(&model, points, times, trunc)?.run(args.seed)?;
    write_realization(&realization, &args.out)?;
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> CmdResult {
    let spaces = match &args.space {
        Some(list) => list.iter().map(|s| s.parse()).collect::<Result<Vec<SpaceParams>, Error>>()?,
        None => DEFAULT_MC_SPACES.iter().map(|s| s.parse()).collect::<Result<Vec<SpaceParams>, Error>>()?,
    };
    let opts = CheckOptions {
        seed: args.seed,
        replicates: args.replicates,
        spaces,
        a_scale: args.perturb_a,
        ..CheckOptions::default()
    };
    let report = run_checks(&opts)?;
    let text = match args.output.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
            report.records.iter().fold(String::from("name,reference,target,estimate,se,z,tolerance,pass\n"), |s, r| {
                s + &format!(
                    "\"{}\",\"{}\",{},{},{},{},{},{}\n",
                    r.name,
                    r.reference,
                    r.target,
                    r.estimate,
                    opt(r.se),
                    opt(r.z),
                    opt(r.tolerance),
                    r.pass
                )
            })
        }
    };
    emit(&args.output, &text)?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|r| r.name.as_str()).take(5).collect();
        Err(Failure::Negative(format!(
            "{} check(s) failed, including: {}",
            report.failures().count(),
            names.join("; ")
        )))
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    n: usize,
    dim: f64,
    i: usize,
    j: usize,
    coefficient: f64,
    spectrum: f64,
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    let model = read_model(&args.model)?;
    let Model::Spatial(spatial) = &model else {
        return Err(Error::Usage("the angular power spectrum is defined for spatial models".into()).into());
    };
    let m = spatial.dim();
    let mut rows = Vec::new();
    for n in 0..=spatial.max_degree() {
        let c = angular_power_spectrum(spatial, n)?;
        let b = &spatial.coeffs()[n];
        let dim = spatial.space().dim_eigenspace(n);
        for i in 0..m {
            for j in 0..m {
                rows.push(SpectrumRow { n, dim, i, j, coefficient: b[(i, j)], spectrum: c[(i, j)] });
            }
        }
    }
    let text = match args.output.format {
        Format::Json => to_json(&rows),
        Format::Csv => rows.iter().fold(String::from("n,dim,component_i,component_j,coefficient,spectrum\n"), |s, r| {
            s + &format!("{},{},{},{},{},{}\n", r.n, r.dim, r.i, r.j, r.coefficient, r.spectrum)
        }),
    };
    emit(&args.output, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::EvalCov(a) => cmd_eval_cov(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Check(a) => cmd_check(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
