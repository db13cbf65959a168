//! `dirsub`: directed subdifferentials from the command line.
//!
//! Exit status: 0 success, 1 usage/parse/document/I/O error, 2 evaluation
//! error, 3 dimension or grid error, 4 inconsistent inputs, 5 a route
//! comparison that did not pass.

mod builtin;
mod viz;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};

use dirsub_core::engine::{compare_routes, directed_subdifferential, RouteInputs};
use dirsub_core::expr::{max_variable_index, parse};
use dirsub_core::{json, DirectedSet, Error, ErrorKind, Expr, GridSpec, Polytope, SphereGrid};

use builtin::Builtin;

#[derive(Parser)]
#[command(name = "dirsub", version, about = "Directed subdifferentials of piecewise smooth functions", disable_help_flag = true)]
struct Cli {
    #[arg(long, action = ArgAction::Help, help = "Print help")]
    help: Option<bool>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the directed subdifferential of f at x and its M-certificate.
    #[command(disable_help_flag = true)]
    Subdiff(SubdiffArgs),
    /// Compute the same directed subdifferential along several routes and compare.
    #[command(disable_help_flag = true)]
    Compare(CompareArgs),
    /// Write the planar directed subdifferential as CSV and SVG.
    #[command(disable_help_flag = true)]
    Viz(VizArgs),
}

#[derive(Args)]
struct Target {
    #[arg(long, action = ArgAction::Help, help = "Print help")]
    help: Option<bool>,
    /// Function of x1..xn, e.g. "max(abs(x1), x2) - 0.5*x1".
    #[arg(short = 'f', long = "function", conflicts_with = "example")]
    f: Option<String>,
    /// Point, comma separated (default: the origin).
    #[arg(short = 'x', long = "point", value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Dimension (default: inferred from the point or the variables used).
    #[arg(short = 'n', long = "dim")]
    n: Option<usize>,
    /// Number of directions on the circle (a multiple of 8).
    #[arg(short = 'K', long = "resolution", default_value_t = 360)]
    k: usize,
    /// Polar and azimuthal ring counts of the sphere grid in R³.
    #[arg(long = "grid3", value_name = "P,A", value_parser = parse_pair)]
    grid3: Option<(usize, usize)>,
    /// Built-in example, evaluated at the origin of R².
    #[arg(long, value_enum)]
    example: Option<Builtin>,
    /// Number of kinks in the non-qd example.
    #[arg(long = "N", value_name = "N", default_value_t = 5)]
    terms: usize,
    /// Output path, or "-" for standard output.
    #[arg(short = 'o', long = "output", default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SubdiffArgs {
    #[command(flatten)]
    target: Target,
    /// Where to write the certificate (default: standard error).
    #[arg(long = "cert")]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    target: Target,
    /// Convex part g of a DC decomposition f = g - h.
    #[arg(short = 'g', requires = "h", conflicts_with = "example")]
    g: Option<String>,
    /// Convex part h of a DC decomposition f = g - h.
    #[arg(short = 'h', requires = "g")]
    h: Option<String>,
    /// Subdifferential polytope (JSON `{"n": .., "vertices": [..]}`).
    #[arg(long, requires = "upper")]
    lower: Option<PathBuf>,
    /// Superdifferential polytope (JSON).
    #[arg(long, requires = "lower")]
    upper: Option<PathBuf>,
    /// Largest accepted componentwise discrepancy.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct VizArgs {
    #[command(flatten)]
    target: Target,
    /// Previously computed directed set (JSON) to draw instead of computing one.
    #[arg(long, conflicts_with_all = ["f", "example"])]
    input: Option<PathBuf>,
}

fn parse_pair(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text.split_once(',').ok_or("expected two counts separated by a comma")?;
    let a = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Io(String),
    Core(Error),
    Rejected,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Core(e) => match e.kind() {
                ErrorKind::Parse | ErrorKind::Document => 1,
                ErrorKind::Evaluation => 2,
                ErrorKind::Dimension => 3,
                ErrorKind::Inconsistent => 4,
            },
            Failure::Rejected => 5,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &str, text: &str) -> Outcome<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(format!("stdout: {e}")))
    } else {
        fs::write(path, text).map_err(|e| Failure::Io(format!("{path}: {e}")))
    }
}

/// Function text and optional DC pair selected by `-f` or `--example`.
struct Problem {
    f: Option<String>,
    dc: Option<(String, String)>,
}

fn problem(target: &Target) -> Outcome<Problem> {
    match target.example {
        Some(example) => {
            if target.terms == 0 {
                return Err(Failure::Usage("--N must be at least 1".into()));
            }
            let b = example.function(target.terms);
            Ok(Problem { f: Some(b.f), dc: Some((b.g, b.h)) })
        }
        None => Ok(Problem { f: target.f.clone(), dc: None }),
    }
}

/// Dimension from `-n`, else the larger of the point length and the
/// largest variable index.
fn dimension<'a>(target: &Target, texts: impl IntoIterator<Item = &'a str>, fallback: Option<usize>) -> usize {
    if let Some(n) = target.n {
        return n;
    }
    if target.example.is_some() {
        return 2;
    }
    let used = texts.into_iter().filter_map(max_variable_index).max();
    match (&target.x, used) {
        (Some(x), Some(used)) => x.len().max(used),
        (Some(x), None) => x.len(),
        (None, used) => used.or(fallback).unwrap_or(1),
    }
}

fn point(target: &Target, n: usize) -> Outcome<Vec<f64>> {
    match (&target.x, target.example) {
        (Some(x), _) if x.len() != n => Err(Error::DimensionMismatch { expected: n, found: x.len() }.into()),
        (Some(x), None) => Ok(x.clone()),
        (Some(x), Some(_)) if x.iter().any(|&v| v != 0.0) => {
            Err(Failure::Usage("built-in examples are evaluated at the origin".into()))
        }
        _ => Ok(vec![0.0; n]),
    }
}

fn grid(target: &Target, n: usize) -> Outcome<Arc<SphereGrid>> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(0).into());
    }
    Ok(SphereGrid::new(GridSpec::for_dimension(n, target.k, target.grid3)?)?)
}

fn subdiff(args: &SubdiffArgs) -> Outcome<()> {
    let t = &args.target;
    let p = problem(t)?;
    let text = p.f.ok_or_else(|| Failure::Usage("a function is required (-f or --example)".into()))?;
    let n = dimension(t, [text.as_str()], None);
    let x = point(t, n)?;
    let grid = grid(t, n)?;
    let f = parse(&text, n)?;
    let result = directed_subdifferential(&f, &x, &grid)?;
    write(&t.output, &(result.value.to_json()? + "\n"))?;
    let cert = json::to_string(&result.certificate)? + "\n";
    match &args.cert {
        Some(path) => fs::write(path, cert).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            eprint!("{cert}");
            Ok(())
        }
    }
}

fn compare(args: &CompareArgs) -> Outcome<()> {
    let t = &args.target;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let mut p = problem(t)?;
    if let (Some(g), Some(h)) = (&args.g, &args.h) {
        p.dc = Some((g.clone(), h.clone()));
    }
    let qd = match (&args.lower, &args.upper) {
        (Some(lower), Some(upper)) => Some((Polytope::from_json(&read(lower)?)?, Polytope::from_json(&read(upper)?)?)),
        _ => None,
    };
    let texts: Vec<&str> = p.f.iter().map(String::as_str).chain(p.dc.iter().flat_map(|(g, h)| [g.as_str(), h.as_str()])).collect();
    let n = dimension(t, texts, qd.as_ref().map(|(lower, _)| lower.dim()));
    let x = point(t, n)?;
    let grid = grid(t, n)?;
    let inputs = RouteInputs {
        f: p.f.as_deref().map(|s| parse(s, n)).transpose()?,
        dc: match &p.dc {
            Some((g, h)) => Some((parse(g, n)?, parse(h, n)?)),
            None => None,
        },
        qd,
    };
    let report = compare_routes(&inputs, &x, &grid, args.tol)?;
    write(&t.output, &(json::to_string(&report)? + "\n"))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn viz(args: &VizArgs) -> Outcome<()> {
    let t = &args.target;
    let value = match &args.input {
        Some(path) => DirectedSet::from_json(&read(path)?)?,
        None => {
            let p = problem(t)?;
            let text = p.f.ok_or_else(|| Failure::Usage("a function or --input is required".into()))?;
            let n = dimension(t, [text.as_str()], None);
            let x = point(t, n)?;
            let grid = grid(t, n)?;
            let f: Expr = parse(&text, n)?;
            directed_subdifferential(&f, &x, &grid)?.value
        }
    };
    let csv = viz::csv(&value)?;
    if t.output == "-" {
        return write("-", &csv);
    }
    let svg = viz::svg(&value)?;
    write(&format!("{}.csv", t.output), &csv)?;
    write(&format!("{}.svg", t.output), &svg)
}

fn configure_threads() -> Outcome<()> {
    let Ok(value) = std::env::var("DIRSUB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("DIRSUB_THREADS must be a nonnegative integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Outcome<()> {
    configure_threads()?;
    match &cli.command {
        Command::Subdiff(args) => subdiff(args),
        Command::Compare(args) => compare(args),
        Command::Viz(args) => viz(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) | Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Rejected => eprintln!("routes disagree beyond the tolerance"),
            }
            ExitCode::from(failure.code())
        }
    }
}
