//! `vecstoch`: JSON-in, JSON-out front end for the library.
//!
//! Exit status: 0 when the answer is a certificate (or a plain computation
//! succeeded), 1 for an honest negative answer (infeasible, not certified,
//! search failed), 2 for malformed input or flags.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use vecstoch::{
    check_feasibility, construct_full, construct_nminus1, dims, is_isometry, nu, sample_birkhoff,
    sample_isometry, sample_sinkhorn, scan, search_fixed_d, BistochasticMatrix, Error, Field, IsometryReport,
    Mode, SearchConfig, VectorEntryMatrix, Verdict, DEFAULT_TOL,
};

#[derive(Parser)]
#[command(name = "vecstoch", version, about = "Vector-entry orthostochastic matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Squared-norm matrix ν(V) of an isometry.
    Nu {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Independently check a matrix or a certificate emitted by another command.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Target matrix the certificate should reproduce.
        #[arg(long)]
        p: Option<PathBuf>,
        /// Bound on the isometry residual.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Bound on max |ν(V) − P| when --p is given; row sums of ν(V) may
        /// deviate from 1 by n times this.
        #[arg(long, default_value_t = 1e-6)]
        nu_tol: f64,
    },
    /// Diagonal feasibility report for the (n−1) construction (odd n).
    Feasible {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Real (n−1)-dimensional certificate (odd n).
    Construct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Weighted)]
        mode: ModeArg,
    },
    /// The universal certificate with d ≥ n.
    ConstructFull {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "R")]
        field: Field,
        #[arg(long)]
        d: usize,
    },
    /// Dimensions of the isometry set and of its double quotient.
    Dims {
        #[arg(long)]
        field: Field,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Seeded random bistochastic matrix or isometry.
    Sample {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Number of permutations mixed by `birkhoff` (default n).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "R")]
        field: Field,
        #[arg(long)]
        seed: u64,
    },
    /// Numerical search for a certificate at fixed d.
    Search {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "R")]
        field: Field,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Success tolerance on max |ν(V) − P|.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Histogram of estimated minimal d over sampled matrices.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "R")]
        field: Field,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(alias = "paper_literal", alias = "paper-literal")]
    Paper,
    Weighted,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::PaperLiteral,
            ModeArg::Weighted => Mode::Weighted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sinkhorn,
    Birkhoff,
    Isometry,
}

/// Why a command produced no result. Anything wrong with an input file is
/// the caller's mistake, whatever the underlying error code.
enum Failure {
    Input(Error),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

/// What a command prints, and whether it counts as a positive answer.
struct Outcome {
    json: String,
    ok: bool,
}

impl Outcome {
    fn ok<T: Serialize>(value: &T) -> Result<Self, Error> {
        Self::judged(value, true)
    }

    fn judged<T: Serialize>(value: &T, ok: bool) -> Result<Self, Error> {
        Ok(Outcome { json: serde_json::to_string_pretty(value)?, ok })
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    read_json_inner(path).map_err(Failure::Input)
}

fn read_json_inner(path: &Path) -> Result<Value, Error> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    Ok(serde_json::from_str(&text)?)
}

fn read_bistochastic(path: &Path) -> Result<BistochasticMatrix, Failure> {
    let value = read_json(path)?;
    bistochastic_from(value).map_err(Failure::Input)
}

/// `{"n", "rows"}` or a bare array of rows.
fn bistochastic_from(mut value: Value) -> Result<BistochasticMatrix, Error> {
    let n = value.get("n").map(|n| serde_json::from_value::<usize>(n.clone())).transpose()?;
    if let Some(rows) = value.get_mut("rows") {
        value = rows.take();
    }
    let rows: Vec<Vec<f64>> = serde_json::from_value(value)?;
    if n.is_some_and(|n| n != rows.len()) {
        return Err(Error::DimensionMismatch(format!("n = {n:?} but {} rows given", rows.len())));
    }
    BistochasticMatrix::new(rows)
}

/// A matrix `V` together with any claim its producer made about it.
struct Certificate {
    v: VectorEntryMatrix,
    claimed: Option<bool>,
}

/// Accepts a bare `V`, a construction result (`V`, `certified`), a search
/// result (`best_v`, `success`) or an upper bound (`certificate`).
fn read_certificate(path: &Path) -> Result<Certificate, Failure> {
    let value = read_json(path)?;
    certificate_from(value).map_err(Failure::Input)
}

fn certificate_from(mut value: Value) -> Result<Certificate, Error> {
    for (key, flag) in [("V", "certified"), ("best_v", "success"), ("certificate", "")] {
        if let Some(obj) = value.as_object_mut() {
            if let Some(inner) = obj.remove(key) {
                let claimed = obj.get(flag).and_then(Value::as_bool);
                return Ok(Certificate { v: serde_json::from_value(inner)?, claimed });
            }
        }
    }
    Ok(Certificate { v: serde_json::from_value(value)?, claimed: None })
}

#[derive(Serialize)]
struct VerifyReport {
    ok: bool,
    tol: f64,
    isometry: IsometryReport,
    nu: Option<BistochasticMatrix>,
    nu_error: Option<Value>,
    nu_residual: Option<f64>,
    nu_tol: Option<f64>,
    claimed_success: Option<bool>,
}

fn verify(input: &Path, p: Option<&Path>, tol: f64, nu_tol: f64) -> Result<Outcome, Failure> {
    let cert = read_certificate(input)?;
    let target = p.map(read_bistochastic).transpose()?;
    if let Some(t) = &target {
        if t.n() != cert.v.n() {
            return Err(Failure::Input(Error::DimensionMismatch(format!(
                "V is {0}x{0} but P is {1}x{1}",
                cert.v.n(),
                t.n()
            ))));
        }
    }
    let isometry = is_isometry(&cert.v, tol);
    // an entrywise ν-residual of nu_tol moves row sums by up to n·nu_tol
    let n = cert.v.n();
    let row_tol = n as f64 * nu_tol;
    let (nu_matrix, nu_error) = match BistochasticMatrix::from_flat(n, cert.v.squared_norms(), row_tol) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_json())),
    };
    let nu_residual = target.as_ref().map(|t| t.max_abs_diff(&cert.v.squared_norms()));
    let ok = isometry.ok
        && nu_matrix.is_some()
        && nu_residual.is_none_or(|r| r <= nu_tol)
        && cert.claimed != Some(false);
    let report = VerifyReport {
        ok,
        tol,
        isometry,
        nu: nu_matrix,
        nu_error,
        nu_residual,
        nu_tol: target.map(|_| nu_tol),
        claimed_success: cert.claimed,
    };
    Ok(Outcome::judged(&report, ok)?)
}

fn run(command: Command) -> Result<Outcome, Failure> {
    let out = match command {
        Command::Nu { input, tol } => {
            let v: VectorEntryMatrix =
                serde_json::from_value(read_json(&input)?).map_err(|e| Failure::Input(e.into()))?;
            Outcome::ok(&nu(&v, tol)?)
        }
        Command::Verify { input, p, tol, nu_tol } => return verify(&input, p.as_deref(), tol, nu_tol),
        Command::Feasible { input } => {
            let rep = check_feasibility(&read_bistochastic(&input)?)?;
            let ok = rep.verdict != Verdict::Infeasible;
            Outcome::judged(&rep, ok)
        }
        Command::Construct { input, mode } => {
            let res = construct_nminus1(&read_bistochastic(&input)?, mode.into())?;
            Outcome::judged(&res, res.certified)
        }
        Command::ConstructFull { input, field, d } => {
            Outcome::ok(&construct_full(&read_bistochastic(&input)?, field, d)?)
        }
        Command::Dims { field, n, d } => Outcome::ok(&dims(field, n, d)?),
        Command::Sample { kind, n, d, k, field, seed } => match kind {
            Kind::Sinkhorn => Outcome::ok(&sample_sinkhorn(n, seed)?),
            Kind::Birkhoff => Outcome::ok(&sample_birkhoff(n, k.unwrap_or(n), seed)?),
            Kind::Isometry => Outcome::ok(&sample_isometry(field, n, d, seed)?),
        },
        Command::Search { input, field, d, restarts, max_iters, seed, tol } => {
            let p = read_bistochastic(&input)?;
            let mut cfg = SearchConfig::new(field, p.n(), d, seed);
            if let Some(r) = restarts {
                cfg.restarts = r;
            }
            if let Some(m) = max_iters {
                cfg.max_iters = m;
            }
            if let Some(t) = tol {
                cfg.success_tol = t;
            }
            let res = search_fixed_d(&p, &cfg)?;
            Outcome::judged(&res, res.success)
        }
        Command::Scan { n, field, samples, seed } => Outcome::ok(&scan(field, n, samples, seed)?),
    };
    Ok(out?)
}

/// Prints one JSON document; a closed pipe downstream is not an error here.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn emit_error(e: &Error) {
    emit(&serde_json::to_string_pretty(&e.to_json()).expect("error records serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            emit_error(&Error::InvalidArgument(e.kind().to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            emit(&out.json);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            emit_error(&e);
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            emit_error(&e);
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
