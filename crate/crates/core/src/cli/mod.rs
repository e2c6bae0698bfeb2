//! Command-line front end.
//!
//! Exit codes: 0 success or accept, 1 reject or not positive, 2 usage or
//! input error, 3 search budget exhausted.

pub mod parser;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;

use crate::algebra::PhaseContext;
use crate::certificate::{self, CertificateFile, Refutation, SearchBudget, VerifyReport};
use crate::error::Error;
use crate::lattice::{orbit_rep, symplectic_normal_form, Int, IntMatrix, LatticeVector, SkewForm};
use crate::matrix::{is_psd, is_psd_exact, ExactPsdVerdict, HermitianMatrix, PsdVerdict};
use crate::scalar::GaussianRational;
use crate::states::{eval, eval_exact, gram, gram_exact, StateCandidate};

pub use parser::{parse_element, Expr, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nctorus", version, about = "Computations in algebraic noncommutative tori")]
struct Cli {
    /// Deformation parameter h in ζ = e^{ih}.
    #[arg(long = "h", global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    h: f64,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Exact arithmetic where available.
    #[arg(long, global = true)]
    exact: bool,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symplectic normal form of an integer skew form, {"matrix": [[..]]}.
    Nf { form: String },
    /// Orbit representative (0, gcd) and an SL(2,Z) witness.
    Orbit {
        #[arg(allow_negative_numbers = true)]
        n1: Int,
        #[arg(allow_negative_numbers = true)]
        n2: Int,
    },
    /// Evaluate a state on an algebra element.
    Eval {
        #[arg(long)]
        state: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Gram matrix of a state on a list of generators.
    Gram {
        #[arg(long)]
        state: String,
        #[arg(long)]
        gens: String,
    },
    /// Positivity test for a Hermitian matrix.
    Psd { matrix: String },
    /// Produce a refutation certificate for a state candidate.
    Refute {
        #[arg(long)]
        state: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Cap on Diophantine search iterations.
        #[arg(long, default_value_t = certificate::diophantine::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Independently check a certificate.
    Verify {
        #[arg(long)]
        state: String,
        #[arg(long)]
        cert: String,
    },
}

/// A usage or input problem, reported with exit code 2.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExhausted { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Inline JSON if the argument looks like JSON, otherwise a file path.
fn load(arg: &str) -> std::result::Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{arg}: {e}")))
    }
}

fn load_state(arg: &str) -> std::result::Result<StateCandidate, Failure> {
    StateCandidate::from_json(&load(arg)?).map_err(|e| Failure::usage(format!("state: {e}")))
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage(format!("{what}: {e}")))
}

fn context(cli: &Cli) -> std::result::Result<PhaseContext, Failure> {
    Ok(PhaseContext::genus_one(cli.h)?)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Nf { form } => cmd_nf(cli, form, out),
        Command::Orbit { n1, n2 } => cmd_orbit(cli, *n1, *n2, out),
        Command::Eval { state, expr } => cmd_eval(cli, state, expr, out),
        Command::Gram { state, gens } => cmd_gram(cli, state, gens, out),
        Command::Psd { matrix } => cmd_psd(cli, matrix, out),
        Command::Refute {
            state,
            output,
            budget,
        } => cmd_refute(cli, state, output.as_ref(), *budget, out),
        Command::Verify { state, cert } => cmd_verify(cli, state, cert, out),
    }
}

#[derive(Deserialize)]
struct FormFile {
    matrix: Vec<Vec<Int>>,
}

fn cmd_nf(cli: &Cli, form: &str, out: &mut dyn Write) -> CmdResult {
    let text = load(form)?;
    let rows = if text.trim_start().starts_with('[') {
        parse_json("form", &text)?
    } else {
        parse_json::<FormFile>("form", &text)?.matrix
    };
    let form = SkewForm::new(IntMatrix::from_rows(rows)?)?;
    let nf = symplectic_normal_form(&form)?;
    if cli.json {
        writeln!(out, "{}", json!({"divisors": nf.divisors, "basis_change": nf.basis_change.rows()}))?;
    } else {
        let divs: Vec<String> = nf.divisors.iter().map(Int::to_string).collect();
        writeln!(out, "divisors {}", divs.join(" "))?;
        writeln!(out, "U {}", nf.basis_change)?;
    }
    Ok(EXIT_OK)
}

fn cmd_orbit(cli: &Cli, n1: Int, n2: Int, out: &mut dyn Write) -> CmdResult {
    let (rep, theta) = orbit_rep(&LatticeVector::pair(n1, n2))?;
    if cli.json {
        writeln!(out, "{}", json!({"rep": rep.coords(), "theta": theta.matrix().rows()}))?;
    } else {
        writeln!(out, "rep {rep}")?;
        writeln!(out, "theta {}", theta.matrix())?;
    }
    Ok(EXIT_OK)
}

fn cmd_eval(cli: &Cli, state: &str, expr: &str, out: &mut dyn Write) -> CmdResult {
    let state = load_state(state)?;
    let ctx = context(cli)?;
    let ast = parse_element(expr, &ctx).map_err(|e| Failure::usage(format!("expression {e}")))?;
    let a = ast.eval(&ctx)?;
    if cli.exact {
        let v = eval_exact(&state, &a)?;
        if cli.json {
            writeln!(out, "{}", json!({"element": a.to_string(), "value": v.to_string()}))?;
        } else {
            writeln!(out, "{v}")?;
        }
    } else {
        let z = eval(&state, &a, &ctx)?;
        if cli.json {
            writeln!(out, "{}", json!({"element": a.to_string(), "value": [z.re, z.im]}))?;
        } else {
            writeln!(out, "{}", complex_text(z))?;
        }
    }
    Ok(EXIT_OK)
}

fn complex_text(z: Complex64) -> String {
    format!("{:.17e} {:+.17e}i", z.re, z.im)
}

fn cmd_gram(cli: &Cli, state: &str, gens: &str, out: &mut dyn Write) -> CmdResult {
    let state = load_state(state)?;
    let ctx = context(cli)?;
    let pairs: Vec<[Int; 2]> = parse_json("generators", &load(gens)?)?;
    let gens: Vec<LatticeVector> = pairs.iter().map(|[a, b]| LatticeVector::pair(*a, *b)).collect();
    if cli.exact {
        let h = gram_exact(&state, &gens, &ctx)?;
        let rows: Vec<Vec<String>> = h.rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        if cli.json {
            writeln!(out, "{}", json!({"matrix": rows}))?;
        } else {
            for r in rows {
                writeln!(out, "{}", r.join("\t"))?;
            }
        }
    } else {
        let h = gram(&state, &gens, &ctx)?;
        write_matrix(cli, &h, out)?;
    }
    Ok(EXIT_OK)
}

fn write_matrix(cli: &Cli, h: &HermitianMatrix, out: &mut dyn Write) -> std::io::Result<()> {
    let rows = h.rows();
    if cli.json {
        let m: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        writeln!(out, "{}", json!({"matrix": m}))
    } else {
        for r in rows {
            let cells: Vec<String> = r.iter().map(|z| complex_text(*z)).collect();
            writeln!(out, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

/// A matrix entry: a real number or `[re, im]`.
#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    Real(f64),
    Complex([f64; 2]),
}

impl Cell {
    fn complex(&self) -> Complex64 {
        match *self {
            Cell::Real(x) => Complex64::new(x, 0.0),
            Cell::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Wrapped { matrix: Vec<Vec<Cell>> },
    Bare(Vec<Vec<Cell>>),
}

fn cmd_psd(cli: &Cli, matrix: &str, out: &mut dyn Write) -> CmdResult {
    let rows = match parse_json::<MatrixFile>("matrix", &load(matrix)?)? {
        MatrixFile::Wrapped { matrix } | MatrixFile::Bare(matrix) => matrix,
    };
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(Cell::complex).collect()).collect();
    if cli.exact {
        let exact = rows
            .iter()
            .map(|r| r.iter().map(|&z| GaussianRational::from_complex(z)).collect())
            .collect::<crate::Result<Vec<Vec<_>>>>()?;
        let h = HermitianMatrix::from_rows(exact)?;
        return match is_psd_exact(&h)? {
            ExactPsdVerdict::Psd => {
                report_psd(cli, out, true, None, None)?;
                Ok(EXIT_OK)
            }
            ExactPsdVerdict::Witness { vector, value } => {
                let v: Vec<Complex64> = vector.iter().map(GaussianRational::to_complex).collect();
                report_psd(cli, out, false, Some(&v), Some(value.to_complex().re))?;
                Ok(EXIT_REJECT)
            }
        };
    }
    let h = HermitianMatrix::from_rows(rows)?;
    match is_psd(&h, cli.tol)? {
        PsdVerdict::Psd { min_eigenvalue } => {
            report_psd(cli, out, true, None, Some(min_eigenvalue))?;
            Ok(EXIT_OK)
        }
        PsdVerdict::Witness { vector, value } => {
            report_psd(cli, out, false, Some(&vector), Some(value))?;
            Ok(EXIT_REJECT)
        }
    }
}

fn report_psd(
    cli: &Cli,
    out: &mut dyn Write,
    psd: bool,
    witness: Option<&[Complex64]>,
    value: Option<f64>,
) -> std::io::Result<()> {
    let w: Option<Vec<[f64; 2]>> = witness.map(|v| v.iter().map(|z| [z.re, z.im]).collect());
    if cli.json {
        let key = if psd { "min_eigenvalue" } else { "value" };
        return writeln!(out, "{}", json!({"psd": psd, "witness": w, key: value}));
    }
    if psd {
        match value {
            Some(v) => writeln!(out, "PSD (min eigenvalue {v:e})"),
            None => writeln!(out, "PSD"),
        }
    } else {
        writeln!(out, "NOT PSD")?;
        if let Some(v) = value {
            writeln!(out, "value {v:.17e}")?;
        }
        if let Some(w) = witness {
            let cells: Vec<String> = w.iter().map(|z| complex_text(*z)).collect();
            writeln!(out, "witness {}", cells.join(", "))?;
        }
        Ok(())
    }
}

fn cmd_refute(
    cli: &Cli,
    state: &str,
    output: Option<&PathBuf>,
    budget: u64,
    out: &mut dyn Write,
) -> CmdResult {
    let state = load_state(state)?;
    let ctx = context(cli)?;
    let refutation = certificate::refute_with(&state, &ctx, SearchBudget { max_iterations: budget })?;
    let file = match refutation {
        Refutation::ConsistentWithTrace { orbits_checked } => {
            if cli.json {
                writeln!(out, "{}", json!({"consistent_with_trace": true, "orbits_checked": orbits_checked}))?;
            } else {
                let list: Vec<String> = orbits_checked.iter().map(ToString::to_string).collect();
                writeln!(out, "CONSISTENT WITH TRACE (orbits checked: {})", list.join(" "))?;
            }
            return Ok(EXIT_OK);
        }
        Refutation::Certificate(c) => CertificateFile::Full(c),
        Refutation::Minor(m) => CertificateFile::Minor(m),
    };
    let text = file.to_json();
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))?;
            let value = match &file {
                CertificateFile::Full(c) => c.value,
                CertificateFile::Minor(m) => m.value,
            };
            writeln!(out, "certificate written to {} (value {value:.17e})", path.display())?;
        }
        None => writeln!(out, "{text}")?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, state: &str, cert: &str, out: &mut dyn Write) -> CmdResult {
    let state = load_state(state)?;
    let ctx = context(cli)?;
    let file = CertificateFile::from_json(&load(cert)?).map_err(|e| Failure::usage(format!("certificate: {e}")))?;
    let report: VerifyReport = match &file {
        CertificateFile::Full(c) => certificate::verify(&state, c, &ctx),
        CertificateFile::Minor(m) => certificate::verify_minor(&state, m, &ctx),
    };
    if cli.json {
        let clauses: Vec<_> = report
            .clauses
            .iter()
            .map(|c| json!({"clause": c.clause.name(), "passed": c.passed, "detail": c.detail}))
            .collect();
        writeln!(
            out,
            "{}",
            json!({
                "accepted": report.accepted(),
                "failed_clause": report.failed_clause().map(|c| c.name()),
                "clauses": clauses,
            })
        )?;
    } else {
        writeln!(out, "{report}")?;
    }
    Ok(if report.accepted() { EXIT_OK } else { EXIT_REJECT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("nctorus").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn orbit_example() {
        let (code, out, _) = run_str(&["orbit", "6", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("rep (0,2)"), "{out}");
        assert!(out.contains("theta [[2,-3],[1,-1]]"), "{out}");
        let (_, out, _) = run_str(&["--json", "orbit", "-6", "4"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rep"], json!([0, 2]));
    }

    #[test]
    fn eval_and_gram() {
        let s = r#"{"orbit_values":{"1":0.5}}"#;
        let (code, out, _) = run_str(&["eval", "--state", s, "W[1,1] + 2*W[0,0]"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("2.5"), "{out}");
        let (_, out, _) = run_str(&["eval", "--exact", "--state", s, "-W[1,0]*W[0,1]"]);
        assert_eq!(out.trim(), "-1/2 z^1");
        let (code, out, _) = run_str(&["--json", "gram", "--state", s, "--gens", "[[0,0],[1,1]]"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["matrix"][0][1], json!([0.5, 0.0]));
    }

    #[test]
    fn psd_exit_codes() {
        assert_eq!(run_str(&["psd", "[[1,0.5],[0.5,1]]"]).0, 0);
        let (code, out, _) = run_str(&["psd", r#"{"matrix":[[1,2],[2,1]]}"#]);
        assert_eq!(code, 1);
        assert!(out.contains("NOT PSD"));
        assert_eq!(run_str(&["--exact", "psd", "[[1,2],[2,1]]"]).0, 1);
        assert_eq!(run_str(&["--exact", "psd", "[[1,[0,1]],[[0,-1],1]]"]).0, 0);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["eval", "--state", "{", "W[1,0]"]).0, EXIT_USAGE);
        let (code, _, err) = run_str(&["eval", "--state", "{\"orbit_values\":{}}", "W[1]"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("byte 0"), "{err}");
        assert_eq!(run_str(&["--h", "0", "orbit", "1", "2"]).0, 0);
        assert_eq!(run_str(&["--h", "0", "eval", "--state", "{\"orbit_values\":{}}", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn nf_command() {
        let (code, out, _) = run_str(&["nf", r#"{"matrix":[[0,2],[-2,0]]}"#]);
        assert_eq!(code, 0);
        assert!(out.contains("divisors 2"), "{out}");
        assert_eq!(run_str(&["nf", r#"{"matrix":[[0,0],[0,0]]}"#]).0, EXIT_USAGE);
        let (_, bare, _) = run_str(&["nf", "[[0,2],[-2,0]]"]);
        assert_eq!(bare, out);
    }

    #[test]
    fn budget_exit_code() {
        let (code, _, err) = run_str(&["refute", "--budget", "1", "--state", r#"{"orbit_values":{"1":0.5}}"#]);
        assert_eq!(code, EXIT_BUDGET, "{err}");
    }
}
