//! Command-line surface: `compactify`, `reduce`, `compare`, `split`, `verify`.
//!
//! Exit codes: 0 success, 1 verification failed, 2 domain rejection,
//! 3 no convergence, 4 usage or schema error.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bridge::{
    boundary_limit, class_distance, classes_equal, xi, ConvergenceOptions, GramClass, SatakePoint,
};
use crate::error::Error;
use crate::field::Rational;
use crate::harness::{run_suite, Mutations, SUITES};
use crate::io;
use crate::lattices::{phi, LengthFunction, Order, ProjectiveLengthClass};
use crate::octo::oct_phi;
use crate::scalars::Algebra;
use crate::strata::{detect_splitting, psi_sigma, splits_along_by_probes, SPLIT_TOL};
use crate::symplectic::{is_autodual_for, is_unimodular, standard_j, symplectic_reduce, FormB};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "marklat",
    version,
    about = "Marked lattices, length functions and their compactification"
)]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Input JSON document (default: stdin).
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Comparison or convergence tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Limit class, rank and splittings of a degenerating family.
    Compactify(IoArgs),
    /// Exact symplectic reduction of an autodual lattice.
    Reduce(IoArgs),
    /// Equality of two projective length classes.
    Compare(IoArgs),
    /// Splitting detection or assembly of a length function.
    Split(IoArgs),
    /// Seeded property suites.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        mutate: Option<Mutation>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Mutation {
    EtaSign,
}

/// Outcome of a command: the report to write and the exit code.
struct Outcome {
    report: Value,
    code: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self {
            report,
            code: EXIT_OK,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        Error::Schema(_) => EXIT_USAGE,
        _ => EXIT_REJECTED,
    }
}

fn error_report(e: &Error) -> Value {
    match e {
        Error::NoConvergence {
            step,
            last,
            previous,
        } => json!({
            "status": "no-convergence",
            "error": e.to_string(),
            "step": step,
            "last": io::matrix_json(last),
            "previous": io::matrix_json(previous),
        }),
        _ => json!({"status": "error", "error": e.to_string()}),
    }
}

fn read_input(path: &Option<PathBuf>) -> crate::Result<Value> {
    let text = match path {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| Error::Schema(format!("{}: {e}", p.display())))?
        }
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Schema(format!("stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("malformed JSON: {e}")))
}

fn write_output(path: &Option<PathBuf>, report: &Value) -> std::io::Result<()> {
    let text = io::to_string(report);
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn compactify(doc: &Value, tol: Option<f64>) -> crate::Result<Value> {
    let family = io::parse_family(doc.get("family").unwrap_or(doc))?;
    let mut opts = ConvergenceOptions::default();
    if let Some(t) = tol {
        opts.tol = t;
    }
    if let Some(w) = doc.get("window") {
        opts.window = io::usize_of(w, "window")?;
    }
    let lim = boundary_limit(&family, opts)?;
    let gram = lim.limit.matrix();
    let mut report = json!({
        "status": "ok",
        "limit": io::matrix_json(gram),
        "rank": lim.rank,
        "size": gram.size(),
        "interior": lim.rank == gram.size(),
        "steps": lim.steps,
    });
    if let Some(cands) = doc.get("candidates") {
        let cands = cands
            .as_array()
            .ok_or_else(|| Error::Schema("candidates must be an array".into()))?
            .iter()
            .map(io::parse_splitting)
            .collect::<crate::Result<Vec<_>>>()?;
        let found = detect_splitting(&LengthFunction::new(gram.clone()), &cands, SPLIT_TOL)?;
        report["splittings"] = json!({"accepted": found.accepted, "finest": found.finest});
    }
    Ok(report)
}

fn reduce(doc: &Value) -> crate::Result<Value> {
    match doc.get("form") {
        None => {}
        Some(Value::String(s)) if s == "symplectic-standard" => {}
        Some(form) => return reduce_general(doc, form),
    }
    let lattice = io::parse_symplectic(doc)?;
    let red = symplectic_reduce(&lattice)?;
    let j = standard_j::<Rational>(lattice.genus());
    let symplectic = red.c.transpose().matmul(&j).matmul(&red.c) == j;
    let unimodular = is_unimodular(&red.ca);
    Ok(json!({
        "status": "ok",
        "g": lattice.genus(),
        "C": io::dense_json(&red.c),
        "U": io::dense_json(&red.u),
        "CA": io::dense_json(&red.ca),
        "verification": {
            "CtJC_equals_J": symplectic,
            "CA_integral_unimodular": unimodular,
            "CA_equals_U_inverse": red.ca.matmul(&red.u) == crate::dense::Dense::identity(2 * lattice.genus()),
        },
    }))
}

/// Autoduality of `A 𝒪^m` for an explicit form `J` over an order.
fn reduce_general(doc: &Value, form: &Value) -> crate::Result<Value> {
    let order = match doc.get("order") {
        Some(o) => io::parse_order(o)?,
        None => Order::named("Z")?,
    };
    let form = FormB::new(io::parse_matrix(form)?, &order)?;
    let a = io::parse_matrix(
        doc.get("A")
            .ok_or_else(|| Error::Schema("missing field \"A\"".into()))?,
    )?;
    if !is_autodual_for(&a, &form, &order)? {
        return Err(Error::NotAutodual);
    }
    Ok(json!({"status": "ok", "autodual": true, "order": order.name()}))
}

fn class_of(doc: &Value, tol: f64) -> crate::Result<Box<dyn GramClass>> {
    if let Some(l) = doc.get("lattice") {
        return Ok(Box::new(phi(&io::parse_lattice(l)?)?));
    }
    if let Some(a) = doc.get("satake") {
        let point = SatakePoint::new(&io::parse_matrix_f64(a)?)?;
        return Ok(Box::new(xi(&point)?));
    }
    if let Some(l) = doc.get("length") {
        return Ok(Box::new(ProjectiveLengthClass::from_length(
            &io::parse_length(l, tol)?,
        )?));
    }
    if let Some(o) = doc.get("octo") {
        return Ok(Box::new(oct_phi(&io::parse_octo(o)?.to_matrix())?));
    }
    Err(Error::Schema(
        "expected one of lattice, satake, length, octo".into(),
    ))
}

fn compare(doc: &Value, tol: Option<f64>) -> crate::Result<Value> {
    let tol = tol.unwrap_or(1e-9);
    let side = |key: &str| {
        doc.get(key)
            .ok_or_else(|| Error::Schema(format!("missing field {key:?}")))
            .and_then(|d| class_of(d, tol))
    };
    let (x, y) = (side("left")?, side("right")?);
    let equal = classes_equal(x.as_ref(), y.as_ref(), tol)?;
    Ok(json!({
        "status": "ok",
        "equal": equal,
        "distance": class_distance(x.as_ref(), y.as_ref()),
        "left": io::matrix_json(x.normalized_gram()),
        "right": io::matrix_json(y.normalized_gram()),
    }))
}

fn split(doc: &Value, tol: Option<f64>) -> crate::Result<Value> {
    let tol = tol.unwrap_or(SPLIT_TOL);
    if let Some(s) = doc.get("splitting") {
        let s = io::parse_splitting(s)?;
        let grams = doc
            .get("blocks")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("assembly needs \"blocks\": [matrix]".into()))?
            .iter()
            .map(io::parse_matrix_f64)
            .collect::<crate::Result<Vec<_>>>()?;
        let l = psi_sigma(&s, &grams)?;
        return Ok(json!({
            "status": "ok",
            "gram": io::matrix_json(l.gram()),
            "splits": splits_along_by_probes(&l, &s, tol)?,
        }));
    }
    let l = io::parse_length(
        doc.get("length")
            .ok_or_else(|| Error::Schema("missing field \"length\"".into()))?,
        tol,
    )?;
    if l.algebra() != Algebra::R {
        return Err(Error::TagMismatch {
            left: Algebra::R,
            right: l.algebra(),
        });
    }
    let cands = doc
        .get("candidates")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Schema("missing field \"candidates\"".into()))?
        .iter()
        .map(io::parse_splitting)
        .collect::<crate::Result<Vec<_>>>()?;
    let found = detect_splitting(&l, &cands, tol)?;
    Ok(json!({
        "status": "ok",
        "accepted": found.accepted,
        "finest": found.finest,
        "candidates": cands.iter().map(io::splitting_json).collect::<Vec<_>>(),
    }))
}

fn run_document(
    args: &IoArgs,
    f: impl FnOnce(&Value, Option<f64>) -> crate::Result<Value>,
) -> Outcome {
    let result = read_input(&args.input).and_then(|doc| f(&doc, args.tolerance));
    match result {
        Ok(report) => Outcome::ok(report),
        Err(e) => {
            eprintln!("error: {e}");
            Outcome {
                report: error_report(&e),
                code: exit_code(&e),
            }
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    let (outcome, out) = match &cli.command {
        Command::Compactify(a) => (run_document(a, compactify), &a.out),
        Command::Reduce(a) => (run_document(a, |d, _| reduce(d)), &a.out),
        Command::Compare(a) => (run_document(a, compare), &a.out),
        Command::Split(a) => (run_document(a, split), &a.out),
        Command::Verify {
            suite,
            seed,
            trials,
            out,
            mutate,
        } => {
            let mutations = Mutations {
                eta_sign: matches!(mutate, Some(Mutation::EtaSign)),
            };
            let report =
                run_suite(suite, *seed, *trials, mutations).expect("suite validated by the parser");
            let code = if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            };
            let report = serde_json::to_value(&report).expect("report serializes");
            (Outcome { report, code }, out)
        }
    };
    if let Err(e) = write_output(out, &outcome.report) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_bad_usage() {
        assert_eq!(run(["marklat", "--help"]), EXIT_OK);
        assert_eq!(run(["marklat", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["marklat", "verify", "nonsense"]), EXIT_USAGE);
    }

    #[test]
    fn reduce_reports() {
        let r = reduce(&json!({"g": 1, "A": [[2, 0], [0, [1, 2]]]})).unwrap();
        assert_eq!(r["C"], json!([[[1, 2], 0], [0, 2]]));
        let e = reduce(&json!({"g": 1, "A": [[2, 0], [0, 1]]})).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_REJECTED);
        assert!(e.to_string().contains("not autodual"));
    }

    #[test]
    fn compactify_reports() {
        let doc = json!({"kind": "diag-power", "base": [1, 1], "exponents": [1, -1], "t": [100, 1000, 10000, 100000]});
        let r = compactify(&doc, None).unwrap();
        assert_eq!(r["rank"], 1);
        let osc = json!({"kind": "explicit", "samples": [
            {"algebra": "R", "m": 2, "entries": [2, 0, 0, [1, 2]]},
            {"algebra": "R", "m": 2, "entries": [[1, 2], 0, 0, 2]},
            {"algebra": "R", "m": 2, "entries": [2, 0, 0, [1, 2]]},
            {"algebra": "R", "m": 2, "entries": [[1, 2], 0, 0, 2]}
        ]});
        let e = compactify(&osc, None).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_NO_CONVERGENCE);
        assert_eq!(error_report(&e)["status"], "no-convergence");
    }
}
