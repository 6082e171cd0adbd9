//! `orbidx`: star products, twisted traces, verification suites and index
//! evaluation from model files, with exact canonical output.
//!
//! Exit codes: 0 success, 1 a verification or oracle comparison failed,
//! 2 parse or schema error, 3 domain error, 4 unsupported parameters.

mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orbifold_index::cocycle::trace::{tr_gamma, TwistedTraceData};
use orbifold_index::expr::{parse_scalar, Expr, WeylAlgebra};
use orbifold_index::index::{self, gallery, lefschetz_oracle, OrbifoldModel};
use orbifold_index::weyl::{PairKind, WeylElement};
use orbifold_index::{CycloScalar, Error, ErrorKind, HbarSeries, Result};
use serde_json::{json, Value};

use suites::{Report, SuiteParams};

#[derive(Parser, Debug)]
#[command(name = "orbidx", version, about = "Exact computations for the orbifold algebraic index theorem")]
struct Cli {
    /// Cyclotomic level for random sample coefficients.
    #[arg(long, global = true, default_value_t = 1)]
    level: u32,
    /// Drop powers of h above this order in star products.
    #[arg(long, global = true)]
    order: Option<i32>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for verification suites (output does not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moyal product of the expressions, left to right.
    Star {
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    /// Twisted trace of an expression in z1, zb1, ... (or p, q) for the
    /// rotation with the given eigenvalues.
    Trace {
        expr: String,
        #[arg(long = "lambda", required = true, allow_hyphen_values = true)]
        lambdas: Vec<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Number of fixed pairs.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Normal eigenvalue, repeatable (default -1).
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambdas: Vec<String>,
        /// Rank of the matrix bundle.
        #[arg(long = "N", default_value_t = 1)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random samples.
        #[arg(long)]
        samples: Option<usize>,
        /// Polynomial degree bound of samples, or internal degree bound.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Evaluate the index of a model file.
    Index {
        model: PathBuf,
        /// The algebraic index as a Laurent polynomial in h (default).
        #[arg(long, conflicts_with = "kawasaki")]
        hbar: bool,
        /// The Kawasaki index.
        #[arg(long)]
        kawasaki: bool,
        /// Compare with the Lefschetz fixed-point sum of the model's action.
        #[arg(long)]
        oracle: bool,
    },
    /// Write the bundled model files into a directory.
    Gallery {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Cocycle,
    Trace,
    LocalRr,
    Homology,
}

/// What a command prints, and whether it counts as success.
struct Output {
    text: String,
    structured: Value,
    ok: bool,
}

/// Drops powers of `h` above `order`, rendering a trailing `O(h^{order+1})`
/// when anything was dropped.
fn render_truncated(a: &WeylElement, order: Option<i32>) -> String {
    let Some(cap) = order else { return a.to_string() };
    let mut out = WeylElement::zero(a.kinds());
    let mut dropped = false;
    for (m, c) in a.terms() {
        let mut kept = HbarSeries::zero();
        for (k, x) in c.terms() {
            if k <= cap {
                kept.add_term(k, x);
            } else {
                dropped = true;
            }
        }
        out.add_term(m.clone(), &kept);
    }
    let body = out.to_string();
    if !dropped {
        body
    } else if out.is_zero() {
        format!("O(h^{})", cap + 1)
    } else {
        format!("{body} + O(h^{})", cap + 1)
    }
}

fn cmd_star(exprs: &[String], order: Option<i32>) -> Result<Output> {
    let parsed = exprs.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>>>()?;
    let alg = WeylAlgebra::infer(&parsed, 0)?;
    let mut acc: Option<WeylElement> = None;
    for e in &parsed {
        let v = e.eval(&alg)?;
        acc = Some(match acc {
            None => v,
            Some(a) => a.star(&v)?,
        });
    }
    let result = render_truncated(&acc.expect("at least one expression"), order);
    Ok(Output { text: result.clone(), structured: json!({"command": "star", "result": result}), ok: true })
}

fn cmd_trace(expr: &str, lambdas: &[String]) -> Result<Output> {
    let lambdas = lambdas.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>()?;
    let data = TwistedTraceData::from_eigenvalues(lambdas)?;
    let e = Expr::parse(expr)?;
    let alg = WeylAlgebra::infer(std::slice::from_ref(&e), data.rank())?;
    if alg.kinds().len() > data.rank() {
        return Err(Error::DimensionMismatch(format!(
            "expression uses {} pairs, {} eigenvalues given",
            alg.kinds().len(),
            data.rank()
        )));
    }
    let real: Vec<usize> = (0..alg.kinds().len()).filter(|&i| alg.kinds()[i] == PairKind::Real).collect();
    let a = e.eval(&alg)?.to_complex_basis(&real)?;
    let value = tr_gamma(&data, &a)?;
    Ok(Output {
        text: value.to_string(),
        structured: json!({"command": "trace", "result": value.to_string(), "coefficients": coefficients(&value)}),
        ok: true,
    })
}

fn coefficients(s: &HbarSeries) -> Value {
    let mut map = serde_json::Map::new();
    for (k, c) in s.terms() {
        map.insert(k.to_string(), Value::String(c.to_string()));
    }
    Value::Object(map)
}

fn report_output(r: &Report, params: &str) -> Output {
    let mut text = format!("suite {} {params}\n", r.suite);
    for i in &r.items {
        text.push_str(&format!("{} {}: {}\n", if i.pass { "PASS" } else { "FAIL" }, i.label, i.detail));
    }
    let passed = r.items.iter().filter(|i| i.pass).count();
    text.push_str(&format!("{} {passed}/{} checks passed", if r.passed() { "PASS" } else { "FAIL" }, r.items.len()));
    let items: Vec<Value> =
        r.items.iter().map(|i| json!({"label": i.label, "pass": i.pass, "detail": i.detail})).collect();
    Output {
        text,
        structured: json!({"suite": r.suite, "parameters": params, "pass": r.passed(), "items": items}),
        ok: r.passed(),
    }
}

fn read_model(path: &Path) -> Result<OrbifoldModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema { path: "$".into(), msg: format!("cannot read {}: {e}", path.display()) })?;
    OrbifoldModel::from_json_str(&text)
}

fn cmd_index(path: &Path, kawasaki: bool, oracle: bool) -> Result<Output> {
    let model = read_model(path)?;
    let (text, mut structured) = if kawasaki {
        let v = index::kawasaki_index(&model)?;
        (v.to_string(), json!({"command": "index", "mode": "kawasaki", "result": v.to_string()}))
    } else {
        let v = index::algebraic_index(&model)?;
        (v.to_string(), json!({"command": "index", "mode": "hbar", "result": v.to_string(), "coefficients": coefficients(&v)}))
    };
    let mut out = Output { text, structured: Value::Null, ok: true };
    if oracle {
        let action = model.action.as_ref().ok_or_else(|| Error::Missing("the model has no 'action' for the oracle".into()))?;
        let o = lefschetz_oracle(action)?;
        let k = index::kawasaki_index(&model)?;
        let agree = o == k;
        out.text.push_str(&format!("\noracle {o} {}", if agree { "agrees" } else { "DISAGREES" }));
        structured["oracle"] = json!({"result": o.to_string(), "agrees": agree});
        out.ok = agree;
    }
    out.structured = structured;
    Ok(out)
}

fn cmd_gallery(out: &Path) -> Result<Output> {
    std::fs::create_dir_all(out).map_err(|e| Error::Missing(format!("cannot create {}: {e}", out.display())))?;
    let mut names = Vec::new();
    for (name, model) in gallery::shipped() {
        let path = out.join(&name);
        std::fs::write(&path, model.to_json_string())
            .map_err(|e| Error::Missing(format!("cannot write {}: {e}", path.display())))?;
        names.push(name);
    }
    Ok(Output { text: names.join("\n"), structured: json!({"command": "gallery", "written": names}), ok: true })
}

fn run(cli: &Cli) -> Result<Output> {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match &cli.command {
        Command::Star { exprs } => cmd_star(exprs, cli.order),
        Command::Trace { expr, lambdas } => cmd_trace(expr, lambdas),
        Command::Verify { suite, k, lambdas, size, seed, samples, degree } => {
            let parsed = lambdas.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<CycloScalar>>>()?;
            let params = SuiteParams {
                k: *k,
                lambdas: parsed,
                size: *size,
                seed: *seed,
                samples: *samples,
                degree: *degree,
                level: cli.level,
                threads,
            };
            let report = match suite {
                Suite::Cocycle => suites::cocycle(&params)?,
                Suite::Trace => suites::trace(&params)?,
                Suite::LocalRr => suites::local_rr(&params)?,
                Suite::Homology => suites::homology(&params)?,
            };
            let lam = if lambdas.is_empty() { String::new() } else { format!(" lambda={}", lambdas.join(",")) };
            Ok(report_output(&report, &format!("k={k}{lam} N={size} seed={seed}")))
        }
        Command::Index { model, hbar: _, kawasaki, oracle } => cmd_index(model, *kawasaki, *oracle),
        Command::Gallery { out } => cmd_gallery(out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.level == 0 {
        eprintln!("error: --level must be positive");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => println!("{}", out.text),
                Format::Structured => println!("{}", serde_json::to_string_pretty(&out.structured).expect("JSON values serialize")),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Unsupported => 4,
            })
        }
    }
}
