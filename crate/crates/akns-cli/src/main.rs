//! `akns`: exact checks for stationary AKNS pairs, simple-pole data, and
//! finite-gap potentials. Reads TOML inputs, writes deterministic JSON
//! reports (or flattened text), and signals results through the exit code:
//! 0 pass, 1 check failure, 2 bad input, 3 internal invariant violation.

mod input;
mod report;

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use akns::algebra::GaussRat;
use akns::frobenius::{meromorphy_verdict, FrobeniusError};
use akns::gapcheck::{finite_gap_check, pipeline, GapError};
use akns::hierarchy::{
    compute_fg, solve_constants, stationary_residual, ConstantVector, HierarchyError, SolveOutcome,
};
use akns::poles::{classify_pole, PoleData, PoleError};
use akns::series::{csc_series, example2_pq, EllipticParams, Laurent, SeriesError};

use input::{parse_constants, parse_input, render_pair, InputError};
use report::{render, Format};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "akns", version, about = "Stationary AKNS pole analysis with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation order (default: AKNS_DEFAULT_K, or 30). When left at the
    /// default it adapts downward to the input's depth.
    #[arg(long = "K", global = true, value_name = "ORDER")]
    k_order: Option<i64>,
    /// Input file; standard input when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Print the hierarchy pair f_k, g_k with symbolic constants.
    Recursion {
        #[arg(long)]
        k: u32,
    },
    /// Check f_{m+1} = g_{m+1} = 0 on a p/q pair with given constants.
    Stationary {
        #[arg(long)]
        m: u32,
        /// Comma-separated values for C1..Cm, e.g. "0,-1/4".
        #[arg(long, default_value = "")]
        constants: String,
    },
    /// Search for constants making the pair stationary at order m.
    SolveConstants {
        #[arg(long)]
        m: u32,
    },
    /// Classify a simple pole from {phi, psi} data.
    PoleCheck,
    /// Meromorphy of both local spectral solutions at the pole.
    Frobenius,
    /// Finite-gap criterion on a second-order potential series.
    FiniteGap,
    /// Stationarity, pole classification, potential, finite-gap: the full chain.
    Pipeline {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = "")]
        constants: String,
    },
    /// Emit a built-in example pair in the input format.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Residue scale; the example's pole order.
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value = "4")]
        g2: String,
        #[arg(long, default_value = "0")]
        g3: String,
        #[arg(long, default_value = "1")]
        e2: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Csc,
    Elliptic,
}

struct Failure {
    message: String,
    code: i32,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code,
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::new(2, format!("input: {e}"))
    }
}

fn series_failure(e: &SeriesError) -> Failure {
    match e {
        SeriesError::InsufficientDepth { .. }
        | SeriesError::NotASquare { .. }
        | SeriesError::BadEllipticParams { .. } => Failure::new(2, e.to_string()),
        SeriesError::LogarithmicObstruction { .. } | SeriesError::SymbolRemains { .. } => {
            Failure::new(3, e.to_string())
        }
    }
}

fn hierarchy_failure(e: &HierarchyError) -> Failure {
    match e {
        HierarchyError::Series(se) => series_failure(se),
        HierarchyError::NotStationary(_) => Failure::new(2, e.to_string()),
        HierarchyError::Internal(_) => Failure::new(3, e.to_string()),
    }
}

fn pole_failure(e: &PoleError) -> Failure {
    match e {
        PoleError::Series(se) => series_failure(se),
        PoleError::Hierarchy(he) => hierarchy_failure(he),
        PoleError::Invalid(_) | PoleError::Depth { .. } | PoleError::NotClassified(_) => {
            Failure::new(2, e.to_string())
        }
    }
}

fn frobenius_failure(e: &FrobeniusError) -> Failure {
    match e {
        FrobeniusError::Pole(pe) => pole_failure(pe),
        FrobeniusError::NonIntegerExponents { .. } | FrobeniusError::TruncationTooSmall { .. } => {
            Failure::new(2, e.to_string())
        }
        FrobeniusError::BadSigma { .. }
        | FrobeniusError::ResonanceObstruction { .. }
        | FrobeniusError::ZeroSolution => Failure::new(3, e.to_string()),
    }
}

fn gap_failure(e: &GapError) -> Failure {
    match e {
        GapError::Series(se) => series_failure(se),
        GapError::Hierarchy(he) => hierarchy_failure(he),
        GapError::Pole(pe) => pole_failure(pe),
        GapError::Invalid(_) | GapError::Depth { .. } | GapError::DepthMismatch { .. } => {
            Failure::new(2, e.to_string())
        }
    }
}

fn series_shortfall(e: &SeriesError) -> Option<i64> {
    match e {
        SeriesError::InsufficientDepth { needed, have } => Some(needed - have),
        _ => None,
    }
}

fn hierarchy_shortfall(e: &HierarchyError) -> Option<i64> {
    match e {
        HierarchyError::Series(se) => series_shortfall(se),
        _ => None,
    }
}

fn pole_shortfall(e: &PoleError) -> Option<i64> {
    match e {
        PoleError::Depth { needed, have } => Some(needed - have),
        PoleError::Series(se) => series_shortfall(se),
        PoleError::Hierarchy(he) => hierarchy_shortfall(he),
        _ => None,
    }
}

fn frobenius_shortfall(e: &FrobeniusError) -> Option<i64> {
    match e {
        FrobeniusError::Pole(pe) => pole_shortfall(pe),
        _ => None,
    }
}

fn gap_shortfall(e: &GapError) -> Option<i64> {
    match e {
        GapError::Series(se) => series_shortfall(se),
        GapError::Hierarchy(he) => hierarchy_shortfall(he),
        GapError::Pole(pe) => pole_shortfall(pe),
        GapError::Depth { needed, have } => Some(needed - have),
        _ => None,
    }
}

/// Run `call` at the requested order; when the order was a default rather
/// than an explicit flag, shrink it by the reported shortfall and retry.
fn with_k<T, E>(
    k0: i64,
    explicit: bool,
    floor: i64,
    shortfall: impl Fn(&E) -> Option<i64>,
    call: impl Fn(i64) -> Result<T, E>,
) -> Result<(T, i64), E> {
    let mut k = k0;
    loop {
        match call(k) {
            Ok(v) => return Ok((v, k)),
            Err(e) => {
                if explicit {
                    return Err(e);
                }
                match shortfall(&e) {
                    Some(s) if s > 0 && k - s >= floor => k -= s,
                    _ => return Err(e),
                }
            }
        }
    }
}

enum Outcome {
    Pass(String),
    Fail(String),
}

fn resolve_k(cli_k: Option<i64>) -> Result<(i64, bool), Failure> {
    let (k, explicit) = match cli_k {
        Some(k) => (k, true),
        None => match std::env::var("AKNS_DEFAULT_K") {
            Ok(text) => match text.trim().parse::<i64>() {
                Ok(k) => (k, false),
                Err(_) => {
                    return Err(Failure::new(
                        2,
                        format!("AKNS_DEFAULT_K: cannot parse {text:?} as an integer"),
                    ))
                }
            },
            Err(_) => (30, false),
        },
    };
    if k < 1 {
        return Err(Failure::new(2, format!("truncation order K must be >= 1, got {k}")));
    }
    Ok((k, explicit))
}

fn load_source(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::new(2, format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

fn constants_vector(text: &str) -> Result<(ConstantVector, Vec<String>), Failure> {
    let values = parse_constants(text)?;
    let strings = values.iter().map(|v| v.to_string()).collect();
    Ok((ConstantVector::new(values), strings))
}

fn load_pair(cli: &Cli) -> Result<(Laurent<GaussRat>, Laurent<GaussRat>), Failure> {
    let source = load_source(&cli.input)?;
    Ok(parse_input(&source)?.into_pair()?)
}

fn pole_failure_message(d: &PoleData, condition: &str, index: i64) -> String {
    match condition {
        "product-not-square" => format!(
            "leading product {} not a perfect square",
            &d.phi_at(-1) * &d.psi_at(-1)
        ),
        "coefficient-relation" => {
            format!("alternating coefficient relation broken at index {index}")
        }
        other => format!("{other} at index {index}"),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Recursion { k } => {
            if *k < 1 {
                return Err(Failure::new(2, "the recursion index k starts at 1"));
            }
            let pair = compute_fg(*k).map_err(|e| hierarchy_failure(&e))?;
            let value = json!({
                "command": "recursion",
                "constants": pair.constants_used,
                "f": pair.f.to_string(),
                "g": pair.g.to_string(),
                "k": k,
                "version": VERSION,
            });
            Ok(Outcome::Pass(render(value, cli.format)))
        }

        Command::Stationary { m, constants } => {
            let (k0, explicit) = resolve_k(cli.k_order)?;
            let (c, c_strings) = constants_vector(constants)?;
            let (p, q) = load_pair(cli)?;
            let (verdict, used_k) = with_k(k0, explicit, -2, hierarchy_shortfall, |kk| {
                stationary_residual(&p, &q, *m, &c, kk)
            })
            .map_err(|e| hierarchy_failure(&e))?;
            let value = json!({
                "K": used_k,
                "command": "stationary",
                "constants": c_strings,
                "first_nonzero": verdict.first_nonzero,
                "m": m,
                "stationary": verdict.is_zero,
                "version": VERSION,
            });
            let text = render(value, cli.format);
            Ok(if verdict.is_zero {
                Outcome::Pass(text)
            } else {
                Outcome::Fail(text)
            })
        }

        Command::SolveConstants { m } => {
            let (k0, explicit) = resolve_k(cli.k_order)?;
            let (p, q) = load_pair(cli)?;
            let (outcome, used_k) = with_k(k0, explicit, -2, hierarchy_shortfall, |kk| {
                solve_constants(&p, &q, *m, kk)
            })
            .map_err(|e| hierarchy_failure(&e))?;
            let (label, constants, reason) = match &outcome {
                SolveOutcome::Solved(c) => (
                    "solved",
                    Some(c.values().iter().map(|v| v.to_string()).collect::<Vec<_>>()),
                    None,
                ),
                SolveOutcome::Infeasible { reason } => ("infeasible", None, Some(reason.clone())),
                SolveOutcome::Inconclusive { reason } => {
                    ("inconclusive", None, Some(reason.clone()))
                }
            };
            let value = json!({
                "K": used_k,
                "command": "solve-constants",
                "constants": constants,
                "m": m,
                "outcome": label,
                "reason": reason,
                "version": VERSION,
            });
            let text = render(value, cli.format);
            Ok(if matches!(outcome, SolveOutcome::Solved(_)) {
                Outcome::Pass(text)
            } else {
                Outcome::Fail(text)
            })
        }

        Command::PoleCheck => {
            let source = load_source(&cli.input)?;
            let d = parse_input(&source)?.into_pole()?;
            let report = classify_pole(&d).map_err(|e| pole_failure(&e))?;
            let first_failure = report.first_failure.as_ref().map(|f| {
                json!({
                    "condition": f.condition,
                    "index": f.index,
                    "message": pole_failure_message(&d, &f.condition, f.index),
                })
            });
            let value = json!({
                "checked_through": report.checked_through,
                "command": "pole-check",
                "first_failure": first_failure,
                "n": report.n,
                "passes": report.passes,
                "version": VERSION,
            });
            let text = render(value, cli.format);
            Ok(if report.passes {
                Outcome::Pass(text)
            } else {
                Outcome::Fail(text)
            })
        }

        Command::Frobenius => {
            let (k0, explicit) = resolve_k(cli.k_order)?;
            let source = load_source(&cli.input)?;
            let d = parse_input(&source)?.into_pole()?;
            let (verdict, used_k) = with_k(k0, explicit, 1, frobenius_shortfall, |kk| {
                meromorphy_verdict(&d, kk as u32)
            })
            .map_err(|e| frobenius_failure(&e))?;
            let value = json!({
                "command": "frobenius",
                "meromorphic": verdict.meromorphic,
                "n": verdict.n,
                "obstruction": verdict.obstruction.to_string(),
                "reason": verdict.reason,
                "steps": used_k,
                "version": VERSION,
            });
            let text = render(value, cli.format);
            Ok(if verdict.meromorphic {
                Outcome::Pass(text)
            } else {
                Outcome::Fail(text)
            })
        }

        Command::FiniteGap => {
            let source = load_source(&cli.input)?;
            let u = parse_input(&source)?.into_potential()?;
            let report = finite_gap_check(&u).map_err(|e| gap_failure(&e))?;
            let value = json!({
                "a_minus2": u.at(-2).to_string(),
                "command": "finite-gap",
                "finite_gap": report.finite_gap,
                "first_failure": report.first_failure.as_ref().map(|f| json!({
                    "condition": f.condition,
                    "index": f.index,
                })),
                "n": report.n,
                "version": VERSION,
            });
            let text = render(value, cli.format);
            Ok(if report.finite_gap {
                Outcome::Pass(text)
            } else {
                Outcome::Fail(text)
            })
        }

        Command::Pipeline { m, constants } => {
            let (k0, explicit) = resolve_k(cli.k_order)?;
            let (c, c_strings) = constants_vector(constants)?;
            let (p, q) = load_pair(cli)?;
            let (report, used_k) = with_k(k0, explicit, -2, gap_shortfall, |kk| {
                pipeline(&p, &q, *m, &c, kk)
            })
            .map_err(|e| gap_failure(&e))?;
            let stages: Vec<Value> = report
                .stages
                .iter()
                .map(|s| {
                    json!({
                        "detail": s.detail,
                        "name": s.name,
                        "passed": s.passed,
                    })
                })
                .collect();
            let value = json!({
                "K": used_k,
                "command": "pipeline",
                "constants": c_strings,
                "failed_stage": report.failed_stage,
                "finite_gap": report.finite_gap,
                "m": m,
                "n": report.n,
                "stages": stages,
                "version": VERSION,
            });
            let text = render(value, cli.format);
            Ok(if report.finite_gap {
                Outcome::Pass(text)
            } else {
                Outcome::Fail(text)
            })
        }

        Command::Example { name, n, g2, g3, e2 } => {
            let (k0, _) = resolve_k(cli.k_order)?;
            if *n < 1 {
                return Err(Failure::new(2, "the example scale n starts at 1"));
            }
            let (p, q) = match name {
                ExampleName::Csc => {
                    let s = csc_series(&GaussRat::from_int(*n as i64), k0);
                    (s.clone(), s)
                }
                ExampleName::Elliptic => {
                    let parse = |label: &str, text: &str| -> Result<GaussRat, Failure> {
                        text.parse::<GaussRat>()
                            .map_err(|e| Failure::new(2, format!("--{label}: {e}")))
                    };
                    let params = EllipticParams::new(
                        parse("g2", g2)?,
                        parse("g3", g3)?,
                        parse("e2", e2)?,
                    )
                    .map_err(|e| series_failure(&e))?;
                    let alpha = GaussRat::from_int(*n as i64);
                    example2_pq(&params, &alpha, &alpha, k0).map_err(|e| series_failure(&e))?
                }
            };
            Ok(Outcome::Pass(render_pair(&p, &q)))
        }
    }
}

fn main() {
    let started = Instant::now();
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(Outcome::Pass(text)) => {
            print!("{text}");
            0
        }
        Ok(Outcome::Fail(text)) => {
            print!("{text}");
            1
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    };
    eprintln!("timing_ms={}", started.elapsed().as_millis());
    std::process::exit(code);
}
