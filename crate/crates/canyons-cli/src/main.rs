//! Command-line front end: parse germ expressions, run the pipeline, emit
//! human-readable or JSON reports.
//!
//! Exit codes: 0 success (and ConsistentWithEquivalence for `compare`),
//! 1 NotEquivalent, 2 invalid input, 3 precision exhausted, 4 truncation cap
//! exceeded.

use canyons::equivalence::Decision;
use canyons::error::Error;
use canyons::oracle;
use canyons::pipeline;
use canyons::poly::{parse_poly, parse_scalar_expr};
use canyons::ratio::parse_q;
use canyons::scalar::Scalar;
use canyons::Options;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "canyons",
    about = "Polar arcs, gradient canyons, and rescaling-invariant packets of plane germs f(x, y)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Parameter binding `name=value` (value in the scalar grammar, e.g.
    /// `t=2`, `b=-1/3`, `c=1/2+3*i`); repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Working precision in bits for approximate scalars.
    #[arg(long, default_value_t = 256)]
    precision: u32,
    /// Zero-test threshold (rational like `1/1000000` or float like `1e-30`);
    /// default 2^(-precision/2).
    #[arg(long)]
    eps: Option<String>,
    /// Maximum number of series terms kept per arc.
    #[arg(long = "max-terms", default_value_t = 64)]
    max_terms: usize,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Seed for the sampling oracle.
    #[arg(long, default_value_t = 0x5eed_cafe)]
    seed: u64,
    /// Apply the coordinate change x -> x + λ y before analysis (value in
    /// the scalar grammar).
    #[arg(long)]
    shear: Option<String>,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one germ: cone, polar arcs, canyons, invariant packets.
    Analyze {
        /// Germ expression, e.g. "x^3 - 3*t^2*x*y^10 + y^12".
        expr: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decide whether two germs' invariants are identified by the action.
    Compare {
        expr1: String,
        expr2: String,
        /// Bindings for the second expression (first uses --param).
        #[arg(long = "param2", value_name = "NAME=VALUE")]
        param2: Vec<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print only the Puiseux/polar stage of one polynomial.
    Arcs {
        expr: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the oracle suites and golden tests; exit 0 iff all pass.
    Selftest {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn exp_str(e: &canyons::ratio::Q) -> String {
    let s = canyons::ratio::fmt_q(e);
    if s.contains('/') {
        format!("({s})")
    } else {
        s
    }
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, Scalar>, Error> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, value) = item.split_once('=').ok_or_else(|| Error::Syntax {
            pos: 0,
            msg: format!("--param expects NAME=VALUE, got `{item}`"),
        })?;
        let scalar = parse_scalar_expr(value)?;
        out.insert(name.trim().to_string(), scalar);
    }
    Ok(out)
}

fn options_of(common: &CommonOpts) -> Result<Options, Error> {
    let mut opts = Options::default();
    opts.precision = common.precision.max(64);
    opts.max_terms = common.max_terms;
    opts.seed = common.seed;
    if common.threads > 0 {
        opts.threads = Some(common.threads);
    }
    if let Some(e) = &common.eps {
        // Rational form first, then decimal floats like 1e-30.
        let parsed = parse_q(e).or_else(|| {
            e.parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0).and_then(|v| {
                canyons::ratio::Q::from_float(v)
            })
        });
        match parsed {
            Some(v) => opts.eps = Some(v),
            None => {
                return Err(Error::Syntax {
                    pos: 0,
                    msg: format!("--eps expects a rational or positive float, got `{e}`"),
                })
            }
        }
    }
    Ok(opts)
}

fn shear_of(common: &CommonOpts) -> Result<Option<Scalar>, Error> {
    match &common.shear {
        Some(text) => Ok(Some(parse_scalar_expr(text)?)),
        None => Ok(None),
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { expr, common } => {
            let opts = options_of(&common)?;
            let params = parse_params(&common.param)?;
            let shear = shear_of(&common)?;
            let report = pipeline::analyze(&expr, &params, shear.as_ref(), &opts)?;
            if common.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
            } else {
                print!("{}", report.render_text());
            }
            Ok(0)
        }
        Command::Compare { expr1, expr2, param2, common } => {
            let opts = options_of(&common)?;
            let params1 = parse_params(&common.param)?;
            let params2 = if param2.is_empty() {
                params1.clone()
            } else {
                parse_params(&param2)?
            };
            let shear = shear_of(&common)?;
            let report =
                pipeline::compare(&expr1, &params1, &expr2, &params2, shear.as_ref(), &opts)?;
            if common.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
            } else {
                print!("{}", report.render_text());
            }
            Ok(match report.report.decision {
                Decision::ConsistentWithEquivalence => 0,
                Decision::NotEquivalent => 1,
            })
        }
        Command::Arcs { expr, common } => {
            let opts = options_of(&common)?;
            let params = parse_params(&common.param)?;
            let shear = shear_of(&common)?;
            let f = parse_poly(&expr, &params)?;
            let f = match shear {
                Some(lambda) => f.shear(&lambda),
                None => f,
            };
            let target = canyons::ratio::qi(4);
            let arcs = canyons::puiseux::puiseux_roots(&f, &target, &opts)?;
            // Enumerate conjugates as distinct arcs.
            let mut expanded = Vec::new();
            for ra in &arcs {
                for conj in canyons::puiseux::conjugates(&ra.arc, &opts)? {
                    expanded.push(conj);
                }
            }
            if common.json {
                let js: Vec<_> = expanded.iter().map(|a| a.to_json()).collect();
                println!("{}", serde_json::to_string_pretty(&js).unwrap());
            } else {
                for arc in &expanded {
                    let terms: Vec<String> = arc
                        .terms
                        .iter()
                        .map(|(e, c)| format!("({})*y^{}", c.to_display_string(), exp_str(e)))
                        .collect();
                    let desc = if terms.is_empty() { "0".into() } else { terms.join(" + ") };
                    println!(
                        "x = {desc} [N={}, conj={}, mult={}, residual={}]",
                        arc.ram, arc.theta_index, arc.mult, arc.residual
                    );
                }
            }
            Ok(0)
        }
        Command::Selftest { common } => {
            let opts = options_of(&common)?;
            let report = oracle::selftest(&opts);
            if common.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
            } else {
                for e in &report.entries {
                    let status = if e.passed { "PASS" } else { "FAIL" };
                    if e.details.is_empty() {
                        println!("[{status}] {}", e.name);
                    } else {
                        println!("[{status}] {} — {}", e.name, e.details);
                    }
                }
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
