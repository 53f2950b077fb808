//! Command-line surface. Every command produces one JSON [`Report`]; errors
//! map to fixed exit codes.

use std::io::Read;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::aglib;
use crate::degrees::{DegreeCache, DegreeFamily, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::families::{self, FamilyKind, FamilySpec};
use crate::poly::{parse, Polynomial, Rational};
use crate::tangent;

#[derive(Debug, Parser)]
#[command(name = "perazzo", version, about = "Vanishing-Hessian cubics, Lefschetz data and family degrees")]
pub struct Cli {
    /// Append a human-readable summary after the JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Cubic form, e.g. "x0*x3^2+x1*x3*x4+x2*x4^2"; "-" reads stdin.
    #[arg(long)]
    pub poly: String,
    /// Number of variables x0..x{nvars-1}.
    #[arg(long)]
    pub nvars: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cone test, Hessian vanishing, Hilbert function and SLP.
    Slp(PolyArgs),
    /// Jordan type of multiplication by a linear form.
    Jordan {
        #[command(flatten)]
        poly: PolyArgs,
        /// Comma-separated coefficients of L, e.g. "1,0,0,0,0".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Degree of a family or cone intersection.
    Degree {
        #[arg(long)]
        family: String,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// Ignore and do not write the on-disk cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Seeded member of a family, with its self-checks.
    Family {
        #[arg(long)]
        kind: String,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank of the differential of det Hess at a cubic.
    Tangent(PolyArgs),
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub timing: Timing,
    pub tool_version: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } | Error::UnknownVariable { .. } | Error::VariableOutOfRange { .. } => 2,
        Error::VariableCountMismatch(..)
        | Error::LengthMismatch { .. }
        | Error::NotHomogeneous
        | Error::DegreeTooLow(_)
        | Error::NotCubic(_)
        | Error::ZeroPolynomial => 3,
        Error::ConeInput | Error::ZeroLinearForm | Error::EmptyBasis | Error::DependentBasis => 4,
        Error::OutOfRange(_) | Error::InvalidFamily(_) | Error::NoClosedForm(_) => 5,
        _ => 1,
    }
}

fn read_poly(args: &PolyArgs) -> Result<Polynomial> {
    let text = if args.poly == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Io(e.to_string()))?;
        s
    } else {
        args.poly.clone()
    };
    parse(text.trim(), args.nvars)
}

fn parse_point(text: &str, n: usize) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for (i, part) in text.split(',').enumerate() {
        let p = parse(part.trim(), 1).map_err(|e| match e {
            Error::Syntax { msg, .. } => Error::Syntax { pos: i, msg },
            other => other,
        })?;
        match p.degree() {
            None => out.push(Rational::from_integer(0.into())),
            Some(0) => out.push(p.coefficient(&crate::poly::Monomial::one(1))),
            Some(_) => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: "point coordinates must be numbers".into(),
                })
            }
        }
    }
    if out.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: out.len(),
        });
    }
    Ok(out)
}

fn poly_inputs(args: &PolyArgs, f: &Polynomial) -> Value {
    json!({ "poly": f.to_string(), "nvars": args.nvars })
}

fn cubic_checks(f: &Polynomial) -> Result<Value> {
    let r = aglib::slp_socle3(f)?;
    Ok(json!({
        "is_cone": r.is_cone,
        "hess_zero": r.hess_zero,
        "hilbert": r.hilbert,
        "slp": r.slp,
    }))
}

/// Runs a command, returning its name, inputs and results.
pub fn execute(cmd: &Command) -> Result<(&'static str, Value, Value)> {
    match cmd {
        Command::Slp(args) => {
            let f = read_poly(args)?;
            Ok(("slp", poly_inputs(args, &f), cubic_checks(&f)?))
        }
        Command::Jordan { poly, point } => {
            let f = read_poly(poly)?;
            let l = parse_point(point, poly.nvars)?;
            let (rank, partition) = aglib::jordan_type(&f, &l)?;
            let mut inputs = poly_inputs(poly, &f);
            inputs["point"] = json!(l.iter().map(ToString::to_string).collect::<Vec<_>>());
            Ok((
                "jordan",
                inputs,
                json!({ "rank": rank, "partition": partition.parts(), "partition_text": partition.to_string() }),
            ))
        }
        Command::Degree { family, n, k, no_cache } => {
            let fam: DegreeFamily = family.parse().map_err(|_| Error::OutOfRange(format!("unknown family {family}")))?;
            let param = match (fam.param_name(), n, k) {
                ("N", Some(v), None) | ("k", None, Some(v)) => *v,
                (name, _, _) => {
                    return Err(Error::OutOfRange(format!("{fam} takes exactly --{name}")));
                }
            };
            let (r, cached) = if *no_cache {
                (crate::degrees::compute(fam, param)?, false)
            } else {
                DegreeCache::from_env().get_or_compute(fam, param)?
            };
            let mut results = serde_json::to_value(&r).map_err(|e| Error::Io(e.to_string()))?;
            results["cached"] = json!(cached);
            results["formal"] = json!(fam == DegreeFamily::Min && param >= 7);
            Ok((
                "degree",
                json!({ "family": fam.name(), fam.param_name(): param }),
                results,
            ))
        }
        Command::Family { kind, n, seed } => {
            let kind: FamilyKind = kind.parse()?;
            let n = match (kind, n) {
                (_, Some(n)) => *n,
                (FamilyKind::PerazzoP4, None) => 4,
                (FamilyKind::Specialization, None) => 6,
                (_, None) => return Err(Error::OutOfRange(format!("{kind} needs --N"))),
            };
            let spec = FamilySpec::new(kind, n)?;
            let f = families::sample(&spec, *seed)?;
            let mut results = cubic_checks(&f)?;
            results["poly"] = json!(f.to_string());
            results["nvars"] = json!(f.num_vars());
            Ok(("family", json!({ "kind": kind.name(), "N": n, "seed": seed }), results))
        }
        Command::Tangent(args) => {
            let f = read_poly(args)?;
            let (rank, dim) = tangent::df_rank(&f)?;
            Ok(("tangent", poly_inputs(args, &f), json!({ "rank": rank, "tangent_dim": dim })))
        }
    }
}

/// Runs the command and renders its report; returns the text for stdout and
/// the process exit code.
pub fn run(cli: &Cli) -> (String, i32) {
    let start = Instant::now();
    match execute(&cli.command) {
        Ok((command, inputs, results)) => {
            let report = Report {
                command: command.to_string(),
                inputs,
                results,
                timing: Timing {
                    elapsed_ms: start.elapsed().as_millis(),
                },
                tool_version: TOOL_VERSION.to_string(),
            };
            let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
            if cli.pretty {
                out.push('\n');
                out.push_str(&summary(&report));
            }
            (out, 0)
        }
        Err(e) => {
            let code = exit_code(&e);
            let body = json!({
                "error": { "message": e.to_string(), "exit_code": code },
                "tool_version": TOOL_VERSION,
            });
            (serde_json::to_string_pretty(&body).expect("error serializes"), code)
        }
    }
}

fn summary(r: &Report) -> String {
    let res = &r.results;
    match r.command.as_str() {
        "slp" => format!(
            "cone: {}, hessian vanishes: {}, Hilbert function: {}, SLP: {}",
            res["is_cone"], res["hess_zero"], res["hilbert"], res["slp"]
        ),
        "jordan" => format!("Hessian rank {}, Jordan type {}", res["rank"], res["partition_text"].as_str().unwrap_or("")),
        "degree" => format!(
            "{} family, dimension {}, degree {}",
            res["family"].as_str().unwrap_or(""),
            res["dim"],
            res["degree"].as_str().unwrap_or("")
        ),
        "family" => format!("{} (cone: {}, hessian vanishes: {})", res["poly"].as_str().unwrap_or(""), res["is_cone"], res["hess_zero"]),
        "tangent" => format!("rank of dF: {}, tangent dimension: {}", res["rank"], res["tangent_dim"]),
        _ => String::new(),
    }
}
