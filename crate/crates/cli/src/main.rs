//! Command-line interface for the quaternionic modular forms library.
//!
//! Every subcommand writes line-delimited JSON records to stdout with keys
//! in sorted order, so identical invocations produce byte-identical output.
//! Rational numbers are rendered as "numerator/denominator" strings in
//! lowest terms. Exit codes: 0 success or verified, 1 an exact check
//! failed (falsification), 2 usage or input error, 3 the result is
//! dominated by undecided cases and nothing can be concluded.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use qmf_core::ideal::{class_set, ClassSetOptions};
use qmf_core::oracle::{
    congruence_check, dim_new_cusp, load_fixtures, predict_decomposition, verify_decomposition,
    Confidence, FixtureDb,
};
use qmf_core::order::{build_order, EType, Order};
use qmf_core::quat::construct_definite;
use qmf_core::theta::{theta_entry, theta_new_span};
use qmf_core::brandt::{hecke_module, Tower};
use qmf_core::{Int, Rat};

#[derive(Parser)]
#[command(name = "qmf", version, about = "Quaternionic modular forms over the rationals")]
struct Cli {
    /// Worker threads for parallel sections; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OrderArgs {
    /// Discriminant of the quaternion algebra: a squarefree product of an
    /// odd number of primes.
    #[arg(long)]
    disc: u64,
    /// Level of the order; the discriminant must divide it.
    #[arg(long)]
    level: u64,
    /// Local type override at a prime dividing the discriminant, as
    /// p=unramified or p=ramified. May be repeated.
    #[arg(long = "etype", value_name = "P=TYPE")]
    etype: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the definite quaternion algebra with the given discriminant.
    Algebra {
        #[arg(long)]
        disc: u64,
    },
    /// Build a special order and report its local structure.
    Order(OrderArgs),
    /// Compute the right ideal class set of an order.
    Classset(OrderArgs),
    /// Compute Brandt matrices A_n for a list of n.
    Brandt {
        #[command(flatten)]
        order: OrderArgs,
        /// Comma-separated list of indices n >= 1.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// Theta series of the class set, or of the new subspace with --new.
    Theta {
        #[command(flatten)]
        order: OrderArgs,
        /// Number of q-expansion coefficients beyond the constant term.
        #[arg(long)]
        prec: u64,
        /// Output a basis of the theta span of the new subspace instead of
        /// the pairwise series.
        #[arg(long = "new")]
        new_only: bool,
    },
    /// Weight-2 Eisenstein series attached to a pair of coprime parameters.
    Eisenstein {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        prec: u64,
    },
    /// Predict the decomposition of the cusp space from fixture data and
    /// verify it against computed Brandt characteristic polynomials.
    Decompose {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long)]
        fixtures: PathBuf,
        /// Comma-separated verification primes, coprime to the level.
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// Test the mod-p Eisenstein congruence on the new subspace at level p^3.
    VerifyCongruence {
        #[arg(long)]
        p: u64,
        /// Fixture file used to report the classical new dimension alongside.
        #[arg(long)]
        fixtures: PathBuf,
        /// Comma-separated Hecke primes; defaults to the first five primes
        /// different from p.
        #[arg(long, value_delimiter = ',')]
        ells: Option<Vec<u64>>,
    },
    /// Fixture file utilities.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    /// Parse and validate a fixture file, reporting line-numbered errors.
    Validate { path: PathBuf },
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn coeff_strings(coeffs: &[Rat]) -> Vec<String> {
    coeffs.iter().map(rat_str).collect()
}

fn matrix_value(m: &qmf_core::IntMat) -> Result<Value, qmf_core::Error> {
    let mut rows = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let row: Option<Vec<i64>> = m.row(i).iter().map(|x| x.to_i64()).collect();
        rows.push(row.ok_or_else(|| {
            qmf_core::Error::InvalidArgument("matrix entry exceeds the output range".into())
        })?);
    }
    Ok(json!(rows))
}

fn parse_etypes(specs: &[String]) -> Result<BTreeMap<Int, EType>, qmf_core::Error> {
    let mut out = BTreeMap::new();
    for s in specs {
        let (p, t) = s.split_once('=').ok_or_else(|| {
            qmf_core::Error::InvalidArgument(format!("expected P=TYPE, got {s:?}"))
        })?;
        let p: u64 = p
            .parse()
            .map_err(|_| qmf_core::Error::InvalidArgument(format!("bad prime in {s:?}")))?;
        let etype = match t {
            "unramified" => EType::Unramified,
            "ramified" => EType::Ramified,
            other => {
                return Err(qmf_core::Error::InvalidArgument(format!(
                    "type must be unramified or ramified, got {other:?}"
                )))
            }
        };
        out.insert(Int::from(p), etype);
    }
    Ok(out)
}

fn build(args: &OrderArgs) -> Result<Order, qmf_core::Error> {
    let alg = construct_definite(&Int::from(args.disc))?;
    let overrides = parse_etypes(&args.etype)?;
    build_order(&alg, &Int::from(args.level), &overrides)
}

fn order_value(o: &Order) -> Value {
    let locals: Vec<Value> = o
        .locals
        .iter()
        .map(|l| json!({"p": l.p.to_string(), "r": l.r, "type": l.etype.to_string()}))
        .collect();
    let eichler: Vec<Value> =
        o.eichler.iter().map(|(p, e)| json!({"p": p.to_string(), "e": e})).collect();
    let supers: Vec<Value> = o
        .superorder_levels()
        .iter()
        .map(|s| json!({"level": s.level.to_string(), "multiplicity": s.multiplicity}))
        .collect();
    json!({
        "level": o.level.to_string(),
        "locals": locals,
        "eichler": eichler,
        "superorder_levels": supers,
    })
}

fn emit(v: &Value) {
    println!("{v}");
}

/// Success is 0; an exact mismatch is 1; undecided predictions are 3.
enum Outcome {
    Ok,
    Falsified,
    Undecided,
}

fn run(cli: Cli) -> Result<Outcome, qmf_core::Error> {
    match cli.command {
        Command::Algebra { disc } => {
            let alg = construct_definite(&Int::from(disc))?;
            emit(&json!({
                "disc": alg.disc.to_string(),
                "a": rat_str(&alg.a),
                "b": rat_str(&alg.b),
                "ramified": alg.ramified.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            }));
            Ok(Outcome::Ok)
        }
        Command::Order(args) => {
            let o = build(&args)?;
            let mut v = order_value(&o);
            v["disc"] = json!(args.disc.to_string());
            emit(&v);
            Ok(Outcome::Ok)
        }
        Command::Classset(args) => {
            let o = build(&args)?;
            let cs = class_set(&o, &ClassSetOptions::default())?;
            let e: Vec<u64> = cs.unit_halves.iter().filter_map(|x| x.to_u64()).collect();
            emit(&json!({
                "disc": args.disc.to_string(),
                "level": args.level.to_string(),
                "class_number": cs.len(),
                "e": e,
                "mass": rat_str(&cs.mass),
            }));
            Ok(Outcome::Ok)
        }
        Command::Brandt { order, n } => {
            if n.iter().any(|&x| x == 0) {
                return Err(qmf_core::Error::InvalidArgument("indices must be positive".into()));
            }
            let o = build(&order)?;
            let bound = Int::from(*n.iter().max().expect("nonempty list"));
            let m = hecke_module(&o, &bound, &ClassSetOptions::default())?;
            let mats: Vec<(u64, Result<Value, qmf_core::Error>)> = n
                .par_iter()
                .map(|&k| (k, m.brandt(&Int::from(k)).and_then(|a| matrix_value(&a))))
                .collect();
            for (k, mat) in mats {
                emit(&json!({"n": k, "matrix": mat?}));
            }
            Ok(Outcome::Ok)
        }
        Command::Theta { order, prec, new_only } => {
            let o = build(&order)?;
            let bound = Int::from(prec.max(1));
            if new_only {
                let mut tower = Tower::new(&o, &bound, &ClassSetOptions::default())?;
                let span = theta_new_span(&mut tower, prec as usize)?;
                for (i, series) in span.iter().enumerate() {
                    emit(&json!({"index": i, "coeffs": coeff_strings(&series.coeffs)}));
                }
            } else {
                let m = hecke_module(&o, &bound, &ClassSetOptions::default())?;
                let h = m.class_number();
                for i in 0..h {
                    for j in i..h {
                        let series = theta_entry(&m.family, i, j)?;
                        emit(&json!({
                            "i": i,
                            "j": j,
                            "coeffs": coeff_strings(&series.coeffs[..=prec as usize]),
                        }));
                    }
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Eisenstein { a, b, prec } => {
            let series =
                qmf_core::theta::eisenstein_q_expansion(&Int::from(a), &Int::from(b), prec as usize)?;
            emit(&json!({"a": a, "b": b, "coeffs": coeff_strings(&series.coeffs)}));
            Ok(Outcome::Ok)
        }
        Command::Decompose { order, fixtures, primes } => {
            let db = load_fixtures(&fixtures)?;
            let o = build(&order)?;
            let pred = predict_decomposition(&o, &db)?;
            for t in &pred.terms {
                emit(&json!({
                    "record": "term",
                    "level": t.level,
                    "label": t.label,
                    "dim": t.dim,
                    "multiplicity": t.multiplicity,
                    "confidence": match t.confidence {
                        Confidence::Proven => "proven",
                        Confidence::Conjectural => "conjectural",
                        Confidence::Unknown => "unknown",
                    },
                }));
            }
            if pred.undecided {
                emit(&json!({
                    "record": "summary",
                    "conclusion": "undecided",
                    "detail": "local criteria leave at least one orbit open",
                }));
                return Ok(Outcome::Undecided);
            }
            let bound = Int::from(primes.iter().copied().max().unwrap_or(2).max(2));
            let mut tower = Tower::new(&o, &bound, &ClassSetOptions::default())?;
            let cusp_dim = tower.base().cusp_dim() as u64;
            let report = verify_decomposition(&pred, &db, &mut tower, &primes)?;
            for c in &report.checks {
                emit(&json!({
                    "record": "check",
                    "ell": c.ell,
                    "matched": c.matched,
                    "detail": c.detail,
                }));
            }
            let dim_ok = pred.predicted_cusp_dim == Some(cusp_dim);
            let ok = report.all_matched && dim_ok;
            emit(&json!({
                "record": "summary",
                "conclusion": if ok { "verified" } else { "falsified" },
                "predicted_cusp_dim": pred.predicted_cusp_dim,
                "cusp_dim": cusp_dim,
                "conjectural": pred.conjectural,
            }));
            Ok(if ok { Outcome::Ok } else { Outcome::Falsified })
        }
        Command::VerifyCongruence { p, fixtures, ells } => {
            let db = load_fixtures(&fixtures)?;
            let level = p
                .checked_pow(3)
                .ok_or_else(|| qmf_core::Error::InvalidArgument("prime too large".into()))?;
            db.check_coverage(&[level])?;
            let ells = ells.unwrap_or_else(|| {
                [2u64, 3, 5, 7, 11, 13].iter().copied().filter(|&x| x != p).take(5).collect()
            });
            let holds = congruence_check(p, &ells)?;
            emit(&json!({
                "p": p,
                "level": level,
                "new_dim": dim_new_cusp(level),
                "ells": ells,
                "congruence": holds,
            }));
            Ok(if holds { Outcome::Ok } else { Outcome::Falsified })
        }
        Command::Fixtures { action } => match action {
            FixturesAction::Validate { path } => {
                let db: FixtureDb = load_fixtures(&path)?;
                let levels: Vec<u64> =
                    db.records.iter().map(|r| r.level).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
                emit(&json!({
                    "records": db.len(),
                    "levels": levels.len(),
                    "status": "ok",
                }));
                Ok(Outcome::Ok)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("could not configure the thread pool");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Falsified) => ExitCode::from(1),
        Ok(Outcome::Undecided) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                qmf_core::Error::ConsistencyFailure(_) | qmf_core::Error::MassMismatch { .. } => {
                    ExitCode::from(1)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}
