//! Command-line front door: membership checks, enumeration, counting,
//! complements, partition fibers, exact moments, limits, cumulants,
//! simulation, and the one-shot verification suite.
//!
//! Every result is printed as one JSON object per line on stdout. Exit
//! codes: 0 on success, 1 on a domain error (reported on stderr), 2 on a
//! usage error (clap's default).

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::process::ExitCode;
use std::str::FromStr;

use annular_core::annular_nc::{
    circle_partition, count_connected_closed_form, count_disconnected_closed_form,
    enumerate_ann_nc_with_guard, genus_defect, is_ann_nc, is_ann_nc_geodesic, is_connected,
    kreweras, membership_witness, nc_ann_fiber, parity_double, AnnulusShape, ConnectivityFilter,
};
use annular_core::matrixsim::{
    estimate_trace_covariance, estimate_trace_product, Ensemble as SimEnsemble,
};
use annular_core::moments::{
    classical_cumulant_exact_with_guard, connected_cumulant_exact_with_guard,
    finite_n_covariance_identity_with_guard, fluctuation_limits, gue_limit_covariance_with_guard,
    gue_limit_moment, gue_trace_product_exact_with_guard, wishart_limit_covariance_with_guard,
    wishart_limit_moment, wishart_trace_product_exact_with_guard, CPoly, Word,
};
use annular_core::partitions::SetPartition;
use annular_core::permcore::Permutation;
use annular_core::verify::{run_all, VerifyConfig};
use annular_core::BigRational;

const SEED_ENV: &str = "ANNULAR_SEED";
const DEFAULT_SEED: u64 = 0x5EED_CAFE;

#[derive(Parser)]
#[command(
    name = "annular",
    version,
    about = "Annular non-crossing permutations and Wishart/GUE trace moments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Geodesic,
    Patterns,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    ClosedForm,
    Enumerate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CumulantMethod {
    Mobius,
    Connected,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnsembleArg {
    Wishart,
    Gue,
}

#[derive(Subcommand)]
enum Command {
    /// Membership test for a two-circle shape, with a crossing witness.
    Check {
        /// Circle sizes, e.g. "5,3".
        #[arg(long)]
        shape: String,
        /// Permutation in cycle notation, e.g. "(1,8)(3,4,7)(5,6)".
        #[arg(long)]
        perm: String,
        /// Which membership test decides.
        #[arg(long, value_enum, default_value_t = Method::Geodesic)]
        method: Method,
    },
    /// List every member of the shape, one JSON line each.
    Enumerate {
        #[arg(long)]
        shape: String,
        /// Only members with an orbit meeting both circles.
        #[arg(long)]
        connected: bool,
        /// Only members without such an orbit.
        #[arg(long)]
        disconnected: bool,
        /// Enumeration guard on p+q.
        #[arg(long, default_value_t = 9)]
        max_n: u32,
    },
    /// Count members, by closed form or by enumeration.
    Count {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        disconnected: bool,
        #[arg(long, value_enum, default_value_t = CountMethod::ClosedForm)]
        method: CountMethod,
        #[arg(long, default_value_t = 9)]
        max_n: u32,
    },
    /// Kreweras complement of a member.
    Complement {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        perm: String,
    },
    /// All members whose orbit partition matches the given blocks.
    Fiber {
        #[arg(long)]
        shape: String,
        /// Blocks as comma-separated labels joined by '|', e.g. "1,3|2,4".
        #[arg(long)]
        blocks: String,
    },
    /// Double a connected member into a parity-alternating pair permutation
    /// of the doubled shape.
    ParityBijection {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        perm: String,
    },
    /// Exact finite-size trace moment, or its large-dimension limit.
    Moment {
        #[arg(long, value_enum, default_value_t = EnsembleArg::Wishart)]
        ensemble: EnsembleArg,
        /// Words as comma-separated letters joined by ';', e.g. "1,2,1;2".
        #[arg(long)]
        words: String,
        /// Row dimension (Wishart only).
        #[arg(short = 'm', long)]
        m: Option<u64>,
        /// Column dimension / matrix size.
        #[arg(short = 'n', long)]
        n: Option<u64>,
        /// Compute the limit instead of a finite-size value.
        #[arg(long)]
        limit: bool,
        /// Evaluate the limit polynomial at this ratio, e.g. "3/2".
        #[arg(long)]
        c: Option<String>,
        /// With --limit (Wishart): also emit the polynomial multiplying the
        /// second-order offset c' = lim (M - cN).
        #[arg(long)]
        fluctuation: bool,
        #[arg(long, default_value_t = 9)]
        max_n: u32,
    },
    /// Exact finite-size covariance identity, or the limiting covariance.
    Covariance {
        #[arg(long, value_enum, default_value_t = EnsembleArg::Wishart)]
        ensemble: EnsembleArg,
        /// Exactly two words, e.g. "1,1;1".
        #[arg(long)]
        words: String,
        #[arg(short = 'm', long)]
        m: Option<u64>,
        #[arg(short = 'n', long)]
        n: Option<u64>,
        #[arg(long)]
        limit: bool,
        #[arg(long)]
        c: Option<String>,
        #[arg(long, default_value_t = 9)]
        max_n: u32,
    },
    /// Classical cumulant of trace monomials, by Möbius inversion and/or the
    /// connected permutation sum.
    Cumulant {
        /// Words joined by ';'.
        #[arg(long)]
        words: String,
        #[arg(short = 'm', long)]
        m: u64,
        #[arg(short = 'n', long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = CumulantMethod::Both)]
        method: CumulantMethod,
        #[arg(long, default_value_t = 9)]
        max_n: u32,
    },
    /// Monte Carlo estimate of a trace product (or covariance), with the
    /// exact value and a z-score when the exact sum is in reach.
    Simulate {
        #[arg(long, value_enum, default_value_t = EnsembleArg::Wishart)]
        ensemble: EnsembleArg,
        #[arg(long)]
        words: String,
        #[arg(short = 'm', long)]
        m: usize,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Defaults to $ANNULAR_SEED or a fixed constant.
        #[arg(long)]
        seed: Option<u64>,
        /// Estimate the covariance of exactly two words instead of the mean
        /// of their product.
        #[arg(long)]
        covariance: bool,
    },
    /// Genus defect, connectivity and circle partition for any number of
    /// circles.
    Defect {
        /// Circle sizes, e.g. "3,2,2".
        #[arg(long)]
        shape: String,
        #[arg(long)]
        perm: String,
    },
    /// Run the full verification suite; nonzero exit if anything fails.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn parse_shape(text: &str) -> Result<AnnulusShape, String> {
    AnnulusShape::from_str(text).map_err(|e| e.to_string())
}

fn parse_perm(text: &str, shape: &AnnulusShape) -> Result<Permutation, String> {
    Permutation::from_cycles(text, &shape.ground()).map_err(|e| e.to_string())
}

fn parse_words(text: &str) -> Result<Vec<Word>, String> {
    let mut letter_lists: Vec<Vec<u32>> = Vec::new();
    for part in text.split(';') {
        let letters = part
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<u32>, _>>()
            .map_err(|_| format!("unparsable word '{part}'"))?;
        letter_lists.push(letters);
    }
    let alphabet = letter_lists
        .iter()
        .flat_map(|l| l.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1);
    letter_lists
        .into_iter()
        .map(|l| Word::new(l, alphabet).map_err(|e| e.to_string()))
        .collect()
}

fn parse_blocks(text: &str, shape: &AnnulusShape) -> Result<SetPartition, String> {
    let blocks = text
        .split('|')
        .map(|b| {
            b.split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<Result<Vec<u32>, _>>()
                .map_err(|_| format!("unparsable block '{b}'"))
        })
        .collect::<Result<Vec<Vec<u32>>, String>>()?;
    SetPartition::new(shape.ground(), blocks).map_err(|e| e.to_string())
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    BigRational::from_str(text).map_err(|e| format!("unparsable rational '{text}': {e}"))
}

fn rat_json(r: &BigRational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

fn poly_json(p: &CPoly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

fn emit(value: Value) {
    println!("{value}");
}

fn two_words(words: Vec<Word>) -> Result<(Word, Word), String> {
    match <[Word; 2]>::try_from(words) {
        Ok([v, w]) => Ok((v, w)),
        Err(ws) => Err(format!("expected exactly two words, got {}", ws.len())),
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Check {
            shape,
            perm,
            method,
        } => {
            let shape = parse_shape(&shape)?;
            let tau = parse_perm(&perm, &shape)?;
            let member = match method {
                Method::Geodesic => is_ann_nc_geodesic(&tau, &shape),
                Method::Patterns => is_ann_nc(&tau, &shape),
            }
            .map_err(|e| e.to_string())?;
            let witness = if member {
                None
            } else {
                membership_witness(&tau, &shape).map_err(|e| e.to_string())?
            };
            emit(json!({
                "member": member,
                "connected": is_connected(&tau, &shape).map_err(|e| e.to_string())?,
                "witness": witness.map(|w| serde_json::to_value(w).expect("witness serializes")),
            }));
        }
        Command::Enumerate {
            shape,
            connected,
            disconnected,
            max_n,
        } => {
            let shape = parse_shape(&shape)?;
            let filter = filter_from_flags(connected, disconnected)?;
            for tau in
                enumerate_ann_nc_with_guard(&shape, filter, max_n).map_err(|e| e.to_string())?
            {
                emit(json!({
                    "perm": tau.format_cycles(),
                    "connected": is_connected(&tau, &shape).map_err(|e| e.to_string())?,
                    "orbits": tau.orbit_count(),
                }));
            }
        }
        Command::Count {
            shape,
            connected,
            disconnected,
            method,
            max_n,
        } => {
            let shape = parse_shape(&shape)?;
            let (p, q) = shape.as_two().map_err(|e| e.to_string())?;
            let filter = filter_from_flags(connected, disconnected)?;
            let (count, method_name) = match method {
                CountMethod::ClosedForm => {
                    let count = match filter {
                        ConnectivityFilter::ConnectedOnly => count_connected_closed_form(p, q),
                        ConnectivityFilter::DisconnectedOnly => {
                            count_disconnected_closed_form(p, q)
                        }
                        ConnectivityFilter::All => {
                            count_connected_closed_form(p, q)
                                + count_disconnected_closed_form(p, q)
                        }
                    };
                    (count.to_string(), "closed_form")
                }
                CountMethod::Enumerate => {
                    let members = enumerate_ann_nc_with_guard(&shape, filter, max_n)
                        .map_err(|e| e.to_string())?;
                    (members.len().to_string(), "enumerate")
                }
            };
            emit(json!({"count": count, "method": method_name}));
        }
        Command::Complement { shape, perm } => {
            let shape = parse_shape(&shape)?;
            let tau = parse_perm(&perm, &shape)?;
            let k = kreweras(&tau, &shape).map_err(|e| e.to_string())?;
            emit(json!({"kreweras": k.format_cycles()}));
        }
        Command::Fiber { shape, blocks } => {
            let shape = parse_shape(&shape)?;
            let pi = parse_blocks(&blocks, &shape)?;
            let fiber = nc_ann_fiber(&pi, &shape).map_err(|e| e.to_string())?;
            emit(json!({
                "size": fiber.len(),
                "fiber": fiber.iter().map(|t| t.format_cycles()).collect::<Vec<_>>(),
            }));
        }
        Command::ParityBijection { shape, perm } => {
            let shape = parse_shape(&shape)?;
            let tau = parse_perm(&perm, &shape)?;
            let (p, q) = shape.as_two().map_err(|e| e.to_string())?;
            let image = parity_double(&tau, &shape).map_err(|e| e.to_string())?;
            emit(json!({
                "image": image.format_cycles(),
                "doubled_shape": format!("{},{}", 2 * p, 2 * q),
            }));
        }
        Command::Moment {
            ensemble,
            words,
            m,
            n,
            limit,
            c,
            fluctuation,
            max_n,
        } => {
            let words = parse_words(&words)?;
            if limit {
                if words.len() != 1 {
                    return Err("limits take a single word; use covariance for pairs".into());
                }
                match ensemble {
                    EnsembleArg::Wishart => {
                        let poly = wishart_limit_moment(&words[0]).map_err(|e| e.to_string())?;
                        let mut out = json!({"poly_c": poly_json(&poly)});
                        if fluctuation {
                            let pair = fluctuation_limits(&words[0]).map_err(|e| e.to_string())?;
                            out["offset_poly_c"] = poly_json(&pair.e_w_prime_coeff);
                        }
                        if let Some(c) = c {
                            let at = poly.eval(&parse_rational(&c)?);
                            out["at_c"] = rat_json(&at);
                        }
                        emit(out);
                    }
                    EnsembleArg::Gue => {
                        let count = gue_limit_moment(&words[0]).map_err(|e| e.to_string())?;
                        emit(json!({"count": count.to_string()}));
                    }
                }
            } else {
                let n = n.ok_or("finite-size moments need -n")?;
                let value = match ensemble {
                    EnsembleArg::Wishart => {
                        let m = m.ok_or("Wishart moments need -m")?;
                        wishart_trace_product_exact_with_guard(&words, m, n, max_n)
                            .map_err(|e| e.to_string())?
                    }
                    EnsembleArg::Gue => {
                        if let Some(m) = m {
                            if m != n {
                                return Err("GUE matrices are square: M must equal N".into());
                            }
                        }
                        gue_trace_product_exact_with_guard(&words, n, max_n)
                            .map_err(|e| e.to_string())?
                    }
                };
                emit(json!({"value": rat_json(&value)}));
            }
        }
        Command::Covariance {
            ensemble,
            words,
            m,
            n,
            limit,
            c,
            max_n,
        } => {
            let (v, w) = two_words(parse_words(&words)?)?;
            if limit {
                match ensemble {
                    EnsembleArg::Wishart => {
                        let poly = wishart_limit_covariance_with_guard(&v, &w, max_n)
                            .map_err(|e| e.to_string())?;
                        let mut out = json!({"poly_c": poly_json(&poly)});
                        if let Some(c) = c {
                            let at = poly.eval(&parse_rational(&c)?);
                            out["at_c"] = rat_json(&at);
                        }
                        emit(out);
                    }
                    EnsembleArg::Gue => {
                        let count = gue_limit_covariance_with_guard(&v, &w, max_n)
                            .map_err(|e| e.to_string())?;
                        emit(json!({"count": count.to_string()}));
                    }
                }
            } else {
                if ensemble == EnsembleArg::Gue {
                    return Err(
                        "finite-size covariance identity is implemented for Wishart".into()
                    );
                }
                let m = m.ok_or("finite-size covariance needs -m")?;
                let n = n.ok_or("finite-size covariance needs -n")?;
                let (lhs, rhs) = finite_n_covariance_identity_with_guard(&v, &w, m, n, max_n)
                    .map_err(|e| e.to_string())?;
                let n_sq = BigRational::from(annular_core::BigInt::from(n * n));
                emit(json!({
                    "lhs": rat_json(&lhs),
                    "rhs": rat_json(&rhs),
                    "equal": lhs == rhs,
                    "covariance": rat_json(&(lhs / n_sq)),
                }));
            }
        }
        Command::Cumulant {
            words,
            m,
            n,
            method,
            max_n,
        } => {
            let words = parse_words(&words)?;
            let mobius = || {
                classical_cumulant_exact_with_guard(&words, m, n, max_n).map_err(|e| e.to_string())
            };
            let connected = || {
                connected_cumulant_exact_with_guard(&words, m, n, max_n).map_err(|e| e.to_string())
            };
            match method {
                CumulantMethod::Mobius => {
                    emit(json!({"value": rat_json(&mobius()?), "method": "mobius"}))
                }
                CumulantMethod::Connected => {
                    emit(json!({"value": rat_json(&connected()?), "method": "connected"}))
                }
                CumulantMethod::Both => {
                    let a = mobius()?;
                    let b = connected()?;
                    emit(json!({
                        "mobius": rat_json(&a),
                        "connected": rat_json(&b),
                        "equal": a == b,
                    }));
                }
            }
        }
        Command::Simulate {
            ensemble,
            words,
            m,
            n,
            trials,
            seed,
            covariance,
        } => {
            let words = parse_words(&words)?;
            let seed = seed.unwrap_or_else(default_seed);
            let sim_ensemble = match ensemble {
                EnsembleArg::Wishart => SimEnsemble::Wishart,
                EnsembleArg::Gue => SimEnsemble::Gue,
            };
            if covariance {
                let (v, w) = two_words(words)?;
                let est = estimate_trace_covariance(&v, &w, sim_ensemble, m, n, trials, seed)
                    .map_err(|e| e.to_string())?;
                let exact = match ensemble {
                    EnsembleArg::Wishart => finite_n_covariance_identity_with_guard(
                        &v,
                        &w,
                        m as u64,
                        n as u64,
                        annular_core::moments::DEFAULT_SUM_GUARD,
                    )
                    .ok()
                    .map(|(lhs, _)| {
                        lhs / BigRational::from(annular_core::BigInt::from((n * n) as u64))
                    }),
                    EnsembleArg::Gue => None,
                };
                let z = exact.as_ref().map(|e| {
                    let ef = rational_f64(e);
                    ((est.value.re - ef).powi(2) + est.value.im.powi(2)).sqrt() / est.std_error
                });
                emit(json!({
                    "covariance": est.value.re,
                    "std_error": est.std_error,
                    "trials": est.trials,
                    "seed": est.seed,
                    "exact": exact.as_ref().map(rat_json),
                    "z_score": z,
                }));
            } else {
                let est = estimate_trace_product(&words, sim_ensemble, m, n, trials, seed)
                    .map_err(|e| e.to_string())?;
                let exact = match ensemble {
                    EnsembleArg::Wishart => wishart_trace_product_exact_with_guard(
                        &words,
                        m as u64,
                        n as u64,
                        annular_core::moments::DEFAULT_SUM_GUARD,
                    )
                    .ok(),
                    EnsembleArg::Gue => gue_trace_product_exact_with_guard(
                        &words,
                        n as u64,
                        annular_core::moments::DEFAULT_SUM_GUARD,
                    )
                    .ok(),
                };
                let z = exact.as_ref().map(|e| {
                    let ef = rational_f64(e);
                    ((est.mean.re - ef).powi(2) + est.mean.im.powi(2)).sqrt() / est.std_error
                });
                let mut out = json!({
                    "mean": est.mean.re,
                    "std_error": est.std_error,
                    "trials": est.trials,
                    "seed": est.seed,
                    "exact": exact.as_ref().map(rat_json),
                    "z_score": z,
                });
                if est.mean.im.abs() > 5.0 * est.std_error {
                    out["warning"] =
                        Value::String("imaginary part exceeds five standard errors".into());
                }
                emit(out);
            }
        }
        Command::Defect { shape, perm } => {
            let shape = parse_shape(&shape)?;
            let tau = parse_perm(&perm, &shape)?;
            let defect = genus_defect(&tau, &shape).map_err(|e| e.to_string())?;
            let alpha = circle_partition(&tau, &shape).map_err(|e| e.to_string())?;
            emit(json!({
                "defect": defect,
                "connected": is_connected(&tau, &shape).map_err(|e| e.to_string())?,
                "circle_partition": alpha.blocks(),
            }));
        }
        Command::Verify { seed, trials } => {
            let cfg = VerifyConfig {
                seed: seed.unwrap_or_else(default_seed),
                mc_trials: trials,
            };
            let results = run_all(&cfg);
            let mut all_pass = true;
            for r in &results {
                all_pass &= r.pass;
                emit(json!({
                    "criterion": r.id,
                    "name": r.name,
                    "pass": r.pass,
                    "detail": r.detail,
                }));
            }
            emit(json!({"all_pass": all_pass}));
            if !all_pass {
                return Err("verification failed".into());
            }
        }
    }
    Ok(())
}

fn filter_from_flags(connected: bool, disconnected: bool) -> Result<ConnectivityFilter, String> {
    match (connected, disconnected) {
        (true, true) => Err("--connected and --disconnected exclude each other".into()),
        (true, false) => Ok(ConnectivityFilter::ConnectedOnly),
        (false, true) => Ok(ConnectivityFilter::DisconnectedOnly),
        (false, false) => Ok(ConnectivityFilter::All),
    }
}

fn rational_f64(r: &BigRational) -> f64 {
    let digits = 18;
    let scaled = r.numer() * annular_core::BigInt::from(10u64.pow(digits))
        / r.denom();
    let s: f64 = scaled.to_string().parse().unwrap_or(f64::NAN);
    s / 10f64.powi(digits as i32)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{}", json!({"error": message}));
            ExitCode::FAILURE
        }
    }
}
