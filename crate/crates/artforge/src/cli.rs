//! Command-line front-end. The exit code reports computation health only
//! (0 ok, 2 malformed input, 3 solver failure, 4 boundary verdict under
//! --strict); mathematical verdicts live in the JSON payload.

use std::fs;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::convert::{self, Verdict};
use crate::encode;
use crate::error::Error;
use crate::hermitian::DensityMatrix;
use crate::minentropy::{self, BipartiteState, OmegaParams, Side};
use crate::rdm;
use crate::theory::{self, AffineTheory};
use crate::tol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_SOLVER_FAILURE: i32 = 3;
pub const EXIT_STRICT_BOUNDARY: i32 = 4;

#[derive(Parser)]
#[command(
    name = "artforge",
    about = "Convertibility, min-entropy, and resource-destroying-map analysis for affine resource theories",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled diagnostics
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Feasibility tolerance override for CLI-level checks (min 1e-12)
    #[arg(long = "tol-feas", global = true)]
    tol_feas: Option<f64>,
    /// Exit with code 4 when the verdict is Boundary
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    In,
    Out,
}

#[derive(Subcommand)]
enum Command {
    /// Decide single-shot convertibility between two states
    Convert {
        #[arg(long = "theory-in")]
        theory_in: String,
        #[arg(long = "theory-out")]
        theory_out: String,
        #[arg(long)]
        rho: String,
        #[arg(long = "rho-prime")]
        rho_prime: String,
        /// Restrict to the self-dual operation class
        #[arg(long = "self-dual")]
        self_dual: bool,
        /// Also report the W-functional sign cross-check
        #[arg(long = "cross-check")]
        cross_check: bool,
        /// Run the min-entropy monotone scan with this many samples
        #[arg(long)]
        scan: Option<usize>,
    },
    /// Conditional min-entropy of a bipartite state
    Hmin {
        /// Bipartite state matrix (omit when using --params/--rho)
        #[arg(long)]
        omega: Option<String>,
        /// Dimensions d_A,d_B of the bipartite split
        #[arg(long)]
        dims: Option<String>,
        /// OmegaParams JSON {"eta": M, "omegas": [M...], "sigmas": [M...]}
        #[arg(long)]
        params: Option<String>,
        /// Input state for --params assembly
        #[arg(long)]
        rho: Option<String>,
    },
    /// Resource-destroying-map existence for a theory
    Rdm {
        #[arg(long)]
        theory: String,
    },
    /// Structural report on a theory
    Theory {
        #[arg(long)]
        theory: String,
    },
    /// Dual-set queries: membership/g-value of a state, or extreme point
    /// along a direction
    Dual {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        omega: Option<String>,
        #[arg(long)]
        direction: Option<String>,
    },
    /// Min-entropy monotones f_ω / R_fixed / R_full
    Monotone {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        eta: String,
        #[arg(long)]
        t: f64,
        /// Attempt the full alternating minimization instead of R_fixed
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 3)]
        restarts: usize,
        #[arg(long, value_enum, default_value_t = SideArg::In)]
        side: SideArg,
    },
    /// Re-check a stored conversion certificate against its instance
    Verify {
        #[arg(long)]
        certificate: String,
        #[arg(long = "theory-in")]
        theory_in: String,
        #[arg(long = "theory-out")]
        theory_out: String,
        #[arg(long)]
        rho: String,
        #[arg(long = "rho-prime")]
        rho_prime: String,
        #[arg(long = "self-dual")]
        self_dual: bool,
    },
}

/// Parses a CLI argument as inline JSON (leading '{' or '[') or a file path.
fn load_json(arg: &str) -> Result<Value, Error> {
    let text = match arg.trim_start().chars().next() {
        Some('{') | Some('[') => arg.to_string(),
        _ => fs::read_to_string(Path::new(arg))?,
    };
    Ok(serde_json::from_str(&text)?)
}

fn load_theory(arg: &str) -> Result<AffineTheory, Error> {
    theory::build_theory(&encode::theory_spec_from_json(&load_json(arg)?)?)
}

fn load_density(arg: &str) -> Result<DensityMatrix, Error> {
    encode::density_from_json(&load_json(arg)?)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NumericalFailure(_) | Error::BoundaryAmbiguous { .. } => EXIT_SOLVER_FAILURE,
        _ => EXIT_BAD_INPUT,
    }
}

fn print_payload(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(v).expect("serializable")),
        Format::Table => print_table(v, 0),
    }
}

fn print_table(v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) => {
                        println!("{pad}{k}:");
                        print_table(val, indent + 1);
                    }
                    Value::Array(items) if items.iter().any(Value::is_array) => {
                        println!("{pad}{k}: <matrix {}x{}>", items.len(), row_len(items));
                    }
                    other => println!("{pad}{k}: {other}"),
                }
            }
        }
        other => println!("{pad}{other}"),
    }
}

fn row_len(items: &[Value]) -> usize {
    items.first().and_then(Value::as_array).map_or(0, Vec::len)
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is input
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    let tol_feas = match cli.common.tol_feas {
        Some(t) if t < 1e-12 => {
            eprintln!("error: --tol-feas must be at least 1e-12");
            return EXIT_BAD_INPUT;
        }
        Some(t) => t,
        None => tol::EPS_FEAS,
    };
    match dispatch(&cli.command, &cli.common, tol_feas) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn dispatch(cmd: &Command, common: &CommonArgs, tol_feas: f64) -> Result<i32, Error> {
    match cmd {
        Command::Convert {
            theory_in,
            theory_out,
            rho,
            rho_prime,
            self_dual,
            cross_check,
            scan,
        } => {
            let th_in = load_theory(theory_in)?;
            let th_out = load_theory(theory_out)?;
            let rho = load_density(rho)?;
            let rho_p = load_density(rho_prime)?;
            let cert = if *self_dual {
                convert::check_selfdual(&rho, &th_in, &rho_p, &th_out)?
            } else {
                convert::check_rng(&rho, &th_in, &rho_p, &th_out)?
            };
            let mut payload = match encode::certificate_to_json(&cert) {
                Value::Object(m) => m,
                _ => unreachable!(),
            };
            payload.insert(
                "operation_class".into(),
                json!(if *self_dual { "self_dual" } else { "rng" }),
            );
            if *cross_check {
                let agrees = match cert.verdict {
                    Verdict::Feasible => cert.w_value >= -tol::EPS_DECISION,
                    Verdict::Infeasible => cert.w_value < tol::EPS_DECISION,
                    Verdict::Boundary => true,
                };
                payload.insert("w_value_agrees".into(), json!(agrees));
            }
            if let Some(n) = scan {
                let report =
                    convert::scan_monotones(&rho, &th_in, &rho_p, &th_out, *n, common.seed)?;
                payload.insert(
                    "scan".into(),
                    json!({
                        "samples": report.samples,
                        "violations": report
                            .violations
                            .iter()
                            .map(|v| json!({"sample": v.sample, "lhs": v.lhs, "rhs": v.rhs}))
                            .collect::<Vec<_>>(),
                    }),
                );
            }
            print_payload(&Value::Object(payload), common.format);
            if common.strict && cert.verdict == Verdict::Boundary {
                return Ok(EXIT_STRICT_BOUNDARY);
            }
            Ok(EXIT_OK)
        }
        Command::Hmin { omega, dims, params, rho } => {
            let state = match (omega, params) {
                (Some(omega), None) => {
                    let dims = dims.as_deref().ok_or_else(|| {
                        Error::InvalidInput("--omega requires --dims d_A,d_B".into())
                    })?;
                    let parts: Vec<usize> = dims
                        .split(',')
                        .map(|s| s.trim().parse())
                        .collect::<Result<_, _>>()
                        .map_err(|_| Error::InvalidInput("bad --dims".into()))?;
                    if parts.len() != 2 {
                        return Err(Error::InvalidInput("--dims needs two entries".into()));
                    }
                    BipartiteState::new((parts[0], parts[1]), load_density(omega)?)?
                }
                (None, Some(params)) => {
                    let rho = rho.as_deref().ok_or_else(|| {
                        Error::InvalidInput("--params requires --rho".into())
                    })?;
                    let v = load_json(params)?;
                    let get_list = |key: &str| -> Result<Vec<DensityMatrix>, Error> {
                        v.get(key)
                            .and_then(Value::as_array)
                            .ok_or_else(|| Error::InvalidInput(format!("params needs {key:?}")))?
                            .iter()
                            .map(encode::density_from_json)
                            .collect()
                    };
                    let eta = encode::density_from_json(
                        v.get("eta")
                            .ok_or_else(|| Error::InvalidInput("params needs \"eta\"".into()))?,
                    )?;
                    let params = OmegaParams {
                        eta,
                        omegas: get_list("omegas")?,
                        sigmas: get_list("sigmas")?,
                    };
                    minentropy::build_omega(&params, &load_density(rho)?)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "pass exactly one of --omega or --params".into(),
                    ))
                }
            };
            let h = minentropy::hmin(&state)?;
            let hd = minentropy::hmin_dual(&state)?;
            let mut payload = match encode::hmin_record_json(h, "primal", false) {
                Value::Object(m) => m,
                _ => unreachable!(),
            };
            payload.insert("hmin_dual".into(), json!(hd));
            payload.insert("gap".into(), json!((h - hd).abs()));
            print_payload(&Value::Object(payload), common.format);
            Ok(EXIT_OK)
        }
        Command::Rdm { theory } => {
            let th = load_theory(theory)?;
            let verdict = rdm::rdm(&th)?;
            print_payload(&encode::rdm_verdict_to_json(&verdict), common.format);
            Ok(EXIT_OK)
        }
        Command::Theory { theory } => {
            let th = load_theory(theory)?;
            let (g_lo, g_hi) = theory::g_range(&th)?;
            let mut payload = Map::new();
            payload.insert("dim".into(), json!(th.dim));
            payload.insert("n".into(), json!(th.state_basis.len()));
            payload.insert("dim_v".into(), json!(th.v_basis.len()));
            payload.insert("dim_v_perp".into(), json!(th.v_perp_basis.len()));
            payload.insert("g_range".into(), json!([g_lo, g_hi]));
            payload.insert(
                "contains_maximally_mixed".into(),
                json!(th.contains_maximally_mixed),
            );
            if th.contains_maximally_mixed {
                payload.insert("double_dual".into(), json!(theory::double_dual_check(&th)?));
            }
            payload.insert(
                "state_basis".into(),
                Value::Array(
                    th.state_basis
                        .iter()
                        .map(|s| encode::hermitian_to_json(s.matrix()))
                        .collect(),
                ),
            );
            print_payload(&Value::Object(payload), common.format);
            Ok(EXIT_OK)
        }
        Command::Dual { theory, omega, direction } => {
            let th = load_theory(theory)?;
            let mut payload = Map::new();
            if let Some(omega) = omega {
                let w = load_density(omega)?;
                let member = theory::dual_membership(&w, &th, tol_feas);
                payload.insert("member".into(), json!(member));
                if member {
                    payload.insert("g".into(), json!(theory::g_value(&w, &th)?));
                }
            }
            if let Some(direction) = direction {
                let dir = encode::hermitian_from_json(&load_json(direction)?)?;
                let extreme = theory::sample_dual_state(&th, &dir)?;
                payload.insert("extreme_point".into(), encode::hermitian_to_json(extreme.matrix()));
                payload.insert("g".into(), json!(theory::g_value(&extreme, &th)?));
            }
            if payload.is_empty() {
                let (g_lo, g_hi) = theory::g_range(&th)?;
                payload.insert("g_range".into(), json!([g_lo, g_hi]));
            }
            print_payload(&Value::Object(payload), common.format);
            Ok(EXIT_OK)
        }
        Command::Monotone { theory, rho, eta, t, full, restarts, side } => {
            let th = load_theory(theory)?;
            let rho = load_density(rho)?;
            let eta = load_density(eta)?;
            let side = match side {
                SideArg::In => Side::In,
                SideArg::Out => Side::Out,
            };
            let (value, method) = if *full {
                (minentropy::r_full(&rho, &eta, *t, &th, side, *restarts)?, "r_full")
            } else {
                (minentropy::r_fixed(&rho, &eta, *t, &th, side)?, "r_fixed")
            };
            let payload = json!({
                "value": value,
                "t": t,
                "method": method,
                "heuristic": *full,
            });
            print_payload(&payload, common.format);
            Ok(EXIT_OK)
        }
        Command::Verify { certificate, theory_in, theory_out, rho, rho_prime, self_dual } => {
            let th_in = load_theory(theory_in)?;
            let th_out = load_theory(theory_out)?;
            let rho = load_density(rho)?;
            let rho_p = load_density(rho_prime)?;
            let parsed = encode::certificate_from_json(&load_json(certificate)?)?;
            let class = if *self_dual {
                convert::OperationClass::SelfDual
            } else {
                convert::OperationClass::Rng
            };
            let mut payload = Map::new();
            payload.insert("verdict".into(), json!(encode::verdict_str(parsed.verdict)));
            let valid = match parsed.verdict {
                Verdict::Feasible => {
                    let choi = parsed
                        .choi
                        .ok_or_else(|| Error::InvalidInput("Feasible certificate lacks choi".into()))?;
                    let out = convert::apply_channel(&choi, &rho)?;
                    let maps_target =
                        out.matrix().sub(rho_p.matrix()).norm_hs() <= tol_feas.max(1e-6);
                    let free_to_free = th_in.state_basis.iter().all(|s| {
                        convert::apply_channel(&choi, s)
                            .map(|o| theory::is_free(&o, &th_out, tol_feas.max(1e-6)))
                            .unwrap_or(false)
                    });
                    payload.insert("maps_target".into(), json!(maps_target));
                    payload.insert("free_to_free".into(), json!(free_to_free));
                    maps_target && free_to_free
                }
                Verdict::Infeasible => {
                    let w = parsed.witness.ok_or_else(|| {
                        Error::InvalidInput("Infeasible certificate lacks witness".into())
                    })?;
                    let (_, margin) = convert::evaluate_witness(
                        &w.n,
                        &w.y,
                        &w.tau,
                        &rho,
                        &rho_p,
                        &th_out.max_rank_state,
                        &th_in,
                        &th_out,
                        class,
                    )?;
                    payload.insert("margin".into(), json!(margin));
                    margin > tol::EPS_CERT
                }
                Verdict::Boundary => {
                    payload.insert("note".into(), json!("boundary verdicts carry no artifacts"));
                    true
                }
            };
            payload.insert("valid".into(), json!(valid));
            print_payload(&Value::Object(payload), common.format);
            if common.strict && parsed.verdict == Verdict::Boundary {
                return Ok(EXIT_STRICT_BOUNDARY);
            }
            Ok(EXIT_OK)
        }
    }
}
