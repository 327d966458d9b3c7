//! `icgw`: one binary exposing the library as subcommands with uniform I/O
//! conventions. Errors go to stderr as single-line JSON diagnostics; exit
//! code 0 is success, 1 is a usage or validation failure, and 2 means a
//! sweep completed with flagged findings.

mod spec;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use anyhow::{Context, Result};
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use icgw_core::explorer::report::write_report;
use icgw_core::explorer::{
    enumerate_classical_suite, run_sweep_with_cancel, ClassicalSuiteOptions, MembershipSettings,
    SweepConfig,
};
use icgw_core::game::{evaluate_ic, run_box_strategy, run_classical_strategy, ICEvaluation};
use icgw_core::gray_wyner::{
    dual_value, entropy_facets_check, membership_test, DualOptions, DualWeights, FacetReport,
    MembershipOptions, MembershipVerdict, RatePoint, CERTIFICATE_TOL, WITNESS_TOL,
};
use icgw_core::pmf::JointPmf;

use spec::{parse_box, parse_source, parse_strategy, parse_vars, parse_weights, StrategySpec};

static CANCEL: AtomicBool = AtomicBool::new(false);

extern "C" fn handle_sigint(_: libc::c_int) {
    CANCEL.store(true, Ordering::SeqCst);
}

#[derive(Parser)]
#[command(name = "icgw", version, about = "Index-retrieval game simulator and rate-region tools")]
struct Cli {
    /// Master seed for every randomized search (env: ICGW_SEED).
    #[arg(long, global = true, env = "ICGW_SEED", default_value_t = 0)]
    seed: u64,
    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Verbosity (repeat for more).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy (or conditional entropy) of a source's marginal, in bits.
    Entropy {
        /// Source spec: uniform:N, dsbs:RHO, bernoulli-product:..., or a file.
        #[arg(long)]
        pmf: String,
        /// Variables to keep (defaults to all), e.g. 0,1.
        #[arg(long)]
        vars: Option<String>,
        /// Conditioning variables, e.g. 2.
        #[arg(long)]
        given: Option<String>,
    },
    /// CHSH score, no-signaling check, and quantum-feasibility label of a box.
    #[command(name = "box")]
    BoxInfo {
        /// Box spec: pr, isotropic:ETA, or file:PATH.
        #[arg(long = "box")]
        spec: String,
        /// No-signaling tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Play the game and evaluate both information inequalities.
    IcRun {
        #[arg(long)]
        source: String,
        /// Strategy spec: box:pr, box:isotropic:ETA, box:file:PATH, or classical:FILE.
        #[arg(long)]
        strategy: String,
        /// Strategy depth; the game is played on 2^k bits.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual support function T(lambda) with witness and certified bound.
    GwDual {
        #[arg(long)]
        source: String,
        /// Weights, e.g. 1,1.
        #[arg(long)]
        lambda: String,
        /// Auxiliary cardinality cap (default |alphabet| + N).
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Region membership of a rate point, with witness or certificate.
    GwMember {
        #[arg(long)]
        source: String,
        /// Rate point R0,R1,...,RN, e.g. 1,0.5,0.5.
        #[arg(long)]
        point: String,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 300)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a (source grid) x (strategy grid) sweep and write reports.
    Sweep {
        /// Sweep config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json and report.csv (falls back to
        /// the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive classical-protocol consistency suite on one source.
    ClassicalSuite {
        #[arg(long)]
        source: String,
        #[arg(long, default_value_t = 1)]
        message_bits: u32,
        #[arg(long, default_value_t = 4)]
        seed_arity_cap: usize,
        /// Number of random shared-randomness mixtures to sample.
        #[arg(long, default_value_t = 200)]
        mixtures: usize,
        /// Skip the membership check (cut-set inequality only).
        #[arg(long)]
        no_membership: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (e.g. `icgw ... | head`).
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit_error(&e.to_string());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit_error(&format!("{e:#}"));
            ExitCode::from(1)
        }
    }
}

fn emit_error(message: &str) {
    eprintln!("{}", serde_json::json!({ "error": message }));
}

/// Formats with 12 significant digits so tolerance comparisons stay
/// scriptable.
fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.1}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

fn write_out<T: Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Entropy { ref pmf, ref vars, ref given } => {
            let p = parse_source(pmf)?;
            let all: Vec<usize> = (0..p.num_vars()).collect();
            let keep = match vars {
                Some(v) => parse_vars(v)?,
                None => all.clone(),
            };
            let (value, label) = match given {
                Some(g) => {
                    let g = parse_vars(g)?;
                    (p.conditional_entropy(&keep, &g)?, "conditional_entropy")
                }
                None => (p.entropy(&keep)?, "entropy"),
            };
            match cli.format {
                Format::Pretty => println!("{}", sig(value)),
                Format::Json => println!("{}", to_json_line(&serde_json::json!({ label: value }))?),
                Format::Csv => println!("{label},{}", sig(value)),
            }
            Ok(0)
        }

        Command::BoxInfo { ref spec, tol } => {
            if tol <= 0.0 {
                anyhow::bail!("tolerance must be positive");
            }
            let b = parse_box(spec)?;
            let chsh = b.chsh_value()?;
            let ns = b.is_no_signaling(tol);
            let quantum = b.is_quantum_feasible()?;
            match cli.format {
                Format::Pretty => {
                    println!("chsh = {}", sig(chsh));
                    println!("no_signaling = {ns}");
                    println!("quantum_feasible = {quantum}");
                }
                Format::Json => println!(
                    "{}",
                    to_json_line(&serde_json::json!({
                        "chsh": chsh,
                        "no_signaling": ns,
                        "quantum_feasible": quantum,
                    }))?
                ),
                Format::Csv => {
                    println!("chsh,{}", sig(chsh));
                    println!("no_signaling,{ns}");
                    println!("quantum_feasible,{quantum}");
                }
            }
            Ok(0)
        }

        Command::IcRun { ref source, ref strategy, k, ref out } => {
            let p = parse_source(source)?;
            let joint = match parse_strategy(strategy, k)? {
                StrategySpec::Boxes(s) => run_box_strategy(&p, &s)?,
                StrategySpec::Classical(s) => run_classical_strategy(&p, &s)?,
            };
            let evaluation = evaluate_ic(&joint, &p)?;
            let rate_point = evaluation.induced_rate_point();
            let report = IcRunReport {
                schema_version: 1,
                source_spec: source.clone(),
                strategy_spec: strategy.clone(),
                k,
                source: p,
                evaluation,
                rate_point,
            };
            if let Some(path) = out {
                write_out(path, &report)?;
            }
            match cli.format {
                Format::Pretty => {
                    let e = &report.evaluation;
                    println!("h_x = {}", sig(e.h_x));
                    println!("sum_mi = {}", sig(e.eq1_rhs));
                    println!("sum_residual = {}", sig(e.eq2_lhs - e.h_x));
                    println!("h_source = {}", sig(e.h_source));
                    println!("eq1_violated = {}", e.eq1_violated);
                    println!("eq2_violated = {}", e.eq2_violated);
                    let rp = &report.rate_point;
                    let rs: Vec<String> = rp.rs().iter().map(|&r| sig(r)).collect();
                    println!("rate_point = ({}, {})", sig(rp.r0()), rs.join(", "));
                }
                Format::Json => println!("{}", to_json_line(&report)?),
                Format::Csv => {
                    let e = &report.evaluation;
                    println!("h_x,{}", sig(e.h_x));
                    println!("sum_mi,{}", sig(e.eq1_rhs));
                    println!("eq1_violated,{}", e.eq1_violated);
                    println!("eq2_violated,{}", e.eq2_violated);
                }
            }
            Ok(0)
        }

        Command::GwDual { ref source, ref lambda, cap, restarts, iterations, ref out } => {
            let p = parse_source(source)?;
            let lam = DualWeights::new(parse_weights(lambda)?)?;
            let opts = DualOptions {
                cardinality_cap: cap,
                restarts,
                iterations,
                seed: cli.seed,
                ..DualOptions::default()
            };
            let started = std::time::Instant::now();
            let value = dual_value(&p, &lam, &opts)?;
            if cli.verbose > 0 {
                eprintln!("gw-dual: solved in {:.2} s", started.elapsed().as_secs_f64());
            }
            let report = GwDualReport {
                schema_version: 1,
                source_spec: source.clone(),
                lambda: lam,
                upper: value.upper,
                certified_lower: value.certified_lower,
                witness: value.witness,
                options: opts,
            };
            if let Some(path) = out {
                write_out(path, &report)?;
            }
            match cli.format {
                Format::Pretty => {
                    println!("upper = {}", sig(report.upper));
                    println!("certified_lower = {}", sig(report.certified_lower));
                    println!(
                        "witness = {}",
                        serde_json::to_string(&report.witness)?
                    );
                }
                Format::Json => println!("{}", to_json_line(&report)?),
                Format::Csv => {
                    println!("upper,{}", sig(report.upper));
                    println!("certified_lower,{}", sig(report.certified_lower));
                }
            }
            Ok(0)
        }

        Command::GwMember { ref source, ref point, cap, restarts, iterations, ref out } => {
            let p = parse_source(source)?;
            let coords = parse_weights(point)?;
            if coords.len() != p.num_vars() + 1 {
                anyhow::bail!(
                    "point has {} coordinates, expected {} (R0 plus one private rate per variable)",
                    coords.len(),
                    p.num_vars() + 1
                );
            }
            let pt = RatePoint::new(coords[0], coords[1..].to_vec())?;
            let opts = MembershipOptions {
                restarts,
                iterations,
                cardinality_cap: cap,
                seed: cli.seed,
                ..MembershipOptions::default()
            };
            let verdict = membership_test(&p, &pt, &opts)?;
            let facets = entropy_facets_check(&p, &pt)?;
            let report = GwMemberReport {
                schema_version: 1,
                source_spec: source.clone(),
                point: pt,
                verdict,
                facets,
                tolerances: Tolerances {
                    witness: WITNESS_TOL,
                    certificate: CERTIFICATE_TOL,
                },
            };
            if let Some(path) = out {
                write_out(path, &report)?;
            }
            match cli.format {
                Format::Pretty => {
                    println!("verdict = {}", report.verdict.label());
                    match &report.verdict {
                        MembershipVerdict::Inside { witness } => {
                            println!("witness = {}", serde_json::to_string(witness)?);
                        }
                        MembershipVerdict::Outside { certificate, certified_bound } => {
                            let ls: Vec<String> =
                                certificate.lambdas().iter().map(|&l| sig(l)).collect();
                            println!("certificate_lambda = ({})", ls.join(", "));
                            println!("certified_bound = {}", sig(*certified_bound));
                        }
                        MembershipVerdict::Undetermined { gap } => {
                            println!("gap = {}", sig(*gap));
                        }
                    }
                    println!("facet_inside = {}", report.facets.facet_inside);
                    println!("facets_complete = {}", report.facets.complete_characterization);
                }
                Format::Json => println!("{}", to_json_line(&report)?),
                Format::Csv => {
                    println!("verdict,{}", report.verdict.label());
                    println!("facet_inside,{}", report.facets.facet_inside);
                }
            }
            Ok(0)
        }

        Command::Sweep { ref config, ref out } => {
            let cfg: SweepConfig = spec::load_json(
                config
                    .to_str()
                    .context("config path is not valid unicode")?,
            )?;
            let out = match (out, &cfg.out_dir) {
                (Some(dir), _) => dir.clone(),
                (None, Some(dir)) => PathBuf::from(dir),
                (None, None) => {
                    anyhow::bail!("no output directory: pass --out or set out_dir in the config")
                }
            };
            unsafe {
                libc::signal(
                    libc::SIGINT,
                    handle_sigint as extern "C" fn(libc::c_int) as usize,
                );
            }
            let started = std::time::Instant::now();
            let report = run_sweep_with_cancel(&cfg, &CANCEL)?;
            if cli.verbose > 0 {
                eprintln!(
                    "sweep: {} records in {:.2} s",
                    report.records.len(),
                    started.elapsed().as_secs_f64()
                );
            }
            let files = write_report(&report, &out)?;
            match cli.format {
                Format::Pretty => {
                    println!("records = {}", report.records.len());
                    println!("partial = {}", report.partial);
                    println!("flags = {}", report.summary.flagged_indices.len());
                    println!("json = {}", files.json.display());
                    println!("csv = {}", files.csv.display());
                }
                Format::Json | Format::Csv => {
                    println!("{}", to_json_line(&report.summary)?)
                }
            }
            if report.partial {
                // Interrupted: records were flushed with the partial marker.
                Ok(130)
            } else if report.summary.has_flags() {
                Ok(2)
            } else {
                Ok(0)
            }
        }

        Command::ClassicalSuite {
            ref source,
            message_bits,
            seed_arity_cap,
            mixtures,
            no_membership,
            ref out,
        } => {
            let p = parse_source(source)?;
            let opts = ClassicalSuiteOptions {
                message_bits,
                seed_arity_cap,
                mixture_trials: mixtures,
                check_membership: !no_membership,
                seed: cli.seed,
                membership: MembershipSettings::default(),
                ..ClassicalSuiteOptions::default()
            };
            let report = enumerate_classical_suite(&p, &opts)?;
            if let Some(path) = out {
                write_out(path, &report)?;
            }
            match cli.format {
                Format::Pretty => {
                    println!("deterministic_protocols = {}", report.deterministic_protocols);
                    println!("mixture_trials = {}", report.mixture_trials);
                    println!("min_eq2_slack = {}", sig(report.min_eq2_slack));
                    println!("violations = {}", report.violations.len());
                }
                Format::Json | Format::Csv => println!("{}", to_json_line(&report)?),
            }
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct IcRunReport {
    schema_version: u32,
    source_spec: String,
    strategy_spec: String,
    k: usize,
    source: JointPmf,
    evaluation: ICEvaluation,
    rate_point: RatePoint,
}

#[derive(Serialize)]
struct GwDualReport {
    schema_version: u32,
    source_spec: String,
    lambda: DualWeights,
    upper: f64,
    certified_lower: f64,
    witness: icgw_core::pmf::Channel,
    options: DualOptions,
}

#[derive(Serialize)]
struct Tolerances {
    witness: f64,
    certificate: f64,
}

#[derive(Serialize)]
struct GwMemberReport {
    schema_version: u32,
    source_spec: String,
    point: RatePoint,
    verdict: MembershipVerdict,
    facets: FacetReport,
    tolerances: Tolerances,
}
