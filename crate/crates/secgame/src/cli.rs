//! The `secgame` command line: `solve`, `verify`, and `bench`.
//!
//! Exit codes: 0 success; 1 verification failure; 2 bad input or parse
//! error; 3 enumeration over the configured cap; 4 internal fast-path
//! cross-check failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchConfig, CostDist};
use crate::error::{Error, Result};
use crate::game::{normalize, GameInstance, SparseMixedStrategy, TargetSubset};
use crate::io::{
    emit_certificate, read_certificate, read_instance, strategy_atoms, CertificateFile,
};
use crate::lift::{lift_defender, lift_marginal, verify_saddle, DEFAULT_ENUM_CAP};
use crate::oracle::{oracle_outcome, DEFAULT_MATRIX_CAP};
use crate::solve::{solve_fast_sorted, solve_fast_with_stats};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_SCALE_LIMIT: i32 = 3;
pub const EXIT_CROSS_CHECK: i32 = 4;

#[derive(Parser)]
#[command(
    name = "secgame",
    about = "Saddle-point solver for zero-sum security games with additive utility",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and write a JSON certificate.
    Solve(SolveArgs),
    /// Check a certificate's strategies against every pure action.
    Verify(VerifyArgs),
    /// Time the linear solvers on seeded random instances.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Fast,
    Oracle,
    Both,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON: {"costs": [...], "k_a": n, "k_d": n}.
    #[arg(long)]
    input: PathBuf,
    /// Certificate destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Fast)]
    mode: Mode,
    /// Also emit lifted mixed strategies.
    #[arg(long)]
    strategies: bool,
    /// Payoff-matrix entry cap for oracle solves.
    #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
    cap: u128,
    /// Solve the oracle LP in exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Report runtime_ns as 0 for byte-stable output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance JSON.
    #[arg(long)]
    input: PathBuf,
    /// Certificate JSON containing strategies.
    #[arg(long)]
    certificate: PathBuf,
    /// Saddle inequality tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Pure-action enumeration cap per side.
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    cap: u128,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated list of target counts.
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    /// Defender budget as a fraction of m (default 0.1).
    #[arg(long)]
    kd_frac: Option<f64>,
    /// Cross-check against the LP oracle where the matrix fits the cap.
    #[arg(long)]
    with_oracle: bool,
    /// Payoff-matrix entry cap for oracle comparisons.
    #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
    cap: u128,
    /// CSV destination; printed after the text report when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Zero timing columns for byte-stable output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Uniform,
    Lognormal,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ScaleLimit { .. } => EXIT_SCALE_LIMIT,
        _ => EXIT_BAD_INPUT,
    }
}

/// Parses `argv` and runs the selected subcommand; returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            let code = if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Solve(args) => cmd_solve(&args),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::Bench(args) => cmd_bench(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn load_instance(path: &Path) -> Result<GameInstance> {
    let file = read_instance(path)?;
    normalize(&file.costs, file.k_a, file.k_d)
}

fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let g = load_instance(&args.input)?;
    let start = Instant::now();

    let fast = if args.mode == Mode::Fast || args.mode == Mode::Both {
        let (cert, stats) = solve_fast_with_stats(&g)?;
        if !stats.values_agree() {
            eprintln!(
                "error: attacker value {} and defender value {} disagree (relative {:.3e})",
                stats.attacker_value,
                stats.defender_value,
                stats.discrepancy()
            );
            return Ok(EXIT_CROSS_CHECK);
        }
        Some(cert)
    } else {
        None
    };

    let oracle = if args.mode == Mode::Oracle || args.mode == Mode::Both {
        Some(oracle_outcome(&g, args.cap, args.exact)?)
    } else {
        None
    };

    if let (Some(fast), Some(oracle)) = (&fast, &oracle) {
        let dv = (fast.value - oracle.certificate.value).abs();
        println!(
            "fast value {:.17e}, oracle value {:.17e}, |dv| = {:.3e}",
            fast.value, oracle.certificate.value, dv
        );
    }

    let (attacker_strategy, defender_strategy) = if args.strategies {
        match (&fast, &oracle) {
            // Fast path: lift the sorted-order marginals.
            (Some(_), _) => {
                let (alpha, beta, _) = solve_fast_sorted(&g)?;
                let p = lift_marginal(
                    &crate::game::MarginalVector::new(alpha, g.k_a() as f64)?,
                    g.k_a(),
                )?;
                let q = lift_defender(
                    &crate::game::MarginalVector::new(beta, (g.m() - g.k_d()) as f64)?,
                    g.k_d(),
                    g.m(),
                )?;
                let oid = |l: usize| g.orig_id(l);
                (Some(strategy_atoms(&p, oid)), Some(strategy_atoms(&q, oid)))
            }
            // Oracle-only: the LP support is already a mixed strategy.
            (None, Some(out)) => {
                let oid = |l: usize| g.orig_id(l);
                (
                    Some(strategy_atoms(&out.attacker_strategy, oid)),
                    Some(strategy_atoms(&out.defender_strategy, oid)),
                )
            }
            (None, None) => (None, None),
        }
    } else {
        (None, None)
    };

    let cert = fast
        .or_else(|| oracle.map(|o| o.certificate))
        .expect("at least one solve ran");
    let runtime_ns = if args.no_timing {
        0
    } else {
        start.elapsed().as_nanos() as u64
    };
    let file =
        CertificateFile::from_certificate(&cert, attacker_strategy, defender_strategy, runtime_ns);
    let text = emit_certificate(&file);
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn strategy_from_atoms(
    atoms: &[crate::io::StrategyAtom],
    g: &GameInstance,
    subset_size: usize,
) -> Result<SparseMixedStrategy> {
    let inv = g.inverse_perm();
    let mut converted = Vec::with_capacity(atoms.len());
    for atom in atoms {
        let mut members = Vec::with_capacity(atom.targets.len());
        for &id in &atom.targets {
            if id == 0 || id > g.m() {
                return Err(Error::IndexOutOfRange {
                    what: format!("target id {} not in 1..={}", id, g.m()),
                });
            }
            members.push(inv[id]);
        }
        converted.push((TargetSubset::new(members)?, atom.prob));
    }
    SparseMixedStrategy::new(converted, subset_size)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let g = load_instance(&args.input)?;
    let cert = read_certificate(&args.certificate)?;
    if cert.alpha.len() != g.m() || cert.beta.len() != g.m() {
        return Err(Error::Parse(format!(
            "certificate is for {} targets, instance has {}",
            cert.alpha.len(),
            g.m()
        )));
    }
    let (Some(p_atoms), Some(q_atoms)) = (&cert.attacker_strategy, &cert.defender_strategy) else {
        return Err(Error::Parse(
            "certificate carries no strategies; re-solve with --strategies".into(),
        ));
    };
    let p = strategy_from_atoms(p_atoms, &g, g.k_a())?;
    let q = strategy_from_atoms(q_atoms, &g, g.k_d())?;
    let verdict = verify_saddle(&p, &q, cert.value, &g, args.tol, args.cap)?;
    let to_orig = |s: &TargetSubset| {
        let mut ids: Vec<usize> = s.members().iter().map(|&l| g.orig_id(l)).collect();
        ids.sort_unstable();
        ids
    };
    if verdict.pass {
        println!(
            "saddle verified: value {:.17e}, attacker guarantees {:.17e}, defender concedes {:.17e}",
            cert.value, verdict.defense_side_min, verdict.attack_side_max
        );
        Ok(EXIT_OK)
    } else {
        println!(
            "saddle verification FAILED at tol {:e}: value {:.17e}",
            args.tol, cert.value
        );
        println!(
            "  attacker guarantee {:.17e} (witness defense {:?})",
            verdict.defense_side_min,
            to_orig(&verdict.min_defense)
        );
        println!(
            "  defender exposure  {:.17e} (witness attack {:?})",
            verdict.attack_side_max,
            to_orig(&verdict.max_attack)
        );
        Ok(EXIT_VERIFY_FAIL)
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    let cfg = BenchConfig {
        m_list: args.m_list.clone(),
        trials: args.trials,
        seed: args.seed,
        dist: match args.dist {
            DistArg::Uniform => CostDist::Uniform,
            DistArg::Lognormal => CostDist::LogNormal,
        },
        kd_frac: args.kd_frac,
        with_oracle: args.with_oracle,
        oracle_cap: args.cap,
        no_timing: args.no_timing,
    };
    let report = run_bench(&cfg)?;
    print!("{}", report.text_report());
    let csv = report.to_csv();
    match &args.output {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}
