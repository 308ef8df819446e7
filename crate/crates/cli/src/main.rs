//! `fmft` — compile mode-transform circuits, apply them to state files,
//! compute ring-chain band diagrams, and run the verification suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fmft_cli::commands::{self, BandsRequest, Tolerances, TransformKind};
use fmft_cli::verify::{self, Level};
use fmft_cli::{CliError, CliResult};
use fmft_core::bethe::ChainParams;

/// Every value flag can also be supplied through an `FMFT_*` environment
/// variable (for example `FMFT_N=16 fmft bands …`).
#[derive(Parser)]
#[command(name = "fmft", version, about = "Fast mode Fourier transforms on fermionic Fock states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    /// Butterfly network (power-of-two site counts).
    Fmft,
    /// Folded compilation of the Fourier mode transform (any n >= 2).
    MftDft,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a transform into a gate-list JSON file.
    Compile {
        /// Which compilation route to take.
        #[arg(value_enum)]
        transform: TransformArg,
        /// Site count.
        #[arg(long, env = "FMFT_N")]
        n: usize,
        /// Output gate-list path.
        #[arg(long, env = "FMFT_OUT")]
        out: PathBuf,
    },
    /// Apply a gate list to a state file.
    Transform {
        /// Gate-list JSON produced by `compile`.
        gates: PathBuf,
        /// Input state JSON.
        state: PathBuf,
        /// Apply the adjoint-reversed sequence instead.
        #[arg(long)]
        inverse: bool,
        /// Output state path.
        #[arg(long, env = "FMFT_OUT")]
        out: PathBuf,
        /// Largest tolerated relative norm change.
        #[arg(long, env = "FMFT_TOL_NORM", default_value_t = 1e-12)]
        tol_norm: f64,
    },
    /// Compute a band diagram and write CSV plus a gnuplot script.
    Bands {
        /// Site count.
        #[arg(long, env = "FMFT_N")]
        n: usize,
        /// Particle count.
        #[arg(long, env = "FMFT_M")]
        m: usize,
        /// Hopping strength.
        #[arg(long, env = "FMFT_J", default_value_t = 1.0)]
        j: f64,
        /// Interaction strength.
        #[arg(long, env = "FMFT_U", default_value_t = 0.0)]
        u: f64,
        /// Output CSV path (the plot script lands next to it).
        #[arg(long, env = "FMFT_OUT")]
        out: PathBuf,
        /// Cross-check the spectrum against direct diagonalization.
        #[arg(long)]
        oracle: bool,
        /// Worker threads (default: all cores).
        #[arg(long, env = "FMFT_THREADS")]
        threads: Option<usize>,
        /// Refuse builds estimated above this many gate-amplitude ops.
        #[arg(long, env = "FMFT_BUDGET", default_value_t = 100_000_000_000)]
        budget: u128,
        /// Basis-dimension cap for the oracle cross-check.
        #[arg(long, env = "FMFT_ED_CAP", default_value_t = 20_000)]
        ed_cap: u64,
        /// Largest tolerated relative out-of-sector leakage.
        #[arg(long, env = "FMFT_TOL_LEAKAGE", default_value_t = 1e-10)]
        tol_leakage: f64,
        /// Largest tolerated oracle spectrum deviation.
        #[arg(long, env = "FMFT_TOL_ORACLE", default_value_t = 1e-9)]
        tol_oracle: f64,
    },
    /// Run the invariant suite and exit nonzero on any failure.
    Verify {
        /// quick: seconds, up to 8 sites. full: minutes, up to 16 plus
        /// the 64-site ring at low filling.
        #[arg(value_enum)]
        level: LevelArg,
        /// Worker threads (default: all cores).
        #[arg(long, env = "FMFT_THREADS")]
        threads: Option<usize>,
    },
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::new("invalid-arguments", "--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::new("invalid-arguments", e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Compile { transform, n, out } => {
            let kind = match transform {
                TransformArg::Fmft => TransformKind::Fmft,
                TransformArg::MftDft => TransformKind::MftDft,
            };
            let seq = commands::cmd_compile(kind, n, &out)?;
            let counts = seq.gate_counts();
            println!("givens: {}", counts.givens);
            println!("phase: {}", counts.phase);
            println!("permute: {}", counts.permute);
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform {
            gates,
            state,
            inverse,
            out,
            tol_norm,
        } => {
            let tol = Tolerances {
                norm: tol_norm,
                ..Tolerances::default()
            };
            let report = commands::cmd_transform(&gates, &state, inverse, &out, &tol)?;
            println!(
                "norm: {:.17} -> {:.17} (relative change {:.3e})",
                report.norm_in, report.norm_out, report.relative_change
            );
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bands {
            n,
            m,
            j,
            u,
            out,
            oracle,
            threads,
            budget,
            ed_cap,
            tol_leakage,
            tol_oracle,
        } => {
            configure_threads(threads)?;
            let params = ChainParams::new(n, m, j, u)
                .map_err(|e| CliError::new("invalid-arguments", e.to_string()))?;
            let tol = Tolerances {
                leakage: tol_leakage,
                oracle: tol_oracle,
                ..Tolerances::default()
            };
            let req = BandsRequest {
                params,
                out: out.clone(),
                oracle,
                budget,
                ed_cap,
            };
            let report = commands::cmd_bands(&req, &tol)?;
            println!("rows: {}", report.rows);
            println!("max leakage: {:.3e}", report.max_leakage);
            if let Some(clusters) = &report.clusters {
                let summary: Vec<String> = clusters
                    .iter()
                    .map(|(count, mean)| format!("{count} @ {mean:.3}"))
                    .collect();
                println!("clusters: {}", summary.join(", "));
            }
            if let Some(dev) = report.oracle_deviation {
                println!("oracle max deviation: {dev:.3e}");
            }
            if let Some(reason) = &report.oracle_skipped {
                eprintln!("warning: oracle skipped: {reason}");
            }
            println!("wrote {}", out.display());
            println!("wrote {}", report.script_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { level, threads } => {
            configure_threads(threads)?;
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let reports = verify::run(level);
            let mut failures = 0usize;
            for report in &reports {
                match &report.outcome {
                    Ok(detail) => println!("PASS {}: {detail}", report.name),
                    Err(reason) => {
                        failures += 1;
                        println!("FAIL {}: {reason}", report.name);
                    }
                }
            }
            if failures > 0 {
                Err(CliError::new(
                    "verify-failed",
                    format!("{failures} of {} checks failed", reports.len()),
                ))
            } else {
                println!("all {} checks passed", reports.len());
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
