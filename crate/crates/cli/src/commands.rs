//! The four subcommands: compile, transform, bands, verify-support.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use fmft_core::bethe::{
    build_sector_matrix, diagonalize_sector, full_ed_oracle_with_cap, gap_clusters,
    sector_partition, BandDiagram, BandEntry, ChainParams,
};
use fmft_core::fock::binomial;
use fmft_core::transforms::{
    apply_sequence, dft_matrix, fmft_sequence, invert_sequence, mft_fold_compile, GateSequence,
};

use crate::formats;
use crate::{CliError, CliResult};

/// Which compilation route `compile` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// Butterfly network; power-of-two site counts only.
    Fmft,
    /// Folded compilation of the Fourier mode transform; any `n >= 2`.
    MftDft,
}

/// Shared numeric knobs with their shipped defaults.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub norm: f64,
    pub leakage: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-12,
            leakage: 1e-10,
            oracle: 1e-9,
        }
    }
}

fn check_site_count(n: usize) -> CliResult<()> {
    if !(1..=64).contains(&n) {
        return Err(CliError::new(
            "invalid-arguments",
            format!("n = {n} out of range 1..=64"),
        ));
    }
    Ok(())
}

/// Compile a transform and write its gate list; returns the sequence for
/// the count summary.
pub fn cmd_compile(kind: TransformKind, n: usize, out: &Path) -> CliResult<GateSequence> {
    check_site_count(n)?;
    let seq = match kind {
        TransformKind::Fmft => {
            if n < 2 || !n.is_power_of_two() {
                return Err(CliError::new(
                    "invalid-arguments",
                    format!("n = {n} is not a power of two >= 2; use `compile mft-dft` instead"),
                ));
            }
            fmft_sequence(n)?
        }
        TransformKind::MftDft => {
            if n < 2 {
                return Err(CliError::new(
                    "invalid-arguments",
                    format!("n = {n} too small; the folded transform needs n >= 2"),
                ));
            }
            // The conjugated Fourier target makes this route agree with
            // the butterfly network gate-for-action, so the two gate
            // files are interchangeable downstream.
            mft_fold_compile(&dft_matrix(n).conjugate())?
        }
    };
    formats::write_gates(out, &seq)?;
    Ok(seq)
}

/// Outcome of a `transform` run, for reporting.
pub struct TransformReport {
    pub norm_in: f64,
    pub norm_out: f64,
    pub relative_change: f64,
}

/// Apply a gate file (optionally inverted) to a state file.
pub fn cmd_transform(
    gates_path: &Path,
    state_path: &Path,
    inverse: bool,
    out: &Path,
    tol: &Tolerances,
) -> CliResult<TransformReport> {
    let seq = formats::read_gates(gates_path)?;
    let mut state = formats::read_state(state_path)?;
    if seq.n() != state.basis().n() {
        return Err(CliError::new(
            "dimension-mismatch",
            format!(
                "gate list is for n = {}, state for n = {}",
                seq.n(),
                state.basis().n()
            ),
        ));
    }
    let applied = if inverse { invert_sequence(&seq) } else { seq };
    let norm_in = state.norm();
    apply_sequence(&mut state, &applied)?;
    let norm_out = state.norm();
    let relative_change = if norm_in > 0.0 {
        (norm_out - norm_in).abs() / norm_in
    } else {
        norm_out
    };
    if relative_change > tol.norm {
        return Err(CliError::new(
            "norm-violation",
            format!("norm changed by {relative_change:.3e} (tolerance {:.3e})", tol.norm),
        ));
    }
    formats::write_state(out, &state)?;
    Ok(TransformReport {
        norm_in,
        norm_out,
        relative_change,
    })
}

/// Cost model for a sector-matrix build: every gate touches every
/// amplitude of every column once.
pub fn estimate_build_ops(seq: &GateSequence, n: usize, m: usize) -> u128 {
    let dim = binomial(n, m) as u128;
    seq.len() as u128 * dim * dim
}

/// Build a band diagram with sector-level parallelism. Sector results
/// are collected in residue order, so the output is identical for every
/// thread count.
pub fn parallel_band_diagram(
    params: &ChainParams,
    seq: &GateSequence,
    leak_tol: f64,
) -> CliResult<(BandDiagram, f64)> {
    let sectors = sector_partition(params)?;
    let results: Result<Vec<(BandEntry, f64)>, fmft_core::Error> = sectors
        .par_iter()
        .map(|sector| {
            let built = build_sector_matrix(sector, params, seq, leak_tol)?;
            let eigenvalues = diagonalize_sector(&built.matrix)?;
            Ok((
                BandEntry {
                    q: sector.q,
                    k: sector.k,
                    k_shifted: sector.k_shifted,
                    eigenvalues,
                },
                built.max_leakage,
            ))
        })
        .collect();
    let results = results?;
    let max_leakage = results.iter().fold(0.0_f64, |m, (_, l)| m.max(*l));
    let entries = results.into_iter().map(|(e, _)| e).collect();
    Ok((BandDiagram::from_entries(*params, entries)?, max_leakage))
}

/// What `bands` did, for the summary printout.
pub struct BandsReport {
    pub rows: usize,
    pub max_leakage: f64,
    pub clusters: Option<Vec<(usize, f64)>>,
    pub oracle_deviation: Option<f64>,
    pub oracle_skipped: Option<String>,
    pub script_path: PathBuf,
}

pub struct BandsRequest {
    pub params: ChainParams,
    pub out: PathBuf,
    pub oracle: bool,
    pub budget: u128,
    pub ed_cap: u64,
}

/// Compute and write a band diagram (CSV plus gnuplot script), refusing
/// builds whose estimated cost exceeds the operation budget.
pub fn cmd_bands(req: &BandsRequest, tol: &Tolerances) -> CliResult<BandsReport> {
    let params = &req.params;
    let seq = fmft_core::bethe::momentum_transform(params.n)?;
    let estimate = estimate_build_ops(&seq, params.n, params.m);
    if estimate > req.budget {
        return Err(CliError::new(
            "budget-exceeded",
            format!(
                "estimated {estimate:.3e} gate-amplitude operations exceed the budget {:.3e} \
                 (n = {}, m = {}, dim = {}); raise --budget to proceed",
                req.budget as f64,
                params.n,
                params.m,
                binomial(params.n, params.m)
            ),
        ));
    }

    let (diagram, max_leakage) = parallel_band_diagram(params, &seq, tol.leakage)?;
    formats::write_band_csv(&req.out, &diagram)?;
    let script_path = req.out.with_extension("gp");
    formats::write_band_plot_script(&script_path, &req.out)?;

    let clusters = gap_clusters(&diagram)
        .map(|cs| cs.iter().map(|c| (c.count, c.mean)).collect::<Vec<_>>());

    let mut oracle_deviation = None;
    let mut oracle_skipped = None;
    if req.oracle {
        let dim = binomial(params.n, params.m);
        if dim > req.ed_cap {
            oracle_skipped = Some(format!(
                "dimension {dim} exceeds the exact-diagonalization cap {}",
                req.ed_cap
            ));
        } else {
            let ed = full_ed_oracle_with_cap(params, req.ed_cap)?;
            let ours = diagram.sorted_eigenvalues();
            let deviation = ours
                .iter()
                .zip(&ed)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            if deviation > tol.oracle {
                return Err(CliError::new(
                    "oracle-deviation",
                    format!(
                        "sector spectrum deviates from direct diagonalization by {deviation:.3e} \
                         (tolerance {:.3e})",
                        tol.oracle
                    ),
                ));
            }
            oracle_deviation = Some(deviation);
        }
    }

    Ok(BandsReport {
        rows: diagram.total_eigenvalues(),
        max_leakage,
        clusters,
        oracle_deviation,
        oracle_skipped,
        script_path,
    })
}
