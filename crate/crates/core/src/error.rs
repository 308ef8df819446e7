//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by basis construction, gate application, transform
/// compilation, and the sector pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Sector parameters outside `1 ≤ n ≤ 64`, `0 ≤ m ≤ n`.
    #[error("invalid sector (n = {n}, m = {m}): need 1 <= n <= 64 and 0 <= m <= n")]
    InvalidSector { n: usize, m: usize },

    /// Chain parameters outside the supported range.
    #[error("invalid chain (n = {n}, m = {m}): need 3 <= n <= 64 and 0 <= m <= n")]
    InvalidChain { n: usize, m: usize },

    /// A site index outside `1..=n`.
    #[error("site {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },

    /// A two-site gate with `x >= y` or either site out of range.
    #[error("invalid site pair ({x}, {y}): need 1 <= x < y <= {n}")]
    InvalidSitePair { x: usize, y: usize, n: usize },

    /// A permutation image that is not a bijection on `1..=n`.
    #[error("permutation is not a bijection on 1..={n}")]
    InvalidPermutation { n: usize },

    /// A mask outside the sector basis it was looked up in.
    #[error("mask {mask:#b} is not a member of the (n = {n}, m = {m}) sector basis")]
    MaskNotInBasis { mask: u64, n: usize, m: usize },

    /// Mode indices that are not strictly ascending in `1..=n`.
    #[error("mode set is not strictly ascending within 1..={n}")]
    InvalidModeSet { n: usize },

    /// Two state vectors over different sector bases.
    #[error("sector basis mismatch: (n = {ln}, m = {lm}) vs (n = {rn}, m = {rm})")]
    BasisMismatch {
        ln: usize,
        lm: usize,
        rn: usize,
        rm: usize,
    },

    /// A gate sequence applied to a state over a different site count.
    #[error("dimension mismatch: gate sequence is for n = {seq_n}, state vector for n = {state_n}")]
    DimensionMismatch { seq_n: usize, state_n: usize },

    /// The butterfly generator needs a power-of-two site count.
    #[error("n = {0} is not a power of two >= 2; compile the transform by folding instead")]
    NotPowerOfTwo(usize),

    /// A single-body matrix that fails the unitarity check.
    #[error("matrix is not unitary: max |U U~ - I| = {defect:.3e}")]
    NotUnitary { defect: f64 },

    /// A sector matrix that fails the hermiticity check.
    #[error("matrix is not hermitian: max |A - A~| = {defect:.3e}")]
    NotHermitian { defect: f64 },

    /// A non-square matrix where a square one is required.
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    /// The tridiagonal QL iteration failed to converge.
    #[error("eigensolver failed to converge at index {index}")]
    NoConvergence { index: usize },

    /// A compiled sequence whose single-body action misses its target.
    #[error("compiled sequence does not reconstruct its target: max deviation {deviation:.3e}")]
    Reconstruction { deviation: f64 },

    /// Out-of-sector amplitude produced by the sector sandwich. Signals a
    /// broken sign convention or broken translation symmetry.
    #[error("momentum-sector leakage {leakage:.3e} exceeds tolerance {tol:.3e} (q = {q})")]
    SectorLeakage { leakage: f64, tol: f64, q: usize },

    /// Exact-diagonalization request above the configured basis cap.
    #[error("basis dimension {dim} exceeds the exact-diagonalization cap {cap}")]
    EdCapExceeded { dim: u64, cap: u64 },
}
