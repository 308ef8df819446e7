//! Gate sequences realizing the mode Fourier transform.
//!
//! Two compilation routes produce equivalent transforms:
//!
//! - [`fmft_sequence`] emits the butterfly network for power-of-two `N`:
//!   `(N log2 N)/2` two-site rotations, one twiddle phase per rotation, and
//!   a final bit-reverse mode permutation.
//! - [`mft_fold_compile`] folds an arbitrary single-body unitary into
//!   nearest-neighbor rotations and phases, `N(N-1)/2` rotations for a
//!   dense target.
//!
//! Applied to the state occupying sites `S`, the butterfly sequence
//! produces the mode state with indices `S`; restricted to the
//! single-particle sector its matrix is the entrywise conjugate of
//! [`dft_matrix`]. A sequence is an ordered gate list applied
//! first-to-last to kets; the order is part of the value.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for float math under no_std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::fock::{validate_permutation, SectorBasis, StateVector};
use crate::linalg::CMatrix;
use crate::{Error, Result};

use core::f64::consts::PI;

/// Entries below this magnitude are treated as already folded away.
const FOLD_ZERO: f64 = 1e-14;

/// Tolerance on `max |U U~ - I|` for single-body matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// One elementary operation on a many-body state.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Diagonal phase `e^(i phi)` on states with `site` occupied.
    Phase { site: usize, phi: f64 },
    /// Two-site rotation mixing the pair `(x, y)`, `x < y`.
    Givens { x: usize, y: usize, theta: f64 },
    /// Mode relabeling by an image list of `1..=n`, with sorting parity.
    Permute { perm: Vec<usize> },
}

impl Gate {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Gate::Phase { site, .. } => {
                if *site == 0 || *site > n {
                    return Err(Error::SiteOutOfRange { site: *site, n });
                }
            }
            Gate::Givens { x, y, .. } => {
                if *x == 0 || *y > n || x >= y {
                    return Err(Error::InvalidSitePair { x: *x, y: *y, n });
                }
            }
            Gate::Permute { perm } => validate_permutation(perm, n)?,
        }
        Ok(())
    }

    /// The adjoint gate: negated angle, negated phase, inverse permutation.
    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::Phase { site, phi } => Gate::Phase {
                site: *site,
                phi: -phi,
            },
            Gate::Givens { x, y, theta } => Gate::Givens {
                x: *x,
                y: *y,
                theta: -theta,
            },
            Gate::Permute { perm } => {
                let mut inverse = vec![0usize; perm.len()];
                for (i, &p) in perm.iter().enumerate() {
                    inverse[p - 1] = i + 1;
                }
                Gate::Permute { perm: inverse }
            }
        }
    }
}

/// An ordered list of gates over `n` sites, applied first-to-last to kets.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    n: usize,
    gates: Vec<Gate>,
}

/// Gate totals by variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub givens: usize,
    pub phase: usize,
    pub permute: usize,
}

impl GateSequence {
    /// Build a sequence, validating every gate against `n`.
    ///
    /// Sequences over more than 64 sites can be generated and counted but
    /// not applied to state vectors (the mask width caps those at 64).
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSector { n, m: 0 });
        }
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self { n, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Exact counts by variant.
    pub fn gate_counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::Givens { .. } => c.givens += 1,
                Gate::Phase { .. } => c.phase += 1,
                Gate::Permute { .. } => c.permute += 1,
            }
        }
        c
    }
}

/// A single-body mode expansion: row `j`, column `k` holds the coefficient
/// of site mode `k + 1` in target mode `j + 1`. Unitary by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleBodyMatrix {
    mat: CMatrix,
}

impl SingleBodyMatrix {
    /// Wrap a square matrix, rejecting anything that is not unitary to
    /// [`UNITARY_TOL`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        let defect = mat.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { mat })
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Entrywise complex conjugate (also unitary).
    pub fn conjugate(&self) -> Self {
        Self {
            mat: self.mat.conjugate(),
        }
    }
}

/// The discrete Fourier matrix: entry `(j, k) = W^(j k) / sqrt(N)` with
/// `W = e^(2 pi i / N)` and 0-indexed `j, k`.
pub fn dft_matrix(n: usize) -> SingleBodyMatrix {
    assert!(n >= 1, "dft_matrix needs n >= 1");
    let scale = 1.0 / (n as f64).sqrt();
    let mut mat = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            // Reduce the exponent first so large n keeps full precision.
            let e = (j * k) % n;
            mat[(j, k)] = Complex64::from_polar(scale, 2.0 * PI * e as f64 / n as f64);
        }
    }
    SingleBodyMatrix::new(mat).expect("DFT matrix is unitary")
}

fn bit_reverse_permutation(n: usize, p: u32) -> Vec<usize> {
    (0..n)
        .map(|z| ((z as u64).reverse_bits() >> (64 - p)) as usize + 1)
        .collect()
}

/// The butterfly decomposition of the mode Fourier transform for
/// `n = 2^p`, `p >= 1`.
///
/// Stages run from the largest stride down: for `l = p..1`, blocks of
/// size `2^l` pair their two halves, element `k` of the first half with
/// element `k` of the second, emitting a half rotation followed by the
/// twiddle phase `pi (1 - k / 2^(l-1))` on the second site. A final
/// bit-reverse permutation restores natural mode order. Exactly
/// `(n log2 n) / 2` rotation gates.
pub fn fmft_sequence(n: usize) -> Result<GateSequence> {
    fmft_network(n, false)
}

/// The inverse butterfly network: identical structure with conjugated
/// twiddle phases, `pi (1 + k / 2^(l-1))`. Realizes exactly the inverse
/// of [`fmft_sequence`]; [`invert_sequence`] is the always-available
/// alternative built by adjoint reversal.
pub fn fmft_inverse_sequence(n: usize) -> Result<GateSequence> {
    fmft_network(n, true)
}

fn fmft_network(n: usize, conjugate_twiddles: bool) -> Result<GateSequence> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let p = n.trailing_zeros();
    let mut gates = Vec::with_capacity(n * p as usize + 1);
    for l in (1..=p).rev() {
        let stride = 1usize << (l - 1);
        let block = 1usize << l;
        for j in 0..n / block {
            for k in 0..stride {
                let x = 1 + k + j * block;
                let y = x + stride;
                gates.push(Gate::Givens {
                    x,
                    y,
                    theta: PI / 2.0,
                });
                let twiddle = k as f64 / stride as f64;
                let phi = if conjugate_twiddles {
                    PI * (1.0 + twiddle)
                } else {
                    PI * (1.0 - twiddle)
                };
                gates.push(Gate::Phase { site: y, phi });
            }
        }
    }
    gates.push(Gate::Permute {
        perm: bit_reverse_permutation(n, p),
    });
    GateSequence::new(n, gates)
}

/// The exact inverse of a sequence: gates reversed and adjointed.
pub fn invert_sequence(seq: &GateSequence) -> GateSequence {
    let gates = seq.gates.iter().rev().map(Gate::adjoint).collect();
    GateSequence {
        n: seq.n,
        gates,
    }
}

/// Apply every gate of `seq`, first to last, to `v`.
///
/// Cost contract: one phase or rotation gate is `O(dim)` amplitude
/// operations over the sector dimension; a permutation is `O(dim * m)`.
/// Matrix builds that sweep a whole sector basis therefore cost
/// `O(len * dim)` per column.
pub fn apply_sequence(v: &mut StateVector, seq: &GateSequence) -> Result<()> {
    if v.basis().n() != seq.n {
        return Err(Error::DimensionMismatch {
            seq_n: seq.n,
            state_n: v.basis().n(),
        });
    }
    for g in &seq.gates {
        match g {
            Gate::Phase { site, phi } => v.apply_phase(*site, *phi)?,
            Gate::Givens { x, y, theta } => v.apply_givens(*x, *y, *theta)?,
            Gate::Permute { perm } => v.apply_permutation(perm)?,
        }
    }
    Ok(())
}

/// Restriction of a sequence to the single-particle sector: column `k`
/// holds the amplitudes of the sequence applied to the state occupying
/// site `k + 1` alone.
pub fn single_body_action(seq: &GateSequence) -> Result<SingleBodyMatrix> {
    let n = seq.n;
    let basis = SectorBasis::enumerate(n, 1)?;
    let mut mat = CMatrix::zeros(n, n);
    for k in 0..n {
        let mut v = StateVector::basis_state(basis.clone(), 1u64 << k)?;
        apply_sequence(&mut v, seq)?;
        for (s, amp) in v.amplitudes().iter().enumerate() {
            mat[(s, k)] = *amp;
        }
    }
    SingleBodyMatrix::new(mat)
}

/// Compile an arbitrary single-body unitary into nearest-neighbor
/// rotations and phases by folding.
///
/// Row by row, the target's trailing coefficients are first dephased to
/// the real axis, then swept into the diagonal by rotations acting on
/// neighboring column pairs, each chosen to zero one coefficient; the
/// sweep updates all rows at once, and unitarity guarantees folded rows
/// never reappear. A dense target takes exactly `n(n-1)/2` rotations.
/// The emitted sequence reconstructs the target through
/// [`single_body_action`] to within `1e-10`; anything worse is reported
/// as an error.
pub fn mft_fold_compile(target: &SingleBodyMatrix) -> Result<GateSequence> {
    let n = target.n();
    if n == 0 {
        return Err(Error::InvalidSector { n, m: 0 });
    }
    let mut a = target.matrix().clone();
    // Gates are recorded as the right-multiplications that reduce the
    // target to the identity; the compiled sequence is their adjoints in
    // the same order.
    let mut recorded: Vec<Gate> = Vec::new();

    let dephase_row = |a: &mut CMatrix, recorded: &mut Vec<Gate>, r: usize, from: usize| {
        for j in from..n {
            let z = a[(r, j)];
            if z.norm() <= FOLD_ZERO {
                continue;
            }
            let arg = z.arg();
            if arg.abs() <= 1e-15 {
                continue;
            }
            let phase = Complex64::from_polar(1.0, -arg);
            for i in 0..n {
                a[(i, j)] *= phase;
            }
            recorded.push(Gate::Phase {
                site: j + 1,
                phi: -arg,
            });
        }
    };

    for r in 0..n.saturating_sub(1) {
        dephase_row(&mut a, &mut recorded, r, r);
        for m in (r..n - 1).rev() {
            let av = a[(r, m)].re;
            let bv = a[(r, m + 1)].re;
            if bv.abs() <= FOLD_ZERO {
                continue;
            }
            // Zero column m+1 of row r into column m: pick the rotation
            // with cos(theta/2) = a/r, sin(theta/2) = -b/r.
            let theta = 2.0 * (-bv).atan2(av);
            let c = (theta / 2.0).cos();
            let t = (theta / 2.0).sin();
            for i in 0..n {
                let u = a[(i, m)];
                let w = a[(i, m + 1)];
                a[(i, m)] = c * u - t * w;
                a[(i, m + 1)] = t * u + c * w;
            }
            recorded.push(Gate::Givens {
                x: m + 1,
                y: m + 2,
                theta,
            });
        }
    }
    // The last row can be left carrying the residual determinant phase.
    dephase_row(&mut a, &mut recorded, n - 1, n - 1);

    let gates = recorded.iter().map(Gate::adjoint).collect();
    let seq = GateSequence { n, gates };

    let realized = single_body_action(&seq)?;
    let deviation = realized.matrix().max_abs_diff(target.matrix());
    if deviation > 1e-10 {
        return Err(Error::Reconstruction { deviation });
    }
    Ok(seq)
}
