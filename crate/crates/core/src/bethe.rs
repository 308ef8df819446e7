//! The periodic hopping-plus-interaction chain, block-diagonalized into
//! quasimomentum sectors.
//!
//! The Hamiltonian couples `N` ring sites with hopping strength `J` and a
//! nearest-neighbor density-density interaction `U`. In the transformed
//! mode basis the hopping term is diagonal with mode energies
//! `-2 J cos(2 pi (j-1) / N)`, and translation symmetry splits the
//! `M`-particle space into `N` sectors labeled by
//! `q = sum(j_i - 1) mod N`. A sector matrix is built column by column:
//! take the site Fock state occupying the column's mode indices, push it
//! through the mode transform, weight every site configuration by its
//! interaction energy, pull it back with the inverse transform, and read
//! the coefficients at the sector's own mode sets. Anything landing
//! outside the sector signals a broken sign convention and is a hard
//! error.
//!
//! Two independent oracles guard the pipeline: [`slater_oracle`] expands
//! a product of transformed modes directly as determinants, and
//! [`full_ed_oracle`] diagonalizes the Hamiltonian assembled in the site
//! basis with explicit string signs on the wrap bond.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for float math under no_std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float as _;

use core::f64::consts::PI;

use crate::fock::{binomial, full_mask, jw_string_sign, OccupationState, SectorBasis, StateVector};
use crate::linalg::{self, CMatrix};
use crate::transforms::{
    apply_sequence, dft_matrix, fmft_sequence, invert_sequence, mft_fold_compile, GateSequence,
};
use crate::{Error, Result};

/// Hermiticity tolerance for sector matrices, `max |A - A~|`.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Default bound on the basis dimension accepted by [`full_ed_oracle`].
pub const DEFAULT_ED_CAP: u64 = 20_000;

/// Default bound on relative out-of-sector leakage in a sector build.
pub const DEFAULT_LEAK_TOL: f64 = 1e-10;

/// Ring parameters: `n` sites, `m` particles, hopping `j`, interaction `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub n: usize,
    pub m: usize,
    pub j: f64,
    pub u: f64,
}

impl ChainParams {
    /// Validated constructor; the ring needs at least three sites.
    pub fn new(n: usize, m: usize, j: f64, u: f64) -> Result<Self> {
        if !(3..=64).contains(&n) || m > n || !j.is_finite() || !u.is_finite() {
            return Err(Error::InvalidChain { n, m });
        }
        Ok(Self { n, m, j, u })
    }
}

/// A strictly ascending list of mode indices in `1..=n`, labeling one
/// basis element of the transformed-mode Fock space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSet {
    modes: Vec<usize>,
}

impl ModeSet {
    pub fn new(modes: Vec<usize>, n: usize) -> Result<Self> {
        let ascending = modes.windows(2).all(|w| w[0] < w[1]);
        let in_range = modes.iter().all(|&j| j >= 1 && j <= n);
        if !ascending || !in_range {
            return Err(Error::InvalidModeSet { n });
        }
        Ok(Self { modes })
    }

    /// Decode the occupied-set of a mask.
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        let state = OccupationState::new(mask, n)?;
        Ok(Self {
            modes: state.occupied_sites(),
        })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// The occupation mask with exactly these modes set.
    pub fn mask(&self) -> u64 {
        self.modes.iter().fold(0u64, |m, &j| m | (1u64 << (j - 1)))
    }

    /// Quasimomentum residue `sum(j - 1) mod n`.
    pub fn momentum_residue(&self, n: usize) -> usize {
        self.modes.iter().map(|&j| j - 1).sum::<usize>() % n
    }
}

/// One translation-invariant subspace: every mode set sharing the residue
/// `q`, together with the momentum labels derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSector {
    /// Residue `sum(j_i - 1) mod n`.
    pub q: usize,
    /// `k = 2 pi q / n`, the translation eigenphase.
    pub k: f64,
    /// `mod(k - pi, 2 pi)`, the band-diagram abscissa, in `[0, 2 pi)`.
    pub k_shifted: f64,
    /// Member mode sets, in ascending mask order.
    pub mode_sets: Vec<ModeSet>,
}

impl MomentumSector {
    pub fn dim(&self) -> usize {
        self.mode_sets.len()
    }
}

/// `x mod m` folded into `[0, m)`, for positive `m`.
fn positive_mod(x: f64, m: f64) -> f64 {
    let r = x % m;
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

fn momentum_labels(q: usize, n: usize) -> (f64, f64) {
    let k = 2.0 * PI * q as f64 / n as f64;
    let k_shifted = positive_mod(k - PI, 2.0 * PI);
    (k, k_shifted)
}

/// Count of occupied nearest-neighbor bonds on the ring, wrap included.
fn bond_count(mask: u64, n: usize) -> u32 {
    let rotated = if n == 64 {
        mask.rotate_right(1)
    } else {
        ((mask >> 1) | ((mask & 1) << (n - 1))) & full_mask(n)
    };
    (mask & rotated).count_ones()
}

/// Interaction energy of a site configuration: `u` per occupied pair of
/// ring-adjacent sites, the `(n, 1)` wrap bond included.
pub fn interaction_energy(state: &OccupationState, params: &ChainParams) -> f64 {
    params.u * bond_count(state.mask, params.n) as f64
}

/// Mode energy sum of a mode set: `-2 j cos(2 pi (j_i - 1) / n)` per mode.
/// The hopping term is diagonal in the transformed basis.
pub fn hopping_energy(ms: &ModeSet, params: &ChainParams) -> f64 {
    ms.modes
        .iter()
        .map(|&j| -2.0 * params.j * (2.0 * PI * (j - 1) as f64 / params.n as f64).cos())
        .sum()
}

/// Partition the `(n, m)` mode basis into `n` momentum sectors, keyed by
/// every residue `0..n` (sectors may be empty).
pub fn sector_partition(params: &ChainParams) -> Result<Vec<MomentumSector>> {
    let basis = SectorBasis::enumerate(params.n, params.m)?;
    let mut buckets: Vec<Vec<ModeSet>> = vec![Vec::new(); params.n];
    for ord in 0..basis.dim() {
        let ms = ModeSet::from_mask(basis.mask(ord), params.n)?;
        let q = ms.momentum_residue(params.n);
        buckets[q].push(ms);
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(q, mode_sets)| {
            let (k, k_shifted) = momentum_labels(q, params.n);
            MomentumSector {
                q,
                k,
                k_shifted,
                mode_sets,
            }
        })
        .collect())
}

/// The gate sequence carrying site Fock states to transformed-mode states
/// for any supported `n`: the butterfly network when `n` is a power of
/// two, otherwise a folded compilation of the conjugated Fourier matrix.
pub fn momentum_transform(n: usize) -> Result<GateSequence> {
    if n == 0 {
        return Err(Error::InvalidSector { n, m: 0 });
    }
    if n >= 2 && n.is_power_of_two() {
        fmft_sequence(n)
    } else {
        mft_fold_compile(&dft_matrix(n).conjugate())
    }
}

/// The mode state `|j_1, …, j_M>` as amplitudes over the site basis,
/// produced by running the transform on the site state occupying the
/// mode indices.
pub fn momentum_state(ms: &ModeSet, params: &ChainParams) -> Result<StateVector> {
    momentum_state_with(ms, params, &momentum_transform(params.n)?)
}

/// Same as [`momentum_state`], reusing a caller-compiled transform.
pub fn momentum_state_with(
    ms: &ModeSet,
    params: &ChainParams,
    seq: &GateSequence,
) -> Result<StateVector> {
    let basis = SectorBasis::enumerate(params.n, ms.len())?;
    let mut v = StateVector::basis_state(basis, ms.mask())?;
    apply_sequence(&mut v, seq)?;
    Ok(v)
}

/// Brute-force construction of the same mode state: the amplitude on the
/// site set `s_1 < … < s_M` is the determinant of the matrix with entry
/// `(i, m) = W^(-(j_i - 1)(s_m - 1)) / sqrt(n)`. Independent of the gate
/// machinery.
pub fn slater_oracle(ms: &ModeSet, params: &ChainParams) -> Result<StateVector> {
    let n = params.n;
    let m = ms.len();
    let basis = SectorBasis::enumerate(n, m)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let mut work = vec![Complex64::new(0.0, 0.0); m * m];
    for (ord, amp) in amps.iter_mut().enumerate() {
        let sites = basis.state(ord).occupied_sites();
        for (i, &ji) in ms.modes.iter().enumerate() {
            for (c, &sc) in sites.iter().enumerate() {
                let e = ((ji - 1) * (sc - 1)) % n;
                work[i * m + c] = Complex64::from_polar(scale, -2.0 * PI * e as f64 / n as f64);
            }
        }
        *amp = determinant_in_place(&mut work, m);
    }
    StateVector::from_amplitudes(basis, amps)
}

/// LU determinant with partial pivoting; `mat` is clobbered.
fn determinant_in_place(mat: &mut [Complex64], m: usize) -> Complex64 {
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..m {
        let mut pivot = col;
        let mut best = mat[col * m + col].norm();
        for row in col + 1..m {
            let mag = mat[row * m + col].norm();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..m {
                mat.swap(col * m + k, pivot * m + k);
            }
            det = -det;
        }
        let diag = mat[col * m + col];
        det *= diag;
        for row in col + 1..m {
            let factor = mat[row * m + col] / diag;
            for k in col + 1..m {
                let sub = factor * mat[col * m + k];
                mat[row * m + k] -= sub;
            }
        }
    }
    det
}

/// A sector Hamiltonian block together with the worst relative
/// out-of-sector leakage observed while building it.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub q: usize,
    pub matrix: CMatrix,
    pub max_leakage: f64,
}

/// Realize the Hamiltonian on one momentum sector.
///
/// Column by column: transform the column's site Fock state, weight by
/// the diagonal interaction, transform back, and read the coefficients
/// at the sector's mode sets; mode energies go on the diagonal. Relative
/// leakage outside the sector above `leak_tol` is a hard error — it
/// means the sign bookkeeping or the translation symmetry is broken.
pub fn build_sector_matrix(
    sector: &MomentumSector,
    params: &ChainParams,
    seq: &GateSequence,
    leak_tol: f64,
) -> Result<SectorMatrix> {
    let basis = SectorBasis::enumerate(params.n, params.m)?;
    let inverse = invert_sequence(seq);
    let dim = sector.dim();
    let ords: Vec<usize> = sector
        .mode_sets
        .iter()
        .map(|ms| {
            basis.index(ms.mask()).ok_or(Error::MaskNotInBasis {
                mask: ms.mask(),
                n: params.n,
                m: params.m,
            })
        })
        .collect::<Result<_>>()?;

    let mut in_sector = vec![false; basis.dim()];
    for &ord in &ords {
        in_sector[ord] = true;
    }

    let mut h = CMatrix::zeros(dim, dim);
    let mut max_leakage = 0.0_f64;
    for (c, ms) in sector.mode_sets.iter().enumerate() {
        let mut v = StateVector::basis_state(basis.clone(), ms.mask())?;
        apply_sequence(&mut v, seq)?;
        for (i, amp) in v.amplitudes_mut().iter_mut().enumerate() {
            *amp *= params.u * bond_count(basis.mask(i), params.n) as f64;
        }
        apply_sequence(&mut v, &inverse)?;

        // Leakage is summed directly over the out-of-sector amplitudes;
        // subtracting in-sector from total norms would drown the signal
        // in cancellation noise.
        let mut in_sqr = 0.0_f64;
        let mut out_sqr = 0.0_f64;
        for (i, amp) in v.amplitudes().iter().enumerate() {
            if in_sector[i] {
                in_sqr += amp.norm_sqr();
            } else {
                out_sqr += amp.norm_sqr();
            }
        }
        for (r, &ord) in ords.iter().enumerate() {
            h[(r, c)] = v.amplitudes()[ord];
        }
        let total = (in_sqr + out_sqr).sqrt();
        let relative = if total > 0.0 {
            out_sqr.sqrt() / total
        } else {
            0.0
        };
        max_leakage = max_leakage.max(relative);
        if relative > leak_tol {
            return Err(Error::SectorLeakage {
                leakage: relative,
                tol: leak_tol,
                q: sector.q,
            });
        }
    }
    for (r, ms) in sector.mode_sets.iter().enumerate() {
        h[(r, r)] += hopping_energy(ms, params);
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect });
    }
    Ok(SectorMatrix {
        q: sector.q,
        matrix: h,
        max_leakage,
    })
}

/// Full real spectrum of a Hermitian sector block, ascending with ties
/// adjacent.
pub fn diagonalize_sector(matrix: &CMatrix) -> Result<Vec<f64>> {
    linalg::eigenvalues(matrix, HERMITICITY_TOL)
}

/// Spectrum plus matching eigenvectors (columns), for expectation-value
/// work on individual eigenstates.
pub fn diagonalize_sector_with_vectors(matrix: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    linalg::eigh(matrix, HERMITICITY_TOL)
}

/// Eigenvalues of one sector, keyed by its momentum labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEntry {
    pub q: usize,
    pub k: f64,
    pub k_shifted: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

/// Per-sector sorted eigenvalue lists for the whole `(n, m)` space.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDiagram {
    pub params: ChainParams,
    /// One entry per residue `0..n`, in residue order.
    pub entries: Vec<BandEntry>,
}

impl BandDiagram {
    /// Assemble from per-sector spectra, checking the eigenvalue counts
    /// against the sector dimensions.
    pub fn from_entries(params: ChainParams, entries: Vec<BandEntry>) -> Result<Self> {
        let total: u64 = entries.iter().map(|e| e.eigenvalues.len() as u64).sum();
        if entries.len() != params.n || total != binomial(params.n, params.m) {
            return Err(Error::InvalidChain {
                n: params.n,
                m: params.m,
            });
        }
        Ok(Self { params, entries })
    }

    /// Union of all sector spectra, ascending.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .entries
            .iter()
            .flat_map(|e| e.eigenvalues.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn total_eigenvalues(&self) -> usize {
        self.entries.iter().map(|e| e.eigenvalues.len()).sum()
    }
}

/// Run the whole pipeline serially: partition, build each sector, and
/// diagonalize. The transform is chosen by [`momentum_transform`].
pub fn assemble_band_diagram(params: &ChainParams) -> Result<BandDiagram> {
    let seq = momentum_transform(params.n)?;
    assemble_band_diagram_with(params, &seq, DEFAULT_LEAK_TOL)
}

/// Pipeline with a caller-compiled transform and leakage tolerance. The
/// per-sector work is independent; callers wanting parallelism can run
/// [`build_sector_matrix`] per sector themselves and assemble with
/// [`BandDiagram::from_entries`].
pub fn assemble_band_diagram_with(
    params: &ChainParams,
    seq: &GateSequence,
    leak_tol: f64,
) -> Result<BandDiagram> {
    let sectors = sector_partition(params)?;
    let mut entries = Vec::with_capacity(sectors.len());
    for sector in &sectors {
        let built = build_sector_matrix(sector, params, seq, leak_tol)?;
        let eigenvalues = diagonalize_sector(&built.matrix)?;
        entries.push(BandEntry {
            q: sector.q,
            k: sector.k,
            k_shifted: sector.k_shifted,
            eigenvalues,
        });
    }
    BandDiagram::from_entries(*params, entries)
}

/// One flat band: a maximal run of eigenvalues uninterrupted by a gap
/// wider than the cluster threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCluster {
    pub mean: f64,
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

/// Split the sorted spectrum into gap-separated clusters.
///
/// Only meaningful deep in the interacting regime: returns `None` unless
/// `u >= 10 j`. The split threshold is `max(u/2, 10 j)`.
pub fn gap_clusters(diagram: &BandDiagram) -> Option<Vec<BandCluster>> {
    let p = &diagram.params;
    if p.u < 10.0 * p.j {
        return None;
    }
    let threshold = (p.u / 2.0).max(10.0 * p.j);
    let all = diagram.sorted_eigenvalues();
    if all.is_empty() {
        return Some(Vec::new());
    }
    let mut clusters = Vec::new();
    let mut start = 0usize;
    for i in 1..=all.len() {
        if i == all.len() || all[i] - all[i - 1] > threshold {
            let slice = &all[start..i];
            clusters.push(BandCluster {
                mean: slice.iter().sum::<f64>() / slice.len() as f64,
                count: slice.len(),
                min: slice[0],
                max: slice[slice.len() - 1],
            });
            start = i;
        }
    }
    Some(clusters)
}

/// Histogram of site configurations by occupied-adjacent-bond count:
/// entry `p` counts the `(n, m)` masks with exactly `p` ring bonds. The
/// combinatorial side of the flat-band population check.
pub fn adjacency_histogram(n: usize, m: usize) -> Result<Vec<u64>> {
    let basis = SectorBasis::enumerate(n, m)?;
    let mut hist = vec![0u64; m + 1];
    for &mask in basis.masks() {
        hist[bond_count(mask, n) as usize] += 1;
    }
    Ok(hist)
}

/// The Hamiltonian assembled directly in the site Fock basis: hopping on
/// every ring bond with the generic two-site string rule (the wrap bond
/// crosses the whole interior), interaction on the diagonal.
pub fn full_ed_matrix(params: &ChainParams) -> Result<CMatrix> {
    let basis = SectorBasis::enumerate(params.n, params.m)?;
    let n = params.n;
    let dim = basis.dim();
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let state = basis.state(i);
        h[(i, i)] = Complex64::new(interaction_energy(&state, params), 0.0);
        // Bonds (x, x+1) for x < n, plus the wrap bond as the pair (1, n).
        for x in 1..=n {
            let (lo, hi) = if x < n { (x, x + 1) } else { (1, n) };
            let bl = 1u64 << (lo - 1);
            let bh = 1u64 << (hi - 1);
            let occ_l = state.mask & bl != 0;
            let occ_h = state.mask & bh != 0;
            if occ_l == occ_h {
                continue;
            }
            let target = state.mask ^ bl ^ bh;
            let j = basis
                .index(target)
                .expect("one-particle hop stays in the sector");
            let sign = jw_string_sign(&state, lo, hi)? as f64;
            h[(j, i)] += Complex64::new(-params.j * sign, 0.0);
        }
    }
    Ok(h)
}

/// Independent spectrum of the whole `(n, m)` space by direct
/// diagonalization in the site basis, ascending. Refuses bases larger
/// than `cap`.
pub fn full_ed_oracle_with_cap(params: &ChainParams, cap: u64) -> Result<Vec<f64>> {
    let dim = binomial(params.n, params.m);
    if dim > cap {
        return Err(Error::EdCapExceeded { dim, cap });
    }
    let h = full_ed_matrix(params)?;
    linalg::eigenvalues(&h, HERMITICITY_TOL)
}

/// [`full_ed_oracle_with_cap`] at the default cap.
pub fn full_ed_oracle(params: &ChainParams) -> Result<Vec<f64>> {
    full_ed_oracle_with_cap(params, DEFAULT_ED_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, m: usize, j: f64, u: f64) -> ChainParams {
        ChainParams::new(n, m, j, u).unwrap()
    }

    #[test]
    fn chain_params_validation() {
        assert!(ChainParams::new(2, 1, 1.0, 0.0).is_err());
        assert!(ChainParams::new(65, 1, 1.0, 0.0).is_err());
        assert!(ChainParams::new(8, 9, 1.0, 0.0).is_err());
        assert!(ChainParams::new(8, 2, f64::NAN, 0.0).is_err());
        assert!(ChainParams::new(3, 0, 1.0, 0.0).is_ok());
        assert!(momentum_transform(0).is_err());
    }

    #[test]
    fn interaction_examples() {
        let p = params(4, 3, 1.0, 100.0);
        // Sites {1, 2, 4}: bonds (1,2) and (4,1).
        let s = OccupationState::new(0b1011, 4).unwrap();
        assert_eq!(interaction_energy(&s, &p), 200.0);
        let p0 = params(4, 0, 1.0, 55.0);
        let empty = OccupationState::new(0, 4).unwrap();
        assert_eq!(interaction_energy(&empty, &p0), 0.0);
        let pfull = params(4, 4, 1.0, 1.0);
        let full = OccupationState::new(0b1111, 4).unwrap();
        assert_eq!(interaction_energy(&full, &pfull), 4.0);
    }

    #[test]
    fn hopping_examples() {
        let p = params(4, 1, 1.0, 0.0);
        let ms = ModeSet::new(vec![1], 4).unwrap();
        assert!((hopping_energy(&ms, &p) + 2.0).abs() < 1e-15);
        let ms = ModeSet::new(vec![2], 4).unwrap();
        assert!(hopping_energy(&ms, &p).abs() < 1e-15);
        let p2 = params(4, 2, 1.0, 0.0);
        let ms = ModeSet::new(vec![1, 3], 4).unwrap();
        assert!(hopping_energy(&ms, &p2).abs() < 1e-15);
    }

    #[test]
    fn mode_set_validation() {
        assert!(ModeSet::new(vec![1, 3, 2], 4).is_err());
        assert!(ModeSet::new(vec![1, 1], 4).is_err());
        assert!(ModeSet::new(vec![0, 1], 4).is_err());
        assert!(ModeSet::new(vec![4, 5], 4).is_err());
        let ms = ModeSet::new(vec![2, 4], 4).unwrap();
        assert_eq!(ms.mask(), 0b1010);
        assert_eq!(ms.momentum_residue(4), 0);
    }

    #[test]
    fn partition_n4_m2() {
        let sectors = sector_partition(&params(4, 2, 1.0, 0.0)).unwrap();
        let sizes: Vec<usize> = sectors.iter().map(MomentumSector::dim).collect();
        assert_eq!(sizes, vec![1, 2, 1, 2]);
        assert_eq!(sectors[2].mode_sets, vec![ModeSet::new(vec![1, 3], 4).unwrap()]);
        // Momentum labels follow the shifted convention.
        assert!((sectors[2].k - PI).abs() < 1e-15);
        assert!(sectors[2].k_shifted.abs() < 1e-15);
        let total: usize = sizes.iter().sum();
        assert_eq!(total as u64, binomial(4, 2));
    }

    #[test]
    fn partition_m1_is_singletons() {
        let sectors = sector_partition(&params(4, 1, 1.0, 0.0)).unwrap();
        assert!(sectors.iter().all(|s| s.dim() == 1));
        for (q, s) in sectors.iter().enumerate() {
            assert_eq!(s.mode_sets[0].modes(), &[q + 1]);
        }
    }

    #[test]
    fn partition_n8_m3_near_uniform() {
        let sectors = sector_partition(&params(8, 3, 1.0, 0.0)).unwrap();
        let total: usize = sectors.iter().map(MomentumSector::dim).sum();
        assert_eq!(total, 56);
        assert!(sectors.iter().all(|s| s.dim() == 7));
    }

    #[test]
    fn slater_examples() {
        // Two modes on four sites: the amplitude on sites {1, 2} is a
        // 2x2 determinant worked out by hand.
        let p = params(4, 2, 1.0, 0.0);
        let ms = ModeSet::new(vec![1, 2], 4).unwrap();
        let v = slater_oracle(&ms, &p).unwrap();
        let want = Complex64::new(-0.25, -0.25);
        assert!((v.amplitude(0b0011) - want).norm() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-12);

        let p = params(4, 1, 1.0, 0.0);
        let ms = ModeSet::new(vec![1], 4).unwrap();
        let v = slater_oracle(&ms, &p).unwrap();
        for site in 0..4 {
            assert!((v.amplitude(1 << site) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        }

        // A single mode expands with a uniform row, and distinct mode
        // states are orthogonal.
        let p3 = params(3, 1, 1.0, 0.0);
        let one = slater_oracle(&ModeSet::new(vec![1], 3).unwrap(), &p3).unwrap();
        let two = slater_oracle(&ModeSet::new(vec![2], 3).unwrap(), &p3).unwrap();
        let r = (1.0_f64 / 3.0).sqrt();
        for site in 0..3 {
            assert!((one.amplitude(1 << site) - Complex64::new(r, 0.0)).norm() < 1e-14);
        }
        assert!(one.inner(&two).unwrap().norm() < 1e-14);
    }

    #[test]
    fn momentum_matches_slater_small() {
        for n in [4usize, 8] {
            let seq = momentum_transform(n).unwrap();
            for m in 1..=3usize {
                let p = params(n, m, 1.0, 0.0);
                let basis = SectorBasis::enumerate(n, m).unwrap();
                for ord in 0..basis.dim() {
                    let ms = ModeSet::from_mask(basis.mask(ord), n).unwrap();
                    let fast = momentum_state_with(&ms, &p, &seq).unwrap();
                    let slow = slater_oracle(&ms, &p).unwrap();
                    let dev: f64 = fast
                        .amplitudes()
                        .iter()
                        .zip(slow.amplitudes())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    assert!(dev < 1e-12, "n={n} m={m} mask {:#b}: {dev:e}", basis.mask(ord));
                }
            }
        }
    }

    #[test]
    fn momentum_state_worked_values() {
        let p = params(4, 1, 1.0, 0.0);
        let v = momentum_state(&ModeSet::new(vec![2], 4).unwrap(), &p).unwrap();
        let want = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -0.5),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 0.5),
        ];
        for (site, w) in want.iter().enumerate() {
            assert!((v.amplitude(1 << site) - w).norm() < 1e-14);
        }
    }

    #[test]
    fn translation_eigenphase() {
        // Mode set {1, 3} on four sites: residue 2, eigenphase e^(i pi).
        let p = params(4, 2, 1.0, 0.0);
        let ms = ModeSet::new(vec![1, 3], 4).unwrap();
        let v = momentum_state(&ms, &p).unwrap();
        let mut t = v.clone();
        t.translate();
        let phase = Complex64::from_polar(1.0, 2.0 * PI * 2.0 / 4.0);
        let dev: f64 = t
            .amplitudes()
            .iter()
            .zip(v.amplitudes())
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "not a translation eigenstate: {dev:e}");
    }

    #[test]
    fn sector_matrix_one_particle() {
        let p = params(4, 1, 1.0, 123.0);
        let seq = momentum_transform(4).unwrap();
        let sectors = sector_partition(&p).unwrap();
        let built = build_sector_matrix(&sectors[0], &p, &seq, DEFAULT_LEAK_TOL).unwrap();
        assert_eq!(built.matrix.rows(), 1);
        assert!((built.matrix[(0, 0)] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sector_matrix_wick_value() {
        // The one-dimensional q = 2 sector of (4, 2) holds modes {1, 3}:
        // hopping cancels and the interaction averages to u.
        let p = params(4, 2, 1.0, 100.0);
        let seq = momentum_transform(4).unwrap();
        let sectors = sector_partition(&p).unwrap();
        let built = build_sector_matrix(&sectors[2], &p, &seq, DEFAULT_LEAK_TOL).unwrap();
        assert_eq!(built.matrix.rows(), 1);
        assert!((built.matrix[(0, 0)] - Complex64::new(100.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn free_fermions_are_diagonal() {
        let p = params(8, 2, 1.0, 0.0);
        let seq = momentum_transform(8).unwrap();
        for sector in sector_partition(&p).unwrap() {
            let built = build_sector_matrix(&sector, &p, &seq, DEFAULT_LEAK_TOL).unwrap();
            for r in 0..built.matrix.rows() {
                for c in 0..built.matrix.cols() {
                    if r == c {
                        let want = hopping_energy(&sector.mode_sets[r], &p);
                        assert!((built.matrix[(r, c)].re - want).abs() < 1e-12);
                    } else {
                        assert!(built.matrix[(r, c)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn full_ed_small_spectra() {
        let vals = full_ed_oracle(&params(4, 1, 1.0, 7.0)).unwrap();
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (got, w) in vals.iter().zip(want.iter()) {
            assert!((got - w).abs() < 1e-12);
        }
        let vals = full_ed_oracle(&params(4, 2, 1.0, 0.0)).unwrap();
        let want = [-2.0, -2.0, 0.0, 0.0, 2.0, 2.0];
        for (got, w) in vals.iter().zip(want.iter()) {
            assert!((got - w).abs() < 1e-12);
        }
        // Filled band: hopping is blocked, four bonds remain.
        let vals = full_ed_oracle(&params(4, 4, 1.0, 7.0)).unwrap();
        assert_eq!(vals.len(), 1);
        assert!((vals[0] - 28.0).abs() < 1e-12);
    }

    #[test]
    fn ed_cap_is_enforced() {
        let p = params(16, 4, 1.0, 0.0);
        assert!(matches!(
            full_ed_oracle_with_cap(&p, 1000),
            Err(Error::EdCapExceeded { dim: 1820, cap: 1000 })
        ));
    }

    #[test]
    fn band_diagram_free_particle() {
        let p = params(4, 1, 1.0, 3.0);
        let diagram = assemble_band_diagram(&p).unwrap();
        let all = diagram.sorted_eigenvalues();
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (got, w) in all.iter().zip(want.iter()) {
            assert!((got - w).abs() < 1e-12);
        }
        assert_eq!(diagram.total_eigenvalues(), 4);
    }

    #[test]
    fn spectrum_equivalence_small() {
        for (n, m) in [(4usize, 2usize), (5, 2), (6, 2), (8, 3)] {
            for u in [0.0, 1.0, 100.0] {
                let p = params(n, m, 1.0, u);
                let diagram = assemble_band_diagram(&p).unwrap();
                let got = diagram.sorted_eigenvalues();
                let want = full_ed_oracle(&p).unwrap();
                assert_eq!(got.len(), want.len());
                let dev: f64 = got
                    .iter()
                    .zip(want.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-9, "n={n} m={m} u={u}: {dev:e}");
            }
        }
    }

    #[test]
    fn kramers_pairing_small() {
        let p = params(8, 3, 1.0, 100.0);
        let diagram = assemble_band_diagram(&p).unwrap();
        for q in 0..8usize {
            let partner = (8 - q) % 8;
            let a = &diagram.entries[q].eigenvalues;
            let b = &diagram.entries[partner].eigenvalues;
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-9, "q={q}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn clusters_at_strong_interaction() {
        for n in [8usize, 16] {
            let p = params(n, 2, 1.0, 100.0);
            let diagram = assemble_band_diagram(&p).unwrap();
            let clusters = gap_clusters(&diagram).expect("clustering active at u >= 10 j");
            let hist = adjacency_histogram(n, 2).unwrap();
            assert_eq!(clusters.len(), 2);
            assert_eq!(clusters[0].count as u64, hist[0]);
            assert_eq!(clusters[1].count as u64, hist[1]);
            assert!((clusters[1].mean - clusters[0].mean - 100.0).abs() < 6.0);
        }
        // Sixteen sites split 104 scattering states from 16 bound pairs.
        assert_eq!(adjacency_histogram(16, 2).unwrap(), vec![104, 16, 0]);
        // Clustering is declined in the weak regime.
        let weak = assemble_band_diagram(&params(8, 2, 1.0, 1.0)).unwrap();
        assert!(gap_clusters(&weak).is_none());
    }

    #[test]
    fn adjacency_histogram_counts() {
        // Ring of 16, three particles: 16 triples of three-in-a-row,
        // 16 * 12 with exactly one bond, the rest scattered.
        let hist = adjacency_histogram(16, 3).unwrap();
        assert_eq!(hist[2], 16);
        assert_eq!(hist[1], 192);
        assert_eq!(hist[0], 352);
        assert_eq!(hist.iter().sum::<u64>(), binomial(16, 3));
    }

    #[test]
    fn filled_and_empty_limits() {
        let empty = assemble_band_diagram(&params(6, 0, 1.0, 9.0)).unwrap();
        let all = empty.sorted_eigenvalues();
        assert_eq!(all.len(), 1);
        assert!(all[0].abs() < 1e-12);
        let filled = assemble_band_diagram(&params(6, 6, 1.0, 9.0)).unwrap();
        let all = filled.sorted_eigenvalues();
        assert_eq!(all.len(), 1);
        assert!((all[0] - 6.0 * 9.0).abs() < 1e-10);
    }
}
