//! Occupation-number states, fixed-particle sector bases, and the exact
//! action of the elementary gates on many-body state vectors.
//!
//! # Conventions
//!
//! Sites are 1-indexed; site `j` is bit `j - 1` of the mask, so site 1 is
//! the least significant bit. A basis state with occupied sites
//! `s1 < s2 < … < sM` means the ket obtained by applying the creation
//! operators in ascending site order (the `s1` operator leftmost). Every
//! fermionic sign in this module follows from that single choice:
//!
//! - moving a particle between sites `x < y` picks up the parity of the
//!   occupied sites strictly between them ([`jw_string_sign`]);
//! - relabeling modes by a permutation picks up the parity of the sort
//!   that restores ascending order ([`StateVector::apply_permutation`]);
//! - the ring translation `j -> j + 1 (mod N)` picks up `(-1)^(M-1)`
//!   exactly when site `N` was occupied ([`StateVector::translate`]).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for float math under no_std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::{Error, Result};

/// Occupation mask covering all `n` sites.
pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Binomial coefficient, exact for every `n <= 64`.
pub fn binomial(n: usize, m: usize) -> u64 {
    if m > n {
        return 0;
    }
    let m = m.min(n - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A site-occupation pattern over `n` sites.
///
/// The mask is the basis label for all Fock-space work; within a sector
/// context its popcount equals the particle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationState {
    /// Bit `j - 1` set iff site `j` is occupied.
    pub mask: u64,
    /// Site count, `1..=64`.
    pub n: usize,
}

impl OccupationState {
    pub fn new(mask: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidSector { n, m: 0 });
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::MaskNotInBasis {
                mask,
                n,
                m: mask.count_ones() as usize,
            });
        }
        Ok(Self { mask, n })
    }

    /// Whether site `site` (1-indexed) is occupied.
    pub fn occupied(&self, site: usize) -> bool {
        self.mask >> (site - 1) & 1 == 1
    }

    /// Number of occupied sites.
    pub fn particle_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Occupied sites in ascending order.
    pub fn occupied_sites(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.particle_count());
        let mut m = self.mask;
        while m != 0 {
            out.push(m.trailing_zeros() as usize + 1);
            m &= m - 1;
        }
        out
    }
}

/// Jordan-Wigner string sign between two sites: `(-1)^k` where `k` is the
/// number of occupied sites strictly between `x` and `y`.
pub fn jw_string_sign(state: &OccupationState, x: usize, y: usize) -> Result<i32> {
    if x == 0 || y > state.n || x >= y {
        return Err(Error::InvalidSitePair { x, y, n: state.n });
    }
    Ok(interior_sign(state.mask, x, y))
}

/// Unchecked string sign on a raw mask; `1 <= x < y <= 64`.
#[inline]
fn interior_sign(mask: u64, x: usize, y: usize) -> i32 {
    // Bits for sites x+1..=y-1 occupy positions x..=y-2.
    let between = (1u64 << (y - 1)) - (1u64 << x);
    if (mask & between).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The canonical basis of a fixed-(n, m) sector: every mask with popcount
/// `m`, in ascending mask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n: usize,
    m: usize,
    states: Vec<u64>,
}

impl SectorBasis {
    /// Enumerate the `(n, m)` sector basis. Rejects `n` outside `1..=64`
    /// and `m > n`.
    pub fn enumerate(n: usize, m: usize) -> Result<Arc<Self>> {
        if n == 0 || n > 64 || m > n {
            return Err(Error::InvalidSector { n, m });
        }
        let dim = binomial(n, m) as usize;
        let mut states = Vec::with_capacity(dim);
        if m == 0 {
            states.push(0);
        } else {
            let mut v = full_mask(m);
            for i in 0..dim {
                states.push(v);
                if i + 1 < dim {
                    v = next_same_popcount(v);
                }
            }
        }
        Ok(Arc::new(Self { n, m, states }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sector dimension `binomial(n, m)`.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Mask of the basis state at `ordinal`.
    pub fn mask(&self, ordinal: usize) -> u64 {
        self.states[ordinal]
    }

    /// All masks, ascending.
    pub fn masks(&self) -> &[u64] {
        &self.states
    }

    /// Basis state at `ordinal` as an [`OccupationState`].
    pub fn state(&self, ordinal: usize) -> OccupationState {
        OccupationState {
            mask: self.states[ordinal],
            n: self.n,
        }
    }

    /// Ordinal of a mask, if it belongs to this sector.
    pub fn index(&self, mask: u64) -> Option<usize> {
        self.states.binary_search(&mask).ok()
    }

    fn index_or_err(&self, mask: u64) -> Result<usize> {
        self.index(mask).ok_or(Error::MaskNotInBasis {
            mask,
            n: self.n,
            m: self.m,
        })
    }
}

/// Gosper's hack: next larger integer with the same popcount.
fn next_same_popcount(v: u64) -> u64 {
    let t = v | (v - 1);
    (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1))
}

/// Complex amplitudes over a fixed sector basis.
///
/// The basis is shared immutably; a vector owns its amplitude buffer and
/// has a single writer at a time. Every gate application preserves the
/// norm up to rounding.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<SectorBasis>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The zero vector.
    pub fn zero(basis: Arc<SectorBasis>) -> Self {
        let dim = basis.dim();
        Self {
            basis,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Unit amplitude on a single basis mask.
    pub fn basis_state(basis: Arc<SectorBasis>, mask: u64) -> Result<Self> {
        let idx = basis.index_or_err(mask)?;
        let mut v = Self::zero(basis);
        v.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Wrap an amplitude buffer over a basis.
    pub fn from_amplitudes(basis: Arc<SectorBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::BasisMismatch {
                ln: basis.n(),
                lm: basis.m(),
                rn: basis.n(),
                rm: amps.len(),
            });
        }
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitude on a mask (zero if outside the sector).
    pub fn amplitude(&self, mask: u64) -> Complex64 {
        match self.basis.index(mask) {
            Some(i) => self.amps[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Conjugate-linear inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.basis.n() != other.basis.n() || self.basis.m() != other.basis.m() {
            return Err(Error::BasisMismatch {
                ln: self.basis.n(),
                lm: self.basis.m(),
                rn: other.basis.n(),
                rm: other.basis.m(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Diagonal phase gate: amplitudes of states with `site` occupied are
    /// multiplied by `e^(i phi)`.
    pub fn apply_phase(&mut self, site: usize, phi: f64) -> Result<()> {
        let n = self.basis.n();
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, n });
        }
        let bit = 1u64 << (site - 1);
        let factor = Complex64::from_polar(1.0, phi);
        for (i, &mask) in self.basis.states.iter().enumerate() {
            if mask & bit != 0 {
                self.amps[i] *= factor;
            }
        }
        Ok(())
    }

    /// Two-site rotation gate on the pair `(x, y)`, `x < y`.
    ///
    /// Basis states split into invariant singletons (equal occupation on
    /// `x` and `y`) and pairs `A` (`x` occupied, `y` empty) / `B` (`x`
    /// empty, `y` occupied) agreeing elsewhere. With `c = cos(theta/2)`,
    /// `t = sin(theta/2)` and `s` the interior string sign, the update is
    ///
    /// ```text
    /// a_A' =  c*a_A + s*t*a_B
    /// a_B' = -s*t*a_A + c*a_B
    /// ```
    ///
    /// Distinct pairs are disjoint, so updates on them are independent.
    pub fn apply_givens(&mut self, x: usize, y: usize, theta: f64) -> Result<()> {
        let n = self.basis.n();
        if x == 0 || y > n || x >= y {
            return Err(Error::InvalidSitePair { x, y, n });
        }
        let bx = 1u64 << (x - 1);
        let by = 1u64 << (y - 1);
        let c = (theta / 2.0).cos();
        let t = (theta / 2.0).sin();
        for i in 0..self.amps.len() {
            let mask = self.basis.states[i];
            // Visit each pair once, from its A member.
            if mask & bx != 0 && mask & by == 0 {
                let partner = (mask & !bx) | by;
                let j = self
                    .basis
                    .index(partner)
                    .expect("partner stays within the sector");
                let st = interior_sign(mask, x, y) as f64 * t;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = c * a + st * b;
                self.amps[j] = -st * a + c * b;
            }
        }
        Ok(())
    }

    /// Relabel modes by a permutation given as the image list of `1..=n`.
    ///
    /// A state with occupied ascending sites `(i1, …, iM)` maps to the
    /// state occupying `{perm(i1), …, perm(iM)}` with its amplitude
    /// multiplied by the parity of the sort that restores ascending order.
    pub fn apply_permutation(&mut self, perm: &[usize]) -> Result<()> {
        let n = self.basis.n();
        validate_permutation(perm, n)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut image = [0usize; 64];
        for (i, &mask) in self.basis.states.iter().enumerate() {
            if self.amps[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut count = 0usize;
            let mut rest = mask;
            let mut new_mask = 0u64;
            while rest != 0 {
                let site = rest.trailing_zeros() as usize + 1;
                let img = perm[site - 1];
                image[count] = img;
                new_mask |= 1u64 << (img - 1);
                count += 1;
                rest &= rest - 1;
            }
            let mut inversions = 0usize;
            for a in 0..count {
                for b in a + 1..count {
                    if image[a] > image[b] {
                        inversions += 1;
                    }
                }
            }
            let j = self
                .basis
                .index(new_mask)
                .expect("bijection stays within the sector");
            out[j] = if inversions.is_multiple_of(2) {
                self.amps[i]
            } else {
                -self.amps[i]
            };
        }
        self.amps = out;
        Ok(())
    }

    /// Ring translation: occupied site `j` moves to `j + 1` (site `n`
    /// wraps to 1). The wrap carries the particle past the other `M - 1`
    /// operators, hence the sign.
    pub fn translate(&mut self) {
        let n = self.basis.n();
        let m = self.basis.m();
        let top = 1u64 << (n - 1);
        let wrap_sign = if m == 0 || (m - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &mask) in self.basis.states.iter().enumerate() {
            if self.amps[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let shifted = if n == 64 {
                mask.rotate_left(1)
            } else {
                ((mask << 1) | (mask >> (n - 1))) & full_mask(n)
            };
            let j = self
                .basis
                .index(shifted)
                .expect("translation stays within the sector");
            out[j] = if mask & top != 0 {
                wrap_sign * self.amps[i]
            } else {
                self.amps[i]
            };
        }
        self.amps = out;
    }
}

/// Check that `perm` is the image list of a bijection on `1..=n`.
pub fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation { n });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::InvalidPermutation { n });
        }
        seen[p - 1] = true;
    }
    Ok(())
}
