//! Fermionic Fock-space simulation of mode Fourier transforms and the band
//! structure of interacting ring chains.
//!
//! The crate is organized around four pieces:
//!
//! - [`fock`] — occupation-number states over `N ≤ 64` sites, fixed-particle
//!   sector bases, and the exact action of phase gates, two-site rotation
//!   gates, mode permutations, and the ring translation operator on many-body
//!   state vectors, with all fermionic signs.
//! - [`transforms`] — gate sequences realizing the mode Fourier transform:
//!   the `O(N log N)` butterfly network for power-of-two `N`, and a folding
//!   compiler that turns an arbitrary single-body unitary into a
//!   nearest-neighbor circuit with `N(N-1)/2` rotations.
//! - [`bethe`] — the periodic hopping-plus-interaction chain: quasimomentum
//!   sector partition, sector matrices built by conjugating the diagonal
//!   interaction with the mode transform, band diagrams, and two independent
//!   brute-force oracles (Slater-determinant expansion and full exact
//!   diagonalization in the site basis).
//! - [`linalg`] — a small dense complex matrix type and a deterministic
//!   Hermitian eigensolver (Householder tridiagonalization + implicit QL).
//!
//! # Conventions
//!
//! All conventions are fixed once, here, and assumed everywhere:
//!
//! - Sites are 1-indexed, `1..=N`. Site `j` occupies bit `j - 1` of the
//!   occupation mask (site 1 is the least significant bit).
//! - A basis state with occupied sites `s1 < s2 < … < sM` denotes the ket
//!   built by applying creation operators in ascending site order, the
//!   operator for `s1` leftmost.
//! - The two-site rotation gate `Givens(x, y, θ)` with `x < y` acts on the
//!   pair of states `A` (site `x` occupied, `y` empty) and `B` (`x` empty,
//!   `y` occupied) that agree elsewhere as
//!   `a_A' = c·a_A + s·t·a_B`, `a_B' = −s·t·a_A + c·a_B`, where
//!   `c = cos(θ/2)`, `t = sin(θ/2)` and `s` is the parity of the occupied
//!   sites strictly between `x` and `y` (the Jordan-Wigner string).
//! - The butterfly sequence of [`transforms::fmft_sequence`] maps the state
//!   with occupied sites `S` to the mode state with occupied mode indices
//!   `S`; on the single-particle sector its matrix is the entrywise complex
//!   conjugate of [`transforms::dft_matrix`].
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature to use it in that mode.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bethe;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod transforms;

pub use error::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
