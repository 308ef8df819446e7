//! Dense complex matrices and a deterministic Hermitian eigensolver.
//!
//! The solver reduces a Hermitian matrix to real symmetric tridiagonal form
//! by Householder reflections, folds the subdiagonal phases into the
//! accumulated unitary, and runs the implicit-shift QL iteration on the
//! tridiagonal. Eigenvalues are returned ascending with ties adjacent;
//! eigenvectors are the matching columns of the accumulated unitary. The
//! whole path is free of randomness, so repeated runs are bit-identical.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Needed for float math under no_std; shadowed by inherent methods otherwise.
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major element vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "element count mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major element slice.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// One row as a contiguous slice.
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let data = self.data.iter().map(|z| z.conj()).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Naive matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `max |U U~ - I|` where `U~` is the conjugate transpose.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.mul(&self.adjoint());
        prod.max_abs_diff(&Self::identity(self.rows))
    }

    /// `max |A - A~|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.rows {
            for c in 0..=r {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
///
/// Eigenvalues come back ascending; column `j` of the returned matrix is the
/// eigenvector for eigenvalue `j`. `herm_tol` bounds the accepted
/// `max |A - A~|`; the matrix is symmetrized before reduction so the tiny
/// asymmetry left by a sector build cannot bias the spectrum.
pub fn eigh(a: &CMatrix, herm_tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    let (d, q) = eigh_inner(a, herm_tol, true)?;
    Ok((d, q.expect("vectors requested")))
}

/// Eigenvalues only, ascending. Cheaper than [`eigh`] by roughly a factor
/// of three since no unitary is accumulated.
pub fn eigenvalues(a: &CMatrix, herm_tol: f64) -> Result<Vec<f64>> {
    let (d, _) = eigh_inner(a, herm_tol, false)?;
    Ok(d)
}

fn eigh_inner(a: &CMatrix, herm_tol: f64, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    if a.rows != a.cols {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let defect = a.hermiticity_defect();
    if defect > herm_tol {
        return Err(Error::NotHermitian { defect });
    }
    let n = a.rows;
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| CMatrix::zeros(0, 0))));
    }

    // Symmetrize, then reduce.
    let mut b = a.clone();
    for r in 0..n {
        for c in 0..r {
            let avg = (b[(r, c)] + b[(c, r)].conj()) * 0.5;
            b[(r, c)] = avg;
            b[(c, r)] = avg.conj();
        }
        b[(r, r)] = Complex64::new(b[(r, r)].re, 0.0);
    }

    let mut q = want_vectors.then(|| CMatrix::identity(n));
    tridiagonalize(&mut b, q.as_mut());

    // Fold subdiagonal phases into the accumulated unitary so the
    // tridiagonal matrix is real.
    let mut d: Vec<f64> = (0..n).map(|i| b[(i, i)].re).collect();
    let mut e = vec![0.0_f64; n];
    let mut delta = Complex64::new(1.0, 0.0);
    for i in 0..n - 1 {
        let beta = b[(i + 1, i)];
        let mag = beta.norm();
        e[i] = mag;
        let next = if mag > 0.0 { delta * beta / mag } else { delta };
        if let Some(q) = q.as_mut() {
            for r in 0..n {
                q[(r, i + 1)] *= next;
            }
        }
        delta = next;
    }

    ql_implicit(&mut d, &mut e, q.as_mut())?;

    // Ascending sort with a total order keeps the output deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let q = q.map(|q| {
        let mut out = CMatrix::zeros(n, n);
        for (new_c, &old_c) in order.iter().enumerate() {
            for r in 0..n {
                out[(r, new_c)] = q[(r, old_c)];
            }
        }
        out
    });
    Ok((sorted, q))
}

/// Householder reduction of a Hermitian matrix to tridiagonal form with a
/// complex subdiagonal. If `q` is given it accumulates the product of the
/// reflectors, so that on exit `input = Q T Q~`.
fn tridiagonalize(b: &mut CMatrix, mut q: Option<&mut CMatrix>) {
    let n = b.rows;
    if n < 3 {
        return;
    }
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n - 2 {
        let m = n - k - 1;
        let mut nrm2 = 0.0_f64;
        for i in 0..m {
            nrm2 += b[(k + 1 + i, k)].norm_sqr();
        }
        if nrm2 < f64::MIN_POSITIVE {
            continue;
        }
        let nrm = nrm2.sqrt();
        let x0 = b[(k + 1, k)];
        let mu = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // Reflect the column onto -mu*nrm*e1; this choice avoids
        // cancellation in the pivot component.
        let target = -mu * nrm;
        let mut vnorm2 = 0.0_f64;
        for i in 0..m {
            let v = if i == 0 { x0 - target } else { b[(k + 1 + i, k)] };
            w[i] = v;
            vnorm2 += v.norm_sqr();
        }
        let inv = 1.0 / vnorm2.sqrt();
        for wi in w.iter_mut().take(m) {
            *wi *= inv;
        }

        // p = B w over the trailing block.
        for (i, pi) in p.iter_mut().enumerate().take(m) {
            let row = &b.row(k + 1 + i)[k + 1..k + 1 + m];
            let mut acc = Complex64::new(0.0, 0.0);
            for (rij, wj) in row.iter().zip(w.iter()) {
                acc += rij * wj;
            }
            *pi = acc;
        }
        let mut kappa = 0.0_f64;
        for i in 0..m {
            kappa += (w[i].conj() * p[i]).re;
        }
        // Rank-2 Hermitian update B <- B - u w~ - w u~ with u = 2(p - kappa w).
        for i in 0..m {
            p[i] = (p[i] - kappa * w[i]) * 2.0;
        }
        for i in 0..m {
            let ui = p[i];
            let wi = w[i];
            let base = (k + 1 + i) * b.cols + (k + 1);
            for j in 0..m {
                let upd = ui * w[j].conj() + wi * p[j].conj();
                b.data[base + j] -= upd;
            }
        }
        b[(k + 1, k)] = target;
        b[(k, k + 1)] = target.conj();
        for i in 1..m {
            b[(k + 1 + i, k)] = Complex64::new(0.0, 0.0);
            b[(k, k + 1 + i)] = Complex64::new(0.0, 0.0);
        }

        if let Some(q) = q.as_deref_mut() {
            // Q <- Q (I - 2 w w~), touching columns k+1..n only.
            for r in 0..n {
                let row = q.row(r);
                let mut t = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    t += row[k + 1 + j] * w[j];
                }
                t *= 2.0;
                let base = r * q.cols + (k + 1);
                for (j, wj) in w.iter().enumerate().take(m) {
                    q.data[base + j] -= t * wj.conj();
                }
            }
        }
    }
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
/// rotating the columns of `q` alongside. `e[i]` couples `d[i]` and
/// `d[i+1]`; `e[n-1]` is workspace.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut q: Option<&mut CMatrix>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    // Absolute deflation floor at the matrix scale. A purely relative
    // test stalls when two adjacent diagonal entries are exactly zero
    // (degenerate spectra produce those), with the coupling stuck at
    // rounding-noise level.
    let scale = d
        .iter()
        .chain(e.iter())
        .fold(0.0_f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(());
    }
    let floor = eps * scale;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NoConvergence { index: l });
            }

            // Wilkinson shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = 1.0_f64;
            let mut c = 1.0_f64;
            let mut pp = 0.0_f64;

            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= pp;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - pp;
                r = (d[i] - g) * s + 2.0 * c * bb;
                pp = s * r;
                d[i + 1] = g + pp;
                g = c * r - bb;

                if let Some(q) = q.as_deref_mut() {
                    for k in 0..q.rows {
                        let base = k * q.cols + i;
                        f = q.data[base + 1].re;
                        let fi = q.data[base + 1].im;
                        let zr = q.data[base].re;
                        let zi = q.data[base].im;
                        q.data[base + 1] = Complex64::new(s * zr + c * f, s * zi + c * fi);
                        q.data[base] = Complex64::new(c * zr - s * f, c * zi - s * fi);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= pp;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random complex entries for test matrices.
    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut a = CMatrix::zeros(n, n);
        for r in 0..n {
            a[(r, r)] = c(2.0 * splitmix(&mut s), 0.0);
            for col in 0..r {
                let z = c(splitmix(&mut s), splitmix(&mut s));
                a[(r, col)] = z;
                a[(col, r)] = z.conj();
            }
        }
        a
    }

    #[test]
    fn two_by_two_exchange() {
        let a = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let vals = eigenvalues(&a, 1e-12).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_by_one() {
        let a = CMatrix::from_vec(1, 1, vec![c(100.0, 0.0)]);
        let (vals, q) = eigh(&a, 1e-12).unwrap();
        assert_eq!(vals, vec![100.0]);
        assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(eigenvalues(&a, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn residuals_and_orthonormality_random() {
        for (n, seed) in [(3usize, 7u64), (8, 11), (17, 23), (40, 5)] {
            let a = random_hermitian(n, seed);
            let (vals, q) = eigh(&a, 1e-12).unwrap();
            let scale = a.max_abs();
            // Residual ||A v - lambda v|| per pair.
            for j in 0..n {
                let mut worst = 0.0_f64;
                for r in 0..n {
                    let mut acc = c(0.0, 0.0);
                    for k in 0..n {
                        acc += a[(r, k)] * q[(k, j)];
                    }
                    acc -= vals[j] * q[(r, j)];
                    worst = worst.max(acc.norm());
                }
                assert!(worst <= 1e-11 * scale.max(1.0), "residual {worst:e} at n={n}");
            }
            assert!(q.unitarity_defect() < 1e-11, "vectors not orthonormal");
            // Trace invariant.
            let tr: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            let sum: f64 = vals.iter().sum();
            assert!((tr - sum).abs() < 1e-9 * scale.max(1.0) * n as f64);
            // Ascending order.
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn recovers_known_spectrum() {
        // Build A = V D V~ from an exactly known diagonal and a unitary made
        // of explicit rotations, then check eigh returns D.
        let n = 6;
        let mut v = CMatrix::identity(n);
        let mut s = 99u64;
        for i in 0..n - 1 {
            let th = splitmix(&mut s) * 3.0;
            let ph = splitmix(&mut s) * 3.0;
            let (c_, s_) = (
                Complex64::new((th / 2.0).cos(), 0.0),
                Complex64::new((th / 2.0).sin(), 0.0),
            );
            let phase = Complex64::from_polar(1.0, ph);
            // v <- v * (rotation in plane (i, i+1)) * diag(phase at i)
            for r in 0..n {
                let a = v[(r, i)];
                let b = v[(r, i + 1)];
                v[(r, i)] = (c_ * a - s_ * b) * phase;
                v[(r, i + 1)] = s_ * a + c_ * b;
            }
        }
        assert!(v.unitarity_defect() < 1e-13);
        let diag = [-3.0, -1.5, 0.0, 0.25, 2.0, 10.0];
        let mut a = CMatrix::zeros(n, n);
        for r in 0..n {
            for cidx in 0..n {
                let mut acc = c(0.0, 0.0);
                for k in 0..n {
                    acc += v[(r, k)] * diag[k] * v[(cidx, k)].conj();
                }
                a[(r, cidx)] = acc;
            }
        }
        let vals = eigenvalues(&a, 1e-10).unwrap();
        for (got, want) in vals.iter().zip(diag.iter()) {
            assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        }
    }

    #[test]
    fn degenerate_eigenvalues_stay_orthonormal() {
        // 4x4 with a triply degenerate eigenvalue.
        let n = 4;
        let mut a = CMatrix::identity(n);
        a[(0, 3)] = c(0.5, 0.25);
        a[(3, 0)] = c(0.5, -0.25);
        let (vals, q) = eigh(&a, 1e-12).unwrap();
        assert!(q.unitarity_defect() < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
