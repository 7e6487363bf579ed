//! Dense complex linear algebra for the small Hermitian matrices that show up
//! in the simulator: Gram matrices of channel column subsets, their inverses,
//! eigendecompositions, PSD tests and orthogonal projectors.
//!
//! Matrices here are at most a few antennas wide, so everything is dense and
//! row-major. The eigensolver is a cyclic complex Jacobi iteration, which is
//! accurate to working precision on matrices of this size and gives small
//! eigenvalues to high relative accuracy.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Conjugate-symmetry residual accepted for Hermitian inputs, relative to
/// `max(1, ‖A‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Pivot threshold for [`invert_hermitian_pd`], relative to the largest
/// diagonal entry.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-13;

const JACOBI_MAX_SWEEPS: usize = 64;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (conjugate-symmetry residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is singular or too ill-conditioned to invert")]
    SingularMatrix,
    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset indices must be strictly increasing")]
    UnorderedSubset,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense row-major complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |r, c| rows[r][c])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.data[k * rhs.cols + c];
                }
            }
        }
        out
    }

    /// `selfᴴ · self`, computed directly and forced exactly Hermitian.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..self.rows {
                    acc += self[(r, a)].conj() * self[(r, b)];
                }
                if a == b {
                    out[(a, a)] = Complex64::new(acc.re, 0.0);
                } else {
                    out[(a, b)] = acc;
                    out[(b, a)] = acc.conj();
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entry modulus, `‖A‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A − Aᴴ‖_max`; zero for non-square input is meaningless, so it panics.
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Real parts of the diagonal.
    pub fn diag_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Replaces `A` with `(A + Aᴴ)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let n = self.rows;
        for r in 0..n {
            self.data[r * n + r].im = 0.0;
            for c in r + 1..n {
                let avg = (self.data[r * n + c] + self.data[c * n + r].conj()) * 0.5;
                self.data[r * n + c] = avg;
                self.data[c * n + r] = avg.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigendecomposition `Q = U Λ Uᴴ` with eigenvalues in non-increasing order.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// `U Λ Uᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = u.rows();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| u[(r, k)] * self.eigenvalues[k] * u[(c, k)].conj())
                .sum()
        })
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { residual });
    }
    Ok(())
}

/// In-place cyclic Jacobi diagonalization of a Hermitian `n×n` row-major
/// buffer. When `v` is given it accumulates the rotations (`v` must start as
/// the identity) so that on exit `A_in = V diag(A_out) Vᴴ`.
fn jacobi(a: &mut [Complex64], n: usize, mut v: Option<&mut [Complex64]>) {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    let negligible = 1e-18 * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= negligible {
                    a[p * n + q] = Complex64::new(0.0, 0.0);
                    a[q * n + p] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] makes the (p, q)
                // block of Gᴴ A G diagonal.
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_conj_phase = phase.conj() * s;
                let s_phase = phase * s;
                let c_conj_phase = phase.conj() * c;
                let c_phase = phase * c;

                // A ← A G
                for r in 0..n {
                    let x = a[r * n + p];
                    let y = a[r * n + q];
                    a[r * n + p] = x * c - s_conj_phase * y;
                    a[r * n + q] = x * s + c_conj_phase * y;
                }
                // A ← Gᴴ A
                for r in 0..n {
                    let x = a[p * n + r];
                    let y = a[q * n + r];
                    a[p * n + r] = x * c - s_phase * y;
                    a[q * n + r] = x * s + c_phase * y;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(app - t * mag, 0.0);
                a[q * n + q] = Complex64::new(aqq + t * mag, 0.0);

                if let Some(v) = v.as_deref_mut() {
                    for r in 0..n {
                        let x = v[r * n + p];
                        let y = v[r * n + q];
                        v[r * n + p] = x * c - s_conj_phase * y;
                        v[r * n + q] = x * s + c_conj_phase * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Eigenvalues of a Hermitian matrix in non-increasing order, without
/// eigenvectors.
pub fn hermitian_eigenvalues(q: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(q)?;
    let n = q.rows();
    let mut a = q.as_slice().to_vec();
    jacobi(&mut a, n, None);
    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn smallest_eigenvalue(q: &ComplexMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(q)?.last().expect("non-empty"))
}

/// Rotates `v` so its first non-negligible component is real and positive.
fn canonicalize_phase(v: &mut [Complex64]) {
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn lexicographic_desc(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in non-increasing order. Each eigenvector is
/// phase-normalized so its first non-negligible component is real positive,
/// and eigenvalues equal within `1e-12 · max(1, |λ₁|)` are ordered by the
/// lexicographically largest eigenvector, so identical input always gives
/// identical output.
pub fn hermitian_eig(q: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(q)?;
    let n = q.rows();
    let mut a = q.as_slice().to_vec();
    let mut v = ComplexMatrix::identity(n).data;
    jacobi(&mut a, n, Some(&mut v));

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut col: Vec<Complex64> = (0..n).map(|r| v[r * n + k]).collect();
            canonicalize_phase(&mut col);
            (a[k * n + k].re, col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let tie = TIE_TOL * pairs[0].0.abs().max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end - 1].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lexicographic_desc(&x.1, &y.1));
        }
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// `LDLᴴ` factorization of a Hermitian positive definite matrix. Returns the
/// unit lower-triangular factor (row-major) and the pivots.
fn ldl(a: &ComplexMatrix) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let n = a.rows();
    let max_diag = a.diag_real().into_iter().fold(0.0, f64::max);
    if max_diag.is_nan() || max_diag <= 0.0 {
        return Err(LinalgError::SingularMatrix);
    }
    let floor = SINGULAR_PIVOT_TOL * max_diag;
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = a[(j, j)].re;
        for k in 0..j {
            dj -= l[j * n + k].norm_sqr() * d[k];
        }
        if !dj.is_finite() || dj <= floor {
            return Err(LinalgError::SingularMatrix);
        }
        d[j] = dj;
        l[j * n + j] = Complex64::new(1.0, 0.0);
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k].conj() * d[k];
            }
            l[i * n + j] = acc / dj;
        }
    }
    Ok((l, d))
}

/// Inverse of a Hermitian positive definite matrix.
///
/// Returns [`LinalgError::SingularMatrix`] when a factorization pivot falls
/// below `1e-13` times the largest diagonal entry.
pub fn invert_hermitian_pd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(a)?;
    let n = a.rows();
    let (l, d) = ldl(a)?;
    // Solve L D Lᴴ X = I column by column.
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        for i in 0..n {
            let mut acc = if i == col {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for k in 0..i {
                acc -= l[i * n + k] * y[k];
            }
            y[i] = acc;
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..n {
                acc -= l[k * n + i].conj() * inv[(k, col)];
            }
            inv[(i, col)] = acc;
        }
    }
    inv.symmetrize();
    Ok(inv)
}

/// Diagonal of `A⁻¹` for Hermitian positive definite `A`, with the same
/// singularity rule as [`invert_hermitian_pd`].
pub fn inverse_diagonal(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(invert_hermitian_pd(a)?.diag_real())
}

/// `ln det A` for Hermitian positive definite `A`.
pub fn log_det_hermitian_pd(a: &ComplexMatrix) -> Result<f64> {
    check_hermitian(a)?;
    let (_, d) = ldl(a)?;
    Ok(d.iter().map(|x| x.ln()).sum())
}

/// Moore–Penrose pseudo-inverse `(HᴴH)⁻¹Hᴴ` of a full-column-rank matrix.
pub fn pseudo_inverse(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if h.cols() > h.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "pseudo-inverse needs cols <= rows, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let gram_inv = invert_hermitian_pd(&h.gram())?;
    Ok(gram_inv.matmul(&h.adjoint()))
}

fn check_subset(subset: &[usize], len: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(LinalgError::DimensionMismatch("empty index subset".into()));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LinalgError::UnorderedSubset);
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= len) {
        return Err(LinalgError::IndexOutOfRange { index: bad, len });
    }
    Ok(())
}

/// `A[subset, subset]` for a square `A` and 0-based strictly increasing
/// indices.
pub fn principal_submatrix(a: &ComplexMatrix, subset: &[usize]) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    check_subset(subset, a.rows())?;
    let l = subset.len();
    Ok(ComplexMatrix::from_fn(l, l, |r, c| a[(subset[r], subset[c])]))
}

/// `A[subset, :]`.
pub fn row_submatrix(a: &ComplexMatrix, subset: &[usize]) -> Result<ComplexMatrix> {
    check_subset(subset, a.rows())?;
    Ok(ComplexMatrix::from_fn(subset.len(), a.cols(), |r, c| {
        a[(subset[r], c)]
    }))
}

/// `A[:, subset]`.
pub fn column_submatrix(a: &ComplexMatrix, subset: &[usize]) -> Result<ComplexMatrix> {
    check_subset(subset, a.cols())?;
    Ok(ComplexMatrix::from_fn(a.rows(), subset.len(), |r, c| {
        a[(r, subset[c])]
    }))
}

/// Outcome of a PSD test: `slack` is the smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    pub slack: f64,
}

/// Tests `A ⪰ 0` with tolerance `tol · max(1, ‖A‖_max)` on the smallest
/// eigenvalue.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<PsdCheck> {
    let slack = smallest_eigenvalue(a)?;
    Ok(PsdCheck {
        psd: slack >= -tol * a.max_abs().max(1.0),
        slack,
    })
}

/// Orthogonal projector onto the complement of the column space of `v`:
/// `P = I − V(VᴴV)⁻¹Vᴴ`.
pub fn projection_complement(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = v.rows();
    if v.cols() >= n {
        return Err(LinalgError::DimensionMismatch(format!(
            "projection complement needs fewer columns than rows, got {}x{}",
            n,
            v.cols()
        )));
    }
    let inner_inv = invert_hermitian_pd(&v.gram())?;
    let range = v.matmul(&inner_inv).matmul(&v.adjoint());
    let mut p = ComplexMatrix::identity(n).sub(&range);
    p.symmetrize();
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn eig_identity() {
        let e = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        let u = &e.eigenvectors;
        assert!(max_diff(&u.adjoint().matmul(u), &ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn eig_diagonal_is_signed_permutation() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[1.0, 4.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![4.0, 1.0]);
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(max_diff(&e.eigenvectors, &expected) < 1e-15);
    }

    #[test]
    fn eig_symmetric_2x2() {
        let q = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = hermitian_eig(&q).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // canonical phase makes the first component real positive
        let u = &e.eigenvectors;
        assert_abs_diff_eq!(u[(0, 0)].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(u[(1, 0)].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(u[(0, 1)].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(u[(1, 1)].re, -s, epsilon = 1e-14);
    }

    #[test]
    fn eig_complex_reconstructs() {
        let q = ComplexMatrix::from_rows(&[
            &[c(2.0, 0.0), c(0.5, -1.0), c(0.0, 0.3)],
            &[c(0.5, 1.0), c(1.0, 0.0), c(-0.2, 0.1)],
            &[c(0.0, -0.3), c(-0.2, -0.1), c(3.0, 0.0)],
        ]);
        let e = hermitian_eig(&q).unwrap();
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(max_diff(&e.reconstruct(), &q) < 1e-13);
        let vals = hermitian_eigenvalues(&q).unwrap();
        for (a, b) in vals.iter().zip(&e.eigenvalues) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(LinalgError::NotSquare { .. })));
        let skew = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&skew), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn eig_is_deterministic() {
        let q = ComplexMatrix::from_rows(&[
            &[c(1.0, 0.0), c(0.3, 0.4)],
            &[c(0.3, -0.4), c(1.0, 0.0)],
        ]);
        let a = hermitian_eig(&q).unwrap();
        let b = hermitian_eig(&q).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn invert_examples() {
        let inv = invert_hermitian_pd(&ComplexMatrix::from_real_diagonal(&[1.0, 4.0])).unwrap();
        assert!(max_diff(&inv, &ComplexMatrix::from_real_diagonal(&[1.0, 0.25])) < 1e-15);

        let i3 = ComplexMatrix::identity(3);
        assert!(max_diff(&invert_hermitian_pd(&i3).unwrap(), &i3) < 1e-15);

        // adjugate oracle: [[a, b], [b, d]]⁻¹ = [[d, -b], [-b, a]] / (ad - b²)
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 2.0]]);
        let det = 1.0 * 2.0 - 1.0 * 1.0;
        let adj = ComplexMatrix::from_real_rows(&[&[2.0 / det, -1.0 / det], &[-1.0 / det, 1.0 / det]]);
        let inv = invert_hermitian_pd(&a).unwrap();
        assert!(max_diff(&inv, &adj) < 1e-14);
        assert!(max_diff(&a.matmul(&inv), &ComplexMatrix::identity(2)) < 1e-8);
    }

    #[test]
    fn invert_singular() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(invert_hermitian_pd(&a), Err(LinalgError::SingularMatrix));
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(invert_hermitian_pd(&z), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn log_det_matches_product() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        assert_abs_diff_eq!(log_det_hermitian_pd(&a).unwrap(), 5.0f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn pseudo_inverse_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert!(max_diff(&pseudo_inverse(&i2).unwrap(), &i2) < 1e-15);

        let d = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.5]);
        assert!(max_diff(&pseudo_inverse(&d).unwrap(), &expected) < 1e-15);

        // HᴴH = [[1,1],[1,2]], inverse [[2,-1],[-1,1]], times Hᴴ = [[1,0],[1,1]]
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let expected = ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[0.0, 1.0]]);
        let p = pseudo_inverse(&h).unwrap();
        assert!(max_diff(&p, &expected) < 1e-14);
        assert!(max_diff(&p.matmul(&h), &i2) < 1e-8);
    }

    #[test]
    fn pseudo_inverse_rank_deficient() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]);
        assert_eq!(pseudo_inverse(&h), Err(LinalgError::SingularMatrix));
        let wide = ComplexMatrix::zeros(1, 2);
        assert!(matches!(pseudo_inverse(&wide), Err(LinalgError::DimensionMismatch(_))));
    }

    #[test]
    fn submatrices() {
        let a = ComplexMatrix::from_fn(3, 3, |i, k| c((10 * (i + 1) + k + 1) as f64, 0.0));
        let s = principal_submatrix(&a, &[0, 2]).unwrap();
        assert_eq!(s, ComplexMatrix::from_real_rows(&[&[11.0, 13.0], &[31.0, 33.0]]));
        assert_eq!(principal_submatrix(&a, &[0, 1, 2]).unwrap(), a);
        let d = ComplexMatrix::from_real_diagonal(&[5.0, 7.0, 9.0]);
        assert_eq!(
            principal_submatrix(&d, &[1]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[7.0]])
        );
        assert_eq!(
            principal_submatrix(&a, &[0, 3]),
            Err(LinalgError::IndexOutOfRange { index: 3, len: 3 })
        );
        assert_eq!(principal_submatrix(&a, &[2, 1]), Err(LinalgError::UnorderedSubset));

        let tall = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        assert_eq!(
            row_submatrix(&tall, &[0, 2]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[5.0, 6.0]])
        );
        assert_eq!(row_submatrix(&tall, &[0, 1, 2]).unwrap(), tall);
        assert_eq!(
            row_submatrix(&tall, &[1]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[3.0, 4.0]])
        );
        assert!(row_submatrix(&tall, &[5]).is_err());
    }

    #[test]
    fn psd_examples() {
        let r = is_psd(&ComplexMatrix::identity(2), 1e-9).unwrap();
        assert!(r.psd);
        assert_abs_diff_eq!(r.slack, 1.0, epsilon = 1e-15);

        let r = is_psd(&ComplexMatrix::from_real_diagonal(&[1.0, -0.5]), 1e-9).unwrap();
        assert!(!r.psd);
        assert_abs_diff_eq!(r.slack, -0.5, epsilon = 1e-15);

        let r = is_psd(&ComplexMatrix::zeros(2, 2), 1e-9).unwrap();
        assert!(r.psd);
        assert_eq!(r.slack, 0.0);
    }

    #[test]
    fn projection_examples() {
        let axis = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]);
        let p = projection_complement(&axis).unwrap();
        assert!(max_diff(&p, &ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diag = ComplexMatrix::from_real_rows(&[&[s], &[s]]);
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        let p = projection_complement(&diag).unwrap();
        assert!(max_diff(&p, &expected) < 1e-15);

        let unnormalized = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        let q = projection_complement(&unnormalized).unwrap();
        assert!(max_diff(&q, &p) < 1e-15);

        let parallel = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]);
        assert_eq!(projection_complement(&parallel), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn constructor_validates() {
        assert_eq!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite)
        );
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
    }
}
