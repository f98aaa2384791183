//! Complex Hermitian matrix algebra.
//!
//! Every covariance, dual variable and constraint matrix in the solver is a
//! [`HermitianMatrix`]. Inverses follow Moore–Penrose semantics: eigenvalues
//! below `rank_tol · max(1, λ_max)` are treated as exact zeros.

mod decompose;
mod logdet;

pub use decompose::{simultaneous_decompose, TruncationDecomposition};
pub use logdet::ext_logdet_diff;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for channels and intermediate products.
pub type CMatrix = DMatrix<Complex64>;

/// Relative eigenvalue cutoff used when no tolerance is configured.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Smallest accepted ratio of a squared Cholesky pivot to the largest
/// diagonal entry in [`HermitianMatrix::cholesky_inverse`].
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Absolute cutoff below which an eigenvalue is treated as zero.
#[inline]
pub fn rank_threshold(rank_tol: f64, max_eig: f64) -> f64 {
    rank_tol * max_eig.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Rebuilds `V f(Λ) V^+`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        HermitianMatrix::from_spectrum(&self.vectors, &mapped)
    }
}

/// A complex Hermitian matrix. The stored entries are always exactly
/// Hermitian: construction averages `A` with `A^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

/// Returns `(A + A^+)/2`.
pub fn hermitize(a: &CMatrix) -> Result<HermitianMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(HermitianMatrix::hermitize_square(a))
}

/// Moore–Penrose pseudo-inverse of a PSD matrix via its eigendecomposition.
pub fn pseudo_inverse(a: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    let eig = a.eigen();
    let thr = rank_threshold(rank_tol, eig.max());
    if eig.min() < -thr {
        return Err(Error::Indefinite {
            min_eig: eig.min(),
            tol: thr,
        });
    }
    Ok(eig.map(|v| if v > thr { 1.0 / v } else { 0.0 }))
}

/// `out += A^+ X A` without temporaries beyond `scratch`, which is resized
/// to the shape of `X A` when needed. `out` is not re-hermitized.
pub fn add_adjoint_congruence(out: &mut CMatrix, x: &HermitianMatrix, a: &CMatrix, scratch: &mut CMatrix) {
    let (q, p) = a.shape();
    debug_assert_eq!(x.dim(), q);
    debug_assert_eq!(out.shape(), (p, p));
    if scratch.shape() != (q, p) {
        *scratch = CMatrix::zeros(q, p);
    }
    let xs = x.m.as_slice();
    let as_ = a.as_slice();
    // scratch = X A, column by column
    {
        let ts = scratch.as_mut_slice();
        ts.fill(Complex64::new(0.0, 0.0));
        for j in 0..p {
            let tcol = &mut ts[j * q..(j + 1) * q];
            for k in 0..q {
                let akj = as_[j * q + k];
                let xcol = &xs[k * q..(k + 1) * q];
                for (t, &xv) in tcol.iter_mut().zip(xcol) {
                    *t += xv * akj;
                }
            }
        }
    }
    // out += A^+ scratch: entry (i, j) is the dot product of columns
    let ts = scratch.as_slice();
    let os = out.as_mut_slice();
    for j in 0..p {
        let tcol = &ts[j * q..(j + 1) * q];
        for i in 0..p {
            let acol = &as_[i * q..(i + 1) * q];
            let mut acc = Complex64::new(0.0, 0.0);
            for (av, tv) in acol.iter().zip(tcol) {
                acc += av.conj() * tv;
            }
            os[j * p + i] += acc;
        }
    }
}

impl HermitianMatrix {
    /// Averages an owned square matrix with its adjoint in place.
    pub fn hermitize_owned(mut m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        for j in 0..n {
            m[(j, j)].im = 0.0;
            for i in (j + 1)..n {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        HermitianMatrix { m }
    }

    fn hermitize_square(a: &CMatrix) -> Self {
        let n = a.nrows();
        let mut m = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                m[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            }
        }
        HermitianMatrix { m }
    }

    /// Hermitizes `a`; panics if `a` is not square. Internal products of the
    /// form `H X H^+` are square by construction.
    pub(crate) fn from_square(a: &CMatrix) -> Self {
        debug_assert_eq!(a.nrows(), a.ncols());
        Self::hermitize_square(a)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        HermitianMatrix {
            m: CMatrix::from_diagonal_element(n, n, Complex64::new(c, 0.0)),
        }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        HermitianMatrix { m }
    }

    /// `V diag(values) V^+`.
    pub fn from_spectrum(vectors: &CMatrix, values: &[f64]) -> Self {
        let mut scaled = vectors.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        Self::from_square(&(scaled * vectors.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `tr(A B)` for Hermitian `A`, `B`; real by Hermiticity.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        // tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij)
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, c: f64) -> Self {
        HermitianMatrix { m: &self.m * Complex64::new(c, 0.0) }
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix { m: &self.m - &other.m }
    }

    pub fn add_assign_scaled(&mut self, other: &HermitianMatrix, c: f64) {
        self.m += &other.m * Complex64::new(c, 0.0);
    }

    /// `H A H^+`, re-hermitized.
    pub fn congruence(&self, h: &CMatrix) -> Self {
        self.adjoint_congruence(&h.adjoint())
    }

    /// `H^+ A H`, re-hermitized.
    pub fn adjoint_congruence(&self, h: &CMatrix) -> Self {
        let mut out = CMatrix::zeros(h.ncols(), h.ncols());
        let mut scratch = CMatrix::zeros(0, 0);
        add_adjoint_congruence(&mut out, self, h, &mut scratch);
        Self::hermitize_owned(out)
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.m[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Eigendecomposition with ascending eigenvalues. Exactly diagonal input
    /// keeps the canonical basis.
    pub fn eigen(&self) -> HermitianEigen {
        let n = self.dim();
        let (values, vectors) = if self.is_diagonal() {
            let v: Vec<f64> = (0..n).map(|i| self.m[(i, i)].re).collect();
            (v, CMatrix::identity(n, n))
        } else {
            let se = SymmetricEigen::new(self.m.clone());
            (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&i| values[i]).collect();
        let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        HermitianEigen {
            values: sorted_values,
            vectors: sorted_vectors,
        }
    }

    /// Ascending eigenvalues, without forming eigenvectors.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let mut v: Vec<f64> = if self.is_diagonal() {
            (0..n).map(|i| self.m[(i, i)].re).collect()
        } else {
            self.m.clone().symmetric_eigenvalues().iter().copied().collect()
        };
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().min()
    }

    pub fn classify(&self, rank_tol: f64) -> Definiteness {
        let eig = self.eigen();
        let thr = rank_threshold(rank_tol, eig.max());
        if eig.min() > thr {
            Definiteness::PositiveDefinite
        } else if eig.min() >= -thr {
            Definiteness::PositiveSemidefinite
        } else {
            Definiteness::Indefinite
        }
    }

    pub fn is_psd(&self, rank_tol: f64) -> bool {
        self.classify(rank_tol) != Definiteness::Indefinite
    }

    /// Inverse through Cholesky when the matrix is certifiably well inside
    /// the positive-definite cone, otherwise the eigen-based pseudo-inverse.
    /// Both routes agree whenever the fast path is taken: the acceptance
    /// test bounds `λ_min > rank_tol · max(1, tr A) ≥ rank_tol · max(1, λ_max)`
    /// through `tr(A^-1) ≥ 1/λ_min`.
    pub fn inverse(&self, rank_tol: f64) -> Result<HermitianMatrix> {
        if let Some(inv) = self.certified_pd_inverse(rank_tol) {
            return Ok(inv);
        }
        pseudo_inverse(self, rank_tol)
    }

    pub(crate) fn certified_pd_inverse(&self, rank_tol: f64) -> Option<HermitianMatrix> {
        let n = self.dim();
        if n == 0 {
            return Some(HermitianMatrix::zeros(0));
        }
        let chol = self.m.clone().cholesky()?;
        let inv = Self::from_square(&chol.inverse());
        let thr = rank_threshold(rank_tol, self.trace());
        let inv_trace = inv.trace();
        if inv_trace.is_finite() && inv_trace * thr < 1.0 {
            Some(inv)
        } else {
            None
        }
    }

    /// Inverse through Cholesky with no rank truncation, for matrices that
    /// are positive definite by construction but may be badly scaled.
    /// Returns `None` when a squared pivot falls below [`PIVOT_FLOOR`] times
    /// the largest diagonal entry.
    pub fn cholesky_inverse(&self) -> Option<HermitianMatrix> {
        let n = self.dim();
        if n == 0 {
            return Some(HermitianMatrix::zeros(0));
        }
        let max_diag = (0..n).map(|i| self.m[(i, i)].re).fold(0.0, f64::max);
        let chol = self.m.clone().cholesky()?;
        let l = chol.l_dirty();
        let min_pivot = (0..n).map(|i| l[(i, i)].re).fold(f64::INFINITY, f64::min);
        if !(min_pivot * min_pivot > PIVOT_FLOOR * max_diag) {
            return None;
        }
        let inv = chol.inverse();
        if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Some(Self::from_square(&inv))
        } else {
            None
        }
    }

    /// Orthogonal projector onto the numerical range.
    pub fn range_projector(&self, rank_tol: f64) -> HermitianMatrix {
        let eig = self.eigen();
        let thr = rank_threshold(rank_tol, eig.max());
        eig.map(|v| if v > thr { 1.0 } else { 0.0 })
    }

    /// Negative-eigenvalue part `V min(Λ, 0) V^+`.
    pub fn negative_part(&self) -> HermitianMatrix {
        self.eigen().map(|v| v.min(0.0))
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> f64 {
        let eig = self.eigen();
        eig.max().abs().max(eig.min().abs())
    }

    /// `A^{-1/2}` for a positive-definite matrix.
    pub fn inv_sqrt(&self, rank_tol: f64) -> Result<HermitianMatrix> {
        let eig = self.eigen();
        let thr = rank_threshold(rank_tol, eig.max());
        if eig.min() <= thr {
            return Err(Error::Indefinite {
                min_eig: eig.min(),
                tol: thr,
            });
        }
        Ok(eig.map(|v| 1.0 / v.sqrt()))
    }
}
