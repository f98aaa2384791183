use num_complex::Complex64;

use super::{rank_threshold, CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Contragredient block decomposition of a PSD pair `(A, B)`.
///
/// `T A T^+ = diag(S1, 0, S3, 0)` and `T^{-+} B T^{-1} = diag(S1, S2, 0, 0)`
/// where the `S` blocks are positive-definite diagonal. Block one is where
/// both matrices are active (balanced so the two blocks coincide), block two
/// carries only `B`, block three only `A`, block four neither.
#[derive(Debug, Clone)]
pub struct TruncationDecomposition {
    pub transform: CMatrix,
    pub transform_inverse: CMatrix,
    /// Rank of the `B` side, `|S1| + |S2|`.
    pub signal_rank: usize,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub s3: Vec<f64>,
    /// `‖T A T^+ - diag(S1,0,S3,0)‖_F`
    pub reconstruction_error_a: f64,
    /// `‖T^{-+} B T^{-1} - diag(S1,S2,0,0)‖_F`
    pub reconstruction_error_b: f64,
}

impl TruncationDecomposition {
    /// Sizes of the four blocks in order `[both, b_only, a_only, neither]`.
    pub fn block_sizes(&self) -> [usize; 4] {
        let n = self.transform.nrows();
        let (a, b, c) = (self.s1.len(), self.s2.len(), self.s3.len());
        [a, b, c, n - a - b - c]
    }

    pub fn a_form(&self) -> HermitianMatrix {
        let mut d = self.s1.clone();
        d.extend(std::iter::repeat(0.0).take(self.s2.len()));
        d.extend(self.s3.iter().copied());
        d.resize(self.transform.nrows(), 0.0);
        HermitianMatrix::from_real_diagonal(&d)
    }

    pub fn b_form(&self) -> HermitianMatrix {
        let mut d = self.s1.clone();
        d.extend(self.s2.iter().copied());
        d.resize(self.transform.nrows(), 0.0);
        HermitianMatrix::from_real_diagonal(&d)
    }
}

fn split_by_threshold(values: &[f64], thr: f64) -> (Vec<usize>, Vec<usize>) {
    let active = (0..values.len()).filter(|&i| values[i] > thr).collect();
    let inactive = (0..values.len()).filter(|&i| values[i] <= thr).collect();
    (active, inactive)
}

fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

fn real_diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d.len(),
        d.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

/// Computes the block decomposition of a PSD pair. Ranks are decided with
/// `rank_tol` relative to the largest eigenvalue at each stage; the
/// reconstruction errors are reported for diagnostics.
pub fn simultaneous_decompose(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    rank_tol: f64,
) -> Result<TruncationDecomposition> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "decomposition pair has dimensions {} and {}",
            n,
            b.dim()
        )));
    }
    for m in [a, b] {
        let eig = m.eigen();
        let thr = rank_threshold(rank_tol, eig.max());
        if eig.min() < -thr {
            return Err(Error::Indefinite {
                min_eig: eig.min(),
                tol: thr,
            });
        }
    }

    // Stage 1: whiten A on its range. Tp A Tp^+ = diag(I_r, 0).
    let ea = a.eigen();
    let (range_a, null_a) = split_by_threshold(&ea.values, rank_threshold(rank_tol, ea.max()));
    let r = range_a.len();
    let order: Vec<usize> = range_a.iter().chain(null_a.iter()).copied().collect();
    let u1 = ea.vectors.select_columns(&order);
    let mut scale = vec![1.0; n];
    for (k, &i) in range_a.iter().enumerate() {
        scale[k] = ea.values[i].sqrt();
    }
    let inv_scale: Vec<f64> = scale.iter().map(|s| 1.0 / s).collect();
    let t1 = real_diag(&inv_scale) * u1.adjoint();
    let t1_inv = &u1 * real_diag(&scale);
    let q1 = HermitianMatrix::from_square(&(t1_inv.adjoint() * b.as_matrix() * &t1_inv));
    let q_scale = q1.eigen().max();

    // Stage 2: diagonalize the B block on range(A) with a unitary.
    let q11 = HermitianMatrix::from_square(&q1.as_matrix().view((0, 0), (r, r)).into_owned());
    let e11 = q11.eigen();
    let (active_d, zero_d) = split_by_threshold(&e11.values, rank_threshold(rank_tol, q_scale));
    let d: Vec<f64> = active_d.iter().map(|&i| e11.values[i]).collect();
    let nd = d.len();
    let m_order: Vec<usize> = active_d.iter().chain(zero_d.iter()).copied().collect();
    let m = e11.vectors.select_columns(&m_order);
    let t2 = block_diag(&m.adjoint(), &CMatrix::identity(n - r, n - r));
    let t2_inv = block_diag(&m, &CMatrix::identity(n - r, n - r));
    let q2 = t2_inv.adjoint() * q1.as_matrix() * &t2_inv;

    // Stage 3: decouple range(A) from null(A) using the block-one pivot.
    let mut coupling = CMatrix::zeros(r, n - r);
    for k in 0..nd {
        for j in 0..(n - r) {
            coupling[(k, j)] = q2[(k, r + j)] / d[k];
        }
    }
    let mut t3 = CMatrix::identity(n, n);
    let mut t3_inv = CMatrix::identity(n, n);
    t3.view_mut((0, r), (r, n - r)).copy_from(&coupling);
    t3_inv.view_mut((0, r), (r, n - r)).copy_from(&(-&coupling));
    let q3 = t3_inv.adjoint() * q2 * &t3_inv;

    // Stage 4: diagonalize the Schur complement on null(A).
    let q22 = HermitianMatrix::from_square(&q3.view((r, r), (n - r, n - r)).into_owned());
    let e22 = q22.eigen();
    let (active_e, zero_e) = split_by_threshold(&e22.values, rank_threshold(rank_tol, q_scale));
    let e: Vec<f64> = active_e.iter().map(|&i| e22.values[i]).collect();
    let ne = e.len();
    let v_order: Vec<usize> = active_e.iter().chain(zero_e.iter()).copied().collect();
    let v2 = e22.vectors.select_columns(&v_order);
    let t4 = block_diag(&CMatrix::identity(r, r), &v2.adjoint());
    let t4_inv = block_diag(&CMatrix::identity(r, r), &v2);

    // Stage 5: balance block one so both sides read sqrt(D).
    let mut bal = vec![1.0; n];
    for k in 0..nd {
        bal[k] = d[k].powf(0.25);
    }
    let bal_inv: Vec<f64> = bal.iter().map(|v| 1.0 / v).collect();
    let t5 = real_diag(&bal);
    let t5_inv = real_diag(&bal_inv);

    // Stage 6: reorder to (both, b_only, a_only, neither).
    let mut perm: Vec<usize> = (0..nd).collect();
    perm.extend(r..r + ne);
    perm.extend(nd..r);
    perm.extend(r + ne..n);
    let mut pmat = CMatrix::zeros(n, n);
    for (new, &old) in perm.iter().enumerate() {
        pmat[(new, old)] = Complex64::new(1.0, 0.0);
    }

    let transform = &pmat * t5 * t4 * t3 * t2 * t1;
    let transform_inverse = t1_inv * t2_inv * t3_inv * t4_inv * t5_inv * pmat.adjoint();

    let s1: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
    let s2 = e;
    let s3 = vec![1.0; r - nd];
    let mut out = TruncationDecomposition {
        transform,
        transform_inverse,
        signal_rank: nd + ne,
        s1,
        s2,
        s3,
        reconstruction_error_a: 0.0,
        reconstruction_error_b: 0.0,
    };
    let ta = &out.transform * a.as_matrix() * out.transform.adjoint();
    let tb = out.transform_inverse.adjoint() * b.as_matrix() * &out.transform_inverse;
    out.reconstruction_error_a = (ta - out.a_form().as_matrix()).norm();
    out.reconstruction_error_b = (tb - out.b_form().as_matrix()).norm();
    Ok(out)
}
