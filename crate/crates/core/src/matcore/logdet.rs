use super::{rank_threshold, CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Extended difference of log-determinants, `log|A + B| - log|B|` in nats.
///
/// When `B` is singular the value is taken on the range of `B`: with `U` an
/// orthonormal basis of that range, the result is
/// `log|U^+(A+B)U| - log|U^+BU|`. This requires `range(A) ⊆ range(B)`; a
/// pair where `A` has mass on the null space of `B` is reported as
/// [`Error::IllPosedPair`] rather than regularized.
pub fn ext_logdet_diff(a: &HermitianMatrix, b: &HermitianMatrix, rank_tol: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "logdet pair has dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.dim() == 0 {
        return Ok(0.0);
    }
    if let Some(v) = positive_definite_route(a, b, rank_tol) {
        return Ok(v);
    }
    truncated_route(a, b, rank_tol)
}

/// `log|I + L^{-1} A L^{-+}|` with `B = L L^+`; taken only when `B` is
/// certifiably nonsingular.
fn positive_definite_route(a: &HermitianMatrix, b: &HermitianMatrix, rank_tol: f64) -> Option<f64> {
    b.certified_pd_inverse(rank_tol)?;
    let chol = b.as_matrix().clone().cholesky()?;
    let l = chol.l();
    let n = a.dim();
    // L^{-1} A L^{-+} via two triangular solves
    let x = l.solve_lower_triangular(a.as_matrix())?;
    let y = l.solve_lower_triangular(&x.adjoint())?;
    let m = HermitianMatrix::from_square(&(CMatrix::identity(n, n) + y));
    let lm = m.as_matrix().clone().cholesky()?;
    let ld = lm.l_dirty();
    Some((0..n).map(|i| 2.0 * ld[(i, i)].re.ln()).sum())
}

fn truncated_route(a: &HermitianMatrix, b: &HermitianMatrix, rank_tol: f64) -> Result<f64> {
    let eb = b.eigen();
    let ea = a.eigen();
    let thr_b = rank_threshold(rank_tol, eb.max());
    let thr_a = rank_threshold(rank_tol, ea.max());
    if eb.min() < -thr_b {
        return Err(Error::Indefinite {
            min_eig: eb.min(),
            tol: thr_b,
        });
    }
    if ea.min() < -thr_a {
        return Err(Error::Indefinite {
            min_eig: ea.min(),
            tol: thr_a,
        });
    }
    let n = b.dim();
    let range: Vec<usize> = (0..n).filter(|&i| eb.values[i] > thr_b).collect();
    let null: Vec<usize> = (0..n).filter(|&i| eb.values[i] <= thr_b).collect();

    if !null.is_empty() {
        let nb = eb.vectors.select_columns(&null);
        let leak = HermitianMatrix::from_square(&(nb.adjoint() * a.as_matrix() * &nb));
        let leak = leak.spectral_norm();
        let leak_tol = rank_threshold(rank_tol, ea.max().max(eb.max()));
        if leak > leak_tol {
            return Err(Error::IllPosedPair { leak });
        }
    }
    if range.is_empty() {
        return Ok(0.0);
    }

    let u = eb.vectors.select_columns(&range);
    let inv_sqrt: Vec<f64> = range.iter().map(|&i| 1.0 / eb.values[i].sqrt()).collect();
    let mut whitened = u.adjoint() * a.as_matrix() * &u;
    for (j, &sj) in inv_sqrt.iter().enumerate() {
        for (i, &si) in inv_sqrt.iter().enumerate() {
            whitened[(i, j)] *= si * sj;
        }
    }
    let m = HermitianMatrix::from_square(&whitened);
    Ok(m.eigen().values.iter().map(|&v| v.max(0.0).ln_1p()).sum())
}
