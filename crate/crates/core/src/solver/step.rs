use crate::error::{Error, Result};
use crate::matcore::{add_adjoint_congruence, pseudo_inverse, rank_threshold, CMatrix, HermitianMatrix};
use crate::netmodel::{constraint_usage, Network, PrimalState};

/// `w (Ω⁻¹ − W⁻¹)` with `W = Ω + S`. For definite `Ω` this is evaluated as
/// `w Ω⁻¹ S W⁻¹`, which avoids subtracting two nearly equal inverses.
pub(crate) fn inverse_gap(
    w: f64,
    omega: &HermitianMatrix,
    s: &HermitianMatrix,
    rank_tol: f64,
) -> Result<HermitianMatrix> {
    let total = omega.add(s);
    if let (Some(oi), Some(ti)) = (omega.cholesky_inverse(), total.cholesky_inverse()) {
        let prod = oi.as_matrix() * s.as_matrix() * ti.as_matrix();
        return Ok(HermitianMatrix::hermitize_owned(prod).scale(w));
    }
    let eo = omega.eigen();
    let thr = rank_threshold(rank_tol, eo.max().max(s.spectral_norm()));
    let null: Vec<usize> = (0..eo.values.len()).filter(|&i| eo.values[i] <= thr).collect();
    if !null.is_empty() {
        let nb = eo.vectors.select_columns(&null);
        let leak = HermitianMatrix::from_square(&(nb.adjoint() * s.as_matrix() * &nb)).spectral_norm();
        if leak > thr {
            return Err(Error::IllPosedPair { leak });
        }
    }
    let oi = pseudo_inverse(omega, rank_tol)?;
    let ti = pseudo_inverse(&total, rank_tol)?;
    Ok(oi.sub(&ti).scale(w))
}

/// `Λ_l = w_l (Ω_l⁻¹ − (Ω_l + H_ll Σ_l H_ll^+)⁻¹)` for every link.
pub fn dual_lambda(
    net: &Network,
    sigma: &[HermitianMatrix],
    omega: &[HermitianMatrix],
    rank_tol: f64,
) -> Result<Vec<HermitianMatrix>> {
    net.check_covariances(sigma)?;
    net.check_receive_side(omega)?;
    (0..net.num_links())
        .map(|l| {
            let s = sigma[l].adjoint_congruence(net.channel_adjoint(l, l));
            inverse_gap(net.weight(l), &omega[l], &s, rank_tol)
        })
        .collect()
}

/// `Σ_{k≠l} H_kl^+ Λ_k H_kl`: the part of `Φ_l` that does not depend on `μ`.
pub(crate) fn interference_duals(net: &Network, lambda: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
    let nl = net.num_links();
    let mut scratch = CMatrix::zeros(0, 0);
    (0..nl)
        .map(|l| {
            let n = net.link(l).tx_antennas;
            let mut j = CMatrix::zeros(n, n);
            for k in (0..nl).filter(|&k| k != l) {
                add_adjoint_congruence(&mut j, &lambda[k], net.channel(k, l), &mut scratch);
            }
            HermitianMatrix::hermitize_owned(j)
        })
        .collect()
}

/// `Φ_l` from the interference part and the prices.
pub(crate) fn phi_from_parts(net: &Network, interference: &[HermitianMatrix], mu: &[f64]) -> Vec<HermitianMatrix> {
    interference
        .iter()
        .enumerate()
        .map(|(l, j)| {
            let mut phi = j.clone();
            for (s, q) in net.groups_of(l) {
                if mu[s] != 0.0 {
                    phi.add_assign_scaled(q, mu[s]);
                }
            }
            phi
        })
        .collect()
}

/// `Φ_l = Σ_{s∈S^l} μ_s Q_l^s + Σ_{k≠l} H_kl^+ Λ_k H_kl` for every link.
pub fn dual_phi(net: &Network, lambda: &[HermitianMatrix], mu: &[f64]) -> Result<Vec<HermitianMatrix>> {
    net.check_receive_side(lambda)?;
    if mu.len() != net.num_groups() {
        return Err(Error::DimensionMismatch(format!(
            "{} prices for {} groups",
            mu.len(),
            net.num_groups()
        )));
    }
    Ok(phi_from_parts(net, &interference_duals(net, lambda), mu))
}

/// Solution of the saddle equations for one link given `Φ` and
/// `G = H^+ Λ H`: returns `Σ̃ = w(Φ⁻¹ − Ψ⁻¹)` and `Ψ⁻¹` with `Ψ = Φ + G`,
/// from which `Ω̃ = w H Ψ⁻¹ H^+`.
pub(crate) fn link_saddle(
    link: usize,
    w: f64,
    phi: &HermitianMatrix,
    g: &HermitianMatrix,
    rank_tol: f64,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let psi = phi.add(g);
    if let Some(phi_inv) = phi.cholesky_inverse() {
        let psi_inv = psi
            .cholesky_inverse()
            .ok_or_else(|| Error::InadmissibleSaddle { link, reason: "Φ + G is not positive definite".into() })?;
        // Φ⁻¹ − Ψ⁻¹ = Φ⁻¹ G Ψ⁻¹
        let prod = phi_inv.as_matrix() * g.as_matrix() * psi_inv.as_matrix();
        return Ok((HermitianMatrix::hermitize_owned(prod).scale(w), psi_inv));
    }
    let ep = phi.eigen();
    let thr = rank_threshold(rank_tol, ep.max().max(g.spectral_norm()));
    if ep.min() < -thr {
        return Err(Error::InadmissibleSaddle { link, reason: format!("Φ has eigenvalue {:e}", ep.min()) });
    }
    let null: Vec<usize> = (0..ep.values.len()).filter(|&i| ep.values[i] <= thr).collect();
    let nb = ep.vectors.select_columns(&null);
    let leak = HermitianMatrix::from_square(&(nb.adjoint() * g.as_matrix() * &nb)).spectral_norm();
    if leak > thr {
        return Err(Error::InadmissibleSaddle {
            link,
            reason: format!("H^+ Λ H has weight {leak:e} on the null space of Φ"),
        });
    }
    let phi_inv = pseudo_inverse(phi, rank_tol)?;
    let psi_inv = pseudo_inverse(&psi, rank_tol)?;
    Ok((phi_inv.sub(&psi_inv).scale(w), psi_inv))
}

/// Solves the saddle equations link by link for given duals, returning the
/// tentative covariances `Σ̃` and the matching `Ω̃`.
pub fn saddle_step(
    net: &Network,
    lambda: &[HermitianMatrix],
    phi: &[HermitianMatrix],
    rank_tol: f64,
) -> Result<(Vec<HermitianMatrix>, Vec<HermitianMatrix>)> {
    net.check_receive_side(lambda)?;
    net.check_covariances(phi)?;
    let mut sigma = Vec::with_capacity(net.num_links());
    let mut omega = Vec::with_capacity(net.num_links());
    for l in 0..net.num_links() {
        let g = lambda[l].adjoint_congruence(net.channel(l, l));
        let (s, psi_inv) = link_saddle(l, net.weight(l), &phi[l], &g, rank_tol)?;
        sigma.push(s);
        omega.push(psi_inv.adjoint_congruence(net.channel_adjoint(l, l)).scale(net.weight(l)));
    }
    Ok((sigma, omega))
}

/// Largest usage the scaling accepts above one.
const SCALE_SLACK: f64 = 1e-8;

/// Divides the tentative covariances by `λ = max_s usage_s(Σ̃)` so the
/// tightest group is met with equality, and recomputes `Ω`.
pub fn scale_and_commit(net: &Network, sigma_tilde: Vec<HermitianMatrix>) -> Result<(PrimalState, f64)> {
    let usage = constraint_usage(net, &sigma_tilde)?;
    let lambda = usage.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lambda > 0.0 && lambda.is_finite()) || lambda > 1.0 + SCALE_SLACK {
        return Err(Error::InvalidScaling { lambda });
    }
    let sigma = if lambda == 1.0 {
        sigma_tilde
    } else {
        sigma_tilde.iter().map(|s| s.scale(1.0 / lambda)).collect()
    };
    Ok((PrimalState::from_sigma(net, sigma)?, lambda))
}
