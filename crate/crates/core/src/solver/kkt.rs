use serde::Serialize;

use super::step::{dual_phi, inverse_gap};
use crate::error::{Error, Result};
use crate::matcore::{pseudo_inverse, HermitianMatrix};
use crate::netmodel::{constraint_usage, Network};

/// Residuals of the optimality conditions at a primal/dual point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    /// Per link, `‖Z_−‖_F + ‖Z Σ_l‖_F / ‖Σ_l‖_2` with
    /// `Z = Φ_l − w_l H_ll^+ W_l^+ H_ll` and `W_l = Ω_l + H_ll Σ_l H_ll^+`:
    /// the gradient condition in `Σ_l` over the PSD cone.
    pub stationarity_sigma: Vec<f64>,
    /// Per link, `‖P (w_l (Ω_l^+ − W_l^+) − Λ_l) P‖_F` with `P` the projector
    /// onto the range of `W_l`.
    pub stationarity_omega: Vec<f64>,
    /// Per group, `max(0, usage_s − 1)`.
    pub primal_infeasibility: Vec<f64>,
    /// Largest negative eigenvalue of any `Λ_l` or negative price, as a
    /// nonnegative number.
    pub dual_infeasibility: f64,
    /// Per group, `|μ_s (1 − usage_s)|`.
    pub complementary_slackness: Vec<f64>,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.stationarity_sigma
            .iter()
            .chain(&self.stationarity_omega)
            .chain(&self.primal_infeasibility)
            .chain(&self.complementary_slackness)
            .copied()
            .fold(self.dual_infeasibility, f64::max)
    }
}

/// The two gradient residuals of one link, `(Σ-condition, Ω-condition)`,
/// as described on [`KktReport`].
pub fn stationarity_residuals(
    net: &Network,
    l: usize,
    sigma: &HermitianMatrix,
    omega: &HermitianMatrix,
    lambda: &HermitianMatrix,
    phi: &HermitianMatrix,
    rank_tol: f64,
) -> Result<(f64, f64)> {
    let h = net.channel(l, l);
    let w = net.weight(l);
    let s = sigma.congruence(h);
    let total = omega.add(&s);
    let (total_inv, projector) = match total.cholesky_inverse() {
        Some(inv) => (inv, None),
        None => (pseudo_inverse(&total, rank_tol)?, Some(total.range_projector(rank_tol))),
    };

    let z = phi.sub(&total_inv.adjoint_congruence(h).scale(w));
    let mut r_sigma = z.negative_part().frobenius_norm();
    let sigma_norm = sigma.spectral_norm();
    if sigma_norm > 0.0 {
        r_sigma += (z.as_matrix() * sigma.as_matrix()).norm() / sigma_norm;
    }

    let d = inverse_gap(w, omega, &s, rank_tol)?.sub(lambda);
    let r_omega = match projector {
        None => d.frobenius_norm(),
        Some(p) => (p.as_matrix() * d.as_matrix() * p.as_matrix()).norm(),
    };
    Ok((r_sigma, r_omega))
}

/// Full optimality report for covariances `Σ` with interference `Ω` and
/// duals `(Λ, μ)`.
pub fn kkt_residual(
    net: &Network,
    sigma: &[HermitianMatrix],
    omega: &[HermitianMatrix],
    lambda: &[HermitianMatrix],
    mu: &[f64],
    rank_tol: f64,
) -> Result<KktReport> {
    net.check_covariances(sigma)?;
    net.check_receive_side(omega)?;
    let phi = dual_phi(net, lambda, mu)?;
    kkt_with_phi(net, sigma, omega, lambda, mu, &phi, rank_tol)
}

pub(crate) fn kkt_with_phi(
    net: &Network,
    sigma: &[HermitianMatrix],
    omega: &[HermitianMatrix],
    lambda: &[HermitianMatrix],
    mu: &[f64],
    phi: &[HermitianMatrix],
    rank_tol: f64,
) -> Result<KktReport> {
    if mu.len() != net.num_groups() {
        return Err(Error::DimensionMismatch(format!("{} prices for {} groups", mu.len(), net.num_groups())));
    }
    let nl = net.num_links();
    let mut stationarity_sigma = Vec::with_capacity(nl);
    let mut stationarity_omega = Vec::with_capacity(nl);
    let mut dual_infeasibility: f64 = 0.0;
    for l in 0..nl {
        let (a, b) = stationarity_residuals(net, l, &sigma[l], &omega[l], &lambda[l], &phi[l], rank_tol)?;
        stationarity_sigma.push(a);
        stationarity_omega.push(b);
        dual_infeasibility = dual_infeasibility.max(-lambda[l].min_eigenvalue());
    }
    for &m in mu {
        dual_infeasibility = dual_infeasibility.max(-m);
    }
    let usage = constraint_usage(net, sigma)?;
    Ok(KktReport {
        stationarity_sigma,
        stationarity_omega,
        primal_infeasibility: usage.iter().map(|u| (u - 1.0).max(0.0)).collect(),
        dual_infeasibility,
        complementary_slackness: usage.iter().zip(mu).map(|(u, m)| (m * (1.0 - u)).abs()).collect(),
    })
}
