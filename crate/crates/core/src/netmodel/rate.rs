use super::Network;
use crate::error::Result;
use crate::matcore::{add_adjoint_congruence, ext_logdet_diff, CMatrix, HermitianMatrix, DEFAULT_RANK_TOL};

/// `Ω_l = I + Σ_{k≠l} H_lk Σ_k H_lk^+` for every link.
pub fn interference_plus_noise(net: &Network, sigma: &[HermitianMatrix]) -> Result<Vec<HermitianMatrix>> {
    net.check_covariances(sigma)?;
    let nl = net.num_links();
    let mut scratch = CMatrix::zeros(0, 0);
    Ok((0..nl)
        .map(|l| {
            let m = net.link(l).rx_antennas;
            let mut omega = CMatrix::identity(m, m);
            for k in (0..nl).filter(|&k| k != l) {
                add_adjoint_congruence(&mut omega, &sigma[k], net.channel_adjoint(l, k), &mut scratch);
            }
            HermitianMatrix::hermitize_owned(omega)
        })
        .collect())
}

/// Rate of link `l` in nats given the interference-plus-noise covariance.
fn rate_given_omega(net: &Network, sigma: &[HermitianMatrix], omega: &HermitianMatrix, l: usize) -> Result<f64> {
    let signal = sigma[l].adjoint_congruence(net.channel_adjoint(l, l));
    Ok(ext_logdet_diff(&signal, omega, DEFAULT_RANK_TOL)?.max(0.0))
}

pub fn achievable_rate(net: &Network, sigma: &[HermitianMatrix], l: usize) -> Result<f64> {
    let omega = interference_plus_noise(net, sigma)?;
    rate_given_omega(net, sigma, &omega[l], l)
}

/// All link rates in nats.
pub fn achievable_rates(net: &Network, sigma: &[HermitianMatrix]) -> Result<Vec<f64>> {
    let omega = interference_plus_noise(net, sigma)?;
    (0..net.num_links())
        .map(|l| rate_given_omega(net, sigma, &omega[l], l))
        .collect()
}

pub fn weighted_sum_rate(net: &Network, sigma: &[HermitianMatrix]) -> Result<f64> {
    let omega = interference_plus_noise(net, sigma)?;
    objective_f(net, sigma, &omega)
}

/// `F(Σ, Ω) = Σ_l w_l · [log|Ω_l + H_ll Σ_l H_ll^+| − log|Ω_l|]` with `Ω`
/// treated as a free argument.
pub fn objective_f(net: &Network, sigma: &[HermitianMatrix], omega: &[HermitianMatrix]) -> Result<f64> {
    net.check_covariances(sigma)?;
    net.check_receive_side(omega)?;
    let mut total = 0.0;
    for l in 0..net.num_links() {
        total += net.weight(l) * rate_given_omega(net, sigma, &omega[l], l)?;
    }
    Ok(total)
}

/// `Σ_{l∈L^s} tr(Σ_l Q_l^s)` for every group `s`.
pub fn constraint_usage(net: &Network, sigma: &[HermitianMatrix]) -> Result<Vec<f64>> {
    net.check_covariances(sigma)?;
    Ok(net
        .groups()
        .iter()
        .map(|g| g.iter().map(|(l, q)| sigma[l].trace_product(q)).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::test_util::siso_network;
    use super::super::{ConstraintGroup, Link};
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_covariances_give_identity_noise() {
        let net = siso_network(&[&[1.0, 0.5], &[0.3, 1.0]], &[1.0, 1.0], 10.0);
        let sigma = vec![HermitianMatrix::zeros(1); 2];
        for o in interference_plus_noise(&net, &sigma).unwrap() {
            assert_eq!(o, HermitianMatrix::identity(1));
        }
        assert_eq!(weighted_sum_rate(&net, &sigma).unwrap(), 0.0);
        assert_eq!(constraint_usage(&net, &sigma).unwrap(), vec![0.0]);
    }

    #[test]
    fn scalar_interference() {
        let net = siso_network(&[&[1.0, 2.0], &[0.0, 1.0]], &[1.0, 1.0], 10.0);
        let sigma = vec![HermitianMatrix::scaled_identity(1, 1.0), HermitianMatrix::scaled_identity(1, 3.0)];
        let omega = interference_plus_noise(&net, &sigma).unwrap();
        assert_abs_diff_eq!(omega[0].trace(), 13.0, epsilon = 1e-14);
        assert_abs_diff_eq!(omega[1].trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_link_shannon() {
        let net = siso_network(&[&[1.0]], &[2.0], 10.0);
        let sigma = vec![HermitianMatrix::scaled_identity(1, 1.0)];
        assert_abs_diff_eq!(achievable_rate(&net, &sigma, 0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(weighted_sum_rate(&net, &sigma).unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-15);
        let p = 7.5;
        let sigma = vec![HermitianMatrix::scaled_identity(1, p)];
        assert_abs_diff_eq!(achievable_rate(&net, &sigma, 0).unwrap(), (1.0 + p).ln(), epsilon = 1e-14);
    }

    #[test]
    fn equal_split_saturates_total_budget() {
        let links = vec![
            Link { tx_antennas: 2, rx_antennas: 1, weight: 1.0 },
            Link { tx_antennas: 3, rx_antennas: 1, weight: 1.0 },
        ];
        let channels = vec![
            vec![CMatrix::zeros(1, 2), CMatrix::zeros(1, 3)],
            vec![CMatrix::zeros(1, 2), CMatrix::zeros(1, 3)],
        ];
        let pt = 10.0;
        let g = ConstraintGroup::power_budget(vec![0, 1], &[2, 3], pt).unwrap();
        let net = Network::new(links, channels, vec![g]).unwrap();
        let sigma = vec![
            HermitianMatrix::scaled_identity(2, pt / 2.0 / 2.0),
            HermitianMatrix::scaled_identity(3, pt / 2.0 / 3.0),
        ];
        assert_abs_diff_eq!(constraint_usage(&net, &sigma).unwrap()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn per_link_rank_one_saturates() {
        let links = vec![
            Link { tx_antennas: 2, rx_antennas: 2, weight: 1.0 },
            Link { tx_antennas: 2, rx_antennas: 2, weight: 1.0 },
        ];
        let channels = vec![vec![CMatrix::identity(2, 2); 2]; 2];
        let budgets = [3.0, 7.0];
        let groups = (0..2)
            .map(|l| ConstraintGroup::power_budget(vec![l], &[2, 2], budgets[l]).unwrap())
            .collect();
        let net = Network::new(links, channels, groups).unwrap();
        let sigma: Vec<_> = budgets.iter().map(|&p| HermitianMatrix::from_real_diagonal(&[p, 0.0])).collect();
        for u in constraint_usage(&net, &sigma).unwrap() {
            assert_abs_diff_eq!(u, 1.0, epsilon = 1e-15);
        }
    }
}
