use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wsr_minimax::matcore::{hermitize, CMatrix, HermitianMatrix, DEFAULT_RANK_TOL};
use wsr_minimax::netmodel::{
    constraint_usage, interference_plus_noise, objective_f, random_network, weighted_sum_rate, ConstraintSpec,
    Network, PrimalState, Scenario,
};
use wsr_minimax::solver::{
    dual_lambda, dual_phi, iterate, kkt_residual, saddle_step, solve, solve_mu, stationarity_residuals,
    SolverConfig,
};

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// `G G^+` with `G` of shape `n × rank`.
fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize, scale: f64) -> HermitianMatrix {
    let g = gaussian(rng, n, rank);
    hermitize(&(&g * g.adjoint())).unwrap().scale(scale)
}

fn small_scenario(links: usize, n: usize, m: usize, alpha: f64) -> Scenario {
    Scenario { links, tx_antennas: n, rx_antennas: m, ..Scenario::reference(alpha) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn saddle_step_solves_the_saddle_equations(
        seed in 0u64..10_000,
        links in 1usize..=4,
        n in 1usize..=3,
        m in 1usize..=3,
        alpha in 0.0f64..3.0,
    ) {
        let net = random_network(seed, &small_scenario(links, n, m, alpha)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let lambda: Vec<_> = (0..links)
            .map(|_| {
                let rank = rng.random_range(0..=m);
                let scale = rng.random_range(0.05..2.0);
                random_psd(&mut rng, m, rank, scale)
            })
            .collect();
        let mu = vec![rng.random_range(0.01..3.0)];
        let phi = dual_phi(&net, &lambda, &mu).unwrap();
        let (sigma, omega) = saddle_step(&net, &lambda, &phi, DEFAULT_RANK_TOL).unwrap();
        for l in 0..links {
            prop_assert!(sigma[l].is_psd(1e-10));
            let (rs, ro) =
                stationarity_residuals(&net, l, &sigma[l], &omega[l], &lambda[l], &phi[l], DEFAULT_RANK_TOL).unwrap();
            let scale = 1.0 + phi[l].spectral_norm() + lambda[l].spectral_norm();
            prop_assert!(rs / scale < 1e-8 && ro / scale < 1e-8, "link {l}: {rs:e} {ro:e}");
        }
    }

    #[test]
    fn price_search_meets_active_constraints(
        seed in 0u64..10_000,
        grouped in any::<bool>(),
        alpha in 0.0f64..3.0,
    ) {
        let constraint = if grouped {
            ConstraintSpec::Grouped { cell_size: 2, cell_power: 4.0, total_power: 6.0 }
        } else {
            ConstraintSpec::PerLink { min: 1, max: 8 }
        };
        let sc = Scenario { constraint, ..small_scenario(4, 2, 3, alpha) };
        let net = random_network(seed, &sc).unwrap();
        let cfg = SolverConfig::default();
        let state = PrimalState::from_sigma(&net, wsr_minimax::solver::default_initialization(&net)).unwrap();
        let lambda = dual_lambda(&net, &state.sigma, &state.omega, cfg.rank_tol).unwrap();
        let sol = solve_mu(&net, &lambda, &cfg).unwrap();
        let phi = dual_phi(&net, &lambda, &sol.mu).unwrap();
        let (sigma, _) = saddle_step(&net, &lambda, &phi, cfg.rank_tol).unwrap();
        let usage = constraint_usage(&net, &sigma).unwrap();
        for (s, (&u, &p)) in usage.iter().zip(&sol.mu).enumerate() {
            prop_assert!(p >= 0.0);
            if p > sol.probe_eps {
                prop_assert!((u - 1.0).abs() < 1e-8, "group {s}: usage {u} at price {p}");
            } else {
                prop_assert!(u <= 1.0 + 1e-8, "group {s}: usage {u} with zero price");
            }
        }
    }

    #[test]
    fn steps_never_decrease_the_objective(
        seed in 0u64..10_000,
        alpha in 0.0f64..6.0,
        per_link in any::<bool>(),
    ) {
        let constraint = if per_link { ConstraintSpec::PerLink { min: 1, max: 10 } } else { ConstraintSpec::Total { total_power: 10.0 } };
        let sc = Scenario { constraint, ..small_scenario(4, 2, 3, alpha) };
        let net = random_network(seed, &sc).unwrap();
        let cfg = SolverConfig { max_iters: 60, ..SolverConfig::default() };
        let out = solve(&net, None, &cfg).unwrap();
        prop_assert!(out.trace.max_decrease() <= 1e-10);
        for r in &out.trace.records {
            prop_assert!(r.complementary_slackness < 1e-8);
        }
    }
}

/// `Λ_l = −∂F/∂Ω_l` and `w H^+ W⁻¹ H = ∂F/∂Σ_l` at fixed `Ω`.
#[test]
fn duals_are_gradients_of_the_objective() {
    let net = random_network(3, &small_scenario(3, 2, 3, 1.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sigma: Vec<_> = (0..3).map(|_| random_psd(&mut rng, 2, 2, 0.5)).collect();
    let omega = interference_plus_noise(&net, &sigma).unwrap();
    let lambda = dual_lambda(&net, &sigma, &omega, DEFAULT_RANK_TOL).unwrap();
    let h = 1e-6;
    for l in 0..3 {
        let d = random_psd(&mut rng, 3, 3, 1.0);
        let mut plus = omega.clone();
        let mut minus = omega.clone();
        plus[l] = omega[l].add(&d.scale(h));
        minus[l] = omega[l].sub(&d.scale(h));
        let fd = (objective_f(&net, &sigma, &plus).unwrap() - objective_f(&net, &sigma, &minus).unwrap()) / (2.0 * h);
        assert!((fd + lambda[l].trace_product(&d)).abs() < 1e-7, "link {l}: {fd} vs {}", -lambda[l].trace_product(&d));

        let e = random_psd(&mut rng, 2, 2, 1.0);
        let mut sp = sigma.clone();
        let mut sm = sigma.clone();
        sp[l] = sigma[l].add(&e.scale(h));
        sm[l] = sigma[l].sub(&e.scale(h));
        let fd = (objective_f(&net, &sp, &omega).unwrap() - objective_f(&net, &sm, &omega).unwrap()) / (2.0 * h);
        let hll = net.channel(l, l);
        let w_inv = omega[l].add(&sigma[l].congruence(hll)).inverse(DEFAULT_RANK_TOL).unwrap();
        let grad = w_inv.adjoint_congruence(hll).scale(net.weight(l));
        assert!((fd - grad.trace_product(&e)).abs() < 1e-7);
    }
}

#[test]
fn siso_duals_have_closed_forms() {
    // one link, |h|² = 4, P = 2, w = 1.5: full power, Λ = w(1 − 1/(1+gP)),
    // μ = P w g / (1 + gP)
    let links = vec![wsr_minimax::netmodel::Link { tx_antennas: 1, rx_antennas: 1, weight: 1.5 }];
    let g = wsr_minimax::netmodel::ConstraintGroup::power_budget(vec![0], &[1], 2.0).unwrap();
    let net = Network::new(links, vec![vec![CMatrix::from_element(1, 1, Complex64::new(0.0, 2.0))]], vec![g]).unwrap();
    let out = solve(&net, None, &SolverConfig::default()).unwrap();
    assert!((out.duals.lambda[0].trace() - 1.5 * (1.0 - 1.0 / 9.0)).abs() < 1e-12);
    assert!((out.duals.mu[0] - 2.0 * 1.5 * 4.0 / 9.0).abs() < 1e-10);
    let kkt = kkt_residual(&net, &out.state.sigma, &out.state.omega, &out.duals.lambda, &out.duals.mu, DEFAULT_RANK_TOL)
        .unwrap();
    assert!(kkt.max() < 1e-10);
}

#[test]
fn converged_point_is_a_fixed_point() {
    let net = random_network(21, &small_scenario(4, 2, 2, 1.0)).unwrap();
    let cfg = SolverConfig { kkt_tol: 1e-11, ..SolverConfig::default() };
    let out = solve(&net, None, &cfg).unwrap();
    let (next, rec) = iterate(&net, &out.state, &cfg).unwrap();
    assert!((rec.lambda_scale - 1.0).abs() < 1e-9);
    for (a, b) in out.state.sigma.iter().zip(&next.sigma) {
        assert!(a.sub(b).frobenius_norm() < 1e-8);
    }
    assert!((weighted_sum_rate(&net, &next.sigma).unwrap() - out.objective).abs() < 1e-10);
}

#[test]
fn overlapping_groups_stay_feasible() {
    let sc = Scenario {
        constraint: ConstraintSpec::Grouped { cell_size: 2, cell_power: 3.0, total_power: 5.0 },
        ..small_scenario(5, 2, 2, 0.5)
    };
    let net = random_network(4, &sc).unwrap();
    let out = solve(&net, None, &SolverConfig::default()).unwrap();
    for u in constraint_usage(&net, &out.state.sigma).unwrap() {
        assert!(u <= 1.0 + 1e-9);
    }
    assert!(out.kkt.max() < 1e-6, "{:?}", out.kkt);
}

#[test]
fn infeasible_start_is_rejected() {
    let net = random_network(1, &small_scenario(2, 1, 1, 1.0)).unwrap();
    let init = vec![HermitianMatrix::scaled_identity(1, 20.0); 2];
    assert!(matches!(
        solve(&net, Some(init), &SolverConfig::default()),
        Err(wsr_minimax::Error::Infeasible { .. })
    ));
}
