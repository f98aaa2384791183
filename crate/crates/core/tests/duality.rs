use proptest::prelude::*;
use wsr_minimax::duality::{certify_duality, correspondence_drift, duality_map, ReciprocalPair, Verdict};
use wsr_minimax::netmodel::{objective_f, random_network, ConstraintSpec, Scenario};
use wsr_minimax::solver::{solve, SolverConfig};

fn scenario(links: usize, n: usize, m: usize, alpha: f64, constraint: ConstraintSpec) -> Scenario {
    Scenario { links, tx_antennas: n, rx_antennas: m, interference_scale: alpha, constraint, ..Scenario::reference(alpha) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn map_is_an_involution(seed in 0u64..10_000, links in 1usize..=4, n in 1usize..=3, m in 1usize..=3, alpha in 0.0f64..3.0) {
        let net = random_network(seed, &scenario(links, n, m, alpha, ConstraintSpec::Total { total_power: 10.0 })).unwrap();
        let cfg = SolverConfig { max_iters: 40, ..SolverConfig::default() };
        let out = solve(&net, None, &cfg).unwrap();
        let pair = ReciprocalPair::new(&net).unwrap();
        let (p, d) = duality_map(&pair, &out.state, &out.duals).unwrap();
        let (pp, dd) = duality_map(&pair.flipped(), &p, &d).unwrap();
        prop_assert!(correspondence_drift((&out.state, &out.duals), (&pp, &dd)) < 1e-12);
    }
}

#[test]
fn total_power_certificate_matches_objectives() {
    let net = random_network(8, &scenario(4, 2, 2, 1.0, ConstraintSpec::Total { total_power: 10.0 })).unwrap();
    let report = certify_duality(&net, &SolverConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report:#?}");
    assert!(report.objective_gap.unwrap() < 1e-6);
}

/// At weak interference both directions reach the same optimum from their
/// own starting points. At stronger interference the two solves may stop at
/// different stationary points, which is why this check is informational.
#[test]
fn independent_reverse_solves_agree_at_weak_interference() {
    for seed in 0..6 {
        let net = random_network(seed, &scenario(4, 2, 2, 0.1, ConstraintSpec::Total { total_power: 10.0 })).unwrap();
        let report = certify_duality(&net, &SolverConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.independent_gap.unwrap() < 1e-4, "seed {seed}: {:?}", report.independent_gap);
    }
}

#[test]
fn per_link_certificate_without_interference() {
    let net = random_network(3, &scenario(5, 3, 2, 0.0, ConstraintSpec::PerLink { min: 1, max: 10 })).unwrap();
    let cfg = SolverConfig { kkt_tol: 1e-10, ..SolverConfig::default() };
    let report = certify_duality(&net, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report:#?}");
    assert!(report.objective_gap.unwrap() < 1e-8);
}

#[test]
fn mapped_point_has_forward_objective_on_reference_ensemble() {
    let net = random_network(2, &Scenario::reference(1.0)).unwrap();
    let out = solve(&net, None, &SolverConfig::default()).unwrap();
    let pair = ReciprocalPair::new(&net).unwrap();
    let (p, _) = duality_map(&pair, &out.state, &out.duals).unwrap();
    let reverse = objective_f(&pair.reverse, &p.sigma, &p.omega).unwrap();
    assert!((reverse - out.objective).abs() < 1e-6);
}
