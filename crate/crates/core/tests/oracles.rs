//! Reference values produced by `tools/oracles.py` (numpy and 60-digit
//! mpmath), compared against the solver and the matrix kernels.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use wsr_minimax::matcore::{ext_logdet_diff, hermitize, CMatrix, HermitianMatrix, DEFAULT_RANK_TOL};
use wsr_minimax::netmodel::{ConstraintGroup, Link, Network};
use wsr_minimax::solver::{solve, SolverConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tight() -> SolverConfig {
    SolverConfig { kkt_tol: 1e-11, ..SolverConfig::default() }
}

fn single_link(h: CMatrix, budget: f64) -> Network {
    let (m, n) = h.shape();
    let links = vec![Link { tx_antennas: n, rx_antennas: m, weight: 1.0 }];
    let g = ConstraintGroup::power_budget(vec![0], &[n], budget).unwrap();
    Network::new(links, vec![vec![h]], vec![g]).unwrap()
}

#[test]
fn water_filling_square() {
    let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.3, -0.2), c(-0.4, 0.1), c(0.8, 0.9)]);
    let out = solve(&single_link(h, 2.0), None, &tight()).unwrap();
    assert_abs_diff_eq!(out.objective, 1.793206788257831, epsilon = 1e-9);
}

#[test]
fn water_filling_wide_channel_leaves_a_mode_off() {
    let h = CMatrix::from_row_slice(
        2,
        3,
        &[c(0.2, 0.1), c(1.5, -0.3), c(0.0, 0.0), c(0.0, 0.7), c(-0.1, 0.0), c(0.4, 0.4)],
    );
    let out = solve(&single_link(h, 0.5), None, &tight()).unwrap();
    assert_abs_diff_eq!(out.objective, 0.7888428095903922, epsilon = 1e-9);
}

fn siso_pair(h: [[f64; 2]; 2], w: [f64; 2], p: f64) -> Network {
    let links = w.iter().map(|&w| Link { tx_antennas: 1, rx_antennas: 1, weight: w }).collect();
    let channels = (0..2)
        .map(|l| (0..2).map(|k| CMatrix::from_element(1, 1, c(h[l][k], 0.0))).collect())
        .collect();
    let g = ConstraintGroup::power_budget(vec![0, 1], &[1, 1], p).unwrap();
    Network::new(links, channels, vec![g]).unwrap()
}

#[test]
fn siso_pair_matches_line_search() {
    // gains |h|² = [[1, 0.36], [0.25, 1.44]]
    let out = solve(&siso_pair([[1.0, 0.6], [0.5, 1.2]], [1.0, 0.7], 4.0), None, &tight()).unwrap();
    assert_abs_diff_eq!(out.objective, 1.6105522848846188, epsilon = 1e-8);
}

#[test]
fn siso_pair_strong_interference() {
    let h = [[2f64.sqrt(), 1.5f64.sqrt()], [1.2f64.sqrt(), 0.8f64.sqrt()]];
    let out = solve(&siso_pair(h, [0.6, 1.0], 4.0), None, &tight()).unwrap();
    assert!(out.objective >= 1.4350845252893227 - 1e-8, "{}", out.objective);
}

fn oracle_unitary() -> CMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let s = 0.3535533905932737622;
    CMatrix::from_row_slice(
        3,
        3,
        &[c(-r, 0.0), c(0.0, -0.5), c(s, -s), c(0.0, -r), c(-0.5, 0.0), c(-s, -s), c(0.0, 0.0), c(-0.5, 0.5), c(r, 0.0)],
    )
}

fn conjugated(q: &CMatrix, m: &CMatrix) -> HermitianMatrix {
    hermitize(&(q * m * q.adjoint())).unwrap()
}

#[test]
fn logdet_on_range_of_singular_noise() {
    let q = oracle_unitary();
    let diag = |d: [f64; 3]| CMatrix::from_diagonal(&nalgebra::DVector::from_fn(3, |i, _| c(d[i], 0.0)));
    let a = conjugated(&q, &diag([1.0, 3.0, 0.0]));
    let b = conjugated(&q, &diag([2.0, 0.5, 0.0]));
    assert_abs_diff_eq!(ext_logdet_diff(&a, &b, DEFAULT_RANK_TOL).unwrap(), 2.3513752571634776871, epsilon = 1e-12);
}

#[test]
fn logdet_with_non_commuting_signal() {
    let q = oracle_unitary();
    let m = CMatrix::from_row_slice(
        3,
        3,
        &[c(1.0, 0.0), c(0.3, 0.2), c(0.0, 0.0), c(0.3, -0.2), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
    );
    let b = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]));
    let a = conjugated(&q, &m);
    let b = conjugated(&q, &b);
    assert_abs_diff_eq!(ext_logdet_diff(&a, &b, DEFAULT_RANK_TOL).unwrap(), 1.3270750014599193952, epsilon = 1e-12);
}

#[test]
fn scalar_capacity_closed_form() {
    for (h, p) in [(c(0.8, -0.6), 10.0), (c(2.0, 1.0), 0.25), (c(0.05, 0.0), 3.0)] {
        let net = single_link(CMatrix::from_element(1, 1, h), p);
        let out = solve(&net, None, &SolverConfig::default()).unwrap();
        assert!(out.iterations() <= 5);
        assert_abs_diff_eq!(out.state.sigma[0].trace(), p, epsilon = 1e-8);
        assert_abs_diff_eq!(out.objective, (1.0 + h.norm_sqr() * p).ln(), epsilon = 1e-8);
    }
}
