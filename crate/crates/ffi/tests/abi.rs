use std::ffi::{CStr, CString};
use std::ptr;

use wsr_minimax_ffi::*;

fn last_error() -> String {
    let p = wsr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_scenario() -> WsrScenario {
    WsrScenario { links: 3, tx_antennas: 2, rx_antennas: 2, ..wsr_scenario_reference(0.5) }
}

#[test]
fn random_network_solves() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(wsr_network_random(7, &small_scenario(), &mut net), WsrStatus::Ok);
        assert_eq!(wsr_network_num_links(net), 3);
        let mut sol = ptr::null_mut();
        assert_eq!(wsr_solve(net, ptr::null(), &mut sol), WsrStatus::Ok);
        assert!(wsr_solution_objective(sol) > 0.0);
        assert!(wsr_solution_iterations(sol) > 0);
        assert!(wsr_solution_kkt_residual(sol) < 1e-7);
        let mut term = WsrTermination::MaxIterations;
        assert_eq!(wsr_solution_termination(sol, &mut term), WsrStatus::Ok);
        assert_eq!(term, WsrTermination::KktConverged);
        assert!(wsr_last_error().is_null());

        let mut n = 0;
        assert_eq!(wsr_solution_prices(sol, ptr::null_mut(), 0, &mut n), WsrStatus::OutOfRange);
        assert_eq!(n, 1);
        let mut mu = [0.0; 1];
        assert_eq!(wsr_solution_prices(sol, mu.as_mut_ptr(), 1, &mut n), WsrStatus::Ok);
        assert!(mu[0] > 0.0);
        wsr_solution_free(sol);
        wsr_network_free(net);
    }
}

#[test]
fn text_round_trip_preserves_the_optimum() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(wsr_network_random(3, &small_scenario(), &mut net), WsrStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(wsr_network_to_text(net, &mut text), WsrStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(wsr_network_from_text(text, &mut back), WsrStatus::Ok);
        wsr_string_free(text);

        let cfg = wsr_solver_config_default();
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(wsr_solve(net, &cfg, &mut a), WsrStatus::Ok);
        assert_eq!(wsr_solve(back, &cfg, &mut b), WsrStatus::Ok);
        assert_eq!(wsr_solution_objective(a), wsr_solution_objective(b));
        for p in [a, b] {
            wsr_solution_free(p);
        }
        wsr_network_free(net);
        wsr_network_free(back);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut net = ptr::null_mut();
        let bad = CString::new("not a network").unwrap();
        assert_eq!(wsr_network_from_text(bad.as_ptr(), &mut net), WsrStatus::Parse);
        assert!(net.is_null());
        assert!(last_error().contains("line"));

        let zero = WsrScenario { links: 0, ..small_scenario() };
        assert_eq!(wsr_network_random(1, &zero, &mut net), WsrStatus::InvalidScenario);
        assert_eq!(wsr_network_random(1, ptr::null(), &mut net), WsrStatus::NullPointer);
        assert_eq!(wsr_solve(ptr::null(), ptr::null(), &mut ptr::null_mut()), WsrStatus::NullPointer);

        assert_eq!(wsr_network_random(1, &small_scenario(), &mut net), WsrStatus::Ok);
        let cfg = WsrSolverConfig { kkt_tol: -1.0, ..wsr_solver_config_default() };
        let mut sol = ptr::null_mut();
        assert_eq!(wsr_solve(net, &cfg, &mut sol), WsrStatus::InvalidConfig);
        assert!(sol.is_null());

        let mut verdict = WsrVerdict::Fail;
        let grouped = WsrScenario { constraint: WsrConstraintKind::Grouped, ..small_scenario() };
        let mut gnet = ptr::null_mut();
        assert_eq!(wsr_network_random(1, &grouped, &mut gnet), WsrStatus::Ok);
        assert_eq!(wsr_certify(gnet, ptr::null(), &mut verdict, ptr::null_mut()), WsrStatus::UnsupportedMode);

        wsr_network_free(net);
        wsr_network_free(gnet);
        wsr_network_free(ptr::null_mut());
        wsr_solution_free(ptr::null_mut());
        wsr_string_free(ptr::null_mut());
    }
}

#[test]
fn certificate_passes_for_total_power() {
    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(wsr_network_random(2, &small_scenario(), &mut net), WsrStatus::Ok);
        let mut verdict = WsrVerdict::Fail;
        let mut gap = f64::NAN;
        assert_eq!(wsr_certify(net, ptr::null(), &mut verdict, &mut gap), WsrStatus::Ok);
        assert_eq!(verdict, WsrVerdict::Pass);
        assert!(gap < 1e-6);
        wsr_network_free(net);
    }
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(wsr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
