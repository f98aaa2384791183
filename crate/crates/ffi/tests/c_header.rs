//! Compiles a C program against the generated header and links it to the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

use wsr_minimax_ffi::*;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>`, two levels above the test executable.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn cc() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = crate_dir().join("include/wsr_minimax.h");
    for lang in ["c", "c++"] {
        let status = Command::new(cc())
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap();
        assert!(status.success(), "header does not compile as {lang}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = artifact_dir().join("libwsr_minimax_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let out = Command::new(cc())
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let printed: f64 = String::from_utf8(run.stdout).unwrap().trim().parse().unwrap();

    let sc = WsrScenario { links: 3, tx_antennas: 2, rx_antennas: 2, ..wsr_scenario_reference(1.0) };
    unsafe {
        let mut net = std::ptr::null_mut();
        assert_eq!(wsr_network_random(5, &sc, &mut net), WsrStatus::Ok);
        let mut sol = std::ptr::null_mut();
        assert_eq!(wsr_solve(net, std::ptr::null(), &mut sol), WsrStatus::Ok);
        assert_eq!(wsr_solution_objective(sol), printed);
        wsr_solution_free(sol);
        wsr_network_free(net);
    }
}
