//! The iterative minimax algorithm.
//!
//! Each step computes receive-side duals `Λ` from the current covariances,
//! chooses the constraint prices `μ` so that the tentative covariances of the
//! saddle equations meet the active constraints with equality, and rescales
//! the result onto the feasible set. The weighted sum-rate never decreases
//! from one step to the next.

mod driver;
mod kkt;
mod mu;
mod step;
mod trace;

pub use driver::{default_initialization, iterate, solve, SolveOutput, Termination};
pub use kkt::{kkt_residual, stationarity_residuals, KktReport};
pub use mu::{solve_mu, MuSolution};
pub use step::{dual_lambda, dual_phi, saddle_step, scale_and_commit};
pub use trace::{IterationRecord, IterationTrace, SolveSummary};
pub(crate) use trace::csv_err;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{HermitianMatrix, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop when the objective gains less than `obj_tol` (relative) over
    /// three steps. Zero (the default) disables the test, leaving the KKT
    /// residual and `max_iters` as the stopping rules.
    pub obj_tol: f64,
    /// Stop when the largest KKT residual drops below this.
    pub kkt_tol: f64,
    /// Price used for the `0⁺` probe; `None` picks `1e-9` times the largest
    /// constraint-matrix eigenvalue.
    pub mu_probe_eps: Option<f64>,
    /// Target accuracy of `usage = 1` in each price bisection.
    pub bisection_tol: f64,
    pub bisection_max_steps: usize,
    /// Accuracy of the joint price fixed point across overlapping groups.
    pub mu_sweep_tol: f64,
    pub mu_max_sweeps: usize,
    pub rank_tol: f64,
    /// Allowed objective decrease per step before the run is aborted.
    pub monotonicity_slack: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 10_000,
            obj_tol: 0.0,
            kkt_tol: 1e-7,
            mu_probe_eps: None,
            bisection_tol: 1e-12,
            bisection_max_steps: 200,
            mu_sweep_tol: 1e-10,
            mu_max_sweeps: 1000,
            rank_tol: DEFAULT_RANK_TOL,
            monotonicity_slack: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(self.obj_tol >= 0.0 && self.obj_tol.is_finite()) {
            return Err(Error::Config(format!("obj_tol {} must be nonnegative", self.obj_tol)));
        }
        for (name, v) in [
            ("kkt_tol", self.kkt_tol),
            ("bisection_tol", self.bisection_tol),
            ("mu_sweep_tol", self.mu_sweep_tol),
            ("rank_tol", self.rank_tol),
        ] {
            if !pos(v) {
                return Err(Error::Config(format!("{name} {v} must be positive")));
            }
        }
        if let Some(e) = self.mu_probe_eps {
            if !pos(e) {
                return Err(Error::Config(format!("mu_probe_eps {e} must be positive")));
            }
        }
        if !(self.monotonicity_slack >= 0.0) {
            return Err(Error::Config("monotonicity_slack must be nonnegative".into()));
        }
        if self.bisection_max_steps == 0 || self.mu_max_sweeps == 0 {
            return Err(Error::Config("step limits must be positive".into()));
        }
        Ok(())
    }
}

/// Dual variables of the max-min problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    /// Receive-side duals, one `m_l × m_l` matrix per link.
    pub lambda: Vec<HermitianMatrix>,
    /// Constraint prices, one per group.
    pub mu: Vec<f64>,
    /// `Φ_l = Σ_s μ_s Q_l^s + Σ_{k≠l} H_kl^+ Λ_k H_kl`.
    pub phi: Vec<HermitianMatrix>,
}
