use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::kkt::{kkt_with_phi, KktReport};
use super::mu::{solve_mu_parts, MuContext, MuSolution};
use super::step::{dual_lambda, interference_duals, link_saddle, phi_from_parts, scale_and_commit};
use super::trace::{IterationRecord, IterationTrace, SolveSummary};
use super::{DualState, SolverConfig};
use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;
use crate::netmodel::{achievable_rates, constraint_usage, objective_f, Network, PrimalState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    KktConverged,
    ObjectiveStalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub state: PrimalState,
    /// Duals computed at `state`.
    pub duals: DualState,
    pub kkt: KktReport,
    pub objective: f64,
    pub trace: IterationTrace,
    pub termination: Termination,
}

impl SolveOutput {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn summary(&self, net: &Network) -> Result<SolveSummary> {
        Ok(SolveSummary {
            seed: net.meta().seed,
            links: net.num_links(),
            groups: net.num_groups(),
            objective_nats: self.objective,
            initial_objective_nats: self.trace.initial_objective,
            rates_nats: achievable_rates(net, &self.state.sigma)?,
            weights: net.links().iter().map(|l| l.weight).collect(),
            constraint_usage: constraint_usage(net, &self.state.sigma)?,
            mu: self.duals.mu.clone(),
            iterations: self.iterations(),
            termination: self.termination,
            kkt_max_residual: self.kkt.max(),
            kkt: self.kkt.clone(),
            max_objective_decrease: self.trace.max_decrease(),
            wall_ms_total: self.trace.records.iter().map(|r| r.wall_ms).sum(),
        })
    }
}

/// `Σ_l = c_l I` with `c_l = 0.9 / max_{s∈S^l} usage_s(I)`: every group
/// sits at usage 0.9 when groups are disjoint and at most 0.9 otherwise.
pub fn default_initialization(net: &Network) -> Vec<HermitianMatrix> {
    let full: Vec<f64> = net
        .groups()
        .iter()
        .map(|g| g.iter().map(|(_, q)| q.trace()).sum())
        .collect();
    (0..net.num_links())
        .map(|l| {
            let worst = net.groups_of(l).map(|(s, _)| full[s]).fold(0.0, f64::max);
            HermitianMatrix::scaled_identity(net.link(l).tx_antennas, 0.9 / worst)
        })
        .collect()
}

/// Everything one step derives from the current iterate before committing.
struct Prepared {
    lambda: Vec<HermitianMatrix>,
    mu: MuSolution,
    phi: Vec<HermitianMatrix>,
    sigma_tilde: Vec<HermitianMatrix>,
    slackness: f64,
}

fn prepare(net: &Network, ctx: &MuContext, state: &PrimalState, warm: &[f64], cfg: &SolverConfig) -> Result<Prepared> {
    let lambda = dual_lambda(net, &state.sigma, &state.omega, cfg.rank_tol)?;
    let interference = interference_duals(net, &lambda);
    let signal: Vec<HermitianMatrix> =
        (0..net.num_links()).map(|l| lambda[l].adjoint_congruence(net.channel(l, l))).collect();
    let mu = solve_mu_parts(net, ctx, &interference, &signal, warm, cfg)?;
    let phi = phi_from_parts(net, &interference, &mu.mu);
    let sigma_tilde = (0..net.num_links())
        .map(|l| {
            link_saddle(l, net.weight(l), &phi[l], &signal[l], cfg.rank_tol).map(|(s, _)| s)
        })
        .collect::<Result<Vec<_>>>()?;
    let usage = constraint_usage(net, &sigma_tilde)?;
    let slackness = usage
        .iter()
        .zip(&mu.mu)
        .map(|(u, m)| (m * (1.0 - u)).abs())
        .fold(0.0, f64::max);
    Ok(Prepared { lambda, mu, phi, sigma_tilde, slackness })
}

struct Committed {
    state: PrimalState,
    objective: f64,
    record: IterationRecord,
}

/// Scales, recomputes the objective and checks it did not decrease.
fn commit(
    net: &Network,
    prep: Prepared,
    previous: f64,
    iter: usize,
    kkt_max: f64,
    elapsed: Duration,
    cfg: &SolverConfig,
) -> Result<Committed> {
    let start = Instant::now();
    let mu_sweeps = prep.mu.sweeps;
    let mu_fallback = !prep.mu.fallback_groups.is_empty();
    let (state, scale) = scale_and_commit(net, prep.sigma_tilde)?;
    let elapsed = elapsed + start.elapsed();
    let objective = objective_f(net, &state.sigma, &state.omega)?;
    if objective < previous - cfg.monotonicity_slack {
        return Err(Error::MonotonicityViolation { iter, previous, next: objective });
    }
    Ok(Committed {
        state,
        objective,
        record: IterationRecord {
            iter,
            objective,
            lambda_scale: scale,
            mu: prep.mu.mu,
            kkt_max_residual: kkt_max,
            complementary_slackness: prep.slackness,
            mu_sweeps,
            mu_fallback,
            wall_ms: elapsed.as_secs_f64() * 1e3,
        },
    })
}

/// One step of the algorithm from a feasible iterate. The record's KKT
/// residual is that of `state`.
pub fn iterate(net: &Network, state: &PrimalState, cfg: &SolverConfig) -> Result<(PrimalState, IterationRecord)> {
    cfg.validate()?;
    let ctx = MuContext::new(net, cfg)?;
    let previous = objective_f(net, &state.sigma, &state.omega)?;
    let start = Instant::now();
    let prep = prepare(net, &ctx, state, &[], cfg)?;
    let elapsed = start.elapsed();
    let kkt = kkt_with_phi(net, &state.sigma, &state.omega, &prep.lambda, &prep.mu.mu, &prep.phi, cfg.rank_tol)?;
    let c = commit(net, prep, previous, 1, kkt.max(), elapsed, cfg)?;
    Ok((c.state, c.record))
}

fn check_feasible(net: &Network, sigma: &[HermitianMatrix]) -> Result<()> {
    for (s, u) in constraint_usage(net, sigma)?.into_iter().enumerate() {
        if u > 1.0 + 1e-10 {
            return Err(Error::Infeasible { group: s, usage: u });
        }
    }
    Ok(())
}

/// Runs the algorithm from `init` (or [`default_initialization`]) until the
/// KKT residual falls below `kkt_tol`, the objective stalls, or `max_iters`
/// steps have been taken.
pub fn solve(net: &Network, init: Option<Vec<HermitianMatrix>>, cfg: &SolverConfig) -> Result<SolveOutput> {
    cfg.validate()?;
    let sigma = init.unwrap_or_else(|| default_initialization(net));
    net.check_covariances(&sigma)?;
    check_feasible(net, &sigma)?;
    let ctx = MuContext::new(net, cfg)?;
    let mut state = PrimalState::from_sigma(net, sigma)?;
    let mut objective = objective_f(net, &state.sigma, &state.omega)?;
    let mut trace = IterationTrace { initial_objective: objective, records: Vec::new() };
    let mut warm: Vec<f64> = Vec::new();

    loop {
        let start = Instant::now();
        let prep = prepare(net, &ctx, &state, &warm, cfg)?;
        let elapsed = start.elapsed();
        let kkt = kkt_with_phi(net, &state.sigma, &state.omega, &prep.lambda, &prep.mu.mu, &prep.phi, cfg.rank_tol)?;
        let kkt_max = kkt.max();

        let termination = if kkt_max < cfg.kkt_tol {
            Some(Termination::KktConverged)
        } else if trace.len() >= cfg.max_iters {
            Some(Termination::MaxIterations)
        } else if trace.stalled(cfg.obj_tol) {
            Some(Termination::ObjectiveStalled)
        } else {
            None
        };
        if let Some(termination) = termination {
            let duals = DualState { lambda: prep.lambda, mu: prep.mu.mu, phi: prep.phi };
            return Ok(SolveOutput { state, duals, kkt, objective, trace, termination });
        }

        warm = prep.mu.mu.clone();
        let c = commit(net, prep, objective, trace.len() + 1, kkt_max, elapsed, cfg)?;
        trace.records.push(c.record);
        state = c.state;
        objective = c.objective;
    }
}
