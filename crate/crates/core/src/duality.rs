//! Reciprocal networks and the primal/dual correspondence.
//!
//! Two constraint structures are covered: a single total power budget over
//! all links, and per-link budgets on an interference-free network. In both
//! the reverse network has every channel replaced by its adjoint, with
//! transmit and receive roles swapped, and the map
//!
//! ```text
//! Σ̂_l = (P_l / μ_l) Λ_l,   Λ̂_l = (μ_l / P_l) Σ_l,   μ̂ = μ
//! ```
//!
//! carries a saddle point of the forward problem to one of the reverse
//! problem with the same weighted sum-rate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;
use crate::netmodel::{constraint_usage, objective_f, ConstraintGroup, Link, Network, NetworkMeta, PrimalState};
use crate::solver::{dual_phi, kkt_residual, solve, DualState, KktReport, SolverConfig, Termination};

/// Constraint structures for which the correspondence holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualityMode {
    TotalPower { budget: f64 },
    /// `budgets[l]` is the budget of link `l`.
    PerLink { budgets: Vec<f64> },
}

impl DualityMode {
    /// Classifies `net`, rejecting structures the correspondence does not
    /// cover.
    pub fn detect(net: &Network) -> Result<Self> {
        let nl = net.num_links();
        if net.num_groups() == 1 && net.group(0).members().len() == nl {
            return net
                .group(0)
                .uniform_budget()
                .map(|budget| DualityMode::TotalPower { budget })
                .ok_or_else(|| Error::UnsupportedMode("total budget with non-scalar shaping".into()));
        }
        let singletons = net.num_groups() == nl
            && (0..nl).all(|l| net.group_count_of(l) == 1)
            && net.groups().iter().all(|g| g.members().len() == 1);
        if !singletons {
            return Err(Error::UnsupportedMode(
                "only a single total budget or one budget per link is supported".into(),
            ));
        }
        if !net.is_interference_free() {
            return Err(Error::UnsupportedMode("per-link budgets require an interference-free network".into()));
        }
        let mut budgets = vec![0.0; nl];
        for g in net.groups() {
            budgets[g.members()[0]] = g
                .uniform_budget()
                .ok_or_else(|| Error::UnsupportedMode("per-link budget with non-scalar shaping".into()))?;
        }
        Ok(DualityMode::PerLink { budgets })
    }

    fn budget(&self, l: usize) -> f64 {
        match self {
            DualityMode::TotalPower { budget } => *budget,
            DualityMode::PerLink { budgets } => budgets[l],
        }
    }

    /// Index of the group pricing link `l`.
    fn group(&self, l: usize, net: &Network) -> usize {
        match self {
            DualityMode::TotalPower { .. } => 0,
            DualityMode::PerLink { .. } => net.groups_of(l).next().map(|(s, _)| s).unwrap_or(0),
        }
    }
}

/// The reverse network: link `l` transmits with `m_l` antennas and receives
/// with `n_l`, the channel from transmitter `k` to receiver `l` is
/// `H_kl^+`, and weights and budgets are unchanged.
pub fn reciprocal_network(net: &Network) -> Result<Network> {
    let mode = DualityMode::detect(net)?;
    let nl = net.num_links();
    let links: Vec<Link> = net
        .links()
        .iter()
        .map(|l| Link { tx_antennas: l.rx_antennas, rx_antennas: l.tx_antennas, weight: l.weight })
        .collect();
    let channels = (0..nl)
        .map(|l| (0..nl).map(|k| net.channel_adjoint(k, l).clone()).collect())
        .collect();
    let dims: Vec<usize> = links.iter().map(|l| l.tx_antennas).collect();
    let groups = match &mode {
        DualityMode::TotalPower { budget } => vec![ConstraintGroup::power_budget((0..nl).collect(), &dims, *budget)?],
        DualityMode::PerLink { budgets } => net
            .groups()
            .iter()
            .map(|g| {
                let l = g.members()[0];
                ConstraintGroup::power_budget(vec![l], &dims, budgets[l])
            })
            .collect::<Result<_>>()?,
    };
    let meta = NetworkMeta { seed: net.meta().seed, scenario: None };
    Ok(Network::new(links, channels, groups)?.with_meta(meta))
}

/// A network together with its reciprocal.
#[derive(Debug, Clone)]
pub struct ReciprocalPair {
    pub forward: Network,
    pub reverse: Network,
    pub mode: DualityMode,
}

impl ReciprocalPair {
    pub fn new(net: &Network) -> Result<Self> {
        Ok(ReciprocalPair {
            forward: net.clone(),
            reverse: reciprocal_network(net)?,
            mode: DualityMode::detect(net)?,
        })
    }

    /// The same pair seen from the reverse side.
    pub fn flipped(&self) -> Self {
        ReciprocalPair { forward: self.reverse.clone(), reverse: self.forward.clone(), mode: self.mode.clone() }
    }
}

/// Maps a forward primal/dual point to the reverse network. Fails with
/// [`Error::DegenerateCorrespondence`] when a price is zero.
pub fn duality_map(pair: &ReciprocalPair, primal: &PrimalState, dual: &DualState) -> Result<(PrimalState, DualState)> {
    let net = &pair.forward;
    net.check_covariances(&primal.sigma)?;
    net.check_receive_side(&dual.lambda)?;
    if dual.mu.len() != net.num_groups() {
        return Err(Error::DimensionMismatch(format!("{} prices for {} groups", dual.mu.len(), net.num_groups())));
    }
    let mut sigma_hat = Vec::with_capacity(net.num_links());
    let mut lambda_hat = Vec::with_capacity(net.num_links());
    for l in 0..net.num_links() {
        let p = pair.mode.budget(l);
        let s = pair.mode.group(l, net);
        let mu = dual.mu[s];
        if !(mu > 0.0) {
            return Err(Error::DegenerateCorrespondence(format!("price of group {s} is {mu:e}")));
        }
        sigma_hat.push(dual.lambda[l].scale(p / mu));
        lambda_hat.push(primal.sigma[l].scale(mu / p));
    }
    let phi_hat = dual_phi(&pair.reverse, &lambda_hat, &dual.mu)?;
    let primal_hat = PrimalState::from_sigma(&pair.reverse, sigma_hat)?;
    Ok((primal_hat, DualState { lambda: lambda_hat, mu: dual.mu.clone(), phi: phi_hat }))
}

/// Largest relative difference between two `(Σ, Λ, μ)` triples.
pub fn correspondence_drift(a: (&PrimalState, &DualState), b: (&PrimalState, &DualState)) -> f64 {
    let rel = |x: &HermitianMatrix, y: &HermitianMatrix| x.sub(y).frobenius_norm() / x.frobenius_norm().max(1.0);
    let sigma = a.0.sigma.iter().zip(&b.0.sigma).map(|(x, y)| rel(x, y));
    let lambda = a.1.lambda.iter().zip(&b.1.lambda).map(|(x, y)| rel(x, y));
    let mu = a.1.mu.iter().zip(&b.1.mu).map(|(x, y)| (x - y).abs() / x.abs().max(1.0));
    sigma.chain(lambda).chain(mu).fold(0.0, f64::max)
}

/// Largest accepted gap between forward and mapped reverse objective.
pub const OBJECTIVE_GAP_TOL: f64 = 1e-6;
/// Largest accepted reverse KKT residual at the mapped point.
pub const REVERSE_KKT_TOL: f64 = 1e-6;
/// Largest accepted drift of the map applied twice.
pub const INVOLUTION_TOL: f64 = 1e-12;
/// Expected agreement of an independent reverse solve. Both solves may stop
/// at different stationary points, so this check does not decide the
/// verdict.
pub const INDEPENDENT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Some price is zero, so the map is undefined.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Whether the check counts toward the verdict.
    pub required: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64, required: bool) -> Self {
        Check { name, value, tolerance, passed: value <= tolerance, required }
    }
}

/// Outcome of [`certify_duality`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub mode: DualityMode,
    pub verdict: Verdict,
    pub forward_objective: f64,
    pub forward_iterations: usize,
    pub forward_termination: Termination,
    pub forward_kkt_max: f64,
    pub mu: Vec<f64>,
    pub reverse_objective: Option<f64>,
    pub objective_gap: Option<f64>,
    pub reverse_usage: Vec<f64>,
    pub reverse_kkt: Option<KktReport>,
    pub involution_drift: Option<f64>,
    pub independent_objective: Option<f64>,
    pub independent_gap: Option<f64>,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

/// Solves `net`, maps the result to the reciprocal network and checks that
/// the mapped point is feasible, stationary and achieves the same weighted
/// sum-rate. An independent solve of the reverse network is reported
/// alongside.
pub fn certify_duality(net: &Network, cfg: &SolverConfig) -> Result<DualityReport> {
    let pair = ReciprocalPair::new(net)?;
    let forward = solve(net, None, cfg)?;
    let mut report = DualityReport {
        mode: pair.mode.clone(),
        verdict: Verdict::Degenerate,
        forward_objective: forward.objective,
        forward_iterations: forward.iterations(),
        forward_termination: forward.termination,
        forward_kkt_max: forward.kkt.max(),
        mu: forward.duals.mu.clone(),
        reverse_objective: None,
        objective_gap: None,
        reverse_usage: Vec::new(),
        reverse_kkt: None,
        involution_drift: None,
        independent_objective: None,
        independent_gap: None,
        checks: Vec::new(),
        note: None,
    };
    let (primal_hat, dual_hat) = match duality_map(&pair, &forward.state, &forward.duals) {
        Ok(mapped) => mapped,
        Err(Error::DegenerateCorrespondence(msg)) => {
            report.note = Some(msg);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };

    let reverse_objective = objective_f(&pair.reverse, &primal_hat.sigma, &primal_hat.omega)?;
    let gap = (reverse_objective - forward.objective).abs();
    let usage = constraint_usage(&pair.reverse, &primal_hat.sigma)?;
    let usage_dev = usage.iter().map(|u| (u - 1.0).abs()).fold(0.0, f64::max);
    let reverse_kkt = kkt_residual(
        &pair.reverse,
        &primal_hat.sigma,
        &primal_hat.omega,
        &dual_hat.lambda,
        &dual_hat.mu,
        cfg.rank_tol,
    )?;
    let (back_primal, back_dual) = duality_map(&pair.flipped(), &primal_hat, &dual_hat)?;
    let drift = correspondence_drift((&forward.state, &forward.duals), (&back_primal, &back_dual));
    let independent = solve(&pair.reverse, None, cfg)?;
    let independent_gap = (independent.objective - forward.objective).abs();

    report.checks = vec![
        Check::new("forward_kkt", forward.kkt.max(), cfg.kkt_tol, true),
        Check::new("objective_gap", gap, OBJECTIVE_GAP_TOL, true),
        Check::new("reverse_usage_deviation", usage_dev, REVERSE_KKT_TOL, true),
        Check::new("reverse_kkt", reverse_kkt.max(), REVERSE_KKT_TOL, true),
        Check::new("involution_drift", drift, INVOLUTION_TOL, true),
        Check::new("independent_gap", independent_gap, INDEPENDENT_TOL, false),
    ];
    report.verdict =
        if report.checks.iter().all(|c| c.passed || !c.required) { Verdict::Pass } else { Verdict::Fail };
    report.reverse_objective = Some(reverse_objective);
    report.objective_gap = Some(gap);
    report.reverse_usage = usage;
    report.reverse_kkt = Some(reverse_kkt);
    report.involution_drift = Some(drift);
    report.independent_objective = Some(independent.objective);
    report.independent_gap = Some(independent_gap);
    Ok(report)
}
