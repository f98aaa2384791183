//! Constraint price search.
//!
//! For group `s` and member `l`, write `K` for `Φ_l` without the `μ_s Q_l^s`
//! term and `R = (Q_l^s)^{-1/2}`. With `c_i` and `g_i` the ascending
//! eigenvalues of `RKR` and `R(K + H^+ΛH)R`,
//!
//! ```text
//! tr(Q_l^s Σ̃_l(μ_s)) = w_l Σ_i (g_i − c_i) / ((μ_s + c_i)(μ_s + g_i)),
//! ```
//!
//! a decreasing function of `μ_s` (`g_i ≥ c_i` by eigenvalue interlacing).
//! Each group's equation is therefore solved by scalar bisection after one
//! eigendecomposition per member, and overlapping groups are handled by
//! cycling through the groups until the prices stop moving.

use super::step::interference_duals;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;
use crate::netmodel::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct MuSolution {
    pub mu: Vec<f64>,
    /// Gauss–Seidel sweeps used.
    pub sweeps: usize,
    /// Value used for the `0⁺` probe.
    pub probe_eps: f64,
    /// Groups raised from zero to the probe value because a member link was
    /// left with a singular `Φ`.
    pub fallback_groups: Vec<usize>,
}

/// `(Q_l^s)^{-1/2}`, kept as a scalar when `Q_l^s = q I`.
#[derive(Debug, Clone)]
enum Whitener {
    Scalar(f64),
    Matrix(HermitianMatrix),
}

impl Whitener {
    fn new(q: &HermitianMatrix, rank_tol: f64) -> Result<Self> {
        let q0 = q.as_matrix()[(0, 0)].re;
        if q0 > 0.0 && *q == HermitianMatrix::scaled_identity(q.dim(), q0) {
            return Ok(Whitener::Scalar(1.0 / q0));
        }
        Ok(Whitener::Matrix(q.inv_sqrt(rank_tol)?))
    }

    /// Ascending eigenvalues of `R K R`.
    fn eigenvalues(&self, k: &HermitianMatrix) -> Vec<f64> {
        match self {
            Whitener::Scalar(inv_q) => k.eigenvalues().into_iter().map(|v| v * inv_q).collect(),
            Whitener::Matrix(r) => k.congruence(r.as_matrix()).eigenvalues(),
        }
    }
}

/// Per-network data reused across price searches.
#[derive(Debug, Clone)]
pub(crate) struct MuContext {
    whiten: Vec<Vec<Whitener>>,
    eps: f64,
    disjoint: bool,
}

impl MuContext {
    pub fn new(net: &Network, cfg: &SolverConfig) -> Result<Self> {
        let mut whiten = Vec::with_capacity(net.num_groups());
        let mut q_scale: f64 = 0.0;
        for g in net.groups() {
            let mut row = Vec::with_capacity(g.members().len());
            for (_, q) in g.iter() {
                q_scale = q_scale.max(q.eigen().max());
                row.push(Whitener::new(q, cfg.rank_tol)?);
            }
            whiten.push(row);
        }
        let eps = cfg.mu_probe_eps.unwrap_or(1e-9 * q_scale);
        let disjoint = (0..net.num_links()).all(|l| net.group_count_of(l) == 1);
        Ok(MuContext { whiten, eps, disjoint })
    }
}

struct LinkSpectrum {
    w: f64,
    c: Vec<f64>,
    g: Vec<f64>,
}

struct GroupUsage(Vec<LinkSpectrum>);

impl GroupUsage {
    fn at(&self, x: f64) -> f64 {
        self.0
            .iter()
            .map(|sp| {
                let t: f64 = sp
                    .c
                    .iter()
                    .zip(&sp.g)
                    .filter(|(c, g)| g > c)
                    .map(|(&c, &g)| (g - c) / ((x + c) * (x + g)))
                    .sum();
                sp.w * t
            })
            .sum()
    }
}

fn group_usage(
    net: &Network,
    ctx: &MuContext,
    interference: &[HermitianMatrix],
    signal: &[HermitianMatrix],
    mu: &[f64],
    s: usize,
) -> GroupUsage {
    let group = net.group(s);
    GroupUsage(
        group
            .members()
            .iter()
            .enumerate()
            .map(|(pos, &l)| {
                let mut k = interference[l].clone();
                for (t, q) in net.groups_of(l) {
                    if t != s && mu[t] != 0.0 {
                        k.add_assign_scaled(q, mu[t]);
                    }
                }
                let r = &ctx.whiten[s][pos];
                let mut g = r.eigenvalues(&k.add(&signal[l]));
                let mut c = r.eigenvalues(&k);
                // eigenvalue gaps at rounding level are common null directions
                let floor = 16.0 * c.len() as f64 * f64::EPSILON * g.last().copied().unwrap_or(0.0).max(1.0);
                for (ci, gi) in c.iter_mut().zip(g.iter_mut()) {
                    *ci = ci.max(0.0);
                    *gi = gi.max(0.0);
                    if *gi - *ci <= floor {
                        *gi = *ci;
                    }
                }
                LinkSpectrum { w: net.weight(l), c, g }
            })
            .collect(),
    )
}

/// Price for one group with the others held fixed: zero when the probe at
/// `eps` already satisfies the constraint, otherwise the root of
/// `usage(μ) = 1` on `(eps, ∞)`.
fn solve_group(u: &GroupUsage, s: usize, eps: f64, cfg: &SolverConfig) -> Result<f64> {
    let at_probe = u.at(eps);
    if at_probe.is_nan() {
        return Err(Error::Bisection { group: s, reason: "usage is NaN at the probe".into() });
    }
    if at_probe <= 1.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (eps, 1.0_f64.max(2.0 * eps));
    while u.at(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Bisection { group: s, reason: "no upper bracket".into() });
        }
    }
    for _ in 0..cfg.bisection_max_steps {
        let mid = 0.5 * (lo + hi);
        let v = u.at(mid);
        if (v - 1.0).abs() <= cfg.bisection_tol || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(mid);
        }
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Bisection {
        group: s,
        reason: format!("bracket [{lo:e}, {hi:e}] not resolved in {} steps", cfg.bisection_max_steps),
    })
}

/// Searches prices given the two `μ`-independent parts of `Φ`: the
/// interference duals and `H_ll^+ Λ_l H_ll`.
pub(crate) fn solve_mu_parts(
    net: &Network,
    ctx: &MuContext,
    interference: &[HermitianMatrix],
    signal: &[HermitianMatrix],
    warm: &[f64],
    cfg: &SolverConfig,
) -> Result<MuSolution> {
    let ng = net.num_groups();
    let mut mu: Vec<f64> = if warm.len() == ng { warm.iter().map(|m| m.max(0.0)).collect() } else { vec![0.0; ng] };
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        for s in 0..ng {
            let u = group_usage(net, ctx, interference, signal, &mu, s);
            mu[s] = solve_group(&u, s, ctx.eps, cfg)?;
        }
        if ctx.disjoint {
            break;
        }
        let deviation = (0..ng)
            .map(|s| {
                let u = group_usage(net, ctx, interference, signal, &mu, s).at(mu[s].max(ctx.eps));
                if mu[s] > 0.0 { (u - 1.0).abs() } else { (u - 1.0).max(0.0) }
            })
            .fold(0.0, f64::max);
        if deviation <= cfg.mu_sweep_tol {
            break;
        }
        if sweeps >= cfg.mu_max_sweeps {
            return Err(Error::MuNotConverged { sweeps, deviation });
        }
    }

    let mut fallback_groups = Vec::new();
    for l in 0..net.num_links() {
        let priced = net.groups_of(l).any(|(s, _)| mu[s] > 0.0);
        if !priced && interference[l].cholesky_inverse().is_none() {
            fallback_groups.extend(net.groups_of(l).map(|(s, _)| s));
        }
    }
    fallback_groups.sort_unstable();
    fallback_groups.dedup();
    for &s in &fallback_groups {
        mu[s] = ctx.eps;
    }
    Ok(MuSolution { mu, sweeps, probe_eps: ctx.eps, fallback_groups })
}

/// Constraint prices for the duals `Λ`: groups whose usage stays at most one
/// as `μ_s → 0⁺` get a zero price, the others are priced so their usage is
/// exactly one.
pub fn solve_mu(net: &Network, lambda: &[HermitianMatrix], cfg: &SolverConfig) -> Result<MuSolution> {
    cfg.validate()?;
    net.check_receive_side(lambda)?;
    let ctx = MuContext::new(net, cfg)?;
    let interference = interference_duals(net, lambda);
    let signal: Vec<HermitianMatrix> =
        (0..net.num_links()).map(|l| lambda[l].adjoint_congruence(net.channel(l, l))).collect();
    solve_mu_parts(net, &ctx, &interference, &signal, &[], cfg)
}
