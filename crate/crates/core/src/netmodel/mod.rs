//! Interference network model: links, channels, constraint groups.
//!
//! Link `l` has `n_l` transmit and `m_l` receive antennas; the channel from
//! transmitter `k` to receiver `l` is the `m_l × n_k` matrix `H_lk`. Noise
//! at every receiver is white with identity covariance.

mod format;
mod random;
mod rate;

pub use format::{read_network, write_network};
pub use random::{random_network, ConstraintSpec, Scenario};
pub use rate::{
    achievable_rate, achievable_rates, constraint_usage, interference_plus_noise, objective_f,
    weighted_sum_rate,
};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, HermitianMatrix, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub weight: f64,
}

/// A set of links sharing one constraint `Σ_{l∈L^s} tr(Σ_l Q_l^s) ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintGroup {
    members: Vec<usize>,
    shaping: Vec<HermitianMatrix>,
}

impl ConstraintGroup {
    /// `shaping[i]` is the constraint matrix of link `members[i]`.
    pub fn new(members: Vec<usize>, shaping: Vec<HermitianMatrix>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidNetwork("constraint group has no members".into()));
        }
        if members.len() != shaping.len() {
            return Err(Error::InvalidNetwork(format!(
                "group lists {} members but {} shaping matrices",
                members.len(),
                shaping.len()
            )));
        }
        let mut sorted = members.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != members.len() {
            return Err(Error::InvalidNetwork("constraint group lists a link twice".into()));
        }
        Ok(ConstraintGroup { members, shaping })
    }

    /// A power budget `Σ tr(Σ_l) ≤ budget` over `members`.
    pub fn power_budget(members: Vec<usize>, dims: &[usize], budget: f64) -> Result<Self> {
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(Error::InvalidNetwork(format!("power budget {budget} must be positive")));
        }
        let shaping = members
            .iter()
            .map(|&l| {
                dims.get(l)
                    .map(|&n| HermitianMatrix::scaled_identity(n, 1.0 / budget))
                    .ok_or_else(|| Error::InvalidNetwork(format!("group member {l} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members, shaping)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn shaping(&self) -> &[HermitianMatrix] {
        &self.shaping
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &HermitianMatrix)> {
        self.members.iter().copied().zip(self.shaping.iter())
    }

    /// If every shaping matrix is `I / P` for one common `P`, returns `P`.
    pub fn uniform_budget(&self) -> Option<f64> {
        let mut budget = None;
        for q in &self.shaping {
            let c = q.as_matrix()[(0, 0)].re;
            if q.sub(&HermitianMatrix::scaled_identity(q.dim(), c)).frobenius_norm() != 0.0 || c <= 0.0 {
                return None;
            }
            match budget {
                None => budget = Some(1.0 / c),
                Some(p) if (p * c - 1.0).abs() > 1e-14 => return None,
                _ => {}
            }
        }
        budget
    }
}

/// Where a network came from; carried through the text format.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NetworkMeta {
    pub seed: Option<u64>,
    pub scenario: Option<Scenario>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    links: Vec<Link>,
    /// Row-major `L × L` table, `channels[l * L + k] = H_lk`.
    channels: Vec<CMatrix>,
    /// `H_lk^+` in the same layout, cached for the interference sums.
    adjoints: Vec<CMatrix>,
    groups: Vec<ConstraintGroup>,
    /// `S^l` as `(group index, position within the group)`.
    link_groups: Vec<Vec<(usize, usize)>>,
    meta: NetworkMeta,
}

impl Network {
    /// `channels[l][k]` is `H_lk`, of shape `rx_antennas(l) × tx_antennas(k)`.
    pub fn new(links: Vec<Link>, channels: Vec<Vec<CMatrix>>, groups: Vec<ConstraintGroup>) -> Result<Self> {
        let nl = links.len();
        if nl == 0 {
            return Err(Error::InvalidNetwork("network has no links".into()));
        }
        for (l, link) in links.iter().enumerate() {
            if link.tx_antennas == 0 || link.rx_antennas == 0 {
                return Err(Error::InvalidNetwork(format!("link {l} has zero antennas")));
            }
            if !(link.weight > 0.0 && link.weight.is_finite()) {
                return Err(Error::InvalidNetwork(format!("link {l} weight {} must be positive", link.weight)));
            }
        }
        if channels.len() != nl || channels.iter().any(|row| row.len() != nl) {
            return Err(Error::InvalidNetwork(format!("channel table must be {nl} x {nl}")));
        }
        for (l, row) in channels.iter().enumerate() {
            for (k, h) in row.iter().enumerate() {
                let want = (links[l].rx_antennas, links[k].tx_antennas);
                if h.shape() != want {
                    return Err(Error::DimensionMismatch(format!(
                        "H[{l}][{k}] has shape {:?}, expected {:?}",
                        h.shape(),
                        want
                    )));
                }
                if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidNetwork(format!("H[{l}][{k}] has non-finite entries")));
                }
            }
        }
        if groups.is_empty() {
            return Err(Error::InvalidNetwork("network has no constraint groups".into()));
        }
        let mut link_groups = vec![Vec::new(); nl];
        for (s, g) in groups.iter().enumerate() {
            for (pos, (l, q)) in g.iter().enumerate() {
                if l >= nl {
                    return Err(Error::InvalidNetwork(format!("group {s} member {l} out of range")));
                }
                if q.dim() != links[l].tx_antennas {
                    return Err(Error::DimensionMismatch(format!(
                        "group {s} shaping for link {l} is {0}x{0}, expected {1}x{1}",
                        q.dim(),
                        links[l].tx_antennas
                    )));
                }
                if q.classify(DEFAULT_RANK_TOL) != crate::matcore::Definiteness::PositiveDefinite {
                    return Err(Error::InvalidNetwork(format!(
                        "group {s} shaping for link {l} is not positive definite"
                    )));
                }
                link_groups[l].push((s, pos));
            }
        }
        if let Some(l) = link_groups.iter().position(|g| g.is_empty()) {
            return Err(Error::InvalidNetwork(format!("link {l} belongs to no constraint group")));
        }
        let channels: Vec<CMatrix> = channels.into_iter().flatten().collect();
        let adjoints = channels.iter().map(|h| h.adjoint()).collect();
        Ok(Network {
            links,
            channels,
            adjoints,
            groups,
            link_groups,
            meta: NetworkMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: NetworkMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn meta(&self) -> &NetworkMeta {
        &self.meta
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, l: usize) -> &Link {
        &self.links[l]
    }

    pub fn weight(&self, l: usize) -> f64 {
        self.links[l].weight
    }

    /// `H_lk`: transmitter `k` to receiver `l`.
    pub fn channel(&self, l: usize, k: usize) -> &CMatrix {
        &self.channels[l * self.links.len() + k]
    }

    /// `H_lk^+`.
    pub fn channel_adjoint(&self, l: usize, k: usize) -> &CMatrix {
        &self.adjoints[l * self.links.len() + k]
    }

    pub fn groups(&self) -> &[ConstraintGroup] {
        &self.groups
    }

    pub fn group(&self, s: usize) -> &ConstraintGroup {
        &self.groups[s]
    }

    /// Groups containing link `l`, with the link's shaping matrix in each.
    pub fn groups_of(&self, l: usize) -> impl Iterator<Item = (usize, &HermitianMatrix)> {
        self.link_groups[l]
            .iter()
            .map(move |&(s, pos)| (s, &self.groups[s].shaping[pos]))
    }

    pub fn group_count_of(&self, l: usize) -> usize {
        self.link_groups[l].len()
    }

    pub fn tx_dims(&self) -> Vec<usize> {
        self.links.iter().map(|l| l.tx_antennas).collect()
    }

    /// True when every cross channel `H_lk`, `k ≠ l`, is exactly zero.
    pub fn is_interference_free(&self) -> bool {
        let nl = self.num_links();
        (0..nl).all(|l| {
            (0..nl).all(|k| k == l || self.channel(l, k).iter().all(|z| z.re == 0.0 && z.im == 0.0))
        })
    }

    /// Checks that one covariance per link is given with the transmit shape.
    pub fn check_covariances(&self, sigma: &[HermitianMatrix]) -> Result<()> {
        if sigma.len() != self.num_links() {
            return Err(Error::DimensionMismatch(format!(
                "{} covariances for {} links",
                sigma.len(),
                self.num_links()
            )));
        }
        for (l, s) in sigma.iter().enumerate() {
            if s.dim() != self.links[l].tx_antennas {
                return Err(Error::DimensionMismatch(format!(
                    "covariance of link {l} is {0}x{0}, expected {1}x{1}",
                    s.dim(),
                    self.links[l].tx_antennas
                )));
            }
        }
        Ok(())
    }

    /// Checks one receive-side matrix per link (`Ω_l` or `Λ_l`).
    pub fn check_receive_side(&self, m: &[HermitianMatrix]) -> Result<()> {
        if m.len() != self.num_links() {
            return Err(Error::DimensionMismatch(format!(
                "{} receive-side matrices for {} links",
                m.len(),
                self.num_links()
            )));
        }
        for (l, x) in m.iter().enumerate() {
            if x.dim() != self.links[l].rx_antennas {
                return Err(Error::DimensionMismatch(format!(
                    "receive-side matrix of link {l} is {0}x{0}, expected {1}x{1}",
                    x.dim(),
                    self.links[l].rx_antennas
                )));
            }
        }
        Ok(())
    }
}

/// Transmit covariances together with the interference-plus-noise
/// covariances they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalState {
    pub sigma: Vec<HermitianMatrix>,
    pub omega: Vec<HermitianMatrix>,
}

impl PrimalState {
    /// Builds the state with `Ω` consistent with `Σ`.
    pub fn from_sigma(net: &Network, sigma: Vec<HermitianMatrix>) -> Result<Self> {
        let omega = interference_plus_noise(net, &sigma)?;
        Ok(PrimalState { sigma, omega })
    }
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use num_complex::Complex64;

    pub fn scalar(re: f64, im: f64) -> CMatrix {
        CMatrix::from_element(1, 1, Complex64::new(re, im))
    }

    /// SISO network with real channel gains `h[l][k]` and a total budget.
    pub fn siso_network(h: &[&[f64]], weights: &[f64], total_power: f64) -> Network {
        let nl = weights.len();
        let links = weights
            .iter()
            .map(|&w| Link { tx_antennas: 1, rx_antennas: 1, weight: w })
            .collect();
        let channels = (0..nl)
            .map(|l| (0..nl).map(|k| scalar(h[l][k], 0.0)).collect())
            .collect();
        let group = ConstraintGroup::power_budget((0..nl).collect(), &vec![1; nl], total_power).unwrap();
        Network::new(links, channels, vec![group]).unwrap()
    }
}
