use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ConstraintGroup, Link, Network, NetworkMeta};
use crate::error::{Error, Result};
use crate::matcore::CMatrix;

/// How transmit power is constrained in a generated network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSpec {
    /// One group over all links with `Q = I / total_power`.
    Total { total_power: f64 },
    /// One group per link with budget drawn uniformly from the integers
    /// `min..=max`.
    PerLink { min: u32, max: u32 },
    /// Cells of `cell_size` consecutive links each capped at `cell_power`,
    /// plus an overall cap `total_power`. Groups overlap.
    Grouped { cell_size: usize, cell_power: f64, total_power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub links: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Scale applied to every cross channel `H_lk`, `k ≠ l`.
    pub interference_scale: f64,
    pub weight_min: f64,
    pub weight_max: f64,
    pub constraint: ConstraintSpec,
}

impl Scenario {
    /// Ten links with 3 transmit and 4 receive antennas, weights in
    /// `[0.5, 1]`, total power 10.
    pub fn reference(interference_scale: f64) -> Self {
        Scenario {
            links: 10,
            tx_antennas: 3,
            rx_antennas: 4,
            interference_scale,
            weight_min: 0.5,
            weight_max: 1.0,
            constraint: ConstraintSpec::Total { total_power: 10.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.links == 0 || self.tx_antennas == 0 || self.rx_antennas == 0 {
            return bad("link count and antenna counts must be positive".into());
        }
        if !(self.interference_scale >= 0.0 && self.interference_scale.is_finite()) {
            return bad(format!("interference scale {} must be finite and nonnegative", self.interference_scale));
        }
        if !(self.weight_min > 0.0 && self.weight_min <= self.weight_max && self.weight_max.is_finite()) {
            return bad(format!("weight range [{}, {}] is invalid", self.weight_min, self.weight_max));
        }
        let positive = |p: f64| p > 0.0 && p.is_finite();
        match self.constraint {
            ConstraintSpec::Total { total_power } if !positive(total_power) => {
                bad(format!("total power {total_power} must be positive"))
            }
            ConstraintSpec::PerLink { min, max } if min == 0 || min > max => {
                bad(format!("per-link budget range {min}..={max} is invalid"))
            }
            ConstraintSpec::Grouped { cell_size, cell_power, total_power }
                if cell_size == 0 || !positive(cell_power) || !positive(total_power) =>
            {
                bad("grouped constraint needs a positive cell size and budgets".into())
            }
            _ => Ok(()),
        }
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex64::new(x * s, y * s)
    })
}

/// Draws a network with i.i.d. unit-variance circular complex Gaussian
/// channels. The random stream does not depend on the interference scale,
/// so one seed yields the same base channels for every scale.
pub fn random_network(seed: u64, scenario: &Scenario) -> Result<Network> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nl = scenario.links;
    let (n, m) = (scenario.tx_antennas, scenario.rx_antennas);
    let alpha = Complex64::new(scenario.interference_scale, 0.0);

    let channels: Vec<Vec<CMatrix>> = (0..nl)
        .map(|l| {
            (0..nl)
                .map(|k| {
                    let h = gaussian_matrix(&mut rng, m, n);
                    if k == l { h } else { h * alpha }
                })
                .collect()
        })
        .collect();
    let links: Vec<Link> = (0..nl)
        .map(|_| Link {
            tx_antennas: n,
            rx_antennas: m,
            weight: if scenario.weight_min == scenario.weight_max {
                scenario.weight_min
            } else {
                rng.random_range(scenario.weight_min..=scenario.weight_max)
            },
        })
        .collect();

    let dims = vec![n; nl];
    let groups = match scenario.constraint {
        ConstraintSpec::Total { total_power } => {
            vec![ConstraintGroup::power_budget((0..nl).collect(), &dims, total_power)?]
        }
        ConstraintSpec::PerLink { min, max } => (0..nl)
            .map(|l| {
                let p = rng.random_range(min..=max) as f64;
                ConstraintGroup::power_budget(vec![l], &dims, p)
            })
            .collect::<Result<_>>()?,
        ConstraintSpec::Grouped { cell_size, cell_power, total_power } => {
            let mut groups: Vec<ConstraintGroup> = (0..nl)
                .step_by(cell_size)
                .map(|start| {
                    let members = (start..(start + cell_size).min(nl)).collect();
                    ConstraintGroup::power_budget(members, &dims, cell_power)
                })
                .collect::<Result<_>>()?;
            groups.push(ConstraintGroup::power_budget((0..nl).collect(), &dims, total_power)?);
            groups
        }
    };

    Ok(Network::new(links, channels, groups)?.with_meta(NetworkMeta {
        seed: Some(seed),
        scenario: Some(*scenario),
    }))
}
