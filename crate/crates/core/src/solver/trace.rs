use std::io::Write;

use serde::Serialize;

use super::driver::Termination;
use super::kkt::KktReport;
use crate::error::{Error, Result};

/// One committed step of the solve loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Weighted sum-rate after the step, nats.
    pub objective: f64,
    /// Scaling factor `λ` that restored feasibility.
    pub lambda_scale: f64,
    pub mu: Vec<f64>,
    /// Largest KKT residual of the iterate the step started from.
    pub kkt_max_residual: f64,
    /// Largest `|μ_s (1 − usage_s(Σ̃))|` of the tentative covariances.
    pub complementary_slackness: f64,
    pub mu_sweeps: usize,
    /// True when some price was raised to the probe value.
    pub mu_fallback: bool,
    /// Time spent in the algorithm step, excluding diagnostics.
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IterationTrace {
    pub initial_objective: f64,
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Objective before the first step followed by one value per step.
    pub fn objectives(&self) -> Vec<f64> {
        std::iter::once(self.initial_objective)
            .chain(self.records.iter().map(|r| r.objective))
            .collect()
    }

    /// Largest drop between consecutive objectives (zero when monotone).
    pub fn max_decrease(&self) -> f64 {
        self.objectives().windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }

    /// True when the objective rose by less than `tol` (relative) over the
    /// last three steps. A zero tolerance never triggers.
    pub(crate) fn stalled(&self, tol: f64) -> bool {
        let n = self.records.len();
        if tol <= 0.0 || n < 3 {
            return false;
        }
        let last = self.records[n - 1].objective;
        let before = if n == 3 { self.initial_objective } else { self.records[n - 4].objective };
        last - before <= tol * last.abs().max(1.0)
    }

    /// CSV with columns `iter, objective_nats, lambda_scale, mu_<s>...,
    /// kkt_max_residual, wall_ms`.
    pub fn write_csv(&self, num_groups: usize, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["iter".to_string(), "objective_nats".into(), "lambda_scale".into()];
        header.extend((0..num_groups).map(|s| format!("mu_{s}")));
        header.push("kkt_max_residual".into());
        header.push("wall_ms".into());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let mut row = vec![r.iter.to_string(), r.objective.to_string(), r.lambda_scale.to_string()];
            row.extend(r.mu.iter().map(f64::to_string));
            row.push(r.kkt_max_residual.to_string());
            row.push(r.wall_ms.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Structured summary of one solve, written as JSON by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub seed: Option<u64>,
    pub links: usize,
    pub groups: usize,
    pub objective_nats: f64,
    pub initial_objective_nats: f64,
    pub rates_nats: Vec<f64>,
    pub weights: Vec<f64>,
    pub constraint_usage: Vec<f64>,
    pub mu: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    pub kkt_max_residual: f64,
    pub kkt: KktReport,
    pub max_objective_decrease: f64,
    pub wall_ms_total: f64,
}
