use serde::Serialize;

use crate::solver::{IterationTrace, Termination};

/// Run metadata attached to a convergence series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesMeta {
    pub label: String,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub links: usize,
    pub termination: Option<Termination>,
}

/// `(iteration, objective)` points of one run, one per committed step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSeries {
    pub meta: SeriesMeta,
    pub initial_objective: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn emit_convergence_plot_data(trace: &IterationTrace, meta: SeriesMeta) -> ConvergenceSeries {
    ConvergenceSeries {
        meta,
        initial_objective: trace.initial_objective,
        points: trace.records.iter().map(|r| (r.iter, r.objective)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::IterationRecord;

    fn record(iter: usize, objective: f64) -> IterationRecord {
        IterationRecord {
            iter,
            objective,
            lambda_scale: 1.0,
            mu: vec![0.5],
            kkt_max_residual: 0.0,
            complementary_slackness: 0.0,
            mu_sweeps: 1,
            mu_fallback: false,
            wall_ms: 0.1,
        }
    }

    fn meta() -> SeriesMeta {
        SeriesMeta { label: "x".into(), alpha: Some(1.0), seed: Some(3), links: 2, termination: None }
    }

    #[test]
    fn one_step_gives_one_point() {
        let trace = IterationTrace { initial_objective: 0.5, records: vec![record(1, 1.25)] };
        let s = emit_convergence_plot_data(&trace, meta());
        assert_eq!(s.points, vec![(1, 1.25)]);
    }

    #[test]
    fn length_matches_iterations() {
        let trace = IterationTrace { initial_objective: 0.0, records: (1..=7).map(|i| record(i, i as f64)).collect() };
        assert_eq!(emit_convergence_plot_data(&trace, meta()).points.len(), trace.len());
    }
}
