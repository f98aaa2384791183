//! Configuration-driven batch runs: scenario generation, solves, duality
//! certificates, interference sweeps and timing benchmarks.
//!
//! A configuration is a flat TOML document:
//!
//! ```toml
//! format_version = 1
//! mode = "sweep"            # solve | certify | sweep | bench
//! seeds = [1, 2, 3]
//! links = 10
//! tx_antennas = 3
//! rx_antennas = 4
//! interference_scale = 1.0
//! alphas = [0.1, 1.0, 5.0]  # sweep only
//! constraint = "total"      # total | perlink | grouped
//! total_power = 10.0
//! max_iters = 10000
//! kkt_tol = 1e-7
//! out_dir = "runs"
//! ```
//!
//! Every key except `format_version` has a default.

mod bench;
mod plot;
mod run;

pub use bench::{benchmark_complexity, fit_slope, BenchRow, ComplexityTable};
pub use plot::{emit_convergence_plot_data, ConvergenceSeries, SeriesMeta};
pub use run::{run_config, run_experiment, RunRecord, RunReport};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{ConstraintSpec, Scenario};
use crate::solver::SolverConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Solve,
    Certify,
    Sweep,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Total,
    Perlink,
    Grouped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub mode: RunMode,
    pub seeds: Vec<u64>,
    pub links: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub interference_scale: f64,
    /// Interference scales visited by a sweep.
    pub alphas: Vec<f64>,
    pub weight_min: f64,
    pub weight_max: f64,
    pub constraint: ConstraintKind,
    pub total_power: f64,
    pub perlink_min: u32,
    pub perlink_max: u32,
    pub cell_size: usize,
    pub cell_power: f64,
    pub max_iters: usize,
    pub obj_tol: f64,
    pub kkt_tol: f64,
    pub out_dir: PathBuf,
    /// Solve this network instead of generating one per seed.
    pub network_file: Option<PathBuf>,
    pub bench_links: Vec<usize>,
    pub bench_antennas: Vec<usize>,
    /// Iterations timed per benchmark run.
    pub bench_iterations: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sc = Scenario::reference(1.0);
        let solver = SolverConfig::default();
        ExperimentConfig {
            format_version: FORMAT_VERSION,
            mode: RunMode::Solve,
            seeds: vec![1],
            links: sc.links,
            tx_antennas: sc.tx_antennas,
            rx_antennas: sc.rx_antennas,
            interference_scale: sc.interference_scale,
            alphas: vec![0.1, 1.0, 5.0],
            weight_min: sc.weight_min,
            weight_max: sc.weight_max,
            constraint: ConstraintKind::Total,
            total_power: 10.0,
            perlink_min: 1,
            perlink_max: 10,
            cell_size: 2,
            cell_power: 5.0,
            max_iters: solver.max_iters,
            obj_tol: solver.obj_tol,
            kkt_tol: solver.kkt_tol,
            out_dir: PathBuf::from("wsr-out"),
            network_file: None,
            bench_links: vec![2, 4, 8, 16],
            bench_antennas: vec![2, 4, 8, 16],
            bench_iterations: 30,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<RunMode>,
    pub out_dir: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
    pub alpha: Option<f64>,
    pub constraint: Option<ConstraintKind>,
    pub max_iters: Option<usize>,
    pub kkt_tol: Option<f64>,
}

impl ExperimentConfig {
    /// Parses a configuration document, which must declare
    /// `format_version`.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        match table.get("format_version") {
            None => return Err(Error::Config("missing format_version".into())),
            Some(toml::Value::Integer(v)) if *v == FORMAT_VERSION as i64 => {}
            Some(v) => return Err(Error::Config(format!("unsupported format_version {v}"))),
        }
        let cfg: ExperimentConfig = table.try_into().map_err(|e| Error::Config(format!("{e}")))?;
        Ok(cfg)
    }

    /// Reads a configuration file. Relative paths inside it are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        if let Some(f) = &cfg.network_file {
            if f.is_relative() {
                cfg.network_file = Some(base.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
        if let Some(s) = &o.seeds {
            self.seeds = s.clone();
        }
        if let Some(a) = o.alpha {
            self.interference_scale = a;
            self.alphas = vec![a];
        }
        if let Some(c) = o.constraint {
            self.constraint = c;
        }
        if let Some(n) = o.max_iters {
            self.max_iters = n;
        }
        if let Some(t) = o.kkt_tol {
            self.kkt_tol = t;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!("unsupported format_version {}", self.format_version)));
        }
        if self.seeds.is_empty() && self.network_file.is_none() && self.mode != RunMode::Bench {
            return Err(Error::Config("seed list is empty".into()));
        }
        if self.mode == RunMode::Sweep && self.alphas.is_empty() {
            return Err(Error::Config("sweep needs at least one interference scale".into()));
        }
        if self.mode == RunMode::Bench {
            if self.bench_links.is_empty() || self.bench_antennas.is_empty() || self.bench_iterations == 0 {
                return Err(Error::Config("benchmark needs link counts, antenna counts and iterations".into()));
            }
            if self.bench_links.iter().chain(&self.bench_antennas).any(|&v| v == 0) {
                return Err(Error::Config("benchmark dimensions must be positive".into()));
            }
        }
        self.solver_config().validate()?;
        for &a in self.alphas_to_run() {
            self.scenario(a).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn constraint_spec(&self) -> ConstraintSpec {
        match self.constraint {
            ConstraintKind::Total => ConstraintSpec::Total { total_power: self.total_power },
            ConstraintKind::Perlink => ConstraintSpec::PerLink { min: self.perlink_min, max: self.perlink_max },
            ConstraintKind::Grouped => ConstraintSpec::Grouped {
                cell_size: self.cell_size,
                cell_power: self.cell_power,
                total_power: self.total_power,
            },
        }
    }

    pub fn scenario(&self, alpha: f64) -> Scenario {
        Scenario {
            links: self.links,
            tx_antennas: self.tx_antennas,
            rx_antennas: self.rx_antennas,
            interference_scale: alpha,
            weight_min: self.weight_min,
            weight_max: self.weight_max,
            constraint: self.constraint_spec(),
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            obj_tol: self.obj_tol,
            kkt_tol: self.kkt_tol,
            ..SolverConfig::default()
        }
    }

    /// Interference scales of the generated runs.
    pub fn alphas_to_run(&self) -> &[f64] {
        match self.mode {
            RunMode::Sweep => &self.alphas,
            _ => std::slice::from_ref(&self.interference_scale),
        }
    }
}

/// Process exit status for an error: 1 for unusable input, 2 for a solver
/// abort.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::InvalidScenario(_)
        | Error::InvalidNetwork(_)
        | Error::DimensionMismatch(_)
        | Error::UnsupportedMode(_)
        | Error::Io(_) => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_requires_version() {
        assert!(matches!(ExperimentConfig::parse("links = 2"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("format_version = 2"), Err(Error::Config(_))));
        let cfg = ExperimentConfig::parse("format_version = 1\nlinks = 2\nconstraint = \"perlink\"").unwrap();
        assert_eq!(cfg.links, 2);
        assert_eq!(cfg.constraint, ConstraintKind::Perlink);
        assert_eq!(cfg.tx_antennas, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("format_version = 1\nlinkz = 2").is_err());
    }

    #[test]
    fn empty_seeds_fail_validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply(&Overrides { seeds: Some(vec![]), ..Default::default() });
        let err = cfg.validate().unwrap_err();
        assert_eq!(exit_code(&err), 1);
    }

    #[test]
    fn alpha_override_narrows_sweep() {
        let mut cfg = ExperimentConfig { mode: RunMode::Sweep, ..Default::default() };
        assert_eq!(cfg.alphas_to_run(), &[0.1, 1.0, 5.0]);
        cfg.apply(&Overrides { alpha: Some(0.5), ..Default::default() });
        assert_eq!(cfg.alphas_to_run(), &[0.5]);
        assert_eq!(cfg.scenario(0.5).interference_scale, 0.5);
    }

    #[test]
    fn solver_abort_maps_to_two() {
        let e = Error::MonotonicityViolation { iter: 3, previous: 1.0, next: 0.5 };
        assert_eq!(exit_code(&e), 2);
    }
}
