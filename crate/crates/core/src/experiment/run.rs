use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::bench::{benchmark_complexity, ComplexityTable};
use super::plot::{emit_convergence_plot_data, SeriesMeta};
use super::{ExperimentConfig, RunMode};
use crate::duality::{certify_duality, reciprocal_network, Verdict};
use crate::error::{Error, Result};
use crate::netmodel::{random_network, read_network, write_network, Network};
use crate::solver::{csv_err, solve, Termination};

/// Outcome of one network in a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub dir: PathBuf,
    pub iterations: usize,
    pub objective: f64,
    pub termination: Termination,
    pub kkt_max_residual: f64,
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: RunMode,
    pub runs: Vec<RunRecord>,
    /// Aggregate table written by a sweep.
    pub aggregate: Option<PathBuf>,
    pub bench: Option<ComplexityTable>,
}

/// Writes `path` through a sibling temporary file so a reader never sees
/// a partial file.
fn write_atomic(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        f(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Config(format!("json: {e}")))?;
        writeln!(w)?;
        Ok(())
    })
}

struct Job {
    alpha: Option<f64>,
    seed: Option<u64>,
    tag: String,
    net: Network,
}

fn jobs(cfg: &ExperimentConfig) -> Result<Vec<Job>> {
    if let Some(path) = &cfg.network_file {
        let file = fs::File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        let net = read_network(BufReader::new(file))?;
        let seed = net.meta().seed;
        let alpha = net.meta().scenario.map(|s| s.interference_scale);
        return Ok(vec![Job { alpha, seed, tag: "network".into(), net }]);
    }
    let mut out = Vec::new();
    for &alpha in cfg.alphas_to_run() {
        let sc = cfg.scenario(alpha);
        for &seed in &cfg.seeds {
            out.push(Job { alpha: Some(alpha), seed: Some(seed), tag: format!("alpha_{alpha}_seed_{seed}"), net: random_network(seed, &sc)? });
        }
    }
    Ok(out)
}

fn solve_job(cfg: &ExperimentConfig, job: &Job, dir: &Path) -> Result<RunRecord> {
    let solver = cfg.solver_config();
    // a decreasing step aborts the solve, so only monotone traces are written
    let out = solve(&job.net, None, &solver)?;
    let summary = out.summary(&job.net)?;
    write_atomic(&dir.join("trace.csv"), |w| out.trace.write_csv(job.net.num_groups(), w))?;
    write_json(&dir.join("summary.json"), &summary)?;
    let meta = SeriesMeta {
        label: job.tag.clone(),
        alpha: job.alpha,
        seed: job.seed,
        links: job.net.num_links(),
        termination: Some(out.termination),
    };
    write_json(&dir.join("convergence.json"), &emit_convergence_plot_data(&out.trace, meta))?;
    Ok(RunRecord {
        alpha: job.alpha,
        seed: job.seed,
        dir: dir.to_path_buf(),
        iterations: out.iterations(),
        objective: out.objective,
        termination: out.termination,
        kkt_max_residual: out.kkt.max(),
        verdict: None,
    })
}

fn certify_job(cfg: &ExperimentConfig, job: &Job, dir: &Path) -> Result<RunRecord> {
    let reverse = reciprocal_network(&job.net)?;
    write_atomic(&dir.join("reverse_network.txt"), |w| write_network(&reverse, w))?;
    let report = certify_duality(&job.net, &cfg.solver_config())?;
    write_json(&dir.join("certificate.json"), &report)?;
    Ok(RunRecord {
        alpha: job.alpha,
        seed: job.seed,
        dir: dir.to_path_buf(),
        iterations: report.forward_iterations,
        objective: report.forward_objective,
        termination: report.forward_termination,
        kkt_max_residual: report.forward_kkt_max,
        verdict: Some(report.verdict),
    })
}

fn run_job(cfg: &ExperimentConfig, job: &Job) -> Result<RunRecord> {
    let dir = cfg.out_dir.join(&job.tag);
    fs::create_dir_all(&dir)?;
    write_atomic(&dir.join("network.txt"), |w| write_network(&job.net, w))?;
    match cfg.mode {
        RunMode::Certify => certify_job(cfg, job, &dir),
        _ => solve_job(cfg, job, &dir),
    }
}

fn write_sweep_table(path: &Path, runs: &[RunRecord]) -> Result<()> {
    write_atomic(path, |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["alpha", "seed", "iterations", "objective_nats", "termination", "kkt_max_residual"])
            .map_err(csv_err)?;
        for r in runs {
            let termination = serde_json::to_value(r.termination).ok().and_then(|v| v.as_str().map(String::from));
            c.write_record([
                r.alpha.map(|a| a.to_string()).unwrap_or_default(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                r.iterations.to_string(),
                r.objective.to_string(),
                termination.unwrap_or_default(),
                r.kkt_max_residual.to_string(),
            ])
            .map_err(csv_err)?;
        }
        c.flush()?;
        Ok(())
    })
}

fn write_bench_table(path: &Path, table: &ComplexityTable) -> Result<()> {
    write_atomic(path, |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["links", "antennas", "per_iter_ms"]).map_err(csv_err)?;
        for r in &table.rows {
            c.write_record([r.links.to_string(), r.antennas.to_string(), r.per_iter_ms.to_string()])
                .map_err(csv_err)?;
        }
        c.flush()?;
        Ok(())
    })
}

/// Runs a validated configuration, writing artifacts under `out_dir`.
/// Networks run in parallel; the benchmark runs serially.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    if cfg.mode == RunMode::Bench {
        let seeds = if cfg.seeds.is_empty() { vec![0] } else { cfg.seeds.clone() };
        let table = benchmark_complexity(&cfg.bench_links, &cfg.bench_antennas, cfg.bench_iterations, &seeds)?;
        write_bench_table(&cfg.out_dir.join("bench.csv"), &table)?;
        write_json(&cfg.out_dir.join("bench.json"), &table)?;
        return Ok(RunReport { mode: cfg.mode, runs: Vec::new(), aggregate: None, bench: Some(table) });
    }
    let jobs = jobs(cfg)?;
    let runs = jobs.par_iter().map(|job| run_job(cfg, job)).collect::<Result<Vec<_>>>()?;
    let aggregate = if cfg.mode == RunMode::Sweep {
        let path = cfg.out_dir.join("sweep.csv");
        write_sweep_table(&path, &runs)?;
        Some(path)
    } else {
        None
    };
    Ok(RunReport { mode: cfg.mode, runs, aggregate, bench: None })
}

/// Loads the configuration at `path` and runs it.
pub fn run_experiment(path: &Path) -> Result<RunReport> {
    run_config(&ExperimentConfig::load(path)?)
}
