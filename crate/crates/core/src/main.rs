use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wsr_minimax::experiment::{exit_code, run_config, ConstraintKind, ExperimentConfig, Overrides, RunMode, RunReport};
use wsr_minimax::Result;

/// Weighted sum-rate maximization with the iterative minimax algorithm.
#[derive(Debug, Parser)]
#[command(name = "wsr-minimax", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Solve one network per seed.
    Solve(Args),
    /// Solve, map to the reciprocal network and certify equal sum-rate.
    Certify(Args),
    /// Solve every seed at every interference scale.
    Sweep(Args),
    /// Time iterations over link and antenna counts.
    Bench(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seed list.
    #[arg(long)]
    seeds: Option<String>,
    /// Interference scale.
    #[arg(long)]
    alpha: Option<f64>,
    /// Constraint structure of generated networks.
    #[arg(long, value_enum)]
    mode: Option<ConstraintKind>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// KKT residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("invalid seed {t:?}")))
        .collect()
}

fn run(mode: RunMode, args: Args) -> Result<RunReport> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let seeds = args
        .seeds
        .as_deref()
        .map(parse_seeds)
        .transpose()
        .map_err(wsr_minimax::Error::Config)?;
    cfg.apply(&Overrides {
        mode: Some(mode),
        out_dir: args.out,
        seeds,
        alpha: args.alpha,
        constraint: args.mode,
        max_iters: args.max_iters,
        kkt_tol: args.tol,
    });
    run_config(&cfg)
}

fn print_report(report: &RunReport) {
    if let Some(t) = &report.bench {
        println!("{:>6} {:>8} {:>14}", "links", "antennas", "ms/iter");
        for r in &t.rows {
            println!("{:>6} {:>8} {:>14.4}", r.links, r.antennas, r.per_iter_ms);
        }
        for (n, s) in &t.slopes_in_links {
            println!("slope in L at N={n}: {s:.3}");
        }
        for (l, s) in &t.slopes_in_antennas {
            println!("slope in N at L={l}: {s:.3}");
        }
        println!("joint fit: L^{:.3} N^{:.3}", t.joint_fit.0, t.joint_fit.1);
        return;
    }
    for r in &report.runs {
        let alpha = r.alpha.map(|a| a.to_string()).unwrap_or_else(|| "-".into());
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        let verdict = r.verdict.map(|v| format!(" verdict={v:?}")).unwrap_or_default();
        println!(
            "alpha={alpha} seed={seed} iterations={} objective={:.10} kkt={:.2e} termination={:?}{verdict} -> {}",
            r.iterations,
            r.objective,
            r.kkt_max_residual,
            r.termination,
            r.dir.display()
        );
    }
    if let Some(p) = &report.aggregate {
        println!("aggregate: {}", p.display());
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (mode, args) = match cli.verb {
        Verb::Solve(a) => (RunMode::Solve, a),
        Verb::Certify(a) => (RunMode::Certify, a),
        Verb::Sweep(a) => (RunMode::Sweep, a),
        Verb::Bench(a) => (RunMode::Bench, a),
    };
    match run(mode, args) {
        Ok(report) => {
            print_report(&report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
