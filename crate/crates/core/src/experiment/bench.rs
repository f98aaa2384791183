use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::Result;
use crate::netmodel::{random_network, Scenario};
use crate::solver::{solve, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub links: usize,
    /// Transmit and receive antennas per link.
    pub antennas: usize,
    /// Median wall time of one step, milliseconds.
    pub per_iter_ms: f64,
}

/// Per-iteration timings with log-log slope fits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityTable {
    pub rows: Vec<BenchRow>,
    /// `(N, slope in L)` for each antenna count.
    pub slopes_in_links: Vec<(usize, f64)>,
    /// `(L, slope in N)` for each link count.
    pub slopes_in_antennas: Vec<(usize, f64)>,
    /// Exponents `(a, b)` of the fit `t ≈ c L^a N^b` over all rows.
    pub joint_fit: (f64, f64),
}

impl ComplexityTable {
    pub fn time(&self, links: usize, antennas: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.links == links && r.antennas == antennas).map(|r| r.per_iter_ms)
    }

    /// Slope in `L` at the largest antenna count.
    pub fn headline_slope_links(&self) -> Option<f64> {
        self.slopes_in_links.last().map(|s| s.1)
    }

    /// Slope in `N` at the largest link count.
    pub fn headline_slope_antennas(&self) -> Option<f64> {
        self.slopes_in_antennas.last().map(|s| s.1)
    }
}

/// Least-squares slope of `ln y` against `ln x`; `NaN` with fewer than two
/// distinct abscissae.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn joint_fit(rows: &[BenchRow]) -> (f64, f64) {
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for r in rows {
        let a = Vector3::new(1.0, (r.links as f64).ln(), (r.antennas as f64).ln());
        ata += a * a.transpose();
        aty += a * r.per_iter_ms.ln();
    }
    match ata.lu().solve(&aty) {
        Some(c) => (c[1], c[2]),
        None => (f64::NAN, f64::NAN),
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

/// Times `iterations` steps on total-power networks with `n = m = N` for
/// every `(L, N)` pair and each seed; a row holds the median step time over
/// all timed steps of all seeds.
pub fn benchmark_complexity(
    links: &[usize],
    antennas: &[usize],
    iterations: usize,
    seeds: &[u64],
) -> Result<ComplexityTable> {
    let cfg = SolverConfig { max_iters: iterations, obj_tol: 0.0, kkt_tol: f64::MIN_POSITIVE, ..Default::default() };
    let mut rows = Vec::new();
    for &n in antennas {
        for &l in links {
            let sc = Scenario { links: l, tx_antennas: n, rx_antennas: n, ..Scenario::reference(1.0) };
            let mut times = Vec::new();
            for &seed in seeds {
                let out = solve(&random_network(seed, &sc)?, None, &cfg)?;
                times.extend(out.trace.records.iter().map(|r| r.wall_ms));
            }
            rows.push(BenchRow { links: l, antennas: n, per_iter_ms: median(&mut times) });
        }
    }
    let lx: Vec<f64> = links.iter().map(|&v| v as f64).collect();
    let nx: Vec<f64> = antennas.iter().map(|&v| v as f64).collect();
    let at = |l: usize, n: usize| rows.iter().find(|r| r.links == l && r.antennas == n).unwrap().per_iter_ms;
    let slopes_in_links = antennas
        .iter()
        .map(|&n| (n, fit_slope(&lx, &links.iter().map(|&l| at(l, n)).collect::<Vec<_>>())))
        .collect();
    let slopes_in_antennas = links
        .iter()
        .map(|&l| (l, fit_slope(&nx, &antennas.iter().map(|&n| at(l, n)).collect::<Vec<_>>())))
        .collect();
    let joint_fit = joint_fit(&rows);
    Ok(ComplexityTable { rows, slopes_in_links, slopes_in_antennas, joint_fit })
}
