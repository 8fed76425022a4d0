//! Monte Carlo reproduction of the smoothed-path covariance formulas.

use rand::Rng;

use super::config::ExperimentConfig;
use super::report::{CsvTable, Report};
use super::stats::{mean, std_error};
use super::{brownian, cells_for, collect_results, par_samples, FBM_STREAM_BASE, IDENTITY_STREAM};
use crate::covariance::{cov_i, cov_j, cov_k, sigma2_x_delta};
use crate::driver::{FbmSampler, HurstModel};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::rng::RngStream;
use crate::smoothing::ExactSmoother;

const HEADER: [&str; 11] = [
    "process",
    "hurst",
    "delta",
    "u",
    "quantity",
    "mc",
    "formula",
    "se",
    "allowance",
    "tolerance",
    "pass",
];

/// Identity `K = I + u^{2H} - 2J` is checked to this absolute level.
const IDENTITY_TOL: f64 = 1e-10;

/// Rows per `(process, H, δ, u, quantity)`: MC estimate, closed form, SE
/// and pass flag `|mc - formula| <= 3·se + allowance`. Brownian rows carry
/// the allowance `2·mesh`, fBm rows none. A final row checks the algebraic
/// identity between the three fBm formulas at 100 random points.
pub fn covariance_check(cfg: &ExperimentConfig) -> Result<Report> {
    let mut table = CsvTable::new(&HEADER);
    brownian_rows(cfg, &mut table)?;
    fbm_rows(cfg, &mut table)?;
    identity_row(cfg, &mut table)?;
    let mut report = Report::new("covariance-check");
    report.add_table("covariance_check.csv", table);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn push_row(
    table: &mut CsvTable,
    process: &str,
    hurst: f64,
    delta: f64,
    u: f64,
    quantity: &str,
    samples: &[f64],
    formula: f64,
    allowance: f64,
) {
    let mc = mean(samples);
    let se = std_error(samples);
    let tolerance = 3.0 * se + allowance;
    table.push(vec![
        process.into(),
        hurst.into(),
        delta.into(),
        u.into(),
        quantity.into(),
        mc.into(),
        formula.into(),
        se.into(),
        allowance.into(),
        tolerance.into(),
        ((mc - formula).abs() <= tolerance).into(),
    ]);
}

fn brownian_rows(cfg: &ExperimentConfig, table: &mut CsvTable) -> Result<()> {
    let h = cfg.mesh();
    let u_max = cfg.u_values.iter().cloned().fold(0.0, f64::max);
    let d_max = cfg.cov_deltas.iter().cloned().fold(0.0, f64::max);
    let cells = cells_for(u_max + d_max, h);
    let pairs: Vec<(f64, f64)> = cfg.cov_deltas.iter().flat_map(|&d| cfg.u_values.iter().map(move |&u| (d, u))).collect();
    let per_sample = collect_results(par_samples(cfg.samples, |i| -> Result<Vec<f64>> {
        let omega = brownian(cfg, h, cells, 1, i as u64)?;
        let ex = ExactSmoother::new(&omega)?;
        pairs
            .iter()
            .map(|&(d, u)| {
                let x = ex.value(d, u)?[0] - omega.eval(u)?[0];
                Ok(x * x)
            })
            .collect()
    }))?;
    for (p, &(d, u)) in pairs.iter().enumerate() {
        let xs: Vec<f64> = per_sample.iter().map(|s| s[p]).collect();
        push_row(table, "bm", 0.5, d, u, "var_x_delta", &xs, sigma2_x_delta(u, d)?, 2.0 * h);
    }
    Ok(())
}

fn fbm_rows(cfg: &ExperimentConfig, table: &mut CsvTable) -> Result<()> {
    let grid = TimeGrid::new(0.0, 1.0, cfg.fbm_cells)?;
    let d = cfg.fbm_delta;
    for (k, &hurst) in cfg.hurst.iter().enumerate() {
        let sampler = FbmSampler::new(&grid, HurstModel::new(hurst, 1)?)?;
        let base = FBM_STREAM_BASE * (k as u64 + 1);
        let per_sample = collect_results(par_samples(cfg.fbm_samples, |i| -> Result<Vec<[f64; 3]>> {
            let mut rng = RngStream::new(cfg.master_seed, base + i as u64).rng();
            let omega = sampler.sample(&mut rng);
            let ex = ExactSmoother::new(&omega)?;
            cfg.fbm_u_values
                .iter()
                .map(|&u| {
                    let wd = ex.value(d, u)?[0];
                    let w = omega.eval(u)?[0];
                    Ok([wd * wd, wd * w, (wd - w) * (wd - w)])
                })
                .collect()
        }))?;
        for (p, &u) in cfg.fbm_u_values.iter().enumerate() {
            let formulas = [cov_i(u, d, hurst)?, cov_j(u, d, hurst)?, cov_k(u, d, hurst)?];
            for (q, name) in ["I", "J", "K"].iter().enumerate() {
                let xs: Vec<f64> = per_sample.iter().map(|s| s[p][q]).collect();
                push_row(table, "fbm", hurst, d, u, name, &xs, formulas[q], 0.0);
            }
        }
    }
    Ok(())
}

fn identity_row(cfg: &ExperimentConfig, table: &mut CsvTable) -> Result<()> {
    let mut rng = RngStream::new(cfg.master_seed, IDENTITY_STREAM).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u: f64 = rng.random_range(0.0..2.0);
        let d: f64 = rng.random_range(0.01..=1.0);
        let hurst: f64 = rng.random_range(0.05..0.95);
        let lhs = cov_k(u, d, hurst)?;
        let rhs = cov_i(u, d, hurst)? + u.powf(2.0 * hurst) - 2.0 * cov_j(u, d, hurst)?;
        worst = worst.max((lhs - rhs).abs());
    }
    table.push(vec![
        "fbm".into(),
        super::report::Cell::Empty,
        super::report::Cell::Empty,
        super::report::Cell::Empty,
        "identity_K_I_J".into(),
        worst.into(),
        0.0.into(),
        0.0.into(),
        IDENTITY_TOL.into(),
        IDENTITY_TOL.into(),
        (worst <= IDENTITY_TOL).into(),
    ]);
    Ok(())
}

/// Closed forms `u,delta,H,I,J,K,sigma2` over `u_values × cov_deltas × H`,
/// with `H = 1/2` prepended to the configured Hurst list.
pub fn covariance_table(cfg: &ExperimentConfig) -> Result<Report> {
    let mut table = CsvTable::new(&["u", "delta", "H", "I", "J", "K", "sigma2"]);
    let mut hursts = vec![0.5];
    hursts.extend(cfg.hurst.iter().copied().filter(|h| *h != 0.5));
    for &hurst in &hursts {
        for &d in &cfg.cov_deltas {
            for &u in &cfg.u_values {
                table.push(vec![
                    u.into(),
                    d.into(),
                    hurst.into(),
                    cov_i(u, d, hurst)?.into(),
                    cov_j(u, d, hurst)?.into(),
                    cov_k(u, d, hurst)?.into(),
                    sigma2_x_delta(u, d)?.into(),
                ]);
            }
        }
    }
    let mut report = Report::new("covariance-table");
    report.add_table("covariance_table.csv", table);
    Ok(report)
}
