//! Coupled convergence of `𝛚_δ → 𝛚` and of the induced solutions.

use super::config::ExperimentConfig;
use super::report::{Cell, CsvTable, Report};
use super::stats::{kendall_tau, log_log_slope, mean, std_error, strictly_decreasing};
use super::{brownian, check_field_dims, cells_for, collect_results, par_samples};
use crate::driver::bm_reference_lift;
use crate::error::{Error, Result};
use crate::grid::holder_seminorm;
use crate::lift::{rough_metric, RoughPathLift};
use crate::rde::{field_by_name, solve_ode_rk4, solve_rde};
use crate::smoothing::{smooth, SmoothedPath, SmoothingParams};

/// Fit slack on the theoretical decay exponent `1 - 1/ρ`.
const SLOPE_SLACK: f64 = 0.9;
/// Largest admissible Kendall tau between δ-order and the stability ratio.
const TAU_MAX: f64 = 0.3;

/// One coupled Brownian sample with its reference lift and every `ω_δ`.
struct Coupled {
    reference: RoughPathLift,
    smoothed: Vec<SmoothedPath>,
}

fn coupled_sample(cfg: &ExperimentConfig, index: usize) -> Result<Coupled> {
    let h = cfg.mesh();
    let n = cfg.horizon_cells();
    let extra = cells_for(cfg.deltas[0], h);
    let omega = brownian(cfg, h, n + extra, cfg.dim, index as u64)?;
    let reference = bm_reference_lift(&omega.restrict((0, n))?);
    let smoothed = cfg
        .deltas
        .iter()
        .map(|&d| smooth(&omega, &SmoothingParams::new(d, h)?, (0, n)))
        .collect::<Result<_>>()?;
    Ok(Coupled { reference, smoothed })
}

/// Per δ: MC mean and SE of `ρ_β(𝛚_δ, 𝛚)²` and `ρ_β^{2q}`, with the
/// log-log slope of the squared means against δ. Passes when the means
/// decrease strictly as δ shrinks and the slope is at least
/// `0.9·(1 - 1/ρ)`; a single δ reports means only.
pub fn path_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.horizon_cells();
    let metrics = collect_results(par_samples(cfg.samples, |i| -> Result<Vec<f64>> {
        let c = coupled_sample(cfg, i)?;
        c.smoothed.iter().map(|s| rough_metric(s.lift(), &c.reference, cfg.beta, (0, n))).collect()
    }))?;
    let k = cfg.deltas.len();
    let sq: Vec<Vec<f64>> = (0..k).map(|j| metrics.iter().map(|m| m[j] * m[j]).collect()).collect();
    let pw: Vec<Vec<f64>> = (0..k).map(|j| metrics.iter().map(|m| m[j].powf(2.0 * cfg.q)).collect()).collect();
    let means: Vec<f64> = sq.iter().map(|v| mean(v)).collect();
    let threshold = SLOPE_SLACK * (1.0 - 1.0 / cfg.rho);
    let slope = if k >= 2 { log_log_slope(&cfg.deltas, &means) } else { None };
    let decreasing = strictly_decreasing(&means);
    let pass = decreasing && slope.is_none_or(|s| s >= threshold);

    let mut table = CsvTable::new(&[
        "delta",
        "samples",
        "mean_rho2",
        "se_rho2",
        "mean_rho2q",
        "se_rho2q",
        "slope",
        "slope_threshold",
        "decreasing",
        "pass",
    ]);
    for j in 0..k {
        table.push(vec![
            cfg.deltas[j].into(),
            cfg.samples.into(),
            means[j].into(),
            std_error(&sq[j]).into(),
            mean(&pw[j]).into(),
            std_error(&pw[j]).into(),
            slope.into(),
            threshold.into(),
            decreasing.into(),
            pass.into(),
        ]);
    }
    let mut report = Report::new("path-convergence");
    if let Some(s) = slope {
        report.note(format!("log-log slope of E rho_beta^2: {s:.4} (threshold {threshold:.4})"));
    }
    report.add_table("path_convergence.csv", table);
    Ok(report)
}

/// Per sample and δ: `⦀Y_δ - Y⦀_β` with `Y` the rough solution on the
/// reference lift and `Y_δ` the RK4 solution on `ω_δ`, together with the
/// stability ratio `⦀Y_δ - Y⦀_β / (|ξ_δ - ξ| + ρ_β(𝛚_δ, 𝛚))`. Passes when
/// the mean difference decreases strictly as δ shrinks and the Kendall tau
/// between δ-order and the mean ratio is at most 0.3. Diverged samples are
/// excluded and counted.
pub fn rds_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let field = field_by_name(&cfg.field, cfg.dim)?;
    check_field_dims(field.as_ref(), cfg, &cfg.xi)?;
    let n = cfg.horizon_cells();
    let k = cfg.deltas.len();
    let per_sample = collect_results(par_samples(cfg.samples, |i| -> Result<Vec<Option<[f64; 4]>>> {
        let c = coupled_sample(cfg, i)?;
        let y = match solve_rde(field.as_ref(), &c.reference, &cfg.xi, (0, n)) {
            Ok(y) => y,
            Err(Error::Divergence { .. }) => return Ok(vec![None; k]),
            Err(e) => return Err(e),
        };
        let mut out = Vec::with_capacity(k);
        for (j, sm) in c.smoothed.iter().enumerate() {
            let xi_d = cfg.xi_for(j);
            let yd = match solve_ode_rk4(field.as_ref(), sm, xi_d, (0, n), cfg.substeps) {
                Ok(v) => v,
                Err(Error::Divergence { .. }) => {
                    out.push(None);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let diff = holder_seminorm(&yd.difference(y.path())?, cfg.beta, (0, n))?;
            let gap = cfg.xi.iter().zip(xi_d).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let metric = rough_metric(sm.lift(), &c.reference, cfg.beta, (0, n))?;
            out.push(Some([diff, gap, metric, diff / (gap + metric)]));
        }
        Ok(out)
    }))?;

    let mut samples_table = CsvTable::new(&["sample", "delta", "diff_holder", "xi_gap", "metric", "ratio", "diverged"]);
    for (i, rows) in per_sample.iter().enumerate() {
        for (j, r) in rows.iter().enumerate() {
            let cells: Vec<Cell> = match r {
                Some(v) => vec![v[0].into(), v[1].into(), v[2].into(), v[3].into(), false.into()],
                None => vec![Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, true.into()],
            };
            let mut row = vec![i.into(), cfg.deltas[j].into()];
            row.extend(cells);
            samples_table.push(row);
        }
    }

    let column = |j: usize, q: usize| -> Vec<f64> { per_sample.iter().filter_map(|r| r[j].map(|v| v[q])).collect() };
    let mean_diff: Vec<f64> = (0..k).map(|j| mean(&column(j, 0))).collect();
    let mean_ratio: Vec<f64> = (0..k).map(|j| mean(&column(j, 3))).collect();
    let order: Vec<f64> = (0..k).map(|j| j as f64).collect();
    let tau = if k >= 2 { kendall_tau(&order, &mean_ratio) } else { f64::NAN };
    let decreasing = strictly_decreasing(&mean_diff);
    let stable = k < 2 || tau <= TAU_MAX;
    let pass = decreasing && stable && mean_diff.iter().all(|v| v.is_finite());

    let mut table = CsvTable::new(&[
        "delta",
        "n_ok",
        "n_diverged",
        "mean_diff",
        "se_diff",
        "mean_xi_gap",
        "mean_metric",
        "mean_ratio",
        "se_ratio",
        "decreasing",
        "kendall_tau",
        "tau_threshold",
        "pass",
    ]);
    for j in 0..k {
        let ok = column(j, 0).len();
        table.push(vec![
            cfg.deltas[j].into(),
            ok.into(),
            (cfg.samples - ok).into(),
            mean_diff[j].into(),
            std_error(&column(j, 0)).into(),
            mean(&column(j, 1)).into(),
            mean(&column(j, 2)).into(),
            mean_ratio[j].into(),
            std_error(&column(j, 3)).into(),
            decreasing.into(),
            if tau.is_nan() { Cell::Empty } else { tau.into() },
            TAU_MAX.into(),
            pass.into(),
        ]);
    }
    let mut report = Report::new("rds-convergence");
    report.note(format!("field {}, Kendall tau of stability ratio vs delta order: {tau:.4}", field.name()));
    report.add_table("rds_convergence.csv", table);
    report.add_table("rds_convergence_samples.csv", samples_table);
    Ok(report)
}
