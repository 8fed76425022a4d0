//! Brute-force ρ-variation of Brownian and `X_δ` covariances against the
//! explicit bounds.

use super::config::ExperimentConfig;
use super::report::{CsvTable, Report};
use crate::covariance::{bound_rho_var_bm, bound_rho_var_x_delta, constant_m, CovarianceModel};
use crate::error::Result;
use crate::variation::{rect_cov_from_sigma2, rho_variation_bruteforce};

/// Points per window in the enumeration.
const POINTS: usize = 8;
/// Relative slack for comparing an enumerated value with its bound.
const REL_TOL: f64 = 1e-12;

fn windows(horizon: f64) -> [(f64, f64); 3] {
    [(0.0, horizon), (0.25 * horizon, 0.75 * horizon), (-0.5 * horizon, 0.5 * horizon)]
}

fn points((a, b): (f64, f64)) -> Vec<f64> {
    (0..POINTS).map(|k| a + (b - a) * k as f64 / (POINTS - 1) as f64).collect()
}

/// `model,rho,window,bruteforce,bound,pass` rows. Brownian motion at `ρ = 1`
/// must reproduce the window length to `1e-12`; every other row must stay
/// below its bound.
pub fn variation_check(cfg: &ExperimentConfig) -> Result<Report> {
    let mut table = CsvTable::new(&["model", "rho", "window", "bruteforce", "bound", "pass"]);
    let bm = rect_cov_from_sigma2(CovarianceModel::brownian());
    for &rho in &cfg.variation_rhos {
        for w in windows(cfg.horizon) {
            let v = rho_variation_bruteforce(&bm, &points(w), rho)?;
            let len = w.1 - w.0;
            let (bound, pass) = if rho == 1.0 {
                (len, (v - len).abs() <= 1e-12)
            } else {
                let b = bound_rho_var_bm(cfg.horizon, rho, w.0, w.1)?;
                (b, v <= b * (1.0 + REL_TOL))
            };
            table.push(vec!["bm".into(), rho.into(), format!("{}:{}", w.0, w.1).into(), v.into(), bound.into(), pass.into()]);
        }
    }
    for &delta in &cfg.deltas {
        let cov = rect_cov_from_sigma2(CovarianceModel::brownian_difference(delta)?);
        for &rho in &cfg.variation_rhos {
            for w in windows(cfg.horizon) {
                let v = rho_variation_bruteforce(&cov, &points(w), rho)?;
                let b = bound_rho_var_x_delta(delta, rho, w.0, w.1)?;
                table.push(vec![
                    format!("x_delta({delta})").into(),
                    rho.into(),
                    format!("{}:{}", w.0, w.1).into(),
                    v.into(),
                    b.into(),
                    (v <= b * (1.0 + REL_TOL)).into(),
                ]);
            }
        }
    }
    let mut report = Report::new("variation-check");
    report.note(format!("M(1) = {}", constant_m(1.0)?));
    report.add_table("variation_check.csv", table);
    Ok(report)
}
