//! Path and trajectory dumps for a single sample.

use super::config::ExperimentConfig;
use super::report::{CsvTable, Report};
use super::{brownian, check_field_dims, cells_for};
use crate::driver::bm_reference_lift;
use crate::error::{Error, Result};
use crate::grid::VectorPath;
use crate::rde::{field_by_name, solve_ode_rk4, solve_rde};
use crate::smoothing::{diff_process, smooth_path, smooth, SmoothingParams};

/// Driver of a single trajectory dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriverKind {
    /// Rough solver on the Brownian reference lift.
    Bm,
    /// RK4 on the smoothed path `ω_δ`.
    Smooth,
}

impl std::str::FromStr for DriverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bm" => Ok(DriverKind::Bm),
            "smooth" => Ok(DriverKind::Smooth),
            other => Err(Error::InvalidParameter(format!("unknown driver {other:?}; expected bm or smooth"))),
        }
    }
}

fn path_header(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("{prefix}{i}")).collect()
}

fn trajectory_table(header: &[String], paths: &[&VectorPath]) -> CsvTable {
    let cols: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = CsvTable::new(&cols);
    let grid = paths[0].grid();
    for k in 0..grid.n_points() {
        let mut row = vec![grid.time(k).into()];
        for p in paths {
            row.extend(p.value(k).iter().map(|&v| v.into()));
        }
        table.push(row);
    }
    table
}

/// Dumps `t, w.., wd.., x..` (ω, ω_δ, X_δ) of sample 0 on `[0, T]` for
/// every configured δ, or only for `delta` when given.
pub fn simulate(cfg: &ExperimentConfig, delta: Option<f64>) -> Result<Report> {
    let h = cfg.mesh();
    let deltas = match delta {
        Some(d) => vec![d],
        None => cfg.deltas.clone(),
    };
    let n = cfg.horizon_cells();
    let d_max = deltas.iter().cloned().fold(0.0, f64::max);
    let omega = brownian(cfg, h, n + cells_for(d_max, h), cfg.dim, 0)?;
    let base = omega.restrict((0, n))?;
    let m = cfg.dim;
    let mut header = vec!["t".to_string()];
    header.extend(path_header("w", m));
    header.extend(path_header("wd", m));
    header.extend(path_header("x", m));
    let mut report = Report::new("simulate");
    for d in deltas {
        let params = SmoothingParams::new(d, h)?;
        let wd = smooth_path(&omega, &params, (0, n))?;
        let x = diff_process(&base, &wd)?;
        report.add_table(format!("simulate_delta_{d}.csv"), trajectory_table(&header, &[&base, &wd, &x]));
    }
    Ok(report)
}

/// Dumps `t, y1..yd` of one solution driven by sample 0: the rough solver
/// on the Brownian lift, or RK4 on `ω_δ`.
pub fn solve_trajectory(
    cfg: &ExperimentConfig,
    field_name: &str,
    driver: DriverKind,
    delta: f64,
    xi: Option<&[f64]>,
) -> Result<Report> {
    let field = field_by_name(field_name, cfg.dim)?;
    let xi = xi.unwrap_or(&cfg.xi);
    check_field_dims(field.as_ref(), cfg, xi)?;
    let h = cfg.mesh();
    let n = cfg.horizon_cells();
    let omega = brownian(cfg, h, n + cells_for(delta, h), cfg.dim, 0)?;
    let y = match driver {
        DriverKind::Bm => solve_rde(field.as_ref(), &bm_reference_lift(&omega.restrict((0, n))?), xi, (0, n))?
            .path()
            .clone(),
        DriverKind::Smooth => {
            let sm = smooth(&omega, &SmoothingParams::new(delta, h)?, (0, n))?;
            solve_ode_rk4(field.as_ref(), &sm, xi, (0, n), cfg.substeps)?
        }
    };
    let mut header = vec!["t".to_string()];
    header.extend(path_header("y", y.dim()));
    let kind = match driver {
        DriverKind::Bm => "bm",
        DriverKind::Smooth => "smooth",
    };
    let mut report = Report::new("solve");
    report.add_table(format!("solve_{}_{kind}.csv", field.name()), trajectory_table(&header, &[&y]));
    Ok(report)
}
