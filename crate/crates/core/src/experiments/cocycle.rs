//! Numerical cocycle property of the rough and smooth solution flows.

use super::config::ExperimentConfig;
use super::report::{CsvTable, Report};
use super::{brownian, check_field_dims, cells_for, collect_results, par_samples, FINE_STREAM_BASE};
use crate::driver::bm_reference_lift;
use crate::error::Result;
use crate::grid::wiener_shift;
use crate::rde::{field_by_name, max_cocycle_defect, solve_ode_rk4, Driver, VectorField};
use crate::smoothing::{smooth, SmoothingParams};

/// Defect threshold of the rough solver.
const ROUGH_TOL: f64 = 1e-10;
/// Below this level the RK4 defect is rounding noise and the halving ratio
/// carries no information.
const ROUNDING_FLOOR: f64 = 1e-12;
/// Smallest accepted coarse/fine defect ratio above the rounding floor.
const MIN_HALVING_RATIO: f64 = 1.5;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Largest RK4 defect `|φ_δ(t+τ, ω) - φ_δ(t, θ_τω, φ_δ(τ, ω))|` over grid
/// pairs, where the shifted flow re-smooths `θ_τω` from scratch.
fn rk4_defect(cfg: &ExperimentConfig, field: &dyn VectorField, mesh: f64, stream: u64) -> Result<f64> {
    let n = cells_for(cfg.horizon, mesh);
    let delta = cfg.deltas[0];
    let omega = brownian(cfg, mesh, n + cells_for(delta, mesh), cfg.dim, stream)?;
    let params = SmoothingParams::new(delta, mesh)?;
    let full = solve_ode_rk4(field, &smooth(&omega, &params, (0, n))?, &cfg.xi, (0, n), cfg.substeps)?;
    let mut worst: f64 = 0.0;
    for tau in 1..n {
        let shifted = smooth(&wiener_shift(&omega, tau)?, &params, (0, n - tau))?;
        let chained = solve_ode_rk4(field, &shifted, full.value(tau), (0, n - tau), cfg.substeps)?;
        for t in 0..chained.n_points() {
            worst = worst.max(euclid(full.value(tau + t), chained.value(t)));
        }
    }
    Ok(worst)
}

/// Per sample: largest cocycle defect over all grid pairs `(τ, t)` on the
/// `2^-cocycle_mesh_exponent` grid for the rough solver (threshold `1e-10`)
/// and for RK4 on `ω_δ` with the largest configured δ (threshold
/// `10·mesh`). A second table compares the largest RK4 defect with the one
/// on the halved mesh: it passes when the fine defect sits at the rounding
/// floor `1e-12` or the coarse/fine ratio is at least 1.5.
pub fn cocycle_check(cfg: &ExperimentConfig) -> Result<Report> {
    let field = field_by_name(&cfg.field, cfg.dim)?;
    check_field_dims(field.as_ref(), cfg, &cfg.xi)?;
    let coarse = 2f64.powi(-(cfg.cocycle_mesh_exponent as i32));
    let fine = 0.5 * coarse;
    let n = cells_for(cfg.horizon, coarse);
    let results = collect_results(par_samples(cfg.cocycle_samples, |i| -> Result<[f64; 3]> {
        let omega = brownian(cfg, coarse, n, cfg.dim, i as u64)?;
        let rough = max_cocycle_defect(field.as_ref(), &Driver::Rough(bm_reference_lift(&omega)), &cfg.xi)?;
        let rk4 = rk4_defect(cfg, field.as_ref(), coarse, i as u64)?;
        let rk4_fine = rk4_defect(cfg, field.as_ref(), fine, FINE_STREAM_BASE + i as u64)?;
        Ok([rough, rk4, rk4_fine])
    }))?;

    let mut table = CsvTable::new(&["sample", "solver", "mesh", "delta", "max_defect", "threshold", "pass"]);
    for (i, r) in results.iter().enumerate() {
        table.push(vec![
            i.into(),
            "rough".into(),
            coarse.into(),
            super::report::Cell::Empty,
            r[0].into(),
            ROUGH_TOL.into(),
            (r[0] <= ROUGH_TOL).into(),
        ]);
        for (mesh, v) in [(coarse, r[1]), (fine, r[2])] {
            table.push(vec![
                i.into(),
                "rk4".into(),
                mesh.into(),
                cfg.deltas[0].into(),
                v.into(),
                (10.0 * mesh).into(),
                (v <= 10.0 * mesh).into(),
            ]);
        }
    }

    let max_coarse = results.iter().map(|r| r[1]).fold(0.0, f64::max);
    let max_fine = results.iter().map(|r| r[2]).fold(0.0, f64::max);
    let ratio = max_coarse / max_fine;
    let halving_pass = max_fine <= ROUNDING_FLOOR || ratio >= MIN_HALVING_RATIO;
    let mut halving = CsvTable::new(&[
        "solver",
        "mesh_coarse",
        "mesh_fine",
        "max_defect_coarse",
        "max_defect_fine",
        "ratio",
        "rounding_floor",
        "min_ratio",
        "pass",
    ]);
    halving.push(vec![
        "rk4".into(),
        coarse.into(),
        fine.into(),
        max_coarse.into(),
        max_fine.into(),
        ratio.into(),
        ROUNDING_FLOOR.into(),
        MIN_HALVING_RATIO.into(),
        halving_pass.into(),
    ]);

    let mut report = Report::new("cocycle-check");
    let max_rough = results.iter().map(|r| r[0]).fold(0.0, f64::max);
    report.note(format!(
        "max defect: rough {max_rough:.3e}, rk4 {max_coarse:.3e} (mesh {coarse}), rk4 {max_fine:.3e} (mesh {fine})"
    ));
    report.add_table("cocycle_check.csv", table);
    report.add_table("cocycle_halving.csv", halving);
    Ok(report)
}
