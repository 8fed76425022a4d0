//! Smooths one Brownian sample at a ladder of widths and prints the
//! inhomogeneous rough-path distance to the Brownian lift, split into its
//! path and area parts.

use roughcocycle::driver::{bm_reference_lift, sample_bm};
use roughcocycle::grid::holder_seminorm;
use roughcocycle::lift::rough_metric;
use roughcocycle::rng::RngStream;
use roughcocycle::{smooth, Result, SmoothingParams, TimeGrid};

fn main() -> Result<()> {
    let h = 1.0 / 4096.0;
    let n = 4096;
    let beta = 0.335;
    let grid = TimeGrid::with_mesh(0.0, h, n + 1024)?;
    let omega = sample_bm(&grid, 2, &RngStream::new(11, 0))?;
    let reference = bm_reference_lift(&omega.restrict((0, n))?);
    for j in 2..=8 {
        let params = SmoothingParams::new(2f64.powi(-j), h)?;
        let sm = smooth(&omega, &params, (0, n))?;
        let path_term = holder_seminorm(&sm.path().difference(reference.path())?, beta, (0, n))?;
        let metric = rough_metric(sm.lift(), &reference, beta, (0, n))?;
        println!(
            "δ = 2^-{j}: rho_beta {metric:.4}  path {path_term:.4}  area {:.4}",
            metric - path_term
        );
    }
    Ok(())
}
