//! Solves dY = f(Y) d𝛚 for the bounded trigonometric field with the rough
//! solver on the Brownian lift and with RK4 on smoothed drivers, and checks
//! the cocycle property of both flows.

use roughcocycle::driver::{bm_reference_lift, sample_bm};
use roughcocycle::grid::holder_seminorm;
use roughcocycle::rde::{max_cocycle_defect, solve_ode_rk4, solve_rde, Driver, TrigField};
use roughcocycle::rng::RngStream;
use roughcocycle::{smooth, Result, SmoothingParams, TimeGrid};

fn main() -> Result<()> {
    let h = 1.0 / 1024.0;
    let n = 1024;
    let xi = [0.5, -0.5];
    let grid = TimeGrid::with_mesh(0.0, h, n + 256)?;
    let omega = sample_bm(&grid, 2, &RngStream::new(3, 0))?;
    let lift = bm_reference_lift(&omega.restrict((0, n))?);
    let y = solve_rde(&TrigField, &lift, &xi, (0, n))?;
    println!("rough solution Y(1) = {:?}", y.value(n));
    for j in 2..=6 {
        let sm = smooth(&omega, &SmoothingParams::new(2f64.powi(-j), h)?, (0, n))?;
        let yd = solve_ode_rk4(&TrigField, &sm, &xi, (0, n), 1)?;
        let gap = holder_seminorm(&yd.difference(y.path())?, 0.335, (0, n))?;
        println!("δ = 2^-{j}: Y_δ(1) = {:?}, Hölder gap {gap:.4}", yd.value(n));
    }

    let short = TimeGrid::with_mesh(0.0, 1.0 / 128.0, 128 + 32)?;
    let w = sample_bm(&short, 2, &RngStream::new(4, 0))?;
    let rough = Driver::Rough(bm_reference_lift(&w.restrict((0, 128))?));
    let smooth_driver = Driver::Smooth {
        path: smooth(&w, &SmoothingParams::from_cells(32, 1.0 / 128.0)?, (0, 128))?,
        substeps: 1,
    };
    println!("cocycle defect, rough flow: {:.3e}", max_cocycle_defect(&TrigField, &rough, &xi)?);
    println!("cocycle defect, RK4 flow:   {:.3e}", max_cocycle_defect(&TrigField, &smooth_driver, &xi)?);
    Ok(())
}
