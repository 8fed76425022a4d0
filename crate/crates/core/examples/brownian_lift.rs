//! Samples a two-dimensional Brownian path, lifts it to a geometric rough
//! path and reports the Lévy area, Chen and symmetry defects and the
//! homogeneous β-Hölder norm.

use roughcocycle::driver::{bm_reference_lift, sample_bm};
use roughcocycle::lift::{chen_defect, homogeneous_norm, symmetry_defect, AreaTable};
use roughcocycle::rng::RngStream;
use roughcocycle::{make_grid, Result};

fn main() -> Result<()> {
    let grid = make_grid(0.0, 1.0, 1024)?;
    let omega = sample_bm(&grid, 2, &RngStream::new(2024, 0))?;
    let lift = bm_reference_lift(&omega);

    let area = lift.area(0, 1024)?;
    println!("W(1) = {:?}", omega.value(1024));
    println!("Lévy area ½(W12 - W21) on [0,1] = {:.6}", 0.5 * (area[(0, 1)] - area[(1, 0)]));

    let coarse: Vec<usize> = (0..=1024).step_by(64).collect();
    let table = AreaTable::from_lift(&lift, &coarse)?;
    let triples: Vec<_> = coarse.windows(3).map(|w| (w[0], w[1], w[2])).collect();
    println!("Chen defect    {:.3e}", chen_defect(&omega, &table, &triples)?);
    println!("symmetry defect {:.3e}", symmetry_defect(&lift, (0, 1024))?);
    for beta in [0.34, 0.4, 0.45] {
        println!("homogeneous norm, β = {beta}: {:.4}", homogeneous_norm(&lift, beta, (0, 1024))?);
    }
    Ok(())
}
