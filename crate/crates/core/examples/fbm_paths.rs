//! Draws fractional Brownian paths by exact Cholesky sampling and compares
//! the sample variance of ω(1) with 1 across Hurst indices.

use roughcocycle::driver::{FbmSampler, HurstModel};
use roughcocycle::rng::RngStream;
use roughcocycle::{make_grid, Result};

fn main() -> Result<()> {
    let grid = make_grid(0.0, 1.0, 128)?;
    for hurst in [0.3, 0.5, 0.7] {
        let sampler = FbmSampler::new(&grid, HurstModel::new(hurst, 1)?)?;
        let mut rng = RngStream::new(7, 0).rng();
        let n = 4000;
        let var = (0..n).map(|_| sampler.sample(&mut rng).value(128)[0].powi(2)).sum::<f64>() / n as f64;
        println!("H = {hurst}: Var ω(1) ≈ {var:.4} (exact 1)");
    }
    Ok(())
}
