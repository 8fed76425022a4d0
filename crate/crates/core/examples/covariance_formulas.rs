//! Evaluates the closed-form covariances of the smoothed processes and the
//! ρ-variation constant.

use roughcocycle::covariance::{constant_m, cov_i, cov_j, cov_k, sigma2_x_delta};
use roughcocycle::Result;

fn main() -> Result<()> {
    let delta = 0.25;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "u", "sigma2", "I(H=.3)", "J(H=.3)", "K(H=.3)", "K(H=.5)");
    for u in [0.0, 0.05, 0.1, 0.2, 0.25, 0.5, 1.0] {
        println!(
            "{u:>6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            sigma2_x_delta(u, delta)?,
            cov_i(u, delta, 0.3)?,
            cov_j(u, delta, 0.3)?,
            cov_k(u, delta, 0.3)?,
            cov_k(u, delta, 0.5)?,
        );
    }
    for rho in [1.0, 1.25, 1.5] {
        println!("M({rho}) = {:.6}", constant_m(rho)?);
    }
    Ok(())
}
