//! Brute-force two-dimensional ρ-variation of the covariance of X_δ on an
//! 8-point grid, against the explicit bound δ^{1-1/ρ} M(ρ) |t-s|^{1/ρ}.

use roughcocycle::covariance::{bound_rho_var_x_delta, CovarianceModel};
use roughcocycle::variation::{rect_cov_from_sigma2, rho_variation_bruteforce};
use roughcocycle::Result;

fn main() -> Result<()> {
    let points: Vec<f64> = (0..8).map(|k| k as f64 / 7.0).collect();
    for delta in [0.25, 0.0625] {
        let cov = rect_cov_from_sigma2(CovarianceModel::brownian_difference(delta)?);
        for rho in [1.0, 1.25, 1.5] {
            let v = rho_variation_bruteforce(&cov, &points, rho)?;
            let bound = bound_rho_var_x_delta(delta, rho, 0.0, 1.0)?;
            println!("δ = {delta:<7} ρ = {rho:<5} variation {v:.5}  bound {bound:.5}");
        }
    }
    Ok(())
}
