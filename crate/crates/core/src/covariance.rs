//! Closed-form variances of the smoothed noise `ω_δ` and of the difference
//! process `X_δ = ω_δ - ω` for fractional Brownian motion, plus the explicit
//! ρ-variation constants.
//!
//! The fBm formulas are coded branch by branch as derived (no further
//! algebraic simplification); negative arguments are reflected, `u -> -u`.
//! Branches switch at `u < δ` strictly.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} outside (0, 1]")));
    }
    Ok(())
}

fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::InvalidParameter(format!("H = {hurst} outside (0, 1)")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 1.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!("ρ = {rho} must be at least 1")));
    }
    Ok(())
}

/// Variance of each component of `X_δ(u)` for Brownian motion:
/// `u - u³/(3δ²)` below `δ`, `2δ/3` from `δ` on.
pub fn sigma2_x_delta(u: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "u = {u} is negative; reflect before evaluating"
        )));
    }
    Ok(if u < delta {
        u - u * u * u / (3.0 * delta * delta)
    } else {
        2.0 * delta / 3.0
    })
}

/// `I(u)`: variance of each component of `ω_δ(u)`.
pub fn cov_i(u: f64, delta: f64, hurst: f64) -> Result<f64> {
    check_delta(delta)?;
    check_hurst(hurst)?;
    let u = u.abs();
    let a = 2.0 * hurst + 2.0;
    let pref = 1.0 / (delta * delta * (2.0 * hurst + 1.0) * (2.0 * hurst + 2.0));
    let body = if u >= delta {
        (u + delta).powf(a) - 2.0 * delta.powf(a) - 2.0 * u.powf(a) + (u - delta).powf(a)
    } else {
        (u + delta).powf(a) - 2.0 * delta.powf(a) - 2.0 * u.powf(a) + (delta - u).powf(a)
    };
    Ok(pref * body)
}

/// `J(u)`: `E ω_δ^i(u) ω^i(u)`.
pub fn cov_j(u: f64, delta: f64, hurst: f64) -> Result<f64> {
    check_delta(delta)?;
    check_hurst(hurst)?;
    let u = u.abs();
    let b = 2.0 * hurst + 1.0;
    let pref = 1.0 / (2.0 * delta * (2.0 * hurst + 1.0));
    let body = if u >= delta {
        (u + delta).powf(b) - 2.0 * delta.powf(b) - (u - delta).powf(b)
    } else {
        (u + delta).powf(b) - 2.0 * delta.powf(b) + (delta - u).powf(b)
    };
    Ok(pref * body)
}

/// `K(u)`: variance of each component of `X_δ(u)`,
/// `δ^{2H}/(H+1) + K̄(u) / (δ²(2H+1)(2H+2))`.
pub fn cov_k(u: f64, delta: f64, hurst: f64) -> Result<f64> {
    check_delta(delta)?;
    check_hurst(hurst)?;
    let u = u.abs();
    let h = hurst;
    let a = 2.0 * h + 2.0;
    let b = 2.0 * h + 1.0;
    let tail = delta * delta * b * a * u.powf(2.0 * h);
    let k_bar = if u >= delta {
        (u + delta).powf(a) + (u - delta).powf(a) - 2.0 * u.powf(a)
            - delta * a * ((u + delta).powf(b) - (u - delta).powf(b))
            + tail
    } else {
        (u + delta).powf(a) + (delta - u).powf(a) - 2.0 * u.powf(a)
            - delta * a * ((u + delta).powf(b) + (delta - u).powf(b))
            + tail
    };
    Ok(delta.powf(2.0 * h) / (h + 1.0) + k_bar / (delta * delta * b * a))
}

/// `M(ρ) = ((2^{1+ρ} + 1) / 3^{1-ρ})^{1/ρ}`.
pub fn constant_m(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(((2f64.powf(1.0 + rho) + 1.0) / 3f64.powf(1.0 - rho)).powf(1.0 / rho))
}

fn check_interval(s: f64, t: f64) -> Result<()> {
    if !(s < t) {
        return Err(Error::InvalidParameter(format!("reversed interval [{s}, {t}]")));
    }
    Ok(())
}

/// `δ^{1-1/ρ} M(ρ) |t-s|^{1/ρ}`, the ρ-variation bound for `R_{X_δ}`.
pub fn bound_rho_var_x_delta(delta: f64, rho: f64, s: f64, t: f64) -> Result<f64> {
    check_delta(delta)?;
    check_rho(rho)?;
    check_interval(s, t)?;
    Ok(delta.powf(1.0 - 1.0 / rho) * constant_m(rho)? * (t - s).powf(1.0 / rho))
}

/// `T^{1-1/ρ} M(ρ) |t-s|^{1/ρ}`, the ρ-variation bound for Brownian motion on `[0, T]`.
pub fn bound_rho_var_bm(horizon: f64, rho: f64, s: f64, t: f64) -> Result<f64> {
    check_rho(rho)?;
    check_interval(s, t)?;
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
    }
    Ok(horizon.powf(1.0 - 1.0 / rho) * constant_m(rho)? * (t - s).powf(1.0 / rho))
}

/// Parameters a [`CovarianceModel`] was built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    Brownian,
    /// `X_δ` for Brownian motion.
    BrownianDifference { delta: f64 },
    Fbm { hurst: f64 },
    /// `ω_δ` for fBm.
    FbmSmoothed { delta: f64, hurst: f64 },
    /// `X_δ` for fBm.
    FbmDifference { delta: f64, hurst: f64 },
    Custom,
}

/// Increment variance `σ²(τ)` of a process with stationary increments.
#[derive(Clone)]
pub struct CovarianceModel {
    label: String,
    kind: ModelKind,
    sigma2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CovarianceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovarianceModel")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .finish()
    }
}

impl CovarianceModel {
    pub fn brownian() -> Self {
        Self {
            label: "bm".into(),
            kind: ModelKind::Brownian,
            sigma2: Arc::new(|u: f64| u.abs()),
        }
    }

    pub fn brownian_difference(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self {
            label: format!("x_delta({delta})"),
            kind: ModelKind::BrownianDifference { delta },
            sigma2: Arc::new(move |u: f64| sigma2_x_delta(u.abs(), delta).unwrap_or(f64::NAN)),
        })
    }

    pub fn fbm(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self {
            label: format!("fbm(H={hurst})"),
            kind: ModelKind::Fbm { hurst },
            sigma2: Arc::new(move |u: f64| u.abs().powf(2.0 * hurst)),
        })
    }

    pub fn fbm_smoothed(delta: f64, hurst: f64) -> Result<Self> {
        cov_i(0.0, delta, hurst)?;
        Ok(Self {
            label: format!("omega_delta({delta},H={hurst})"),
            kind: ModelKind::FbmSmoothed { delta, hurst },
            sigma2: Arc::new(move |u: f64| cov_i(u, delta, hurst).unwrap_or(f64::NAN)),
        })
    }

    pub fn fbm_difference(delta: f64, hurst: f64) -> Result<Self> {
        cov_k(0.0, delta, hurst)?;
        Ok(Self {
            label: format!("x_delta({delta},H={hurst})"),
            kind: ModelKind::FbmDifference { delta, hurst },
            sigma2: Arc::new(move |u: f64| cov_k(u, delta, hurst).unwrap_or(f64::NAN)),
        })
    }

    pub fn custom(label: impl Into<String>, sigma2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            kind: ModelKind::Custom,
            sigma2: Arc::new(sigma2),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn sigma2(&self, tau: f64) -> f64 {
        (self.sigma2)(tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sigma2_examples() {
        assert_eq!(sigma2_x_delta(0.0, 0.5).unwrap(), 0.0);
        assert!(close(sigma2_x_delta(0.25, 0.5).unwrap(), 0.25 - 0.015625 / 0.75, 1e-15));
        assert!(close(sigma2_x_delta(0.25, 0.5).unwrap(), 0.229_166_666_666_666_66, 1e-15));
        assert!(close(sigma2_x_delta(1.0, 0.3).unwrap(), 0.2, 1e-15));
        let d = 0.37;
        let below = sigma2_x_delta(d * (1.0 - 1e-12), d).unwrap();
        assert!(close(below, sigma2_x_delta(d, d).unwrap(), 1e-11));
        assert!(sigma2_x_delta(-0.1, 0.5).is_err());
        assert!(sigma2_x_delta(0.1, 0.0).is_err());
        assert!(sigma2_x_delta(0.1, 1.5).is_err());
    }

    #[test]
    fn cov_i_examples() {
        // H = 1/2, u >= δ: u - δ/3.
        assert!(close(cov_i(1.0, 0.5, 0.5).unwrap(), 0.833_333_333_333_333_3, 1e-14));
        assert!(close(cov_i(0.5, 1.0, 0.5).unwrap(), (3.375 - 2.0 - 0.25 + 0.125) / 6.0, 1e-14));
        assert!(close(cov_i(0.5, 1.0, 0.5).unwrap(), 0.208_333_333_333_333_3, 1e-14));
        for &(d, h) in &[(0.3, 0.2), (1.0, 0.9), (0.05, 0.5)] {
            assert!(cov_i(0.0, d, h).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn cov_j_examples() {
        assert!(close(cov_j(1.0, 0.5, 0.5).unwrap(), 0.75, 1e-14));
        assert!(close(cov_j(0.5, 1.0, 0.5).unwrap(), 0.125, 1e-14));
        assert!(cov_j(0.0, 0.4, 0.3).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cov_k_identity_and_reduction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u: f64 = rng.random_range(0.0..3.0);
            let d: f64 = rng.random_range(0.01..1.0);
            let h: f64 = rng.random_range(0.05..0.95);
            let k = cov_k(u, d, h).unwrap();
            let assembled = cov_i(u, d, h).unwrap() + u.powf(2.0 * h) - 2.0 * cov_j(u, d, h).unwrap();
            assert!((k - assembled).abs() <= 1e-10 * k.abs().max(1e-3), "u={u} d={d} h={h}");
        }
        for &d in &[0.1, 0.25, 0.5, 1.0] {
            for i in 0..=40 {
                let u = i as f64 * 0.05;
                let k = cov_k(u, d, 0.5).unwrap();
                assert!(close(k, sigma2_x_delta(u, d).unwrap(), 1e-12), "u={u} d={d}");
            }
        }
        assert!(cov_k(0.0, 0.5, 0.3).unwrap().abs() < 1e-14);
    }

    #[test]
    fn reflection() {
        for &(u, d, h) in &[(0.3, 0.5, 0.3), (1.2, 0.25, 0.7), (0.01, 1.0, 0.5)] {
            assert_eq!(cov_i(-u, d, h).unwrap(), cov_i(u, d, h).unwrap());
            assert_eq!(cov_j(-u, d, h).unwrap(), cov_j(u, d, h).unwrap());
            assert_eq!(cov_k(-u, d, h).unwrap(), cov_k(u, d, h).unwrap());
        }
    }

    #[test]
    fn constant_m_values() {
        assert_eq!(constant_m(1.0).unwrap(), 5.0);
        let direct = |r: f64| ((2f64.powf(1.0 + r) + 1.0) * 3f64.powf(r - 1.0)).powf(1.0 / r);
        assert!(close(constant_m(1.5).unwrap(), 5.10372, 5e-6));
        assert!(close(constant_m(1.5).unwrap(), direct(1.5), 1e-12));
        assert!(close(constant_m(1.25).unwrap(), direct(1.25), 1e-12));
        assert!(constant_m(0.9).is_err());
    }

    #[test]
    fn bounds() {
        assert!(close(bound_rho_var_x_delta(0.3, 1.0, 0.2, 0.7).unwrap(), 2.5, 1e-14));
        let d = 2f64.powi(-4);
        assert!(close(
            bound_rho_var_x_delta(d, 1.25, 0.0, 1.0).unwrap(),
            d.powf(0.2) * constant_m(1.25).unwrap(),
            1e-14
        ));
        let mut prev = 0.0;
        for i in 1..=20 {
            let v = bound_rho_var_x_delta(i as f64 / 20.0, 1.3, 0.0, 0.5).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(bound_rho_var_x_delta(0.5, 1.2, 1.0, 0.5).is_err());

        assert!(close(bound_rho_var_bm(3.7, 1.0, 0.0, 0.4).unwrap(), 2.0, 1e-14));
        assert!(close(bound_rho_var_bm(1.0, 1.4, 0.1, 0.6).unwrap(), constant_m(1.4).unwrap() * 0.5f64.powf(1.0 / 1.4), 1e-14));
        for &(t_max, rho) in &[(1.0, 1.25), (2.0, 1.5), (0.5, 1.1)] {
            for i in 0..100 {
                let u = t_max * i as f64 / 99.0;
                assert!(u <= f64::powf(t_max, 1.0 - 1.0 / rho) * u.powf(1.0 / rho) + 1e-15);
            }
        }
    }

    #[test]
    fn sigma2_shape_and_growth() {
        for &d in &[0.05, 0.25, 1.0] {
            let h = 1e-3;
            let f = |u: f64| sigma2_x_delta(u, d).unwrap();
            for i in 1..3000 {
                let u = i as f64 * h;
                assert!(f(u + h) >= f(u) - 1e-15);
                assert!(f(u + h) - 2.0 * f(u) + f(u - h) <= 1e-12);
            }
            for &rho in &[1.0, 1.25, 1.5, 1.9] {
                for i in 0..200 {
                    let u = i as f64 * 0.015;
                    assert!(f(u) <= d.powf(1.0 - 1.0 / rho) * u.powf(1.0 / rho) * (1.0 + 1e-12) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn models() {
        let m = CovarianceModel::brownian_difference(0.5).unwrap();
        assert_eq!(m.sigma2(0.0), 0.0);
        assert!(close(m.sigma2(-0.25), m.sigma2(0.25), 0.0));
        assert_eq!(CovarianceModel::brownian().sigma2(0.3), 0.3);
        let k = CovarianceModel::fbm_difference(0.5, 0.5).unwrap();
        assert!(close(k.sigma2(0.3), m.sigma2(0.3), 1e-12));
        assert!(CovarianceModel::fbm(1.2).is_err());
    }
}
