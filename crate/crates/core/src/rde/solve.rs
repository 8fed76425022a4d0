//! Davie-step rough solver, RK4 for the smooth driver, and the cocycle map.

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, VectorPath, Window};
use crate::lift::RoughPathLift;
use crate::smoothing::SmoothedPath;

use super::controlled::ControlledPath;
use super::field::VectorField;

fn check_dims(field: &dyn VectorField, xi: &[f64], m: usize) -> Result<()> {
    if xi.len() != field.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: field.state_dim(),
            got: xi.len(),
        });
    }
    if m != field.noise_dim() {
        return Err(Error::DimensionMismatch {
            expected: field.noise_dim(),
            got: m,
        });
    }
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial value must be finite".into()));
    }
    Ok(())
}

/// `dY = f(Y) d𝛚` on `window`, started from `Y(window.0) = ξ`, by the step
///
/// ```text
/// Y_{k+1} = Y_k + f(Y_k) δω_k + (Df(Y_k) f(Y_k)) : 𝕏(t_k, t_{k+1}).
/// ```
///
/// The result is controlled with `Y' = f(Y)` against the restricted lift.
pub fn solve_rde(field: &dyn VectorField, lift: &RoughPathLift, xi: &[f64], window: Window) -> Result<ControlledPath> {
    let m = lift.dim();
    check_dims(field, xi, m)?;
    lift.grid().check_window(window)?;
    let d = field.state_dim();
    let (start, end) = window;
    let n = end - start + 1;
    let mut ys = Vec::with_capacity(n * d);
    let mut yp = Vec::with_capacity(n * d * m);
    let mut y = xi.to_vec();
    let mut f = vec![0.0; d * m];
    let mut jac = vec![0.0; d * m * d];
    let mut area = vec![0.0; m * m];
    let mut g = vec![0.0; d * m * m];
    for k in start..=end {
        field.eval(&y, &mut f);
        ys.extend_from_slice(&y);
        yp.extend_from_slice(&f);
        if k == end {
            break;
        }
        field.jacobian(&y, &mut jac);
        // g[(i*m + j)*m + l] = Σ_q ∂_q f_ij f_ql
        for ij in 0..d * m {
            for l in 0..m {
                g[ij * m + l] = (0..d).map(|q| jac[ij * d + q] * f[q * m + l]).sum();
            }
        }
        let (xa, xb) = (lift.path().value(k), lift.path().value(k + 1));
        lift.area_into(k, k + 1, &mut area);
        for i in 0..d {
            let mut step = 0.0;
            for j in 0..m {
                step += f[i * m + j] * (xb[j] - xa[j]);
                for l in 0..m {
                    step += g[(i * m + j) * m + l] * area[l * m + j];
                }
            }
            y[i] += step;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: k + 1 });
        }
    }
    let grid = lift.grid().sub_grid(window)?;
    let path = VectorPath::from_parts_unchecked(grid, d, ys);
    ControlledPath::new(path, yp, lift.restrict(window)?)
}

/// `out = f(y) g`.
fn drift(field: &dyn VectorField, y: &[f64], g: &[f64], fbuf: &mut [f64], out: &mut [f64]) {
    let m = g.len();
    field.eval(y, fbuf);
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..m).map(|j| fbuf[i * m + j] * g[j]).sum();
    }
}

/// `dY_δ = f(Y_δ) ω'_δ(t) dt` on `window` of the smoothed grid, by classical
/// RK4 with `substeps` steps per cell. `ω'_δ` is linear on each cell.
pub fn solve_ode_rk4(
    field: &dyn VectorField,
    smoothed: &SmoothedPath,
    xi: &[f64],
    window: Window,
    substeps: usize,
) -> Result<VectorPath> {
    let deriv = smoothed.derivative();
    let m = deriv.dim();
    check_dims(field, xi, m)?;
    deriv.grid().check_window(window)?;
    if substeps == 0 {
        return Err(Error::InvalidParameter("RK4 needs at least one substep per cell".into()));
    }
    let d = field.state_dim();
    let (start, end) = window;
    let hs = deriv.grid().mesh() / substeps as f64;
    let mut ys = Vec::with_capacity((end - start + 1) * d);
    let mut y = xi.to_vec();
    let mut fbuf = vec![0.0; d * m];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut g = vec![0.0; m];
    ys.extend_from_slice(&y);
    for k in start..end {
        let (g0, g1) = (deriv.value(k), deriv.value(k + 1));
        let at = |theta: f64, g: &mut [f64]| {
            for j in 0..m {
                g[j] = g0[j] + theta * (g1[j] - g0[j]);
            }
        };
        for s in 0..substeps {
            let theta = s as f64 / substeps as f64;
            let half = (s as f64 + 0.5) / substeps as f64;
            let next = (s + 1) as f64 / substeps as f64;
            at(theta, &mut g);
            drift(field, &y, &g, &mut fbuf, &mut k1);
            at(half, &mut g);
            for i in 0..d {
                tmp[i] = y[i] + 0.5 * hs * k1[i];
            }
            drift(field, &tmp, &g, &mut fbuf, &mut k2);
            for i in 0..d {
                tmp[i] = y[i] + 0.5 * hs * k2[i];
            }
            drift(field, &tmp, &g, &mut fbuf, &mut k3);
            at(next, &mut g);
            for i in 0..d {
                tmp[i] = y[i] + hs * k3[i];
            }
            drift(field, &tmp, &g, &mut fbuf, &mut k4);
            for i in 0..d {
                y[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: k + 1 });
        }
        ys.extend_from_slice(&y);
    }
    let grid = deriv.grid().sub_grid(window)?;
    Ok(VectorPath::from_parts_unchecked(grid, d, ys))
}

/// A driving signal together with the solver it calls for.
#[derive(Clone, Debug)]
pub enum Driver {
    /// Rough lift, solved with [`solve_rde`].
    Rough(RoughPathLift),
    /// Smoothed path, solved with [`solve_ode_rk4`].
    Smooth { path: SmoothedPath, substeps: usize },
}

impl Driver {
    pub fn grid(&self) -> &TimeGrid {
        match self {
            Driver::Rough(lift) => lift.grid(),
            Driver::Smooth { path, .. } => path.path().grid(),
        }
    }

    /// `θ_τ` applied to the driver.
    pub fn shift(&self, tau_cells: usize) -> Result<Driver> {
        Ok(match self {
            Driver::Rough(lift) => Driver::Rough(crate::lift::shift_lift(lift, tau_cells)?),
            Driver::Smooth { path, substeps } => Driver::Smooth {
                path: path.shift(tau_cells)?,
                substeps: *substeps,
            },
        })
    }

    /// Trajectory on `window` started from `ξ`.
    pub fn solve(&self, field: &dyn VectorField, xi: &[f64], window: Window) -> Result<VectorPath> {
        match self {
            Driver::Rough(lift) => Ok(solve_rde(field, lift, xi, window)?.path().clone()),
            Driver::Smooth { path, substeps } => solve_ode_rk4(field, path, xi, window, *substeps),
        }
    }
}

/// `φ(t, 𝛚, ξ)` with `t` given by its grid index; the flow starts at `t = 0`.
pub fn cocycle_phi(field: &dyn VectorField, t_index: usize, driver: &Driver, xi: &[f64]) -> Result<Vec<f64>> {
    let zero = driver.grid().zero_index().ok_or(Error::ZeroNotOnGrid)?;
    if t_index < zero {
        return Err(Error::InvalidWindow {
            start: zero,
            end: t_index,
            n_points: driver.grid().n_points(),
        });
    }
    if t_index == zero {
        return Ok(xi.to_vec());
    }
    let y = driver.solve(field, xi, (zero, t_index))?;
    Ok(y.value(y.n_points() - 1).to_vec())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `|φ(t+τ, 𝛚, ξ) - φ(t, θ_τ𝛚, φ(τ, 𝛚, ξ))|` for grid offsets `τ` and `t`.
pub fn cocycle_defect(field: &dyn VectorField, driver: &Driver, xi: &[f64], tau: usize, t: usize) -> Result<f64> {
    let zero = driver.grid().zero_index().ok_or(Error::ZeroNotOnGrid)?;
    let direct = cocycle_phi(field, zero + tau + t, driver, xi)?;
    let mid = cocycle_phi(field, zero + tau, driver, xi)?;
    let chained = cocycle_phi(field, zero + t, &driver.shift(tau)?, &mid)?;
    Ok(euclid(&direct, &chained))
}

/// Largest cocycle defect over all grid pairs `(τ, t)` with `τ + t` inside
/// the forward part of the grid; one solve per `τ`.
pub fn max_cocycle_defect(field: &dyn VectorField, driver: &Driver, xi: &[f64]) -> Result<f64> {
    let zero = driver.grid().zero_index().ok_or(Error::ZeroNotOnGrid)?;
    let last = driver.grid().n_cells();
    let full = driver.solve(field, xi, (zero, last))?;
    let mut worst: f64 = 0.0;
    // τ = last - zero leaves only t = 0, where the defect vanishes.
    for tau in 0..last - zero {
        let shifted = driver.shift(tau)?;
        let chained = shifted.solve(field, full.value(tau), (zero, last - tau))?;
        for t in 0..chained.n_points() {
            worst = worst.max(euclid(full.value(tau + t), chained.value(t)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{bm_reference_lift, sample_bm};
    use crate::grid::TimeGrid;
    use crate::rde::field::{ConstantField, LinearField, TrigField};
    use crate::rng::RngStream;
    use crate::smoothing::{smooth, SmoothingParams};

    fn bm(seed: u64, m: usize, level: u32, horizon: f64, extra: f64) -> VectorPath {
        let h = 2f64.powi(-(level as i32));
        let n = ((horizon + extra) / h).round() as usize;
        let g = TimeGrid::with_mesh(0.0, h, n).unwrap();
        sample_bm(&g, m, &RngStream::new(seed, 0)).unwrap()
    }

    fn smoothed(seed: u64, m: usize, level: u32, delta: f64) -> SmoothedPath {
        let omega = bm(seed, m, level, 1.0, delta);
        let h = omega.grid().mesh();
        let p = SmoothingParams::new(delta, h).unwrap();
        smooth(&omega, &p, (0, 1 << level)).unwrap()
    }

    #[test]
    fn constant_field_is_exact() {
        let c = ConstantField::new(2, 2, vec![1.0, 0.5, -0.25, 2.0]).unwrap();
        let lift = bm_reference_lift(&bm(1, 2, 10, 1.0, 0.0));
        let xi = [0.3, -1.0];
        let y = solve_rde(&c, &lift, &xi, (0, 1024)).unwrap();
        let sm = smoothed(1, 2, 10, 0.125);
        let z = solve_ode_rk4(&c, &sm, &xi, (0, 1024), 1).unwrap();
        for k in 0..=1024 {
            let w = lift.path().increment(0, k);
            let want = [xi[0] + w[0] + 0.5 * w[1], xi[1] - 0.25 * w[0] + 2.0 * w[1]];
            let wd = sm.path().value(k);
            let want_d = [xi[0] + wd[0] + 0.5 * wd[1], xi[1] - 0.25 * wd[0] + 2.0 * wd[1]];
            for i in 0..2 {
                assert!((y.value(k)[i] - want[i]).abs() <= 1e-12);
                assert!((z.value(k)[i] - want_d[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn derivative_is_field_along_solution() {
        let lift = bm_reference_lift(&bm(2, 2, 8, 1.0, 0.0));
        let y = solve_rde(&TrigField, &lift, &[0.1, 0.2], (10, 200)).unwrap();
        let mut f = [0.0; 4];
        for k in 0..y.path().n_points() {
            TrigField.eval(y.value(k), &mut f);
            for (a, b) in y.derivative(k).iter().zip(&f) {
                assert!((a - b).abs() <= 4.0 * f64::EPSILON);
            }
        }
        assert_eq!(y.value(0), &[0.1, 0.2]);
    }

    #[test]
    fn linear_field_matches_exponential() {
        let a = 0.7;
        let xi = [1.3];
        let sm = smoothed(3, 1, 12, 0.0625);
        let f = LinearField::scalar(a);
        let y = solve_rde(&f, sm.lift(), &xi, (0, 4096)).unwrap();
        let z = solve_ode_rk4(&f, &sm, &xi, (0, 4096), 1).unwrap();
        for k in 0..=4096 {
            let exact = xi[0] * (a * sm.path().value(k)[0]).exp();
            assert!(((y.value(k)[0] - exact) / exact).abs() <= 1e-3);
            assert!((z.value(k)[0] - exact).abs() <= 1e-8);
        }
    }

    #[test]
    fn rough_solver_agrees_with_rk4_on_smooth_lift() {
        for (seed, delta) in [(4, 0.0625), (5, 0.25)] {
            let sm = smoothed(seed, 2, 10, delta);
            let xi = [0.4, -0.7];
            let y = solve_rde(&TrigField, sm.lift(), &xi, (0, 1024)).unwrap();
            let z = solve_ode_rk4(&TrigField, &sm, &xi, (0, 1024), 4).unwrap();
            let sup = (0..=1024).map(|k| euclid(y.value(k), z.value(k))).fold(0.0, f64::max);
            assert!(sup <= 10.0 / 1024.0, "δ={delta}: {sup}");
        }
    }

    #[test]
    fn rk4_substep_convergence() {
        let sm = smoothed(6, 2, 8, 0.0625);
        let xi = [0.0, 1.0];
        let reference = solve_ode_rk4(&TrigField, &sm, &xi, (0, 256), 64).unwrap();
        let err = |s: usize| {
            let y = solve_ode_rk4(&TrigField, &sm, &xi, (0, 256), s).unwrap();
            (0..=256).map(|k| euclid(y.value(k), reference.value(k))).fold(0.0, f64::max)
        };
        let (e1, e2, e4) = (err(1), err(2), err(4));
        assert!(e1 / e2 >= 4.0 && e2 / e4 >= 4.0, "{e1} {e2} {e4}");
    }

    #[test]
    fn divergence_is_reported() {
        let lift = bm_reference_lift(&bm(7, 1, 6, 1.0, 0.0));
        let err = solve_rde(&LinearField::scalar(1e200), &lift, &[1.0], (0, 64)).unwrap_err();
        assert!(matches!(err, Error::Divergence { step } if step >= 1));
    }

    #[test]
    fn dimension_errors() {
        let lift = bm_reference_lift(&bm(8, 2, 4, 1.0, 0.0));
        assert!(solve_rde(&TrigField, &lift, &[0.0], (0, 16)).is_err());
        assert!(solve_rde(&LinearField::scalar(1.0), &lift, &[0.0], (0, 16)).is_err());
        assert!(solve_rde(&TrigField, &lift, &[0.0, f64::NAN], (0, 16)).is_err());
        let sm = smoothed(8, 2, 6, 0.25);
        assert!(solve_ode_rk4(&TrigField, &sm, &[0.0, 0.0], (0, 64), 0).is_err());
    }

    #[test]
    fn cocycle_rough_solver() {
        let lift = bm_reference_lift(&bm(9, 2, 7, 1.0, 0.0));
        let driver = Driver::Rough(lift);
        let xi = [0.5, -0.5];
        assert_eq!(cocycle_phi(&TrigField, 0, &driver, &xi).unwrap(), xi.to_vec());
        assert_eq!(cocycle_defect(&TrigField, &driver, &xi, 0, 100).unwrap(), 0.0);
        assert!(cocycle_defect(&TrigField, &driver, &xi, 37, 60).unwrap() <= 1e-10);
        assert!(max_cocycle_defect(&TrigField, &driver, &xi).unwrap() <= 1e-10);
    }

    #[test]
    fn cocycle_smooth_solver() {
        let sm = smoothed(10, 2, 7, 0.125);
        let driver = Driver::Smooth { path: sm, substeps: 1 };
        let d = max_cocycle_defect(&TrigField, &driver, &[0.2, 0.1]).unwrap();
        assert!(d <= 10.0 / 128.0, "{d}");
    }

    #[test]
    fn chained_solves_agree() {
        let lift = bm_reference_lift(&bm(11, 2, 8, 1.0, 0.0));
        let xi = [0.0, 0.3];
        let whole = solve_rde(&TrigField, &lift, &xi, (0, 256)).unwrap();
        let first = solve_rde(&TrigField, &lift, &xi, (0, 90)).unwrap();
        let second = solve_rde(&TrigField, &lift, first.value(90), (90, 256)).unwrap();
        assert!(euclid(whole.value(256), second.value(166)) <= 1e-10);
    }
}
