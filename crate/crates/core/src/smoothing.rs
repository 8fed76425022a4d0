//! The stationary smooth approximation
//!
//! ```text
//! ω_δ(t) = ∫_0^t (ω(r+δ) - ω(r)) / δ dr
//! ```
//!
//! of a grid path, its derivative, its area and the difference `X_δ = ω_δ - ω`.
//!
//! With `δ` a whole number of cells the integrand is piecewise linear, `ω_δ`
//! piecewise quadratic and the area integrand piecewise cubic, so every
//! quantity here is computed exactly (up to rounding) cell by cell.

use crate::error::{Error, Result};
use crate::grid::{PrefixIntegral, VectorPath, Window};
use crate::lift::{shift_lift, AreaField, RoughPathLift};

/// Smoothing width `δ = delta_cells · mesh`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingParams {
    delta_cells: usize,
    mesh: f64,
}

impl SmoothingParams {
    pub fn from_cells(delta_cells: usize, mesh: f64) -> Result<Self> {
        if delta_cells == 0 {
            return Err(Error::InvalidParameter("δ must span at least one cell".into()));
        }
        if !(mesh > 0.0) {
            return Err(Error::InvalidParameter(format!("mesh {mesh} must be positive")));
        }
        let delta = delta_cells as f64 * mesh;
        if delta > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("δ = {delta} exceeds 1")));
        }
        Ok(Self { delta_cells, mesh })
    }

    /// `δ`, which must be an integer multiple of `mesh`.
    pub fn new(delta: f64, mesh: f64) -> Result<Self> {
        let k = (delta / mesh).round();
        if !(k >= 1.0) || (k * mesh - delta).abs() > 1e-9 * mesh {
            return Err(Error::InvalidParameter(format!(
                "δ = {delta} is not a positive multiple of the mesh {mesh}"
            )));
        }
        Self::from_cells(k as usize, mesh)
    }

    pub fn delta(&self) -> f64 {
        self.delta_cells as f64 * self.mesh
    }

    pub fn delta_cells(&self) -> usize {
        self.delta_cells
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }
}

fn check_source(omega: &VectorPath, params: &SmoothingParams, window: Window) -> Result<usize> {
    let grid = omega.grid();
    if (grid.mesh() - params.mesh).abs() > 1e-12 * params.mesh {
        return Err(Error::GridMismatch(format!(
            "path mesh {} differs from smoothing mesh {}",
            grid.mesh(),
            params.mesh
        )));
    }
    grid.check_window(window)?;
    let (start, end) = window;
    let zero = grid.zero_index().ok_or(Error::ZeroNotOnGrid)?;
    if !(start..=end).contains(&zero) {
        return Err(Error::InvalidParameter("window must contain t = 0".into()));
    }
    if end + params.delta_cells > grid.n_cells() {
        return Err(Error::InvalidParameter(format!(
            "source path must extend δ = {} beyond the window end",
            params.delta()
        )));
    }
    Ok(zero)
}

/// Integrand `(ω(t_k + δ) - ω(t_k)) / δ` at every window point, row-major.
fn integrand(omega: &VectorPath, params: &SmoothingParams, (start, end): Window) -> Vec<f64> {
    let m = omega.dim();
    let k_delta = params.delta_cells;
    let delta = params.delta();
    let mut g = Vec::with_capacity((end - start + 1) * m);
    for k in start..=end {
        let (a, b) = (omega.value(k), omega.value(k + k_delta));
        g.extend(a.iter().zip(b).map(|(x, y)| (y - x) / delta));
    }
    g
}

/// `ω_δ` on the window grid; `ω_δ(0) = 0`, oriented integral for `t < 0`.
pub fn smooth_path(omega: &VectorPath, params: &SmoothingParams, window: Window) -> Result<VectorPath> {
    let zero = check_source(omega, params, window)?;
    let g = integrand(omega, params, window);
    Ok(integrate_trapezoid(omega, &g, window, zero))
}

fn integrate_trapezoid(omega: &VectorPath, g: &[f64], window: Window, zero: usize) -> VectorPath {
    let m = omega.dim();
    let (start, end) = window;
    let len = end - start + 1;
    let h = omega.grid().mesh();
    let z = zero - start;
    let mut values = vec![0.0; len * m];
    for j in z + 1..len {
        for i in 0..m {
            values[j * m + i] = values[(j - 1) * m + i] + 0.5 * h * (g[(j - 1) * m + i] + g[j * m + i]);
        }
    }
    for j in (0..z).rev() {
        for i in 0..m {
            values[j * m + i] = values[(j + 1) * m + i] - 0.5 * h * (g[j * m + i] + g[(j + 1) * m + i]);
        }
    }
    let grid = omega.grid().sub_grid(window).expect("window checked");
    VectorPath::from_parts_unchecked(grid, m, values)
}

/// `ω'_δ(t) = (ω(t+δ) - ω(t)) / δ` at a grid index.
pub fn smooth_derivative(omega: &VectorPath, params: &SmoothingParams, t_index: usize) -> Result<Vec<f64>> {
    let n = omega.grid().n_cells();
    if t_index + params.delta_cells > n {
        return Err(Error::InvalidWindow {
            start: t_index,
            end: t_index + params.delta_cells,
            n_points: n + 1,
        });
    }
    let delta = params.delta();
    Ok(omega.increment(t_index, t_index + params.delta_cells).iter().map(|d| d / delta).collect())
}

/// Cell area of the piecewise-quadratic `ω_δ` with derivative `a + b·s` on `[0, h]`:
/// `∫_0^h (a s + b s²/2) ⊗ (a + b s) ds`.
fn quadratic_cell_area(a: &[f64], b: &[f64], h: f64, out: &mut [f64]) {
    let m = a.len();
    let (h2, h3, h4) = (h * h, h * h * h, h * h * h * h);
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = a[i] * a[j] * h2 / 2.0 + a[i] * b[j] * h3 / 3.0 + b[i] * a[j] * h3 / 6.0 + b[i] * b[j] * h4 / 8.0;
        }
    }
}

/// `𝕏_δ(s,t) = ∫_s^t (ω_δ(r) - ω_δ(s)) ⊗ ω'_δ(r) dr` as a cumulative area on
/// the window grid.
pub fn smooth_area(omega: &VectorPath, params: &SmoothingParams, window: Window) -> Result<AreaField> {
    Ok(smooth(omega, params, window)?.lift.area_field().clone())
}

/// `ω_δ`, its exact area and its derivative, sharing the window grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothedPath {
    params: SmoothingParams,
    lift: RoughPathLift,
    derivative: VectorPath,
}

impl SmoothedPath {
    pub fn params(&self) -> &SmoothingParams {
        &self.params
    }

    pub fn path(&self) -> &VectorPath {
        self.lift.path()
    }

    pub fn lift(&self) -> &RoughPathLift {
        &self.lift
    }

    pub fn into_lift(self) -> RoughPathLift {
        self.lift
    }

    /// `ω'_δ` at the grid points; linear in between.
    pub fn derivative(&self) -> &VectorPath {
        &self.derivative
    }

    /// `θ_τ(ω_δ)` together with its area and derivative.
    pub fn shift(&self, tau_cells: usize) -> Result<Self> {
        let lift = shift_lift(&self.lift, tau_cells)?;
        let m = self.derivative.dim();
        let n = lift.grid().n_points();
        let values = self.derivative.values()[tau_cells * m..(tau_cells + n) * m].to_vec();
        let derivative = VectorPath::from_parts_unchecked(lift.grid().clone(), m, values);
        Ok(Self {
            params: self.params,
            lift,
            derivative,
        })
    }
}

/// Builds `ω_δ` with its area and derivative on `window`.
pub fn smooth(omega: &VectorPath, params: &SmoothingParams, window: Window) -> Result<SmoothedPath> {
    let zero = check_source(omega, params, window)?;
    let g = integrand(omega, params, window);
    let path = integrate_trapezoid(omega, &g, window, zero);
    let m = omega.dim();
    let h = omega.grid().mesh();
    let mut b = vec![0.0; m];
    let area = AreaField::accumulate(&path, |k, cell| {
        let a = &g[k * m..(k + 1) * m];
        let next = &g[(k + 1) * m..(k + 2) * m];
        for i in 0..m {
            b[i] = (next[i] - a[i]) / h;
        }
        quadratic_cell_area(a, &b, h, cell);
    });
    let derivative = VectorPath::from_parts_unchecked(path.grid().clone(), m, g);
    let lift = RoughPathLift::new(path, area, true)?;
    Ok(SmoothedPath {
        params: *params,
        lift,
        derivative,
    })
}

/// `X_δ = ω_δ - ω` on a shared grid.
pub fn diff_process(omega: &VectorPath, omega_delta: &VectorPath) -> Result<VectorPath> {
    omega_delta.difference(omega)
}

/// Geometric lift of `X_δ = ω_δ - ω` with `ω` read as its piecewise-linear
/// interpolant; on each cell `X_δ` is quadratic, so the area is exact.
pub fn diff_lift(omega: &VectorPath, params: &SmoothingParams, window: Window) -> Result<RoughPathLift> {
    let zero = check_source(omega, params, window)?;
    let g = integrand(omega, params, window);
    let smooth_path = integrate_trapezoid(omega, &g, window, zero);
    let base = omega.restrict(window)?;
    let path = smooth_path.difference(&base)?;
    let m = omega.dim();
    let h = omega.grid().mesh();
    let (mut a, mut b) = (vec![0.0; m], vec![0.0; m]);
    let area = AreaField::accumulate(&path, |k, cell| {
        let (w0, w1) = (base.value(k), base.value(k + 1));
        for i in 0..m {
            a[i] = g[k * m + i] - (w1[i] - w0[i]) / h;
            b[i] = (g[(k + 1) * m + i] - g[k * m + i]) / h;
        }
        quadratic_cell_area(&a, &b, h, cell);
    });
    RoughPathLift::new(path, area, true)
}

/// Exact `ω_δ(t)` of the interpolant for arbitrary `δ > 0` and off-grid `t`:
/// `ω_δ(t) = (∫_t^{t+δ} ω - ∫_0^δ ω) / δ`.
pub struct ExactSmoother<'a> {
    prefix: PrefixIntegral<'a>,
}

impl<'a> ExactSmoother<'a> {
    pub fn new(omega: &'a VectorPath) -> Result<Self> {
        omega.grid().zero_index().ok_or(Error::ZeroNotOnGrid)?;
        Ok(Self {
            prefix: omega.prefix_integral(),
        })
    }

    pub fn value(&self, delta: f64, t: f64) -> Result<Vec<f64>> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!("δ = {delta} must be positive")));
        }
        let moving = self.prefix.between(t, t + delta)?;
        let base = self.prefix.between(0.0, delta)?;
        Ok(moving.iter().zip(&base).map(|(a, b)| (a - b) / delta).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::sample_bm;
    use crate::grid::{make_grid, wiener_shift, TimeGrid};
    use crate::lift::{lift_smooth, rough_metric, symmetry_defect};
    use crate::rng::RngStream;

    fn bm_source(seed: u64, cells_left: usize, cells_right: usize, h: f64) -> VectorPath {
        let g = TimeGrid::with_mesh(-(cells_left as f64) * h, h, cells_left + cells_right).unwrap();
        sample_bm(&g, 2, &RngStream::new(seed, 0)).unwrap()
    }

    #[test]
    fn params_validation() {
        let h = 1.0 / 64.0;
        assert_eq!(SmoothingParams::new(0.25, h).unwrap().delta_cells(), 16);
        assert!(SmoothingParams::new(0.1, h).is_err());
        assert!(SmoothingParams::new(0.0, h).is_err());
        assert!(SmoothingParams::from_cells(128, h).is_err());
    }

    #[test]
    fn linear_path_is_fixed() {
        let g = make_grid(-1.0, 2.0, 48).unwrap();
        let c = [1.5, -0.5];
        let omega = VectorPath::from_fn(g.clone(), 2, |t| vec![c[0] * t, c[1] * t]).unwrap();
        let p = SmoothingParams::from_cells(8, g.mesh()).unwrap();
        let window = (0, 32); // [-1, 1]
        let sm = smooth_path(&omega, &p, window).unwrap();
        let restricted = omega.restrict(window).unwrap();
        for k in 0..sm.n_points() {
            for i in 0..2 {
                assert!((sm.value(k)[i] - restricted.value(k)[i]).abs() < 1e-14);
            }
        }
        assert_eq!(sm.value(16), &[0.0, 0.0]);
        let x = diff_process(&restricted, &sm).unwrap();
        assert!(x.values().iter().all(|v| v.abs() < 1e-14));
        assert_eq!(smooth_derivative(&omega, &p, 3).unwrap(), vec![1.5, -0.5]);

        // 𝕏_δ(s,t) = ½ (t-s)² c ⊗ c.
        let area = smooth(&omega, &p, window).unwrap();
        let a = area.lift().area(4, 29).unwrap();
        let len = g.time(29) - g.time(4);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)] - 0.5 * len * len * c[i] * c[j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_short_sources() {
        let omega = bm_source(1, 0, 64, 1.0 / 64.0);
        let p = SmoothingParams::from_cells(8, 1.0 / 64.0).unwrap();
        assert!(smooth_path(&omega, &p, (0, 60)).is_err());
        assert!(smooth_path(&omega, &p, (0, 56)).is_ok());
        let wrong_mesh = SmoothingParams::from_cells(8, 1.0 / 32.0).unwrap();
        assert!(smooth_path(&omega, &wrong_mesh, (0, 20)).is_err());
        let shifted = bm_source(1, 8, 64, 1.0 / 64.0);
        assert!(smooth_path(&shifted, &p, (10, 40)).is_err());
        assert!(smooth_derivative(&omega, &p, 57).is_err());
    }

    #[test]
    fn derivative_integrates_back() {
        let h = 1.0 / 128.0;
        let omega = bm_source(3, 32, 160, h);
        let p = SmoothingParams::from_cells(4, h).unwrap();
        let window = (0, 180);
        let sm = smooth_path(&omega, &p, window).unwrap();
        let z = 32;
        let mut acc = [0.0; 2];
        for k in z..180 {
            let a = smooth_derivative(&omega, &p, k).unwrap();
            let b = smooth_derivative(&omega, &p, k + 1).unwrap();
            for i in 0..2 {
                acc[i] += 0.5 * h * (a[i] + b[i]);
                assert!((acc[i] - sm.value(k + 1)[i]).abs() < 1e-12);
            }
        }

        // δ = mesh: derivative is the interpolant's slope on each cell.
        let p1 = SmoothingParams::from_cells(1, h).unwrap();
        let d = smooth_derivative(&omega, &p1, 40).unwrap();
        let slope = omega.increment(40, 41);
        assert!((d[0] - slope[0] / h).abs() < 1e-10);
    }

    #[test]
    fn area_is_geometric_and_chen_exact() {
        let h = 1.0 / 256.0;
        for seed in 0..5 {
            let omega = bm_source(seed, 64, 320, h);
            let p = SmoothingParams::from_cells(16, h).unwrap();
            let sm = smooth(&omega, &p, (0, 300)).unwrap();
            let w = sm.lift().grid().full_window();
            assert!(symmetry_defect(sm.lift(), (0, 120)).unwrap() <= 1e-12);
            // 𝕏^{ij} + 𝕏^{ji} = δω^i_δ δω^j_δ
            for &(s, t) in &[(0, 300), (10, 250), (64, 65)] {
                let a = sm.lift().area(s, t).unwrap();
                let d = sm.path().increment(s, t);
                assert!((a[(0, 1)] + a[(1, 0)] - d[0] * d[1]).abs() < 1e-12);
            }
            let _ = w;
        }
    }

    #[test]
    fn simpson_cross_check() {
        // Simpson on the cubic cell integrand reproduces the closed form.
        let (a, b, h) = ([0.3, -1.1], [2.0, 0.7], 0.01);
        let mut closed = [0.0; 4];
        quadratic_cell_area(&a, &b, h, &mut closed);
        let f = |s: f64, i: usize, j: usize| (a[i] * s + b[i] * s * s / 2.0) * (a[j] + b[j] * s);
        for i in 0..2 {
            for j in 0..2 {
                let simpson = h / 6.0 * (f(0.0, i, j) + 4.0 * f(h / 2.0, i, j) + f(h, i, j));
                assert!((simpson - closed[i * 2 + j]).abs() < 1e-18);
            }
        }
    }

    #[test]
    fn degenerate_width_matches_piecewise_linear_lift() {
        // δ = mesh: ω_δ integrand is the slope of the interpolant of the
        // shifted path, so compare against lift_smooth of ω_δ on a finer grid.
        let h = 1.0 / 64.0;
        let omega = bm_source(9, 0, 70, h);
        let p = SmoothingParams::from_cells(1, h).unwrap();
        let sm = smooth(&omega, &p, (0, 64)).unwrap();
        // Evaluate ω_δ on a 16x refined grid from the exact quadratic pieces.
        let refine = 16;
        let fine = make_grid(0.0, 1.0, 64 * refine).unwrap();
        let g = sm.derivative();
        let fine_path = VectorPath::from_fn(fine.clone(), 2, |t| {
            let k = ((t / h).floor() as usize).min(63);
            let s = t - k as f64 * h;
            (0..2)
                .map(|i| {
                    let a = g.value(k)[i];
                    let b = (g.value(k + 1)[i] - a) / h;
                    sm.path().value(k)[i] + a * s + b * s * s / 2.0
                })
                .collect()
        })
        .unwrap();
        let fine_lift = lift_smooth(&fine_path);
        let coarse = sm.lift().area(0, 64).unwrap();
        let refined = fine_lift.area(0, 64 * refine).unwrap();
        // Piecewise-linear lift of a quadratic converges at O(h_fine²).
        assert!((coarse - refined).amax() < 1e-3);
    }

    #[test]
    fn smoothing_commutes_with_shift() {
        let h = 1.0 / 128.0;
        let omega = bm_source(21, 0, 160, h);
        let p = SmoothingParams::from_cells(16, h).unwrap();
        let window = (0, 128);
        let sm = smooth(&omega, &p, window).unwrap();
        for tau in [0usize, 1, 17, 64] {
            let shifted = sm.shift(tau).unwrap();
            let resmoothed = smooth(&wiener_shift(&omega, tau).unwrap(), &p, (0, 128 - tau)).unwrap();
            let d = rough_metric(shifted.lift(), resmoothed.lift(), 0.4, (0, 128 - tau)).unwrap();
            assert!(d <= 1e-10, "τ={tau}: {d}");
            for (x, y) in shifted.derivative().values().iter().zip(resmoothed.derivative().values()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn difference_lift_is_exact() {
        // Linear ω gives X_δ ≡ 0; for BM the lift is geometric and matches
        // diff_process on the grid.
        let g = make_grid(0.0, 2.0, 64).unwrap();
        let lin = VectorPath::from_fn(g.clone(), 2, |t| vec![t, -2.0 * t]).unwrap();
        let p = SmoothingParams::from_cells(4, g.mesh()).unwrap();
        let x = diff_lift(&lin, &p, (0, 40)).unwrap();
        assert!(x.area(0, 40).unwrap().amax() < 1e-13);

        let omega = bm_source(31, 0, 300, 1.0 / 128.0);
        let p = SmoothingParams::from_cells(8, 1.0 / 128.0).unwrap();
        let x = diff_lift(&omega, &p, (0, 256)).unwrap();
        let sm = smooth_path(&omega, &p, (0, 256)).unwrap();
        let d = diff_process(&omega.restrict((0, 256)).unwrap(), &sm).unwrap();
        assert_eq!(x.path(), &d);
        assert!(symmetry_defect(&x, (0, 128)).unwrap() <= 1e-12);
    }

    #[test]
    fn exact_smoother_agrees_on_grid() {
        let h = 1.0 / 64.0;
        let omega = bm_source(5, 16, 100, h);
        let p = SmoothingParams::from_cells(8, h).unwrap();
        let sm = smooth_path(&omega, &p, (0, 90)).unwrap();
        let ex = ExactSmoother::new(&omega).unwrap();
        for k in [0usize, 7, 16, 50, 90] {
            let t = sm.grid().time(k);
            let v = ex.value(p.delta(), t).unwrap();
            for (x, y) in v.iter().zip(sm.value(k)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let c = [0.4];
        let lin = VectorPath::from_fn(make_grid(0.0, 2.0, 20).unwrap(), 1, |t| vec![c[0] * t]).unwrap();
        let ex = ExactSmoother::new(&lin).unwrap();
        assert!((ex.value(0.33, 0.77).unwrap()[0] - 0.4 * 0.77).abs() < 1e-14);
    }
}
