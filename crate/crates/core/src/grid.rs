//! Uniform time grids and grid-sampled vector paths.
//!
//! A [`VectorPath`] is always read as the piecewise-linear interpolant of its
//! grid values. Hölder-type seminorms are taken over grid-point pairs only,
//! which lower-bounds the interpolant's sup and converges under refinement.

use std::io::Write;

use crate::csv::{fmt_float, write_line};
use crate::error::{Error, Result};

/// Inclusive pair of grid indices `(start, end)`.
pub type Window = (usize, usize);

/// Uniform grid `t_k = t_start + k·h`, `k = 0..=n_cells`.
///
/// If `0` lies in `[t_start, t_end]` it must coincide with a grid point; times
/// are then computed as `(k - zero)·h` so the origin is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    mesh: f64,
    n_cells: usize,
    zero: Option<usize>,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_cells: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if n_cells == 0 {
            return Err(Error::InvalidGrid("zero cells".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end ({t_end}) must exceed t_start ({t_start})"
            )));
        }
        Self::with_mesh(t_start, (t_end - t_start) / n_cells as f64, n_cells)
    }

    /// Grid with a prescribed mesh. Preferred for dyadic meshes, which are exact.
    pub fn with_mesh(t_start: f64, mesh: f64, n_cells: usize) -> Result<Self> {
        if !t_start.is_finite() || !mesh.is_finite() || mesh <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "bad start {t_start} or mesh {mesh}"
            )));
        }
        if n_cells == 0 {
            return Err(Error::InvalidGrid("zero cells".into()));
        }
        let t_end = t_start + n_cells as f64 * mesh;
        let zero = if t_start <= 0.0 && 0.0 <= t_end {
            let k = (-t_start / mesh).round();
            if (t_start + k * mesh).abs() > 1e-9 * mesh {
                return Err(Error::ZeroNotOnGrid);
            }
            Some(k as usize)
        } else {
            None
        };
        Ok(Self {
            t_start,
            mesh,
            n_cells,
            zero,
        })
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_points(&self) -> usize {
        self.n_cells + 1
    }

    pub fn t_start(&self) -> f64 {
        self.time(0)
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n_cells)
    }

    /// Index of `t = 0`, if the grid covers the origin.
    pub fn zero_index(&self) -> Option<usize> {
        self.zero
    }

    pub fn time(&self, k: usize) -> f64 {
        match self.zero {
            Some(z) => (k as f64 - z as f64) * self.mesh,
            None => self.t_start + k as f64 * self.mesh,
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points()).map(move |k| self.time(k))
    }

    /// Grid index of `t`, if `t` is a grid point (up to `1e-9·h`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = ((t - self.t_start()) / self.mesh).round();
        if k < 0.0 || k > self.n_cells as f64 {
            return None;
        }
        let k = k as usize;
        ((self.time(k) - t).abs() <= 1e-9 * self.mesh).then_some(k)
    }

    pub fn check_window(&self, (start, end): Window) -> Result<()> {
        if start >= end || end > self.n_cells {
            return Err(Error::InvalidWindow {
                start,
                end,
                n_points: self.n_points(),
            });
        }
        Ok(())
    }

    pub fn full_window(&self) -> Window {
        (0, self.n_cells)
    }

    /// The grid restricted to `[t_start, t_end]` of the window.
    pub fn sub_grid(&self, window: Window) -> Result<Self> {
        self.check_window(window)?;
        let (start, end) = window;
        Ok(Self {
            t_start: self.time(start),
            mesh: self.mesh,
            n_cells: end - start,
            zero: self.zero.and_then(|z| (start..=end).contains(&z).then(|| z - start)),
        })
    }

    /// True when both grids have the same points.
    pub fn same_points(&self, other: &Self) -> bool {
        self.n_cells == other.n_cells
            && self.mesh == other.mesh
            && self.zero == other.zero
            && (self.t_start() - other.t_start()).abs() <= 1e-12 * self.mesh
    }
}

/// Convenience constructor mirroring [`TimeGrid::new`].
pub fn make_grid(t_start: f64, t_end: f64, n_cells: usize) -> Result<TimeGrid> {
    TimeGrid::new(t_start, t_end, n_cells)
}

/// An `R^m`-valued path sampled on a [`TimeGrid`], stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPath {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
}

impl VectorPath {
    pub fn new(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPath("dimension must be positive".into()));
        }
        if values.len() != dim * grid.n_points() {
            return Err(Error::InvalidPath(format!(
                "expected {} values, got {}",
                dim * grid.n_points(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPath(format!(
                "non-finite value at grid index {}",
                i / dim
            )));
        }
        Ok(Self { grid, dim, values })
    }

    /// Samples `f(t)` at every grid point.
    pub fn from_fn(grid: TimeGrid, dim: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(dim * grid.n_points());
        for t in grid.times() {
            let v = f(t);
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            values.extend_from_slice(&v);
        }
        Self::new(grid, dim, values)
    }

    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        let n = grid.n_points() * dim;
        Self {
            grid,
            dim,
            values: vec![0.0; n],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), dim * grid.n_points());
        Self { grid, dim, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `X(t_t) - X(t_s)`.
    pub fn increment(&self, s: usize, t: usize) -> Vec<f64> {
        self.value(t)
            .iter()
            .zip(self.value(s))
            .map(|(b, a)| b - a)
            .collect()
    }

    pub fn restrict(&self, window: Window) -> Result<Self> {
        let grid = self.grid.sub_grid(window)?;
        let (start, end) = window;
        let values = self.values[start * self.dim..(end + 1) * self.dim].to_vec();
        Ok(Self {
            grid,
            dim: self.dim,
            values,
        })
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            dim: self.dim,
            values: self.values.iter().map(|v| lambda * v).collect(),
        }
    }

    pub fn translated(&self, c: &[f64]) -> Result<Self> {
        if c.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: c.len(),
            });
        }
        let values = self
            .values
            .chunks_exact(self.dim)
            .flat_map(|row| row.iter().zip(c).map(|(v, ci)| v + ci))
            .collect();
        Self::new(self.grid.clone(), self.dim, values)
    }

    /// Pointwise `self - other` on a shared grid.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            dim: self.dim,
            values,
        })
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.same_points(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Value of the piecewise-linear interpolant at `t`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (k, frac) = self.locate(t)?;
        let a = self.value(k);
        if frac == 0.0 {
            return Ok(a.to_vec());
        }
        let b = self.value(k + 1);
        Ok(a.iter().zip(b).map(|(x, y)| x + frac * (y - x)).collect())
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (lo, hi) = (self.grid.t_start(), self.grid.t_end());
        let slack = 1e-9 * self.grid.mesh();
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::InvalidParameter(format!(
                "time {t} outside [{lo}, {hi}]"
            )));
        }
        if let Some(k) = self.grid.index_of(t) {
            if k == self.grid.n_cells() {
                return Ok((k - 1, 1.0));
            }
            return Ok((k, 0.0));
        }
        let x = (t - lo) / self.grid.mesh();
        let k = (x.floor() as usize).min(self.grid.n_cells() - 1);
        Ok((k, x - k as f64))
    }

    /// Exact integrals of the interpolant from the grid start, for repeated queries.
    pub fn prefix_integral(&self) -> PrefixIntegral<'_> {
        let m = self.dim;
        let h = self.grid.mesh();
        let mut cumulative = vec![0.0; self.values.len()];
        for k in 1..self.n_points() {
            for i in 0..m {
                cumulative[k * m + i] = cumulative[(k - 1) * m + i]
                    + 0.5 * h * (self.values[(k - 1) * m + i] + self.values[k * m + i]);
            }
        }
        PrefixIntegral {
            path: self,
            cumulative,
        }
    }

    /// Writes `t,x1,...,xm`, one row per grid point.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        write_line(w, &header)?;
        for k in 0..self.n_points() {
            let mut row = vec![fmt_float(self.grid.time(k))];
            row.extend(self.value(k).iter().map(|&v| fmt_float(v)));
            write_line(w, &row)?;
        }
        Ok(())
    }
}

/// Running integral `∫_{t_0}^{t} X(r) dr` of a path's interpolant.
pub struct PrefixIntegral<'a> {
    path: &'a VectorPath,
    cumulative: Vec<f64>,
}

impl PrefixIntegral<'_> {
    /// `∫_{t_0}^{t} X(r) dr` for any `t` in the grid range.
    pub fn from_start(&self, t: f64) -> Result<Vec<f64>> {
        let (k, frac) = self.path.locate(t)?;
        let m = self.path.dim;
        let h = self.path.grid.mesh();
        let base = &self.cumulative[k * m..(k + 1) * m];
        if frac == 0.0 {
            return Ok(base.to_vec());
        }
        let a = self.path.value(k);
        let b = self.path.value(k + 1);
        // ∫_0^{frac·h} (a + (b-a) s/h) ds
        let s = frac * h;
        Ok((0..m)
            .map(|i| base[i] + a[i] * s + 0.5 * (b[i] - a[i]) * frac * s)
            .collect())
    }

    /// `∫_a^b X(r) dr` (oriented).
    pub fn between(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let ia = self.from_start(a)?;
        let ib = self.from_start(b)?;
        Ok(ib.iter().zip(&ia).map(|(y, x)| y - x).collect())
    }
}

/// `⦀X⦀_β` over grid pairs `s < t` inside `window`:
/// `max |X(t) - X(s)| / (t - s)^β` with the Euclidean norm.
pub fn holder_seminorm(path: &VectorPath, beta: f64, window: Window) -> Result<f64> {
    check_beta(beta)?;
    path.grid.check_window(window)?;
    let (start, end) = window;
    let m = path.dim;
    let weights = lag_weights_squared(path.grid.mesh(), beta, end - start);
    let x = &path.values;
    let mut best = 0.0f64;
    for s in start..end {
        let xs = &x[s * m..(s + 1) * m];
        for t in s + 1..=end {
            let xt = &x[t * m..(t + 1) * m];
            let mut sq = 0.0;
            for i in 0..m {
                let d = xt[i] - xs[i];
                sq += d * d;
            }
            best = best.max(sq * weights[t - s]);
        }
    }
    Ok(best.sqrt())
}

/// `(lag·h)^{-2β}` for lags `0..=max_lag` (entry 0 unused).
fn lag_weights_squared(mesh: f64, beta: f64, max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|l| {
            if l == 0 {
                0.0
            } else {
                (l as f64 * mesh).powf(-2.0 * beta)
            }
        })
        .collect()
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Hölder exponent {beta} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Wiener shift `(θ_τ X)(t) = X(t + τ) - X(τ)` with `τ = tau_cells·h`.
///
/// The result lives on `[t_start, t_end - τ]`; the grid must contain 0.
pub fn wiener_shift(path: &VectorPath, tau_cells: usize) -> Result<VectorPath> {
    let grid = &path.grid;
    let zero = grid.zero_index().ok_or(Error::ZeroNotOnGrid)?;
    if tau_cells >= grid.n_cells() || zero + tau_cells > grid.n_cells() {
        return Err(Error::ShiftOutOfRange {
            tau: tau_cells,
            n_cells: grid.n_cells(),
        });
    }
    if tau_cells == 0 {
        return Ok(path.clone());
    }
    let new_grid = grid.sub_grid((0, grid.n_cells() - tau_cells))?;
    let m = path.dim;
    let anchor = path.value(zero + tau_cells).to_vec();
    let mut values = Vec::with_capacity(new_grid.n_points() * m);
    for k in 0..new_grid.n_points() {
        let v = path.value(k + tau_cells);
        values.extend(v.iter().zip(&anchor).map(|(a, b)| a - b));
    }
    Ok(VectorPath::from_parts_unchecked(new_grid, m, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear(c: &[f64], grid: TimeGrid) -> VectorPath {
        let c = c.to_vec();
        VectorPath::from_fn(grid, c.len(), |t| c.iter().map(|ci| ci * t).collect()).unwrap()
    }

    #[test]
    fn make_grid_examples() {
        let g = make_grid(0.0, 1.0, 4).unwrap();
        let ts: Vec<f64> = g.times().collect();
        assert_eq!(ts, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.mesh(), 0.25);

        let g = make_grid(-1.0, 1.0, 2).unwrap();
        assert_eq!(g.times().collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(g.zero_index(), Some(1));

        assert!(matches!(make_grid(0.0, 1.0, 0), Err(Error::InvalidGrid(_))));
        assert!(make_grid(f64::NAN, 1.0, 3).is_err());
        assert!(make_grid(1.0, 1.0, 3).is_err());
        assert!(matches!(make_grid(-1.0, 1.0, 3), Err(Error::ZeroNotOnGrid)));
    }

    #[test]
    fn times_do_not_drift() {
        let g = TimeGrid::with_mesh(-1.0, 1.0 / 4096.0, 8192).unwrap();
        assert_eq!(g.time(4096), 0.0);
        assert_eq!(g.t_end(), 1.0);
        assert_eq!(g.index_of(0.5), Some(6144));
    }

    #[test]
    fn path_rejects_bad_values() {
        let g = make_grid(0.0, 1.0, 2).unwrap();
        assert!(VectorPath::new(g.clone(), 1, vec![0.0, 1.0]).is_err());
        assert!(VectorPath::new(g, 1, vec![0.0, f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn holder_examples() {
        let g = make_grid(0.0, 1.0, 64).unwrap();
        let zero = VectorPath::zeros(g.clone(), 2);
        assert_eq!(holder_seminorm(&zero, 0.4, g.full_window()).unwrap(), 0.0);

        // |c|(t-s)^{1-β} is maximized by the full interval.
        let p = linear(&[3.0, -4.0], g.clone());
        let v = holder_seminorm(&p, 0.4, g.full_window()).unwrap();
        assert!((v - 5.0).abs() < 1e-12, "{v}");

        let g1 = make_grid(0.0, 0.5, 1).unwrap();
        let p = VectorPath::new(g1.clone(), 1, vec![0.2, -0.1]).unwrap();
        let v = holder_seminorm(&p, 0.3, g1.full_window()).unwrap();
        assert!((v - 0.3 / 0.5f64.powf(0.3)).abs() < 1e-14);

        assert!(holder_seminorm(&p, 0.3, (0, 0)).is_err());
        assert!(holder_seminorm(&p, 1.3, (0, 1)).is_err());
    }

    #[test]
    fn wiener_shift_examples() {
        let g = make_grid(0.0, 1.0, 16).unwrap();
        let p = VectorPath::from_fn(g.clone(), 1, |t| vec![t * t + 0.3]).unwrap();
        assert_eq!(wiener_shift(&p, 0).unwrap(), p);

        let lin = linear(&[2.0], g.clone());
        let s = wiener_shift(&lin, 5).unwrap();
        assert_eq!(s.grid().n_cells(), 11);
        for k in 0..s.n_points() {
            assert!((s.value(k)[0] - 2.0 * s.grid().time(k)).abs() < 1e-14);
        }
        assert!(matches!(wiener_shift(&p, 16), Err(Error::ShiftOutOfRange { .. })));

        let off = VectorPath::zeros(make_grid(1.0, 2.0, 4).unwrap(), 1);
        assert!(matches!(wiener_shift(&off, 1), Err(Error::ZeroNotOnGrid)));
    }

    #[test]
    fn shift_on_symmetric_grid_anchors_at_origin() {
        let g = make_grid(-1.0, 1.0, 8).unwrap();
        let p = VectorPath::from_fn(g, 1, |t| vec![t.sin()]).unwrap();
        let s = wiener_shift(&p, 2).unwrap();
        assert_eq!(s.grid().zero_index(), Some(4));
        assert_eq!(s.value(4)[0], 0.0);
        assert_eq!(s.grid().t_start(), -1.0);
        assert_eq!(s.grid().t_end(), 0.5);
    }

    #[test]
    fn interpolant_integral_is_exact() {
        let g = make_grid(0.0, 2.0, 8).unwrap();
        // Linear path: integral of c·r over [a, b] is c(b²-a²)/2.
        let p = linear(&[1.5], g);
        let pre = p.prefix_integral();
        for &(a, b) in &[(0.0, 2.0), (0.1, 1.33), (0.7, 0.2)] {
            let v = pre.between(a, b).unwrap()[0];
            assert!((v - 0.75 * (b * b - a * a)).abs() < 1e-14);
        }
        assert!((p.eval(0.6).unwrap()[0] - 0.9).abs() < 1e-15);
        assert!(p.eval(2.5).is_err());
    }

    fn random_path(values: Vec<f64>) -> VectorPath {
        let n = values.len() / 2 - 1;
        VectorPath::new(make_grid(0.0, 1.0, n).unwrap(), 2, values).unwrap()
    }

    proptest! {
        #[test]
        fn shift_semigroup(values in prop::collection::vec(-3.0f64..3.0, 42), t1 in 0usize..8, t2 in 0usize..8) {
            let p = random_path(values);
            let a = wiener_shift(&wiener_shift(&p, t1).unwrap(), t2).unwrap();
            let b = wiener_shift(&p, t1 + t2).unwrap();
            prop_assert_eq!(a.grid().n_cells(), b.grid().n_cells());
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn holder_translation_and_homogeneity(
            values in prop::collection::vec(-3.0f64..3.0, 42),
            c in prop::collection::vec(-10.0f64..10.0, 2),
            lambda in -5.0f64..5.0,
        ) {
            let p = random_path(values);
            let w = p.grid().full_window();
            let base = holder_seminorm(&p, 0.4, w).unwrap();
            let shifted = holder_seminorm(&p.translated(&c).unwrap(), 0.4, w).unwrap();
            prop_assert!((base - shifted).abs() <= 1e-10 * (1.0 + base));
            let scaled = holder_seminorm(&p.scaled(lambda), 0.4, w).unwrap();
            prop_assert!((scaled - lambda.abs() * base).abs() <= 1e-10 * (1.0 + base));
        }
    }
}
