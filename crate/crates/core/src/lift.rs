//! Second-order lifts of grid paths.
//!
//! Areas are stored only as the cumulative field `A(t_k) = 𝕏(t_0, t_k)`; every
//! two-parameter area is rebuilt from Chen's relation
//!
//! ```text
//! 𝕏(s,t) = A(t) - A(s) - (X(s) - X(t_0)) ⊗ (X(t) - X(s))
//! ```
//!
//! so Chen holds identically and windows crossing the origin need no special
//! case. Matrix norms are the maximum absolute entry.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::DMatrix;

use crate::csv::{fmt_float, write_line};
use crate::error::{Error, Result};
use crate::grid::{check_beta, wiener_shift, TimeGrid, VectorPath, Window};

/// Cumulative areas `A_k ∈ R^{m×m}` (row-major) with `A_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaField {
    grid: TimeGrid,
    dim: usize,
    cumulative: Vec<f64>,
}

impl AreaField {
    pub fn new(grid: TimeGrid, dim: usize, cumulative: Vec<f64>) -> Result<Self> {
        let mm = dim * dim;
        if cumulative.len() != mm * grid.n_points() {
            return Err(Error::InvalidPath(format!(
                "area field needs {} entries, got {}",
                mm * grid.n_points(),
                cumulative.len()
            )));
        }
        if cumulative[..mm].iter().any(|&a| a != 0.0) {
            return Err(Error::InvalidPath("A_0 must vanish".into()));
        }
        if cumulative.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidPath("non-finite area".into()));
        }
        Ok(Self {
            grid,
            dim,
            cumulative,
        })
    }

    /// Builds `A` from per-cell areas `𝕏(t_k, t_{k+1})` via Chen.
    pub(crate) fn accumulate(
        path: &VectorPath,
        mut cell_area: impl FnMut(usize, &mut [f64]),
    ) -> Self {
        let m = path.dim();
        let mm = m * m;
        let n = path.n_points();
        let x0 = path.value(0);
        let mut cumulative = vec![0.0; mm * n];
        let mut cell = vec![0.0; mm];
        for k in 0..n - 1 {
            cell.iter_mut().for_each(|c| *c = 0.0);
            cell_area(k, &mut cell);
            let (xk, xk1) = (path.value(k), path.value(k + 1));
            let (prev, next) = cumulative.split_at_mut((k + 1) * mm);
            let prev = &prev[k * mm..];
            let next = &mut next[..mm];
            for i in 0..m {
                let yi = xk[i] - x0[i];
                for j in 0..m {
                    next[i * m + j] = prev[i * m + j] + cell[i * m + j] + yi * (xk1[j] - xk[j]);
                }
            }
        }
        Self {
            grid: path.grid().clone(),
            dim: m,
            cumulative,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `A_k` as a row-major slice.
    pub fn cumulative(&self, k: usize) -> &[f64] {
        let mm = self.dim * self.dim;
        &self.cumulative[k * mm..(k + 1) * mm]
    }
}

/// A path together with its area field on the same grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RoughPathLift {
    path: VectorPath,
    area: AreaField,
    geometric: bool,
}

impl RoughPathLift {
    pub fn new(path: VectorPath, area: AreaField, geometric: bool) -> Result<Self> {
        if !path.grid().same_points(area.grid()) {
            return Err(Error::GridMismatch("path and area grids differ".into()));
        }
        if path.dim() != area.dim() {
            return Err(Error::DimensionMismatch {
                expected: path.dim(),
                got: area.dim(),
            });
        }
        Ok(Self {
            path,
            area,
            geometric,
        })
    }

    pub fn path(&self) -> &VectorPath {
        &self.path
    }

    pub fn area_field(&self) -> &AreaField {
        &self.area
    }

    pub fn grid(&self) -> &TimeGrid {
        self.path.grid()
    }

    pub fn dim(&self) -> usize {
        self.path.dim()
    }

    pub fn is_geometric(&self) -> bool {
        self.geometric
    }

    /// `𝕏(t_s, t_t)` written row-major into `out`.
    pub fn area_into(&self, s: usize, t: usize, out: &mut [f64]) {
        let m = self.dim();
        let (x0, xs, xt) = (self.path.value(0), self.path.value(s), self.path.value(t));
        let (a_s, a_t) = (self.area.cumulative(s), self.area.cumulative(t));
        for i in 0..m {
            let yi = xs[i] - x0[i];
            for j in 0..m {
                out[i * m + j] = a_t[i * m + j] - a_s[i * m + j] - yi * (xt[j] - xs[j]);
            }
        }
    }

    /// `𝕏(t_s, t_t)` for `s <= t`.
    pub fn area(&self, s: usize, t: usize) -> Result<DMatrix<f64>> {
        let n = self.grid().n_points();
        if s > t || t >= n {
            return Err(Error::InvalidWindow {
                start: s,
                end: t,
                n_points: n,
            });
        }
        let m = self.dim();
        let mut out = vec![0.0; m * m];
        self.area_into(s, t, &mut out);
        Ok(DMatrix::from_row_slice(m, m, &out))
    }

    /// The lift of `λX` with area `λ²𝕏`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            path: self.path.scaled(lambda),
            area: AreaField {
                grid: self.area.grid.clone(),
                dim: self.area.dim,
                cumulative: self.area.cumulative.iter().map(|a| lambda * lambda * a).collect(),
            },
            geometric: self.geometric,
        }
    }

    /// Lift restricted to a window, re-based at the window start.
    pub fn restrict(&self, window: Window) -> Result<Self> {
        let path = self.path.restrict(window)?;
        let (start, end) = window;
        let m = self.dim();
        let mut cumulative = Vec::with_capacity(m * m * (end - start + 1));
        let mut buf = vec![0.0; m * m];
        for k in start..=end {
            self.area_into(start, k, &mut buf);
            cumulative.extend_from_slice(&buf);
        }
        // Chen reconstruction of 𝕏(s,s) is exactly zero.
        let area = AreaField {
            grid: path.grid().clone(),
            dim: m,
            cumulative,
        };
        Ok(Self {
            path,
            area,
            geometric: self.geometric,
        })
    }

    /// Writes `t, x1..xm, A11..Amm` per grid point.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let m = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=m).map(|i| format!("x{i}")));
        for i in 1..=m {
            for j in 1..=m {
                header.push(format!("A{i}{j}"));
            }
        }
        write_line(w, &header)?;
        for k in 0..self.grid().n_points() {
            let mut row = vec![fmt_float(self.grid().time(k))];
            row.extend(self.path.value(k).iter().map(|&v| fmt_float(v)));
            row.extend(self.area.cumulative(k).iter().map(|&v| fmt_float(v)));
            write_line(w, &row)?;
        }
        Ok(())
    }
}

/// `𝕏(t_s, t_t)` reconstructed through Chen.
pub fn area_lookup(lift: &RoughPathLift, s: usize, t: usize) -> Result<DMatrix<f64>> {
    lift.area(s, t)
}

/// Exact geometric lift of the piecewise-linear interpolant.
///
/// Each cell contributes `½ δX ⊗ δX`; cells are chained through Chen.
pub fn lift_smooth(path: &VectorPath) -> RoughPathLift {
    let m = path.dim();
    let area = AreaField::accumulate(path, |k, cell| {
        let (a, b) = (path.value(k), path.value(k + 1));
        for i in 0..m {
            for j in 0..m {
                cell[i * m + j] = 0.5 * (b[i] - a[i]) * (b[j] - a[j]);
            }
        }
    });
    RoughPathLift {
        path: path.clone(),
        area,
        geometric: true,
    }
}

/// Areas `𝕏(s,t)` keyed by index pair, e.g. from an independent integrator.
#[derive(Clone, Debug, Default)]
pub struct AreaTable {
    entries: HashMap<(usize, usize), DMatrix<f64>>,
}

impl AreaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: usize, t: usize, area: DMatrix<f64>) {
        self.entries.insert((s, t), area);
    }

    pub fn get(&self, s: usize, t: usize) -> Result<&DMatrix<f64>> {
        self.entries.get(&(s, t)).ok_or(Error::MissingArea(s, t))
    }

    /// Table of every pair among `indices`, read from a lift.
    pub fn from_lift(lift: &RoughPathLift, indices: &[usize]) -> Result<Self> {
        let mut table = Self::new();
        for (a, &s) in indices.iter().enumerate() {
            for &t in &indices[a + 1..] {
                table.insert(s, t, lift.area(s, t)?);
            }
        }
        Ok(table)
    }
}

/// Max over the triples `s < u < t` of the Chen residual
/// `|𝕏(s,t) - 𝕏(s,u) - 𝕏(u,t) - (X(u)-X(s)) ⊗ (X(t)-X(u))|`.
pub fn chen_defect(
    path: &VectorPath,
    table: &AreaTable,
    triples: &[(usize, usize, usize)],
) -> Result<f64> {
    let m = path.dim();
    let mut worst = 0.0f64;
    for &(s, u, t) in triples {
        if !(s < u && u < t && t < path.n_points()) {
            return Err(Error::InvalidWindow {
                start: s,
                end: t,
                n_points: path.n_points(),
            });
        }
        let (st, su, ut) = (table.get(s, t)?, table.get(s, u)?, table.get(u, t)?);
        for x in [st, su, ut] {
            if x.nrows() != m || x.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: x.nrows(),
                });
            }
        }
        let d1 = path.increment(s, u);
        let d2 = path.increment(u, t);
        for i in 0..m {
            for j in 0..m {
                let r = st[(i, j)] - su[(i, j)] - ut[(i, j)] - d1[i] * d2[j];
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Sups of the weighted path and area terms over grid pairs of a window.
#[derive(Clone, Copy, Debug, Default)]
struct PairSups {
    path: f64,
    area: f64,
    total: f64,
}

/// Shared O(n²) kernel for the metric and the homogeneous norm. With `b = None`
/// the second lift is the zero lift.
fn pair_sups(a: &RoughPathLift, b: Option<&RoughPathLift>, beta: f64, window: Window) -> Result<PairSups> {
    check_beta(beta)?;
    a.grid().check_window(window)?;
    if let Some(b) = b {
        if !a.grid().same_points(b.grid()) {
            return Err(Error::GridMismatch("lifts live on different grids".into()));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
    }
    let (start, end) = window;
    let m = a.dim();
    let mm = m * m;
    let len = end - start + 1;
    let h = a.grid().mesh();

    // Paths relative to their value at the grid start, restricted to the window.
    let rel = |l: &RoughPathLift| -> Vec<f64> {
        let x0 = l.path.value(0);
        (start..=end)
            .flat_map(|k| l.path.value(k).iter().zip(x0).map(|(x, o)| x - o).collect::<Vec<_>>())
            .collect()
    };
    let ya = rel(a);
    let yb = b.map(rel).unwrap_or_else(|| vec![0.0; len * m]);
    let diff: Vec<f64> = ya.iter().zip(&yb).map(|(p, q)| p - q).collect();
    let mut e = Vec::with_capacity(len * mm);
    for k in start..=end {
        let ca = a.area.cumulative(k);
        match b {
            Some(b) => e.extend(ca.iter().zip(b.area.cumulative(k)).map(|(p, q)| p - q)),
            None => e.extend_from_slice(ca),
        }
    }
    let w1: Vec<f64> = (0..len).map(|l| (l as f64 * h).powf(-beta)).collect();
    let w2: Vec<f64> = w1.iter().map(|w| w * w).collect();
    let data = KernelData {
        ya: &ya,
        yb: &yb,
        diff: &diff,
        e: &e,
        w1: &w1,
        w2: &w2,
        len,
    };
    let sups = match m {
        1 => kernel_fixed::<1>(&data),
        2 => kernel_fixed::<2>(&data),
        3 => kernel_fixed::<3>(&data),
        _ => kernel_dyn(&data, m),
    };
    Ok(sups)
}

struct KernelData<'a> {
    ya: &'a [f64],
    yb: &'a [f64],
    diff: &'a [f64],
    e: &'a [f64],
    w1: &'a [f64],
    w2: &'a [f64],
    len: usize,
}

/// Pair sweep for a compile-time dimension. For `s < t`,
/// `𝕏_a(s,t) - 𝕏_b(s,t) = E_t + c_s - ya_s ⊗ ya_t + yb_s ⊗ yb_t` with
/// `c_s = -E_s + ya_s ⊗ ya_s - yb_s ⊗ yb_s`.
fn kernel_fixed<const M: usize>(d: &KernelData) -> PairSups {
    let vec_at = |v: &[f64], k: usize| -> [f64; M] { std::array::from_fn(|i| v[k * M + i]) };
    let mat_at = |k: usize| -> [[f64; M]; M] { std::array::from_fn(|i| std::array::from_fn(|j| d.e[k * M * M + i * M + j])) };
    let ya: Vec<[f64; M]> = (0..d.len).map(|k| vec_at(d.ya, k)).collect();
    let yb: Vec<[f64; M]> = (0..d.len).map(|k| vec_at(d.yb, k)).collect();
    let diff: Vec<[f64; M]> = (0..d.len).map(|k| vec_at(d.diff, k)).collect();
    let e: Vec<[[f64; M]; M]> = (0..d.len).map(mat_at).collect();
    let mut sups = PairSups::default();
    for s in 0..d.len - 1 {
        let (yas, ybs, ds, es) = (ya[s], yb[s], diff[s], e[s]);
        let c: [[f64; M]; M] = std::array::from_fn(|i| std::array::from_fn(|j| -es[i][j] + yas[i] * yas[j] - ybs[i] * ybs[j]));
        for t in s + 1..d.len {
            let (yat, ybt, dt, et) = (&ya[t], &yb[t], &diff[t], &e[t]);
            let mut sq = 0.0;
            for i in 0..M {
                let v = dt[i] - ds[i];
                sq += v * v;
            }
            let mut amax = 0.0f64;
            for i in 0..M {
                for j in 0..M {
                    let v = et[i][j] + c[i][j] - yas[i] * yat[j] + ybs[i] * ybt[j];
                    amax = amax.max(v.abs());
                }
            }
            let lag = t - s;
            let p = sq.sqrt() * d.w1[lag];
            let q = amax * d.w2[lag];
            sups.path = sups.path.max(p);
            sups.area = sups.area.max(q);
            sups.total = sups.total.max(p + q);
        }
    }
    sups
}

fn kernel_dyn(d: &KernelData, m: usize) -> PairSups {
    let mm = m * m;
    let (ya, yb, diff, e) = (d.ya, d.yb, d.diff, d.e);
    let mut sups = PairSups::default();
    let mut c = vec![0.0; mm];
    for s in 0..d.len - 1 {
        let (yas, ybs, ds) = (&ya[s * m..(s + 1) * m], &yb[s * m..(s + 1) * m], &diff[s * m..(s + 1) * m]);
        let es = &e[s * mm..(s + 1) * mm];
        for i in 0..m {
            for j in 0..m {
                c[i * m + j] = -es[i * m + j] + yas[i] * yas[j] - ybs[i] * ybs[j];
            }
        }
        for t in s + 1..d.len {
            let yat = &ya[t * m..(t + 1) * m];
            let ybt = &yb[t * m..(t + 1) * m];
            let dt = &diff[t * m..(t + 1) * m];
            let et = &e[t * mm..(t + 1) * mm];
            let mut sq = 0.0;
            for i in 0..m {
                let v = dt[i] - ds[i];
                sq += v * v;
            }
            let mut amax = 0.0f64;
            for i in 0..m {
                for j in 0..m {
                    let v = et[i * m + j] + c[i * m + j] - yas[i] * yat[j] + ybs[i] * ybt[j];
                    amax = amax.max(v.abs());
                }
            }
            let lag = t - s;
            let p = sq.sqrt() * d.w1[lag];
            let q = amax * d.w2[lag];
            sups.path = sups.path.max(p);
            sups.area = sups.area.max(q);
            sups.total = sups.total.max(p + q);
        }
    }
    sups
}

/// Hölder rough-path distance `ρ_β` over grid pairs:
/// `sup |δX - δY| / (t-s)^β + |𝕏 - 𝕐| / (t-s)^{2β}`.
pub fn rough_metric(a: &RoughPathLift, b: &RoughPathLift, beta: f64, window: Window) -> Result<f64> {
    Ok(pair_sups(a, Some(b), beta, window)?.total)
}

/// `⦀X⦀_β + sqrt(⦀𝕏⦀_{2β})`.
pub fn homogeneous_norm(lift: &RoughPathLift, beta: f64, window: Window) -> Result<f64> {
    let sups = pair_sups(lift, None, beta, window)?;
    Ok(sups.path + sups.area.sqrt())
}

/// `⦀𝕏⦀_{2β}` alone.
pub fn area_seminorm(lift: &RoughPathLift, beta: f64, window: Window) -> Result<f64> {
    Ok(pair_sups(lift, None, beta, window)?.area)
}

/// Max over grid pairs of `|Sym 𝕏(s,t) - ½ δX ⊗ δX|`.
pub fn symmetry_defect(lift: &RoughPathLift, window: Window) -> Result<f64> {
    lift.grid().check_window(window)?;
    let (start, end) = window;
    let m = lift.dim();
    let mut buf = vec![0.0; m * m];
    let mut worst = 0.0f64;
    for s in start..end {
        let xs = lift.path.value(s);
        for t in s + 1..=end {
            lift.area_into(s, t, &mut buf);
            let xt = lift.path.value(t);
            for i in 0..m {
                for j in i..m {
                    let sym = 0.5 * (buf[i * m + j] + buf[j * m + i]);
                    let r = sym - 0.5 * (xt[i] - xs[i]) * (xt[j] - xs[j]);
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Wiener shift of a lift: `θ_τ𝕏(s,t) = 𝕏(s+τ, t+τ)` with the path shifted by
/// [`wiener_shift`].
pub fn shift_lift(lift: &RoughPathLift, tau_cells: usize) -> Result<RoughPathLift> {
    let path = wiener_shift(&lift.path, tau_cells)?;
    if tau_cells == 0 {
        return Ok(lift.clone());
    }
    let m = lift.dim();
    let mut cumulative = Vec::with_capacity(m * m * path.n_points());
    let mut buf = vec![0.0; m * m];
    for k in 0..path.n_points() {
        lift.area_into(tau_cells, k + tau_cells, &mut buf);
        cumulative.extend_from_slice(&buf);
    }
    let area = AreaField {
        grid: path.grid().clone(),
        dim: m,
        cumulative,
    };
    Ok(RoughPathLift {
        path,
        area,
        geometric: lift.geometric,
    })
}
