//! Gaussian drivers: Brownian motion, fractional Brownian motion and the
//! reference Brownian lift.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, VectorPath};
use crate::lift::{lift_smooth, RoughPathLift};
use crate::rng::RngStream;

/// Largest grid handled by the dense Cholesky sampler.
pub const MAX_FBM_CELLS: usize = 4096;

/// Hurst exponent and dimension of an fBm with independent components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HurstModel {
    hurst: f64,
    dim: usize,
}

impl HurstModel {
    pub fn new(hurst: f64, dim: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidParameter(format!("Hurst exponent {hurst} outside (0, 1)")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { hurst, dim })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R(s,t) = ½(|t|^{2H} + |s|^{2H} - |t-s|^{2H})`.
    pub fn covariance(&self, s: f64, t: f64) -> f64 {
        let e = 2.0 * self.hurst;
        0.5 * (t.abs().powf(e) + s.abs().powf(e) - (t - s).abs().powf(e))
    }
}

/// Brownian motion on `grid` anchored at `ω(0) = 0`.
pub fn sample_bm(grid: &TimeGrid, dim: usize, stream: &RngStream) -> Result<VectorPath> {
    sample_bm_with(grid, dim, &mut stream.rng())
}

/// As [`sample_bm`], drawing from a caller-owned generator.
///
/// Increments right of the origin are drawn first (cell by cell, component
/// by component), then the left side as an independent walk backwards from 0.
pub fn sample_bm_with<R: Rng + ?Sized>(grid: &TimeGrid, dim: usize, rng: &mut R) -> Result<VectorPath> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let zero = grid.zero_index().ok_or(Error::ZeroNotOnGrid)?;
    let n = grid.n_points();
    let sd = grid.mesh().sqrt();
    let mut values = vec![0.0; n * dim];
    for k in zero + 1..n {
        for i in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            values[k * dim + i] = values[(k - 1) * dim + i] + sd * z;
        }
    }
    for k in (0..zero).rev() {
        for i in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            values[k * dim + i] = values[(k + 1) * dim + i] - sd * z;
        }
    }
    Ok(VectorPath::from_parts_unchecked(grid.clone(), dim, values))
}

/// Exact fBm sampler: Cholesky factor of the joint covariance of all cell
/// increments, built from `R_{B^H}`.
#[derive(Clone, Debug)]
pub struct FbmSampler {
    grid: TimeGrid,
    model: HurstModel,
    zero: usize,
    factor: DMatrix<f64>,
}

impl FbmSampler {
    pub fn new(grid: &TimeGrid, model: HurstModel) -> Result<Self> {
        let zero = grid.zero_index().ok_or(Error::ZeroNotOnGrid)?;
        let n = grid.n_cells();
        if n > MAX_FBM_CELLS {
            return Err(Error::InvalidParameter(format!(
                "{n} cells exceed the dense fBm limit of {MAX_FBM_CELLS}"
            )));
        }
        let cov = increment_covariance(grid, &model);
        let chol = cov.cholesky().ok_or(Error::NotPositiveDefinite {
            hurst: model.hurst,
            n,
        })?;
        Ok(Self {
            grid: grid.clone(),
            model,
            zero,
            factor: chol.unpack(),
        })
    }

    pub fn model(&self) -> &HurstModel {
        &self.model
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> VectorPath {
        let n = self.grid.n_cells();
        let m = self.model.dim;
        let mut values = vec![0.0; (n + 1) * m];
        for i in 0..m {
            let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let incr = &self.factor * z;
            for k in self.zero..n {
                values[(k + 1) * m + i] = values[k * m + i] + incr[k];
            }
            for k in (0..self.zero).rev() {
                values[k * m + i] = values[(k + 1) * m + i] - incr[k];
            }
        }
        VectorPath::from_parts_unchecked(self.grid.clone(), m, values)
    }
}

/// `E δ_k δ_l` for the cell increments `δ_k = B(t_{k+1}) - B(t_k)`.
pub fn increment_covariance(grid: &TimeGrid, model: &HurstModel) -> DMatrix<f64> {
    let n = grid.n_cells();
    let t: Vec<f64> = grid.times().collect();
    DMatrix::from_fn(n, n, |k, l| {
        model.covariance(t[k + 1], t[l + 1]) - model.covariance(t[k + 1], t[l])
            - model.covariance(t[k], t[l + 1])
            + model.covariance(t[k], t[l])
    })
}

/// One fBm sample; factor once with [`FbmSampler`] when drawing many.
pub fn sample_fbm(grid: &TimeGrid, model: HurstModel, stream: &RngStream) -> Result<VectorPath> {
    Ok(FbmSampler::new(grid, model)?.sample(&mut stream.rng()))
}

/// Reference Brownian lift: the geometric lift of the piecewise-linear
/// interpolant at sample resolution. It approximates the Stratonovich area
/// with an error vanishing as the mesh shrinks.
pub fn bm_reference_lift(path: &VectorPath) -> RoughPathLift {
    lift_smooth(path)
}
