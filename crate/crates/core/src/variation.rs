//! Rectangular incremental covariances and exact 2D ρ-variation by
//! enumeration on small point sets.

use crate::covariance::{constant_m, CovarianceModel};
use crate::error::{Error, Result};

/// Largest point set accepted by [`rho_variation_bruteforce`].
pub const MAX_VARIATION_POINTS: usize = 10;

#[derive(Clone, Debug)]
enum Source {
    Model(CovarianceModel),
    Empirical { times: Vec<f64>, samples: Vec<Vec<f64>> },
}

/// `R(s,t; s',t') = E (X(t) - X(s)) (X(t') - X(s'))`.
#[derive(Clone, Debug)]
pub struct RectCovariance {
    source: Source,
}

impl RectCovariance {
    /// Sample estimate from realizations observed at `times`
    /// (`samples[n][k]` is realization `n` at `times[k]`). Only rectangles
    /// with corners in `times` can be evaluated.
    pub fn empirical(times: Vec<f64>, samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("no samples".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != times.len()) {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: bad.len(),
            });
        }
        Ok(Self {
            source: Source::Empirical { times, samples },
        })
    }

    pub fn label(&self) -> String {
        match &self.source {
            Source::Model(m) => m.label().to_string(),
            Source::Empirical { samples, .. } => format!("empirical(N={})", samples.len()),
        }
    }

    pub fn eval(&self, s: f64, t: f64, s2: f64, t2: f64) -> Result<f64> {
        match &self.source {
            Source::Model(model) => {
                let f = |u: f64| model.sigma2(u);
                Ok(0.5 * (f(t - s2) + f(s - t2) - f(t - t2) - f(s - s2)))
            }
            Source::Empirical { times, samples } => {
                let idx = |x: f64| {
                    times
                        .iter()
                        .position(|&y| (y - x).abs() <= 1e-12 * (1.0 + x.abs()))
                        .ok_or_else(|| Error::InvalidParameter(format!("time {x} not sampled")))
                };
                let (a, b, c, d) = (idx(s)?, idx(t)?, idx(s2)?, idx(t2)?);
                let sum: f64 = samples.iter().map(|x| (x[b] - x[a]) * (x[d] - x[c])).sum();
                Ok(sum / samples.len() as f64)
            }
        }
    }
}

/// Polarization of the increment variance of a stationary-increment process:
/// `R = ½(σ²(t-s') + σ²(s-t') - σ²(t-t') - σ²(s-s'))`.
///
/// Valid on all of `R`, so rectangles straddling the origin need no special case.
pub fn rect_cov_from_sigma2(model: CovarianceModel) -> RectCovariance {
    RectCovariance {
        source: Source::Model(model),
    }
}

/// `sup_{Π, Π'} (Σ_{i,j} |R(t_i,t_{i+1}; t'_j,t'_{j+1})|^ρ)^{1/ρ}` over all
/// pairs of partitions whose points are drawn from `points` (endpoints fixed).
pub fn rho_variation_bruteforce(cov: &RectCovariance, points: &[f64], rho: f64) -> Result<f64> {
    let n = points.len();
    if !(2..=MAX_VARIATION_POINTS).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "brute-force ρ-variation needs 2..={MAX_VARIATION_POINTS} points, got {n}"
        )));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("points must be strictly increasing".into()));
    }
    if !(rho >= 1.0) {
        return Err(Error::InvalidParameter(format!("ρ = {rho} must be at least 1")));
    }

    // |R|^ρ for every pair of intervals [p_a, p_b] × [p_c, p_d].
    let iv = |a: usize, b: usize| a * n + b;
    let mut table = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                for d in c + 1..n {
                    let r = cov.eval(points[a], points[b], points[c], points[d])?;
                    table[iv(a, b) * n * n + iv(c, d)] = r.abs().powf(rho);
                }
            }
        }
    }

    let interior = n - 2;
    let partitions: Vec<Vec<usize>> = (0u32..1 << interior)
        .map(|mask| {
            let mut p = vec![0];
            p.extend((0..interior).filter(|i| mask & (1 << i) != 0).map(|i| i + 1));
            p.push(n - 1);
            p
        })
        .collect();

    let mut best = 0.0f64;
    for p in &partitions {
        for q in &partitions {
            let mut sum = 0.0;
            for w in p.windows(2) {
                let row = iv(w[0], w[1]) * n * n;
                for v in q.windows(2) {
                    sum += table[row + iv(v[0], v[1])];
                }
            }
            best = best.max(sum);
        }
    }
    Ok(best.powf(1.0 / rho))
}

/// Outcome of scanning a variance function against the concavity,
/// monotonicity and growth hypotheses of the ρ-variation bound.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub monotone: bool,
    pub concave: bool,
    pub growth_bound: bool,
    /// Largest violation of `σ²(u) <= L u^{1/ρ}` seen (≤ 0 when it holds).
    pub worst_growth_excess: f64,
    /// Coefficient of the implied bound `L·M(ρ)·(t-s)^{1/ρ}`.
    pub implied_coefficient: f64,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.monotone && self.concave && self.growth_bound
    }

    /// `L·M(ρ)·(t-s)^{1/ρ}` for an interval of length `len`.
    pub fn implied_bound(&self, len: f64, rho: f64) -> f64 {
        self.implied_coefficient * len.powf(1.0 / rho)
    }
}

/// Checks that `σ²` is non-decreasing, concave and below `L u^{1/ρ}` on `[0, h]`,
/// using `resolution` uniform scan steps.
pub fn check_variation_hypotheses(
    model: &CovarianceModel,
    h: f64,
    rho: f64,
    growth_constant: f64,
    resolution: usize,
) -> Result<HypothesisReport> {
    if !(h > 0.0) || resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "scan needs h > 0 and resolution >= 2 (h = {h}, resolution = {resolution})"
        )));
    }
    let m = constant_m(rho)?;
    let step = h / resolution as f64;
    let values: Vec<f64> = (0..=resolution).map(|k| model.sigma2(k as f64 * step)).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;

    let monotone = values.windows(2).all(|w| w[1] >= w[0] - tol);
    let concave = values.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= tol);
    let worst_growth_excess = values
        .iter()
        .enumerate()
        .map(|(k, v)| v - growth_constant * (k as f64 * step).powf(1.0 / rho))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(HypothesisReport {
        monotone,
        concave,
        growth_bound: worst_growth_excess <= tol,
        worst_growth_excess,
        implied_coefficient: growth_constant * m,
    })
}
