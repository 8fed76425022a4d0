//! Controlled paths and the compensated Riemann-sum integral against a lift.

use crate::error::{Error, Result};
use crate::grid::{check_beta, VectorPath, Window};
use crate::lift::{shift_lift, RoughPathLift};

use super::field::VectorField;

/// A path `Y` with Gubinelli derivative `Y'` relative to a reference lift.
///
/// `Y'(k)` is a `d×m` matrix stored row-major; all three share one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlledPath {
    y: VectorPath,
    yp: Vec<f64>,
    reference: RoughPathLift,
}

impl ControlledPath {
    pub fn new(y: VectorPath, yp: Vec<f64>, reference: RoughPathLift) -> Result<Self> {
        if !y.grid().same_points(reference.grid()) {
            return Err(Error::GridMismatch("controlled path and reference lift differ".into()));
        }
        let expected = y.n_points() * y.dim() * reference.dim();
        if yp.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: yp.len(),
            });
        }
        if yp.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPath("Gubinelli derivative is not finite".into()));
        }
        Ok(Self { y, yp, reference })
    }

    /// `(ω, I)`: the driver controlled by itself.
    pub fn identity(reference: RoughPathLift) -> Self {
        let m = reference.dim();
        let n = reference.grid().n_points();
        let mut yp = vec![0.0; n * m * m];
        for k in 0..n {
            for i in 0..m {
                yp[k * m * m + i * m + i] = 1.0;
            }
        }
        Self {
            y: reference.path().clone(),
            yp,
            reference,
        }
    }

    pub fn path(&self) -> &VectorPath {
        &self.y
    }

    pub fn reference(&self) -> &RoughPathLift {
        &self.reference
    }

    pub fn state_dim(&self) -> usize {
        self.y.dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn value(&self, k: usize) -> &[f64] {
        self.y.value(k)
    }

    pub fn derivative(&self, k: usize) -> &[f64] {
        let dm = self.state_dim() * self.noise_dim();
        &self.yp[k * dm..(k + 1) * dm]
    }

    /// `R(s,t) = Y(t) - Y(s) - Y'(s)(ω(t) - ω(s))`.
    pub fn remainder(&self, s: usize, t: usize) -> Vec<f64> {
        let (d, m) = (self.state_dim(), self.noise_dim());
        let dw = self.reference.path().increment(s, t);
        let yp = self.derivative(s);
        let mut r = self.y.increment(s, t);
        for i in 0..d {
            r[i] -= (0..m).map(|j| yp[i * m + j] * dw[j]).sum::<f64>();
        }
        r
    }

    /// `sup |R(s,t)| / |t-s|^{2β}` over grid pairs of the window.
    pub fn remainder_seminorm(&self, beta: f64, (start, end): Window) -> Result<f64> {
        check_beta(beta)?;
        self.y.grid().check_window((start, end))?;
        let h = self.y.grid().mesh();
        let mut worst: f64 = 0.0;
        for s in start..end {
            for t in s + 1..=end {
                let r = self.remainder(s, t);
                let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                worst = worst.max(norm / ((t - s) as f64 * h).powf(2.0 * beta));
            }
        }
        Ok(worst)
    }

    /// `(θ_τ Y, θ_τ Y')` against `θ_τ 𝛚`: values are re-indexed, not re-based.
    pub fn shift(&self, tau_cells: usize) -> Result<Self> {
        let reference = shift_lift(&self.reference, tau_cells)?;
        let (d, m) = (self.state_dim(), self.noise_dim());
        let n = reference.grid().n_points();
        let y = VectorPath::from_parts_unchecked(
            reference.grid().clone(),
            d,
            self.y.values()[tau_cells * d..(tau_cells + n) * d].to_vec(),
        );
        let yp = self.yp[tau_cells * d * m..(tau_cells + n) * d * m].to_vec();
        Ok(Self { y, yp, reference })
    }
}

/// `(f(Y), Df(Y)·Y')`, a controlled path of dimension `d·m`.
pub fn compose_controlled(field: &dyn VectorField, cp: &ControlledPath) -> Result<ControlledPath> {
    let (d, m) = (cp.state_dim(), cp.noise_dim());
    if field.state_dim() != d {
        return Err(Error::DimensionMismatch {
            expected: field.state_dim(),
            got: d,
        });
    }
    if field.noise_dim() != m {
        return Err(Error::DimensionMismatch {
            expected: field.noise_dim(),
            got: m,
        });
    }
    let n = cp.y.n_points();
    let mut z = Vec::with_capacity(n * d * m);
    let mut zp = Vec::with_capacity(n * d * m * m);
    let mut f = vec![0.0; d * m];
    let mut jac = vec![0.0; d * m * d];
    for k in 0..n {
        let y = cp.value(k);
        field.eval(y, &mut f);
        field.jacobian(y, &mut jac);
        z.extend_from_slice(&f);
        let yp = cp.derivative(k);
        for ij in 0..d * m {
            for l in 0..m {
                zp.push((0..d).map(|q| jac[ij * d + q] * yp[q * m + l]).sum::<f64>());
            }
        }
    }
    let z = VectorPath::new(cp.y.grid().clone(), d * m, z)?;
    ControlledPath::new(z, zp, cp.reference.clone())
}

/// `Σ_cells Ξ(u,v)` with `Ξ(u,v) = f(Y_u) δω_{uv} + (Df(Y_u) Y'_u) : 𝕏(u,v)`,
/// between grid indices `s <= t` of the controlled path's grid.
pub fn rough_integral(field: &dyn VectorField, cp: &ControlledPath, s: usize, t: usize) -> Result<Vec<f64>> {
    let (d, m) = (cp.state_dim(), cp.noise_dim());
    if field.state_dim() != d || field.noise_dim() != m {
        return Err(Error::DimensionMismatch {
            expected: field.state_dim() * field.noise_dim(),
            got: d * m,
        });
    }
    cp.y.grid().check_window((s, t))?;
    let lift = &cp.reference;
    let mut f = vec![0.0; d * m];
    let mut jac = vec![0.0; d * m * d];
    let mut area = vec![0.0; m * m];
    let mut acc = vec![0.0; d];
    for u in s..t {
        let y = cp.value(u);
        field.eval(y, &mut f);
        field.jacobian(y, &mut jac);
        let yp = cp.derivative(u);
        let (xu, xv) = (lift.path().value(u), lift.path().value(u + 1));
        lift.area_into(u, u + 1, &mut area);
        for i in 0..d {
            let mut v = 0.0;
            for j in 0..m {
                v += f[i * m + j] * (xv[j] - xu[j]);
                for l in 0..m {
                    let g: f64 = (0..d).map(|q| jac[(i * m + j) * d + q] * yp[q * m + l]).sum();
                    v += g * area[l * m + j];
                }
            }
            acc[i] += v;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{bm_reference_lift, sample_bm};
    use crate::grid::{make_grid, TimeGrid};
    use crate::lift::lift_smooth;
    use crate::rde::field::{ConstantField, LinearField, SineField, TrigField};
    use crate::rng::RngStream;

    fn bm_lift(seed: u64, m: usize, n: usize) -> RoughPathLift {
        let g = make_grid(0.0, 1.0, n).unwrap();
        bm_reference_lift(&sample_bm(&g, m, &RngStream::new(seed, 0)).unwrap())
    }

    #[test]
    fn validation() {
        let lift = bm_lift(1, 2, 16);
        let y = lift.path().clone();
        assert!(ControlledPath::new(y.clone(), vec![0.0; 3], lift.clone()).is_err());
        let other = bm_lift(1, 2, 8);
        assert!(ControlledPath::new(other.path().clone(), vec![0.0; 9 * 4], lift.clone()).is_err());
        let cp = ControlledPath::identity(lift);
        assert!(compose_controlled(&SineField, &cp).is_err());
        assert!(rough_integral(&SineField, &cp, 0, 3).is_err());
    }

    #[test]
    fn identity_has_zero_remainder() {
        let cp = ControlledPath::identity(bm_lift(2, 2, 64));
        assert!(cp.remainder_seminorm(0.4, (0, 64)).unwrap() < 1e-14);
    }

    #[test]
    fn constant_field_composition_and_integral() {
        let lift = bm_lift(3, 2, 64);
        let cp = ControlledPath::identity(lift.clone());
        let c = ConstantField::new(2, 2, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let z = compose_controlled(&c, &cp).unwrap();
        assert!((0..65).all(|k| z.derivative(k).iter().all(|&v| v == 0.0)));
        let got = rough_integral(&c, &cp, 5, 50).unwrap();
        let dw = lift.path().increment(5, 50);
        let want = [dw[0] - 2.0 * dw[1], 0.5 * dw[0] + 3.0 * dw[1]];
        for i in 0..2 {
            assert!((got[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_field_composition_is_unchanged() {
        let lift = bm_lift(4, 1, 64);
        let cp = ControlledPath::identity(lift);
        let z = compose_controlled(&LinearField::scalar(1.0), &cp).unwrap();
        assert_eq!(z, cp);
    }

    #[test]
    fn linear_integral_is_area_plus_left_point() {
        let lift = bm_lift(5, 1, 128);
        let cp = ControlledPath::identity(lift.clone());
        for &(s, t) in &[(0, 128), (17, 90), (40, 41)] {
            let got = rough_integral(&LinearField::scalar(1.0), &cp, s, t).unwrap()[0];
            let area = lift.area(s, t).unwrap()[(0, 0)];
            let ws = lift.path().value(s)[0];
            let want = area + ws * lift.path().increment(s, t)[0];
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn sine_composition_remainder_shrinks() {
        // R(s,t) = -½ sin(ω_s) δω² + O(δω³), so the 2β-scaled remainder over
        // lags of at most four cells shrinks as the mesh is refined.
        let mut prev = f64::INFINITY;
        for level in [6, 8, 10] {
            let n = 1 << level;
            let g = make_grid(0.0, 1.0, n).unwrap();
            let path = VectorPath::from_fn(g, 1, |t| vec![(3.0 * t).sin() + t]).unwrap();
            let cp = ControlledPath::identity(lift_smooth(&path));
            let z = compose_controlled(&SineField, &cp).unwrap();
            for k in [0, n / 3, n] {
                let w = path.value(k)[0];
                assert!((z.derivative(k)[0] - w.cos()).abs() < 1e-15);
            }
            let r = local_remainder(&z, 0.45, 4);
            for (s, t) in [(0, 4), (n / 2, n / 2 + 3)] {
                let (ws, dw) = (path.value(s)[0], path.increment(s, t)[0]);
                let taylor = z.remainder(s, t)[0] + 0.5 * ws.sin() * dw * dw;
                assert!(taylor.abs() <= dw.abs().powi(3));
            }
            assert!(r.is_finite() && r < prev, "level {level}: {r} vs {prev}");
            prev = r;
        }
    }

    fn local_remainder(z: &ControlledPath, beta: f64, max_lag: usize) -> f64 {
        let n = z.path().n_points();
        let h = z.path().grid().mesh();
        let mut w: f64 = 0.0;
        for s in 0..n - 1 {
            for t in s + 1..(s + max_lag + 1).min(n) {
                let r = z.remainder(s, t)[0].abs();
                w = w.max(r / ((t - s) as f64 * h).powf(2.0 * beta));
            }
        }
        w
    }

    #[test]
    fn integral_is_additive() {
        let lift = bm_lift(6, 2, 128);
        let cp = ControlledPath::identity(lift);
        let whole = rough_integral(&TrigField, &cp, 10, 120).unwrap();
        let a = rough_integral(&TrigField, &cp, 10, 64).unwrap();
        let b = rough_integral(&TrigField, &cp, 64, 120).unwrap();
        for i in 0..2 {
            assert!((whole[i] - a[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_identity() {
        let g = TimeGrid::with_mesh(0.0, 1.0 / 128.0, 256).unwrap();
        let lift = bm_reference_lift(&sample_bm(&g, 2, &RngStream::new(8, 0)).unwrap());
        let cp = ControlledPath::identity(lift);
        for tau in [0usize, 1, 33, 100] {
            let shifted = cp.shift(tau).unwrap();
            let direct = rough_integral(&TrigField, &cp, 20 + tau, 140 + tau).unwrap();
            let moved = rough_integral(&TrigField, &shifted, 20, 140).unwrap();
            for i in 0..2 {
                assert!((direct[i] - moved[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn refinement_order() {
        // Deterministic smooth driver; the compensated sums converge at
        // least at rate 3β - 0.1 under mesh halving.
        let beta = 0.4;
        let omega = |t: f64| vec![(2.0 * t).sin() + 0.3 * t, (3.0 * t).cos() * t];
        let mut values = Vec::new();
        for level in 4..=8 {
            let n = 1 << level;
            let path = VectorPath::from_fn(make_grid(0.0, 1.0, n).unwrap(), 2, omega).unwrap();
            let cp = ControlledPath::identity(lift_smooth(&path));
            values.push(rough_integral(&TrigField, &cp, 0, n).unwrap());
        }
        let diffs: Vec<f64> = values
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .collect();
        // slope of log diff against log h (h halves each level)
        let xs: Vec<f64> = (0..diffs.len()).map(|i| -(i as f64) * 2f64.ln()).collect();
        let ys: Vec<f64> = diffs.iter().map(|d| d.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!(slope >= 3.0 * beta - 0.1, "slope {slope}");
    }
}
