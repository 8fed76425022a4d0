//! Vector fields `f: ℝ^d → ℝ^{d×m}` with closed-form Jacobians.

use rand::Rng;

use crate::error::{Error, Result};

/// Known sup norms of `f`, `Df` and `D²f` (max-entry norm), when finite.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldBounds {
    pub f: Option<f64>,
    pub df: Option<f64>,
    pub d2f: Option<f64>,
}

/// `f(y)` is stored row-major as `out[i*m + j] = f_ij(y)`; the Jacobian as
/// `out[(i*m + j)*d + k] = ∂f_ij/∂y_k`.
pub trait VectorField: Send + Sync {
    fn name(&self) -> &str;
    fn state_dim(&self) -> usize;
    fn noise_dim(&self) -> usize;
    fn eval(&self, y: &[f64], out: &mut [f64]);
    fn jacobian(&self, y: &[f64], out: &mut [f64]);

    fn bounds(&self) -> FieldBounds {
        FieldBounds::default()
    }
}

/// `f ≡ C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField {
    d: usize,
    m: usize,
    c: Vec<f64>,
}

impl ConstantField {
    pub fn new(d: usize, m: usize, c: Vec<f64>) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidParameter("field dimensions must be positive".into()));
        }
        if c.len() != d * m {
            return Err(Error::DimensionMismatch {
                expected: d * m,
                got: c.len(),
            });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("constant field must be finite".into()));
        }
        Ok(Self { d, m, c })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.c
    }
}

impl VectorField for ConstantField {
    fn name(&self) -> &str {
        "constant"
    }
    fn state_dim(&self) -> usize {
        self.d
    }
    fn noise_dim(&self) -> usize {
        self.m
    }
    fn eval(&self, _y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.c);
    }
    fn jacobian(&self, _y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn bounds(&self) -> FieldBounds {
        FieldBounds {
            f: Some(self.c.iter().fold(0.0, |a, v| a.max(v.abs()))),
            df: Some(0.0),
            d2f: Some(0.0),
        }
    }
}

/// `f_ij(y) = Σ_k A_ijk y_k`. Unbounded, so outside `C³_b`; used as a
/// closed-form oracle only.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearField {
    d: usize,
    m: usize,
    a: Vec<f64>,
}

impl LinearField {
    /// Tensor in the Jacobian layout `a[(i*m + j)*d + k]`.
    pub fn new(d: usize, m: usize, a: Vec<f64>) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidParameter("field dimensions must be positive".into()));
        }
        if a.len() != d * m * d {
            return Err(Error::DimensionMismatch {
                expected: d * m * d,
                got: a.len(),
            });
        }
        Ok(Self { d, m, a })
    }

    /// `f(y) = a·y` with `d = m = 1`.
    pub fn scalar(a: f64) -> Self {
        Self { d: 1, m: 1, a: vec![a] }
    }
}

impl VectorField for LinearField {
    fn name(&self) -> &str {
        "linear"
    }
    fn state_dim(&self) -> usize {
        self.d
    }
    fn noise_dim(&self) -> usize {
        self.m
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        for (ij, o) in out.iter_mut().enumerate() {
            *o = self.a[ij * self.d..(ij + 1) * self.d].iter().zip(y).map(|(a, y)| a * y).sum();
        }
    }
    fn jacobian(&self, _y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.a);
    }
    fn bounds(&self) -> FieldBounds {
        FieldBounds {
            f: None,
            df: Some(self.a.iter().fold(0.0, |a, v| a.max(v.abs()))),
            d2f: Some(0.0),
        }
    }
}

/// `f(y) = sin y` with `d = m = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SineField;

impl VectorField for SineField {
    fn name(&self) -> &str {
        "sine"
    }
    fn state_dim(&self) -> usize {
        1
    }
    fn noise_dim(&self) -> usize {
        1
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        out[0] = y[0].sin();
    }
    fn jacobian(&self, y: &[f64], out: &mut [f64]) {
        out[0] = y[0].cos();
    }
    fn bounds(&self) -> FieldBounds {
        FieldBounds {
            f: Some(1.0),
            df: Some(1.0),
            d2f: Some(1.0),
        }
    }
}

/// Bounded `C^∞` field with `d = m = 2`, built from the linear forms
/// `p = y1 + y2/2` and `q = y1 - y2`:
///
/// ```text
/// f(y) = [ sin p        cos(q)/2 ]
///        [ 4 cos(p)/5   sin q    ]
/// ```
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrigField;

impl VectorField for TrigField {
    fn name(&self) -> &str {
        "trig2d"
    }
    fn state_dim(&self) -> usize {
        2
    }
    fn noise_dim(&self) -> usize {
        2
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        let p = y[0] + 0.5 * y[1];
        let q = y[0] - y[1];
        out[0] = p.sin();
        out[1] = 0.5 * q.cos();
        out[2] = 0.8 * p.cos();
        out[3] = q.sin();
    }
    fn jacobian(&self, y: &[f64], out: &mut [f64]) {
        let p = y[0] + 0.5 * y[1];
        let q = y[0] - y[1];
        let (sp, cp, sq, cq) = (p.sin(), p.cos(), q.sin(), q.cos());
        // ∂p = (1, 1/2), ∂q = (1, -1)
        out[0] = cp;
        out[1] = 0.5 * cp;
        out[2] = -0.5 * sq;
        out[3] = 0.5 * sq;
        out[4] = -0.8 * sp;
        out[5] = -0.4 * sp;
        out[6] = cq;
        out[7] = -cq;
    }
    fn bounds(&self) -> FieldBounds {
        FieldBounds {
            f: Some(1.0),
            df: Some(1.0),
            d2f: Some(1.0),
        }
    }
}

/// Names accepted by [`field_by_name`].
pub const FIELD_NAMES: [&str; 4] = ["constant", "linear", "sine", "trig2d"];

/// Registry of shipped fields. `constant` is the `dim × dim` matrix with
/// ones on the diagonal and `1/2` elsewhere; `linear` is `f(y) = y/2` in
/// one dimension.
pub fn field_by_name(name: &str, dim: usize) -> Result<Box<dyn VectorField>> {
    match name {
        "constant" => {
            let c = (0..dim * dim).map(|ij| if ij / dim == ij % dim { 1.0 } else { 0.5 }).collect();
            Ok(Box::new(ConstantField::new(dim, dim, c)?))
        }
        "linear" => Ok(Box::new(LinearField::scalar(0.5))),
        "sine" => Ok(Box::new(SineField)),
        "trig2d" => Ok(Box::new(TrigField)),
        other => Err(Error::InvalidParameter(format!(
            "unknown field {other:?}; expected one of {}",
            FIELD_NAMES.join(", ")
        ))),
    }
}

/// Largest relative error between the analytic Jacobian and central
/// differences of `f` with step `h`, over `n_points` states drawn uniformly
/// from `[-scale, scale]^d`. Entries are compared relative to `max(1, |Df|)`.
pub fn jacobian_check<R: Rng + ?Sized>(field: &dyn VectorField, n_points: usize, scale: f64, h: f64, rng: &mut R) -> f64 {
    let (d, m) = (field.state_dim(), field.noise_dim());
    let mut y = vec![0.0; d];
    let mut jac = vec![0.0; d * m * d];
    let (mut fp, mut fm) = (vec![0.0; d * m], vec![0.0; d * m]);
    let mut worst: f64 = 0.0;
    for _ in 0..n_points {
        for v in y.iter_mut() {
            *v = rng.random_range(-scale..=scale);
        }
        field.jacobian(&y, &mut jac);
        for k in 0..d {
            let orig = y[k];
            y[k] = orig + h;
            field.eval(&y, &mut fp);
            y[k] = orig - h;
            field.eval(&y, &mut fm);
            y[k] = orig;
            for ij in 0..d * m {
                let fd = (fp[ij] - fm[ij]) / (2.0 * h);
                let exact = jac[ij * d + k];
                worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
            }
        }
    }
    worst
}
