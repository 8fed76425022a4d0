//! Plain-text `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Keys that must appear in every configuration file.
pub const MANDATORY_KEYS: [&str; 8] = ["master_seed", "horizon", "mesh_exponent", "deltas", "beta", "rho", "q", "samples"];

const OPTIONAL_KEYS: [&str; 18] = [
    "output_dir",
    "field",
    "dim",
    "xi",
    "xi_delta",
    "kolmogorov",
    "hurst",
    "cov_deltas",
    "u_values",
    "fbm_cells",
    "fbm_delta",
    "fbm_u_values",
    "fbm_samples",
    "variation_rhos",
    "cocycle_samples",
    "cocycle_mesh_exponent",
    "substeps",
    "max_workers",
];

/// Parameters shared by every experiment command.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Time horizon `T`; paths live on `[0, T]`.
    pub horizon: f64,
    /// Grid mesh is `2^-mesh_exponent`.
    pub mesh_exponent: u32,
    /// Smoothing widths, dyadic and strictly descending.
    pub deltas: Vec<f64>,
    pub beta: f64,
    pub rho: f64,
    pub q: f64,
    pub samples: usize,
    pub output_dir: PathBuf,
    pub field: String,
    /// Noise dimension `m` of the Brownian driver.
    pub dim: usize,
    pub xi: Vec<f64>,
    /// Initial values `ξ_δ`, one per entry of `deltas`; `None` means `ξ_δ = ξ`.
    pub xi_delta: Option<Vec<Vec<f64>>>,
    /// Enforce `β ∈ (1/3, 1/(2ρ) - 1/(2q))` and `1/ρ - 1/q > 2/3`.
    pub kolmogorov: bool,
    pub hurst: Vec<f64>,
    pub cov_deltas: Vec<f64>,
    pub u_values: Vec<f64>,
    pub fbm_cells: usize,
    pub fbm_delta: f64,
    pub fbm_u_values: Vec<f64>,
    pub fbm_samples: usize,
    pub variation_rhos: Vec<f64>,
    pub cocycle_samples: usize,
    pub cocycle_mesh_exponent: u32,
    /// RK4 substeps per grid cell.
    pub substeps: usize,
    /// Upper bound on Monte Carlo worker threads; 0 uses all cores.
    pub max_workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 20_240_601,
            horizon: 1.0,
            mesh_exponent: 12,
            deltas: (2..=6).map(|j| 2f64.powi(-j)).collect(),
            beta: 0.335,
            rho: 1.25,
            q: 8.0,
            samples: 500,
            output_dir: PathBuf::from("out"),
            field: "trig2d".into(),
            dim: 2,
            xi: vec![0.5, -0.5],
            xi_delta: None,
            kolmogorov: true,
            hurst: vec![0.3, 0.7],
            cov_deltas: vec![0.1, 0.25, 0.5],
            u_values: vec![0.05, 0.2, 0.5, 1.0, 2.0],
            fbm_cells: 256,
            fbm_delta: 0.25,
            fbm_u_values: vec![0.125, 0.25, 0.5, 0.75],
            fbm_samples: 5000,
            variation_rhos: vec![1.0, 1.25, 1.5],
            cocycle_samples: 50,
            cocycle_mesh_exponent: 8,
            substeps: 1,
            max_workers: 0,
        }
    }
}

fn is_dyadic(x: f64) -> bool {
    x > 0.0 && x <= 1.0 && {
        let j = -x.log2();
        (j - j.round()).abs() < 1e-12
    }
}

impl ExperimentConfig {
    pub fn mesh(&self) -> f64 {
        2f64.powi(-(self.mesh_exponent as i32))
    }

    /// Grid cells covering `[0, T]`.
    pub fn horizon_cells(&self) -> usize {
        (self.horizon / self.mesh()).round() as usize
    }

    /// `ξ_δ` for the `i`-th smoothing width.
    pub fn xi_for(&self, i: usize) -> &[f64] {
        match &self.xi_delta {
            Some(list) => &list[i],
            None => &self.xi,
        }
    }

    /// Upper end of the open admissible `β` interval.
    pub fn beta_upper(&self) -> f64 {
        1.0 / (2.0 * self.rho) - 1.0 / (2.0 * self.q)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon {} must be positive", self.horizon));
        }
        if !(1..=20).contains(&self.mesh_exponent) || !(1..=20).contains(&self.cocycle_mesh_exponent) {
            return bad("mesh exponents must lie in 1..=20".into());
        }
        let cells = self.horizon / self.mesh();
        if (cells - cells.round()).abs() > 1e-9 {
            return bad(format!("horizon {} is not a multiple of the mesh {}", self.horizon, self.mesh()));
        }
        if self.deltas.is_empty() {
            return bad("deltas must not be empty".into());
        }
        if let Some(d) = self.deltas.iter().find(|d| !is_dyadic(**d)) {
            return bad(format!("delta {d} is not of the form 2^-j in (0, 1]"));
        }
        if !self.deltas.windows(2).all(|w| w[1] < w[0]) {
            return bad("deltas must be strictly descending".into());
        }
        if let Some(d) = self.deltas.iter().find(|d| **d < 8.0 * self.mesh() * (1.0 - 1e-12)) {
            return bad(format!("delta {d} is below 8·mesh = {}", 8.0 * self.mesh()));
        }
        if !(self.rho >= 1.0) {
            return bad(format!("rho {} must be at least 1", self.rho));
        }
        if !(self.q > 1.0) {
            return bad(format!("q {} must exceed 1", self.q));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return bad(format!("beta {} must lie in (0, 1/2)", self.beta));
        }
        if self.kolmogorov {
            if !(1.0 / self.rho - 1.0 / self.q > 2.0 / 3.0) {
                return bad(format!("1/rho - 1/q = {} must exceed 2/3", 1.0 / self.rho - 1.0 / self.q));
            }
            let upper = self.beta_upper();
            if !(self.beta > 1.0 / 3.0 && self.beta < upper) {
                return bad(format!("beta {} must lie in (1/3, {upper})", self.beta));
            }
        }
        if self.samples < 100 {
            return bad(format!("samples {} must be at least 100", self.samples));
        }
        if self.dim == 0 {
            return bad("dim must be positive".into());
        }
        if self.xi.is_empty() || self.xi.iter().any(|x| !x.is_finite()) {
            return bad("xi must be a non-empty finite vector".into());
        }
        if let Some(list) = &self.xi_delta {
            if list.len() != self.deltas.len() {
                return bad(format!("xi_delta has {} entries for {} deltas", list.len(), self.deltas.len()));
            }
            if list.iter().any(|v| v.len() != self.xi.len() || v.iter().any(|x| !x.is_finite())) {
                return bad("every xi_delta entry must be finite with the length of xi".into());
            }
        }
        if self.hurst.iter().any(|h| !(*h > 0.0 && *h < 1.0)) {
            return bad("hurst values must lie in (0, 1)".into());
        }
        if self.cov_deltas.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
            return bad("cov_deltas must lie in (0, 1]".into());
        }
        if self.u_values.iter().any(|u| !(*u >= 0.0 && u.is_finite())) {
            return bad("u_values must be non-negative".into());
        }
        if !(1..=4096).contains(&self.fbm_cells) {
            return bad("fbm_cells must lie in 1..=4096".into());
        }
        if !(self.fbm_delta > 0.0 && self.fbm_delta <= 1.0) {
            return bad("fbm_delta must lie in (0, 1]".into());
        }
        if self.fbm_u_values.iter().any(|u| !(*u >= 0.0 && u + self.fbm_delta <= 1.0 + 1e-12)) {
            return bad("fbm_u_values must satisfy 0 <= u and u + fbm_delta <= 1".into());
        }
        if self.fbm_samples < 2 || self.cocycle_samples == 0 || self.substeps == 0 {
            return bad("fbm_samples >= 2, cocycle_samples >= 1 and substeps >= 1 are required".into());
        }
        if self.variation_rhos.iter().any(|r| !(*r >= 1.0)) {
            return bad("variation_rhos must be at least 1".into());
        }
        Ok(())
    }

    /// Parses configuration text; `origin` labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut pairs: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let perr = |line: usize, message: String| Error::ConfigParse {
            path: origin.to_string(),
            line,
            message,
        };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(line_no, format!("expected `key = value`, found {line:?}")))?;
            let key = key.trim();
            if !MANDATORY_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
                return Err(perr(line_no, format!("unknown key {key:?}")));
            }
            if pairs.insert(key.to_string(), (line_no, value.trim().to_string())).is_some() {
                return Err(perr(line_no, format!("duplicate key {key:?}")));
            }
        }
        let missing: Vec<String> = MANDATORY_KEYS.iter().filter(|k| !pairs.contains_key(**k)).map(|k| k.to_string()).collect();
        if !missing.is_empty() {
            return Err(Error::MissingKeys(missing));
        }

        let mut cfg = ExperimentConfig::default();
        for (key, (line, value)) in &pairs {
            let line = *line;
            let num = |v: &str| v.parse::<f64>().map_err(|_| perr(line, format!("{key}: {v:?} is not a number")));
            let int = |v: &str| v.parse::<usize>().map_err(|_| perr(line, format!("{key}: {v:?} is not a non-negative integer")));
            let list = |v: &str| -> Result<Vec<f64>> {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',').map(|x| num(x.trim())).collect()
            };
            match key.as_str() {
                "master_seed" => {
                    cfg.master_seed = value.parse().map_err(|_| perr(line, format!("master_seed: {value:?} is not a u64")))?
                }
                "horizon" => cfg.horizon = num(value)?,
                "mesh_exponent" => cfg.mesh_exponent = int(value)? as u32,
                "deltas" => cfg.deltas = list(value)?,
                "beta" => cfg.beta = num(value)?,
                "rho" => cfg.rho = num(value)?,
                "q" => cfg.q = num(value)?,
                "samples" => cfg.samples = int(value)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "field" => cfg.field = value.clone(),
                "dim" => cfg.dim = int(value)?,
                "xi" => cfg.xi = list(value)?,
                "xi_delta" => {
                    cfg.xi_delta = Some(value.split(';').map(|v| list(v.trim())).collect::<Result<_>>()?);
                }
                "kolmogorov" => {
                    cfg.kolmogorov = value
                        .parse()
                        .map_err(|_| perr(line, format!("kolmogorov: {value:?} is not true/false")))?
                }
                "hurst" => cfg.hurst = list(value)?,
                "cov_deltas" => cfg.cov_deltas = list(value)?,
                "u_values" => cfg.u_values = list(value)?,
                "fbm_cells" => cfg.fbm_cells = int(value)?,
                "fbm_delta" => cfg.fbm_delta = num(value)?,
                "fbm_u_values" => cfg.fbm_u_values = list(value)?,
                "fbm_samples" => cfg.fbm_samples = int(value)?,
                "variation_rhos" => cfg.variation_rhos = list(value)?,
                "cocycle_samples" => cfg.cocycle_samples = int(value)?,
                "cocycle_mesh_exponent" => cfg.cocycle_mesh_exponent = int(value)? as u32,
                "substeps" => cfg.substeps = int(value)?,
                "max_workers" => cfg.max_workers = int(value)?,
                _ => unreachable!("key filtered above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serializes every key; [`ExperimentConfig::parse`] inverts it.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("master_seed", self.master_seed.to_string());
        kv("horizon", self.horizon.to_string());
        kv("mesh_exponent", self.mesh_exponent.to_string());
        kv("deltas", join(&self.deltas));
        kv("beta", self.beta.to_string());
        kv("rho", self.rho.to_string());
        kv("q", self.q.to_string());
        kv("samples", self.samples.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        kv("field", self.field.clone());
        kv("dim", self.dim.to_string());
        kv("xi", join(&self.xi));
        if let Some(list) = &self.xi_delta {
            kv("xi_delta", list.iter().map(|v| join(v)).collect::<Vec<_>>().join("; "));
        }
        kv("kolmogorov", self.kolmogorov.to_string());
        kv("hurst", join(&self.hurst));
        kv("cov_deltas", join(&self.cov_deltas));
        kv("u_values", join(&self.u_values));
        kv("fbm_cells", self.fbm_cells.to_string());
        kv("fbm_delta", self.fbm_delta.to_string());
        kv("fbm_u_values", join(&self.fbm_u_values));
        kv("fbm_samples", self.fbm_samples.to_string());
        kv("variation_rhos", join(&self.variation_rhos));
        kv("cocycle_samples", self.cocycle_samples.to_string());
        kv("cocycle_mesh_exponent", self.cocycle_mesh_exponent.to_string());
        kv("substeps", self.substeps.to_string());
        kv("max_workers", self.max_workers.to_string());
        s
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::parse(&text, &path.display().to_string())
}

/// Writes a configuration file readable by [`load_config`].
pub fn save_config(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    fs::write(path, cfg.to_text()).map_err(|e| Error::io(path, e))
}
