//! Monte Carlo experiments: configuration, orchestration and CSV reports.
//!
//! Samples are drawn from independent substreams indexed by sample number,
//! evaluated in parallel and collected in index order, so every report is
//! identical for a given configuration regardless of thread count.

pub mod config;
pub mod report;
pub mod stats;

mod cocycle;
mod cov_check;
mod moments;
mod path_conv;
mod simulate;
mod variation_check;

use rayon::prelude::*;

use crate::driver::sample_bm;
use crate::error::{Error, Result};
use crate::grid::{TimeGrid, VectorPath};
use crate::rng::RngStream;

pub use cocycle::cocycle_check;
pub use config::{load_config, save_config, ExperimentConfig, MANDATORY_KEYS};
pub use cov_check::{covariance_check, covariance_table};
pub use moments::moment_scaling;
pub use path_conv::{path_convergence, rds_convergence};
pub use report::{write_csv, Cell, CsvTable, Report};
pub use simulate::{simulate, solve_trajectory, DriverKind};
pub use variation_check::variation_check;

/// Stream offset for fBm samples of the `k`-th Hurst index: `(k+1)·2^40`.
const FBM_STREAM_BASE: u64 = 1 << 40;
/// Stream offset for the finer grid of the halving comparison.
const FINE_STREAM_BASE: u64 = 1 << 41;
/// Stream of the random evaluation points of the covariance identity.
const IDENTITY_STREAM: u64 = u64::MAX;

/// Experiment subcommands taking only a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    CovarianceCheck,
    VariationCheck,
    PathConvergence,
    RdsConvergence,
    CocycleCheck,
    MomentScaling,
    CovarianceTable,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Simulate,
        Command::CovarianceCheck,
        Command::VariationCheck,
        Command::PathConvergence,
        Command::RdsConvergence,
        Command::CocycleCheck,
        Command::MomentScaling,
        Command::CovarianceTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::CovarianceCheck => "covariance-check",
            Command::VariationCheck => "variation-check",
            Command::PathConvergence => "path-convergence",
            Command::RdsConvergence => "rds-convergence",
            Command::CocycleCheck => "cocycle-check",
            Command::MomentScaling => "moment-scaling",
            Command::CovarianceTable => "covariance-table",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Runs one command, honouring `max_workers`.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    with_workers(cfg, || match command {
        Command::Simulate => simulate(cfg, None),
        Command::CovarianceCheck => covariance_check(cfg),
        Command::VariationCheck => variation_check(cfg),
        Command::PathConvergence => path_convergence(cfg),
        Command::RdsConvergence => rds_convergence(cfg),
        Command::CocycleCheck => cocycle_check(cfg),
        Command::MomentScaling => moment_scaling(cfg),
        Command::CovarianceTable => covariance_table(cfg),
    })
}

/// Runs `f` on a pool of at most `max_workers` threads (0: global pool).
pub fn with_workers<T: Send>(cfg: &ExperimentConfig, f: impl FnOnce() -> T + Send) -> T {
    if cfg.max_workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.max_workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// `f(0..n)` evaluated in parallel, collected in index order.
fn par_samples<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Brownian sample on `[0, cells·mesh]` from substream `stream`.
fn brownian(cfg: &ExperimentConfig, mesh: f64, cells: usize, dim: usize, stream: u64) -> Result<VectorPath> {
    let grid = TimeGrid::with_mesh(0.0, mesh, cells)?;
    sample_bm(&grid, dim, &RngStream::new(cfg.master_seed, stream))
}

/// Cells of `mesh` needed to reach `t`, rounded up.
fn cells_for(t: f64, mesh: f64) -> usize {
    let c = t / mesh;
    let r = c.round();
    if (c - r).abs() < 1e-9 {
        r as usize
    } else {
        c.ceil() as usize
    }
}

fn collect_results<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

fn check_field_dims(field: &dyn crate::rde::VectorField, cfg: &ExperimentConfig, xi: &[f64]) -> Result<()> {
    if field.noise_dim() != cfg.dim {
        return Err(Error::InvalidConfig(format!(
            "field {} is driven by {} noise components but dim = {}",
            field.name(),
            field.noise_dim(),
            cfg.dim
        )));
    }
    if xi.len() != field.state_dim() {
        return Err(Error::InvalidConfig(format!(
            "field {} has state dimension {} but xi has {} entries",
            field.name(),
            field.state_dim(),
            xi.len()
        )));
    }
    Ok(())
}
