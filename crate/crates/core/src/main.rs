use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use roughcocycle::experiments::{self, load_config, Command, DriverKind, ExperimentConfig, Report};

#[derive(Parser)]
#[command(name = "roughcocycle", version, about = "Smooth approximation of rough random dynamical systems: experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dump ω, ω_δ and X_δ of one sample.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Single smoothing width instead of the configured list.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Monte Carlo variances against the closed-form covariances.
    CovarianceCheck(Common),
    /// Brute-force ρ-variation against the explicit bounds.
    VariationCheck(Common),
    /// Decay of E ρ_β(𝛚_δ, 𝛚)² as δ shrinks.
    PathConvergence(Common),
    /// Convergence of smooth solutions to the rough solution.
    RdsConvergence(Common),
    /// Cocycle defects of the rough and RK4 flows.
    CocycleCheck(Common),
    /// Moment scaling of increments and areas across dyadic scales.
    MomentScaling(Common),
    /// Closed-form covariance lattice.
    CovarianceTable(Common),
    /// Dump one solution trajectory.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Vector field name (constant, linear, sine, trig2d).
        #[arg(long)]
        field: Option<String>,
        /// bm (rough solver) or smooth (RK4 on ω_δ).
        #[arg(long, default_value = "bm")]
        driver: DriverKind,
        /// Smoothing width for the smooth driver.
        #[arg(long, default_value_t = 0.0625)]
        delta: f64,
        /// Initial value, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Option<Vec<f64>>,
    },
}

fn config(common: &Common) -> roughcocycle::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> roughcocycle::Result<(Report, PathBuf)> {
    let (common, result) = match cli.command {
        Cmd::Simulate { common, delta } => {
            let cfg = config(&common)?;
            let r = experiments::with_workers(&cfg, || experiments::simulate(&cfg, delta));
            (cfg, r)
        }
        Cmd::Solve {
            common,
            field,
            driver,
            delta,
            xi,
        } => {
            let cfg = config(&common)?;
            let name = field.unwrap_or_else(|| cfg.field.clone());
            let r = experiments::solve_trajectory(&cfg, &name, driver, delta, xi.as_deref());
            (cfg, r)
        }
        other => {
            let (command, common) = match other {
                Cmd::CovarianceCheck(c) => (Command::CovarianceCheck, c),
                Cmd::VariationCheck(c) => (Command::VariationCheck, c),
                Cmd::PathConvergence(c) => (Command::PathConvergence, c),
                Cmd::RdsConvergence(c) => (Command::RdsConvergence, c),
                Cmd::CocycleCheck(c) => (Command::CocycleCheck, c),
                Cmd::MomentScaling(c) => (Command::MomentScaling, c),
                Cmd::CovarianceTable(c) => (Command::CovarianceTable, c),
                Cmd::Simulate { .. } | Cmd::Solve { .. } => unreachable!(),
            };
            let cfg = config(&common)?;
            let r = experiments::run(command, &cfg);
            (cfg, r)
        }
    };
    Ok((result?, common.output_dir))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((report, dir)) => {
            let written = match report.write(&dir) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            for note in &report.notes {
                println!("{note}");
            }
            for path in written {
                println!("wrote {}", path.display());
            }
            println!("{}: {}", report.command, if report.pass { "PASS" } else { "FAIL" });
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
