//! Runs one experiment command at a reduced size and writes its CSV report.
//!
//! Usage: `cargo run --release --example run_experiment -- [command] [out-dir]`
//! with `command` one of the CLI subcommand names (default `moment-scaling`).

use std::path::PathBuf;

use roughcocycle::experiments::{run, Command, ExperimentConfig};
use roughcocycle::{Error, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "moment-scaling".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    let command =
        Command::from_name(&name).ok_or_else(|| Error::InvalidParameter(format!("unknown command {name:?}")))?;
    let cfg = ExperimentConfig {
        mesh_exponent: 10,
        samples: 100,
        deltas: vec![0.25, 0.125, 0.0625, 0.03125],
        ..ExperimentConfig::default()
    };
    let report = run(command, &cfg)?;
    for note in &report.notes {
        println!("{note}");
    }
    for path in report.write(&out)? {
        println!("wrote {}", path.display());
    }
    println!("{}: {}", report.command, if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
