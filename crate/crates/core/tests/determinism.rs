use roughcocycle::experiments::{run, Command, ExperimentConfig, Report};

fn tiny() -> ExperimentConfig {
    ExperimentConfig {
        mesh_exponent: 8,
        deltas: vec![0.25, 0.125, 0.0625],
        samples: 100,
        cov_deltas: vec![0.25],
        u_values: vec![0.1, 0.5],
        fbm_cells: 64,
        fbm_samples: 100,
        fbm_u_values: vec![0.25],
        cocycle_samples: 2,
        cocycle_mesh_exponent: 6,
        ..ExperimentConfig::default()
    }
}

fn csv_bytes(report: &Report) -> Vec<(String, String)> {
    report.tables.iter().map(|(f, t)| (f.clone(), t.to_csv_string())).collect()
}

#[test]
fn reports_are_identical_across_runs_and_thread_counts() {
    for command in Command::ALL {
        let serial = ExperimentConfig { max_workers: 1, ..tiny() };
        let parallel = ExperimentConfig { max_workers: 3, ..tiny() };
        let a = run(command, &serial).unwrap();
        let b = run(command, &parallel).unwrap();
        let c = run(command, &serial).unwrap();
        assert_eq!(csv_bytes(&a), csv_bytes(&b), "{}", command.name());
        assert_eq!(csv_bytes(&a), csv_bytes(&c), "{}", command.name());
        assert!(!a.tables.is_empty());
    }
}

#[test]
fn seed_changes_monte_carlo_output() {
    let a = run(Command::PathConvergence, &tiny()).unwrap();
    let b = run(Command::PathConvergence, &ExperimentConfig { master_seed: 1, ..tiny() }).unwrap();
    assert_ne!(csv_bytes(&a), csv_bytes(&b));
}

#[test]
fn written_files_match_tables() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(Command::CovarianceTable, &tiny()).unwrap();
    let paths = report.write(dir.path()).unwrap();
    assert_eq!(paths.len(), report.tables.len());
    for (path, (_, table)) in paths.iter().zip(&report.tables) {
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, table.to_csv_string());
        assert!(!text.contains('\r'));
    }
}
