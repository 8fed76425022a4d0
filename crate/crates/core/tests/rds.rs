use roughcocycle::driver::{bm_reference_lift, sample_bm};
use roughcocycle::experiments::{rds_convergence, ExperimentConfig};
use roughcocycle::grid::{holder_seminorm, TimeGrid, VectorPath};
use roughcocycle::rde::{solve_ode_rk4, solve_rde, ConstantField};
use roughcocycle::rng::RngStream;
use roughcocycle::{smooth, SmoothingParams};

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        mesh_exponent: 8,
        deltas: vec![0.25, 0.125, 0.0625],
        samples: 100,
        ..ExperimentConfig::default()
    }
}

#[test]
fn constant_field_difference_is_the_driver_difference() {
    // Y_δ - Y = C (ω_δ - ω): the solution gap is the path term of the metric
    // pushed through C.
    let c = [1.0, 0.5, -0.25, 2.0];
    let field = ConstantField::new(2, 2, c.to_vec()).unwrap();
    let h = 1.0 / 512.0;
    let grid = TimeGrid::with_mesh(0.0, h, 512 + 64).unwrap();
    let xi = [0.2, 0.1];
    for i in 0..5 {
        let omega = sample_bm(&grid, 2, &RngStream::new(11, i)).unwrap();
        let base = omega.restrict((0, 512)).unwrap();
        let y = solve_rde(&field, &bm_reference_lift(&base), &xi, (0, 512)).unwrap();
        for cells in [16usize, 64] {
            let sm = smooth(&omega, &SmoothingParams::from_cells(cells, h).unwrap(), (0, 512)).unwrap();
            let yd = solve_ode_rk4(&field, &sm, &xi, (0, 512), 1).unwrap();
            let lhs = holder_seminorm(&yd.difference(y.path()).unwrap(), 0.4, (0, 512)).unwrap();
            let x = sm.path().difference(&base).unwrap();
            let cx = VectorPath::from_fn(x.grid().clone(), 2, |t| {
                let k = x.grid().index_of(t).unwrap();
                let v = x.value(k);
                vec![c[0] * v[0] + c[1] * v[1], c[2] * v[0] + c[3] * v[1]]
            })
            .unwrap();
            let rhs = holder_seminorm(&cx, 0.4, (0, 512)).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10, "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn equal_initial_values_give_zero_gap_column() {
    let report = rds_convergence(&small_config()).unwrap();
    let samples = report.table("rds_convergence_samples.csv").unwrap();
    let gaps = samples.floats("xi_gap").unwrap();
    assert_eq!(gaps.len(), 300);
    assert!(gaps.iter().all(|g| *g == 0.0));
    let summary = report.table("rds_convergence.csv").unwrap();
    assert!(summary.floats("mean_diff").unwrap().iter().all(|d| d.is_finite() && *d > 0.0));
}

#[test]
fn shifted_initial_values_enter_the_ratio() {
    let cfg = ExperimentConfig {
        xi_delta: Some(vec![vec![0.6, -0.5], vec![0.55, -0.5], vec![0.525, -0.5]]),
        ..small_config()
    };
    let report = rds_convergence(&cfg).unwrap();
    let samples = report.table("rds_convergence_samples.csv").unwrap();
    let gaps = samples.floats("xi_gap").unwrap();
    for (j, want) in [0.1, 0.05, 0.025].iter().enumerate() {
        assert!((gaps[j] - want).abs() < 1e-12);
    }
    let ratios = samples.floats("ratio").unwrap();
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
}
