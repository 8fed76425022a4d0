//! Empirical moment scaling of increments and areas across dyadic scales.

use super::config::ExperimentConfig;
use super::report::{Cell, CsvTable, Report};
use super::stats::log_log_slope;
use super::{brownian, cells_for, collect_results, par_samples};
use crate::covariance::constant_m;
use crate::driver::bm_reference_lift;
use crate::error::{Error, Result};
use crate::lift::RoughPathLift;
use crate::smoothing::{diff_lift, smooth, SmoothingParams};

/// Slack on the theoretical increment and area exponents.
const EXPONENT_SLACK: f64 = 0.05;
/// Constant in the second-moment bound for the areas of `X_δ`.
const AREA_CONSTANT: f64 = 3.0;

/// Moment sums of one process at one scale, pooled over disjoint windows
/// and components.
#[derive(Clone, Debug, Default)]
struct Sums {
    incr_pow: f64,
    incr_sq: f64,
    incr_count: f64,
    area_pow: f64,
    area_sq: Vec<f64>,
    area_count: f64,
}

impl Sums {
    fn add(&mut self, other: &Sums) {
        self.incr_pow += other.incr_pow;
        self.incr_sq += other.incr_sq;
        self.incr_count += other.incr_count;
        self.area_pow += other.area_pow;
        if self.area_sq.is_empty() {
            self.area_sq = vec![0.0; other.area_sq.len()];
        }
        for (a, b) in self.area_sq.iter_mut().zip(&other.area_sq) {
            *a += b;
        }
        self.area_count += other.area_count;
    }
}

fn scan(lift: &RoughPathLift, lag: usize, q: f64) -> Sums {
    let m = lift.dim();
    let n = lift.grid().n_cells();
    let mut s = Sums {
        area_sq: vec![0.0; m * m],
        ..Sums::default()
    };
    let mut area = vec![0.0; m * m];
    let mut start = 0;
    while start + lag <= n {
        let dx = lift.path().increment(start, start + lag);
        for v in dx {
            s.incr_pow += v.abs().powf(2.0 * q);
            s.incr_sq += v * v;
            s.incr_count += 1.0;
        }
        lift.area_into(start, start + lag, &mut area);
        for (e, a) in area.iter().enumerate() {
            s.area_pow += a.abs().powf(q);
            s.area_sq[e] += a * a;
        }
        s.area_count += 1.0;
        start += lag;
    }
    s
}

/// Processes in report order: `bm`, then `omega_delta` and `x_delta` per δ.
fn labels(cfg: &ExperimentConfig) -> Vec<(&'static str, Option<f64>)> {
    let mut v = vec![("bm", None)];
    for &d in &cfg.deltas {
        v.push(("omega_delta", Some(d)));
        v.push(("x_delta", Some(d)));
    }
    v
}

/// Per process and dyadic scale `r`: empirical `L_{2q}` and `L_2` norms of
/// increments, `L_q` and entrywise `L_2` norms of areas. `x_delta` rows are
/// checked against `ε r^{1/(2ρ)}` (increments) and
/// `sqrt(3)·ε²·M(ρ)·r^{1/ρ}` (areas) with `ε = δ^{(1-1/ρ)/2}`. Fitted
/// exponents of `bm` and `omega_delta` must reach `1/(2ρ) - 0.05` and
/// `1/ρ - 0.05`.
pub fn moment_scaling(cfg: &ExperimentConfig) -> Result<Report> {
    let h = cfg.mesh();
    let n = cfg.horizon_cells();
    let scales: Vec<usize> = (0..)
        .map(|j| n >> j)
        .take_while(|&lag| lag >= 8)
        .filter(|&lag| lag > 0 && n.is_multiple_of(lag) && lag < n)
        .collect();
    if scales.len() < 2 {
        return Err(Error::InvalidConfig("moment scaling needs at least two dyadic scales of 8 cells or more".into()));
    }
    let procs = labels(cfg);
    let extra = cells_for(cfg.deltas[0], h);
    let per_sample = collect_results(par_samples(cfg.samples, |i| -> Result<Vec<Vec<Sums>>> {
        let omega = brownian(cfg, h, n + extra, cfg.dim, i as u64)?;
        let mut lifts = vec![bm_reference_lift(&omega.restrict((0, n))?)];
        for &d in &cfg.deltas {
            let p = SmoothingParams::new(d, h)?;
            lifts.push(smooth(&omega, &p, (0, n))?.into_lift());
            lifts.push(diff_lift(&omega, &p, (0, n))?);
        }
        Ok(lifts.iter().map(|l| scales.iter().map(|&lag| scan(l, lag, cfg.q)).collect()).collect())
    }))?;
    let mut totals: Vec<Vec<Sums>> = vec![vec![Sums::default(); scales.len()]; procs.len()];
    for sample in &per_sample {
        for (p, row) in sample.iter().enumerate() {
            for (s, sums) in row.iter().enumerate() {
                totals[p][s].add(sums);
            }
        }
    }

    let m_rho = constant_m(cfg.rho)?;
    let incr_exp = 1.0 / (2.0 * cfg.rho) - EXPONENT_SLACK;
    let area_exp = 1.0 / cfg.rho - EXPONENT_SLACK;
    let mut table = CsvTable::new(&[
        "process",
        "delta",
        "scale",
        "incr_l2q",
        "incr_l2",
        "area_lq",
        "area_l2_max",
        "incr_bound",
        "area_bound",
        "pass",
    ]);
    let mut fits = CsvTable::new(&[
        "process",
        "delta",
        "incr_exponent",
        "incr_threshold",
        "area_exponent",
        "area_threshold",
        "pass",
    ]);
    for (p, &(name, delta)) in procs.iter().enumerate() {
        let mut r_list = Vec::new();
        let mut incr_norms = Vec::new();
        let mut area_norms = Vec::new();
        for (s, &lag) in scales.iter().enumerate() {
            let t = &totals[p][s];
            let r = lag as f64 * h;
            let incr_l2q = (t.incr_pow / t.incr_count).powf(1.0 / (2.0 * cfg.q));
            let incr_l2 = (t.incr_sq / t.incr_count).sqrt();
            let area_lq = (t.area_pow / (t.area_count * t.area_sq.len() as f64)).powf(1.0 / cfg.q);
            let area_l2 = t.area_sq.iter().map(|v| (v / t.area_count).sqrt()).fold(0.0, f64::max);
            r_list.push(r);
            incr_norms.push(incr_l2q);
            area_norms.push(area_lq);
            let (ib, ab, pass): (Cell, Cell, Cell) = match (name, delta) {
                ("x_delta", Some(d)) => {
                    let eps = d.powf(0.5 * (1.0 - 1.0 / cfg.rho));
                    let ib = eps * r.powf(1.0 / (2.0 * cfg.rho));
                    let ab = AREA_CONSTANT.sqrt() * eps * eps * m_rho * r.powf(1.0 / cfg.rho);
                    (ib.into(), ab.into(), (incr_l2 <= ib && area_l2 <= ab).into())
                }
                _ => (Cell::Empty, Cell::Empty, Cell::Empty),
            };
            table.push(vec![
                name.into(),
                delta.into(),
                r.into(),
                incr_l2q.into(),
                incr_l2.into(),
                area_lq.into(),
                area_l2.into(),
                ib,
                ab,
                pass,
            ]);
        }
        if name != "x_delta" {
            let ie = log_log_slope(&r_list, &incr_norms).unwrap_or(f64::NAN);
            let ae = log_log_slope(&r_list, &area_norms).unwrap_or(f64::NAN);
            fits.push(vec![
                name.into(),
                delta.into(),
                ie.into(),
                incr_exp.into(),
                ae.into(),
                area_exp.into(),
                (ie >= incr_exp && ae >= area_exp).into(),
            ]);
        }
    }
    let mut report = Report::new("moment-scaling");
    report.add_table("moment_scaling.csv", table);
    report.add_table("moment_fits.csv", fits);
    Ok(report)
}
