use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::estimator::{distortion, distortion_bound, estimate_coeffs};
use crate::field::{random_field, FourierCoefficients};
use crate::io::{ensure_dir, fmt_sig17, push_row, write_json, write_string};
use crate::mc::{run_trials, trial_rng};
use crate::sampling::{deploy, observe};

use super::config::ExperimentConfig;

/// Header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str = "b,n,trials,mean_distortion,stderr,n_times_mse,bound";

/// Monte Carlo statistics for one `(b, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub b: usize,
    pub n: usize,
    pub trials: usize,
    pub mean_distortion: f64,
    pub stderr_distortion: f64,
    /// `n · mean_distortion`.
    pub n_times_mse: f64,
    /// `π²b²(2b+1)`.
    pub bound: f64,
    /// Log-log slope of mean distortion against `n` for this row's `b`.
    pub slope_estimate: Option<f64>,
    pub clt_frobenius_rel_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
}

impl ExperimentReport {
    pub fn slope(&self, b: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.b == b).and_then(|r| r.slope_estimate)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            push_row(
                &mut out,
                &[
                    r.b.to_string(),
                    r.n.to_string(),
                    r.trials.to_string(),
                    fmt_sig17(r.mean_distortion),
                    fmt_sig17(r.stderr_distortion),
                    fmt_sig17(r.n_times_mse),
                    fmt_sig17(r.bound),
                ],
            );
        }
        out
    }

    /// Writes `mse_sweep.csv` and `mse_sweep.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_string(&dir.join("mse_sweep.csv"), &self.to_csv())?;
        write_json(&dir.join("mse_sweep.json"), self)
    }
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Distortion of one deploy → observe → estimate pipeline.
fn trial_distortion(fixed: Option<&FourierCoefficients>, b: usize, n: usize, seed: u64, trial: usize) -> f64 {
    let mut rng = trial_rng(seed, b, n, trial);
    let field = match fixed {
        Some(f) => f.with_bandwidth(b).expect("validated bandwidth"),
        None => random_field(b, &mut rng, true),
    };
    let draw = deploy(n, &mut rng).expect("validated n");
    let est = estimate_coeffs(&observe(&field, &draw), b).expect("validated n");
    distortion(&est, &field).expect("matching bandwidth")
}

/// Runs every `(b, n)` cell of the config.
///
/// Output is a deterministic function of the config: trial `i` of cell
/// `(b, n)` draws from `trial_rng(base_seed, b, n, i)` and results are
/// reduced in trial order.
pub fn run_mse_sweep(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentReport> {
    let fixed = cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.b_list.len() * cfg.n_list.len());
    for &b in &cfg.b_list {
        let first = rows.len();
        for &n in &cfg.n_list {
            let d = run_trials(cfg.trials, workers, |i| {
                trial_distortion(fixed.as_ref(), b, n, cfg.base_seed, i)
            });
            let t = d.len() as f64;
            let mean = d.iter().sum::<f64>() / t;
            let stderr = if d.len() > 1 {
                let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
                (var / t).sqrt()
            } else {
                0.0
            };
            rows.push(SweepRow {
                b,
                n,
                trials: cfg.trials,
                mean_distortion: mean,
                stderr_distortion: stderr,
                n_times_mse: n as f64 * mean,
                bound: distortion_bound(b),
                slope_estimate: None,
                clt_frobenius_rel_err: None,
            });
        }
        let pts: Vec<(f64, f64)> = rows[first..]
            .iter()
            .map(|r| (r.n as f64, r.mean_distortion))
            .collect();
        let slope = log_log_slope(&pts);
        for r in &mut rows[first..] {
            r.slope_estimate = slope;
        }
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        rows,
    })
}
