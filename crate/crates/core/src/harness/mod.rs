//! Experiment orchestration and report files.

mod config;
mod sweep;

use std::path::Path;

pub use config::{ExperimentConfig, FieldSource, DEFAULT_SEED};
pub use sweep::{log_log_slope, run_mse_sweep, ExperimentReport, SweepRow, SWEEP_CSV_HEADER};

use crate::ambiguity::{ambiguity_demo, AmbiguityDemo};
use crate::asymptotics::{clt_empirical_check, CltReport};
use crate::error::{Error, Result};
use crate::field::{random_field, FourierCoefficients};
use crate::io::{cdf_csv, ensure_dir, write_json, write_string};
use crate::mc::trial_rng;

/// Trial index reserved for drawing a fixed random field per bandwidth.
const FIELD_STREAM: usize = usize::MAX;

/// The fixed field used for bandwidth `b`: the configured file padded to `b`,
/// or one random real field drawn from a dedicated stream.
pub fn fixed_field(fixed: Option<&FourierCoefficients>, b: usize, seed: u64) -> Result<FourierCoefficients> {
    match fixed {
        Some(f) => f.with_bandwidth(b).ok_or_else(|| {
            Error::InvalidConfig(format!("b = {b} is below the field's bandwidth {}", f.bandwidth()))
        }),
        None => Ok(random_field(b, &mut trial_rng(seed, b, 0, FIELD_STREAM), true)),
    }
}

/// Runs the CLT check on every `(b, n)` cell with one fixed field per `b`.
pub fn run_clt_check(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<CltReport>> {
    let fixed = cfg.validate()?;
    if cfg.trials < 2 {
        return Err(Error::InvalidConfig("CLT check needs at least 2 trials".into()));
    }
    let mut reports = Vec::new();
    for &b in &cfg.b_list {
        let field = fixed_field(fixed.as_ref(), b, cfg.base_seed)?;
        for &n in &cfg.n_list {
            reports.push(clt_empirical_check(&field, b, n, cfg.trials, cfg.base_seed, workers)?);
        }
    }
    Ok(reports)
}

/// Writes `clt_report.json` under `dir`.
pub fn write_clt_reports(dir: &Path, reports: &[CltReport]) -> Result<()> {
    ensure_dir(dir)?;
    write_json(&dir.join("clt_report.json"), &reports)
}

/// Parameters of an ambiguity demo run.
#[derive(Debug, Clone)]
pub struct AmbiguityParams {
    pub field: FourierCoefficients,
    pub theta: f64,
    pub n: usize,
    pub resolution: usize,
    pub seed: u64,
}

pub fn run_ambiguity_demo(params: &AmbiguityParams) -> Result<AmbiguityDemo> {
    ambiguity_demo(&params.field, params.theta, params.n, params.resolution, params.seed)
}

/// Writes `ambiguity_report.json` and the four `cdf_*.csv` curves.
pub fn write_ambiguity_demo(dir: &Path, demo: &AmbiguityDemo) -> Result<()> {
    ensure_dir(dir)?;
    write_json(&dir.join("ambiguity_report.json"), &demo.report)?;
    let c = &demo.curves;
    for (name, curve) in [
        ("cdf_level.csv", &c.level),
        ("cdf_level_shifted.csv", &c.level_shifted),
        ("cdf_empirical.csv", &c.empirical),
        ("cdf_empirical_shifted.csv", &c.empirical_shifted),
    ] {
        write_string(&dir.join(name), &cdf_csv(curve))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clt_check_constant_file_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        write_json(&path, &FourierCoefficients::constant(0, 0.25)).unwrap();
        let cfg = ExperimentConfig {
            b_list: vec![1],
            n_list: vec![50],
            trials: 10,
            base_seed: 1,
            field_source: FieldSource::File(path),
            output_dir: dir.path().into(),
        };
        let reports = run_clt_check(&cfg, Some(1)).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].empirical_max_abs <= 1e-8);
        write_clt_reports(dir.path(), &reports).unwrap();
        assert!(dir.path().join("clt_report.json").exists());
    }

    #[test]
    fn fixed_random_field_is_reproducible() {
        let a = fixed_field(None, 2, 5).unwrap();
        assert_eq!(a, fixed_field(None, 2, 5).unwrap());
        assert_ne!(a, fixed_field(None, 2, 6).unwrap());
        assert!(fixed_field(Some(&a), 1, 5).is_err());
    }
}
