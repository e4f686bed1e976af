//! Non-identifiability from unordered samples.
//!
//! Without order information the samples only reveal the value law
//! `P(g(U) ≤ x)`, the measure of the level set `{t : g(t) ≤ x}`. Cyclic
//! shifts move the level set around the circle without changing its measure,
//! so `g` and `g(· - θ)` are indistinguishable while being different fields.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::coefficient_distance;
use crate::field::{dimension, FourierCoefficients};
use crate::mc::trial_rng;
use crate::sampling::deploy;

/// Imaginary parts above this are treated as non-real values.
pub const REAL_TOL: f64 = 1e-10;

/// Number of x-grid points on `[-1, 1]` used for CDF comparisons.
pub const X_GRID_POINTS: usize = 512;

/// A CDF tabulated on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueCdf {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
}

impl ValueCdf {
    /// `max_i |F(x_i) - G(x_i)|`; grids must be identical.
    pub fn sup_distance(&self, other: &ValueCdf) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("CDFs tabulated on different grids".into()));
        }
        Ok(self
            .cdf
            .iter()
            .zip(&other.cdf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `count` equispaced points from -1 to 1 inclusive.
pub fn x_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| -1.0 + 2.0 * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Fraction of sorted `values` at or below each grid point.
fn tabulate(sorted: &[f64], grid: &[f64]) -> Vec<f64> {
    let n = sorted.len() as f64;
    grid.iter()
        .map(|&x| sorted.partition_point(|&v| v <= x) as f64 / n)
        .collect()
}

/// Empirical CDF `F_n(x) = (1/n) Σ 1(g_i ≤ x)` of real field values.
pub fn empirical_value_cdf(values: &[Complex64], grid: &[f64]) -> Result<ValueCdf> {
    check_ascending(grid)?;
    if values.is_empty() {
        return Err(Error::EmptyDeployment);
    }
    let mut re = Vec::with_capacity(values.len());
    for v in values {
        if v.im.abs() > REAL_TOL {
            return Err(Error::NotReal { imag: v.im });
        }
        re.push(v.re);
    }
    re.sort_unstable_by(f64::total_cmp);
    Ok(ValueCdf {
        grid: grid.to_vec(),
        cdf: tabulate(&re, grid),
    })
}

/// Field values on the grid `m / M`, sorted, for level-set measures.
#[derive(Debug, Clone)]
pub struct LevelProfile {
    sorted: Vec<f64>,
}

impl LevelProfile {
    pub fn new(c: &FourierCoefficients, resolution: usize) -> Result<Self> {
        if !c.is_real_valued() {
            return Err(Error::InvalidArgument("level sets need a real-valued field".into()));
        }
        if resolution < dimension(c.bandwidth()) {
            return Err(Error::InvalidArgument(format!(
                "grid resolution {resolution} below 2b+1 = {}",
                dimension(c.bandwidth())
            )));
        }
        let mut sorted: Vec<f64> = (0..resolution)
            .map(|m| c.eval(m as f64 / resolution as f64).re)
            .collect();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(LevelProfile { sorted })
    }

    /// Fraction of grid points with `g(t_m) ≤ x`.
    pub fn measure(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn curve(&self, grid: &[f64]) -> Result<ValueCdf> {
        check_ascending(grid)?;
        Ok(ValueCdf {
            grid: grid.to_vec(),
            cdf: tabulate(&self.sorted, grid),
        })
    }
}

/// Approximate measure of `{t ∈ [0, 1) : g(t) ≤ x}` from `resolution`
/// equispaced points. The error is at most the number of level crossings
/// divided by `resolution`.
pub fn level_measure(c: &FourierCoefficients, x: f64, resolution: usize) -> Result<f64> {
    Ok(LevelProfile::new(c, resolution)?.measure(x))
}

/// Coefficients of `g(t - θ)`: `a_k exp(-j2πkθ)`.
pub fn shift_field(c: &FourierCoefficients, theta: f64) -> FourierCoefficients {
    let b = c.bandwidth() as i64;
    let coeffs = c
        .coeffs()
        .iter()
        .zip(-b..=b)
        .map(|(a, k)| a * Complex64::from_polar(1.0, -TAU * k as f64 * theta))
        .collect();
    FourierCoefficients::from_parts_unchecked(c.bandwidth(), coeffs, c.is_real_valued())
}

/// Scalar results of [`ambiguity_demo`].
#[derive(Debug, Clone, Serialize)]
pub struct AmbiguityReport {
    pub b: usize,
    pub theta: f64,
    pub n: usize,
    pub grid_resolution: usize,
    pub seed: u64,
    /// Sup over the x-grid of the level-measure difference between g and g_θ.
    pub sup_cdf_diff_theory: f64,
    /// `4b / M`, the discretisation allowance for the value above.
    pub theory_tolerance: f64,
    /// Sup over the x-grid of the empirical value-CDF difference.
    pub sup_cdf_diff_empirical: f64,
    /// Two-sample KS 99% critical value `1.63·√(2/n)`.
    pub ks_critical_99: f64,
    /// Sup distance between g's empirical CDF and its level measure.
    pub glivenko_cantelli_gap: f64,
    /// `‖g - g_θ‖²` by Parseval.
    pub distortion_between_fields: f64,
    pub field: FourierCoefficients,
    pub shifted_field: FourierCoefficients,
}

/// CDF curves behind an [`AmbiguityReport`], for plotting.
#[derive(Debug, Clone)]
pub struct AmbiguityCurves {
    pub level: ValueCdf,
    pub level_shifted: ValueCdf,
    pub empirical: ValueCdf,
    pub empirical_shifted: ValueCdf,
}

#[derive(Debug, Clone)]
pub struct AmbiguityDemo {
    pub report: AmbiguityReport,
    pub curves: AmbiguityCurves,
}

fn unordered_values<R: Rng>(c: &FourierCoefficients, n: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    Ok(deploy(n, rng)?.locations().iter().map(|&u| c.eval(u)).collect())
}

/// Compares a field with its cyclic shift by `theta` through their value
/// laws (exact level measures and empirical CDFs from `n` unordered samples
/// each) and through their L² distance.
///
/// The two sample sets use streams `trial_rng(seed, b, n, 0)` and `(…, 1)`.
pub fn ambiguity_demo(
    c: &FourierCoefficients,
    theta: f64,
    n: usize,
    resolution: usize,
    seed: u64,
) -> Result<AmbiguityDemo> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("shift {theta} is not finite")));
    }
    if n == 0 {
        return Err(Error::EmptyDeployment);
    }
    let b = c.bandwidth();
    let shifted = shift_field(c, theta);
    let grid = x_grid(X_GRID_POINTS);

    let level = LevelProfile::new(c, resolution)?.curve(&grid)?;
    let level_shifted = LevelProfile::new(&shifted, resolution)?.curve(&grid)?;

    let values = unordered_values(c, n, &mut trial_rng(seed, b, n, 0))?;
    let values_shifted = unordered_values(&shifted, n, &mut trial_rng(seed, b, n, 1))?;
    let empirical = empirical_value_cdf(&values, &grid)?;
    let empirical_shifted = empirical_value_cdf(&values_shifted, &grid)?;

    let report = AmbiguityReport {
        b,
        theta,
        n,
        grid_resolution: resolution,
        seed,
        sup_cdf_diff_theory: level.sup_distance(&level_shifted)?,
        theory_tolerance: 4.0 * b as f64 / resolution as f64,
        sup_cdf_diff_empirical: empirical.sup_distance(&empirical_shifted)?,
        ks_critical_99: 1.63 * (2.0 / n as f64).sqrt(),
        glivenko_cantelli_gap: empirical.sup_distance(&level)?,
        distortion_between_fields: coefficient_distance(c, &shifted)?,
        field: c.clone(),
        shifted_field: shifted,
    };
    Ok(AmbiguityDemo {
        report,
        curves: AmbiguityCurves {
            level,
            level_shifted,
            empirical,
            empirical_shifted,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn point_mass_cdf() {
        let cdf = empirical_value_cdf(&[re(0.5); 7], &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(cdf.cdf, vec![0.0, 1.0, 1.0]);
        let single = empirical_value_cdf(&[re(0.2)], &x_grid(11)).unwrap();
        assert!(single.cdf.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn ramp_cdf_is_linear() {
        let values: Vec<_> = (1..=9).map(|i| re(i as f64 / 10.0)).collect();
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let cdf = empirical_value_cdf(&values, &grid).unwrap();
        for (x, f) in grid.iter().zip(&cdf.cdf) {
            // Uniform law on [0.05, 0.95] as the linear reference.
            let linear = ((x - 0.05) / 0.9).clamp(0.0, 1.0);
            assert!((f - linear).abs() <= 1.0 / 9.0 + 1e-12, "x={x} f={f}");
        }
    }

    #[test]
    fn cdf_errors() {
        assert!(matches!(
            empirical_value_cdf(&[re(0.1)], &[0.5, 0.0]),
            Err(Error::UnsortedGrid)
        ));
        assert!(matches!(
            empirical_value_cdf(&[Complex64::new(0.1, 0.01)], &[0.0]),
            Err(Error::NotReal { .. })
        ));
    }

    #[test]
    fn level_measure_edges() {
        let f = random_field(3, &mut ChaCha8Rng::seed_from_u64(1), true);
        assert_eq!(level_measure(&f, 1.0, 1024).unwrap(), 1.0);
        assert_eq!(level_measure(&f, -1.0 - 1e-9, 1024).unwrap(), 0.0);
        assert!(level_measure(&f, 0.0, 3).is_err());
        let complex = random_field(1, &mut ChaCha8Rng::seed_from_u64(1), false);
        assert!(level_measure(&complex, 0.0, 64).is_err());
    }

    #[test]
    fn cosine_half_level() {
        let f = FourierCoefficients::cosine(0.5, 0.5);
        let m = level_measure(&f, 0.5, 4096).unwrap();
        assert!((m - 0.5).abs() <= 4.0 / 4096.0, "{m}");
    }

    #[test]
    fn shift_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_field(4, &mut rng, true);
        for theta in [0.0, 1.0] {
            let g = shift_field(&f, theta);
            for (a, b) in g.coeffs().iter().zip(f.coeffs()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        for theta in [0.1, 1.0 / 3.0, 0.7] {
            let g = shift_field(&f, theta);
            for i in 0..256 {
                let t = i as f64 / 256.0;
                assert!((g.eval(t) - f.eval((t - theta).rem_euclid(1.0))).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quarter_shift_of_cosine_is_sine() {
        let g = shift_field(&FourierCoefficients::cosine(0.5, 0.5), 0.25);
        // 0.5 + 0.5 sin(2πt): a_{±1} = ∓0.25j
        assert!((g.coeff(1).unwrap() - Complex64::new(0.0, -0.25)).norm() < 1e-12);
        assert!((g.coeff(-1).unwrap() - Complex64::new(0.0, 0.25)).norm() < 1e-12);
        assert!((g.coeff(0).unwrap() - re(0.5)).norm() < 1e-12);
    }

    #[test]
    fn demo_cosine_quarter() {
        let f = FourierCoefficients::cosine(0.5, 0.5);
        let demo = ambiguity_demo(&f, 0.25, 100_000, 4096, 5).unwrap();
        let r = &demo.report;
        assert!(r.sup_cdf_diff_theory <= 4.0 / 4096.0);
        assert!((r.distortion_between_fields - 0.25).abs() < 1e-12);
        assert!(r.sup_cdf_diff_empirical <= 1.5 * r.ks_critical_99);
        assert!(r.glivenko_cantelli_gap <= 0.01);
    }

    #[test]
    fn demo_full_period_is_trivial() {
        let f = random_field(2, &mut ChaCha8Rng::seed_from_u64(3), true);
        let r = ambiguity_demo(&f, 1.0, 1000, 2048, 1).unwrap().report;
        assert!(r.distortion_between_fields < 1e-24);
        assert!(r.sup_cdf_diff_theory <= 1e-12);
    }

    #[test]
    fn glivenko_cantelli_gap_shrinks() {
        let f = random_field(3, &mut ChaCha8Rng::seed_from_u64(4), true);
        let gaps: Vec<f64> = [100, 10_000, 100_000]
            .iter()
            .map(|&n| ambiguity_demo(&f, 0.1, n, 8192, 6).unwrap().report.glivenko_cantelli_gap)
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        assert!(gaps[2] <= 0.01);
    }
}
