//! Quantile-substitution estimator.
//!
//! The order statistic at rank `floor(n·l/(2b+1)) + 1` stands in for the
//! unknown field value at grid point `l/(2b+1)`; the coefficients then follow
//! from the inverse DFT of that vector.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{coeffs_from_samples, FieldDoc, FourierCoefficients};
use crate::sampling::{extract_quantile_samples, quantile_indices, SampleSet};

/// Estimated coefficients together with the sample count that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EstimateDoc", into = "EstimateDoc")]
pub struct CoefficientEstimate {
    field: FourierCoefficients,
    n: usize,
}

impl CoefficientEstimate {
    pub fn new(field: FourierCoefficients, n: usize) -> Self {
        CoefficientEstimate { field, n }
    }

    #[inline]
    pub fn bandwidth(&self) -> usize {
        self.field.bandwidth()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        self.field.coeffs()
    }

    /// The estimate viewed as a field.
    #[inline]
    pub fn as_field(&self) -> &FourierCoefficients {
        &self.field
    }

    pub fn reconstruct(&self, t: f64) -> Complex64 {
        self.field.eval(t)
    }
}

/// Estimates the `2b+1` coefficients from an ordered sample set.
pub fn estimate_coeffs(s: &SampleSet, b: usize) -> Result<CoefficientEstimate> {
    let ranks = quantile_indices(s.len(), b)?;
    let g = extract_quantile_samples(s, &ranks)?;
    let field = coeffs_from_samples(b, &g)?;
    Ok(CoefficientEstimate { field, n: s.len() })
}

/// Reconstructed field value at `t`.
pub fn reconstruct(e: &CoefficientEstimate, t: f64) -> Complex64 {
    e.reconstruct(t)
}

/// Squared L² distance between the reconstruction and the true field,
/// computed in coefficient space as `Σ |Â_k - a_k|²`.
pub fn distortion(e: &CoefficientEstimate, truth: &FourierCoefficients) -> Result<f64> {
    coefficient_distance(e.as_field(), truth)
}

/// `Σ |a_k - c_k|²` for two fields of equal bandwidth.
pub fn coefficient_distance(a: &FourierCoefficients, c: &FourierCoefficients) -> Result<f64> {
    if a.bandwidth() != c.bandwidth() {
        return Err(Error::BandwidthMismatch {
            left: a.bandwidth(),
            right: c.bandwidth(),
        });
    }
    Ok(a.coeffs()
        .iter()
        .zip(c.coeffs())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum())
}

/// Asymptotic bound `π²b²(2b+1)` on `n·E‖Ĝ - g‖²`.
pub fn distortion_bound(b: usize) -> f64 {
    let b = b as f64;
    PI * PI * b * b * (2.0 * b + 1.0)
}

#[derive(Serialize, Deserialize)]
struct EstimateDoc {
    #[serde(flatten)]
    field: FieldDoc,
    n: usize,
}

impl From<CoefficientEstimate> for EstimateDoc {
    fn from(e: CoefficientEstimate) -> Self {
        EstimateDoc {
            field: e.field.into(),
            n: e.n,
        }
    }
}

impl TryFrom<EstimateDoc> for CoefficientEstimate {
    type Error = Error;

    fn try_from(doc: EstimateDoc) -> Result<Self> {
        Ok(CoefficientEstimate {
            field: doc.field.try_into()?,
            n: doc.n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_field, samples_from_coeffs};
    use crate::sampling::{deploy, observe};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Sample set whose quantile ranks carry the exact grid values.
    fn grid_injected(field: &FourierCoefficients, n: usize) -> SampleSet {
        let b = field.bandwidth();
        let ranks = quantile_indices(n, b).unwrap();
        let grid = samples_from_coeffs(field);
        let mut values = vec![c(0.0, 0.0); n];
        // fill non-rank slots with the preceding grid value
        let mut l = 0;
        for (i, v) in values.iter_mut().enumerate() {
            while l + 1 < ranks.len() && i + 1 >= ranks[l + 1] {
                l += 1;
            }
            *v = grid[l];
        }
        SampleSet::from_ordered_values(values).unwrap()
    }

    #[test]
    fn constant_field_is_exact() {
        let f = FourierCoefficients::constant(2, 0.37);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [5, 17, 1000] {
            let s = observe(&f, &deploy(n, &mut rng).unwrap());
            let e = estimate_coeffs(&s, 2).unwrap();
            assert!((e.coeffs()[2] - c(0.37, 0.0)).norm() < 1e-15);
            for k in [0, 1, 3, 4] {
                assert!(e.coeffs()[k].norm() < 1e-12);
            }
            assert_eq!(e.n(), n);
        }
    }

    #[test]
    fn exact_on_injected_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for b in 0..5 {
            let f = random_field(b, &mut rng, true);
            for n in [2 * b + 1, 100, 1001] {
                let e = estimate_coeffs(&grid_injected(&f, n), b).unwrap();
                for (x, y) in e.coeffs().iter().zip(f.coeffs()) {
                    assert!((x - y).norm() < 1e-10);
                }
                for i in 0..256 {
                    let t = i as f64 / 256.0;
                    assert!((reconstruct(&e, t) - f.eval(t)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn refuses_too_few_samples() {
        let s = SampleSet::from_ordered_values(vec![c(0.0, 0.0); 4]).unwrap();
        assert!(matches!(
            estimate_coeffs(&s, 2),
            Err(Error::InsufficientSamples { n: 4, b: 2, required: 5 })
        ));
    }

    #[test]
    fn boundedness() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for b in 1..4 {
            for n in [2 * b + 1, 50, 500] {
                let f = random_field(b, &mut rng, true);
                let e = estimate_coeffs(&observe(&f, &deploy(n, &mut rng).unwrap()), b).unwrap();
                assert!(e.coeffs().iter().all(|a| a.norm() <= 1.0 + 1e-12));
                let sup = (0..512)
                    .map(|i| reconstruct(&e, i as f64 / 512.0).norm())
                    .fold(0.0, f64::max);
                assert!(sup <= (2 * b + 1) as f64);
            }
        }
    }

    #[test]
    fn real_samples_give_real_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(3, &mut rng, true);
        let e = estimate_coeffs(&observe(&f, &deploy(300, &mut rng).unwrap()), 3).unwrap();
        assert!(e.as_field().is_real_valued());
        assert!(reconstruct(&e, 0.123).im.abs() < 1e-12);
    }

    #[test]
    fn distortion_cases() {
        let f = FourierCoefficients::cosine(0.5, 0.5);
        assert_eq!(distortion(&CoefficientEstimate::new(f.clone(), 10), &f).unwrap(), 0.0);

        let e = CoefficientEstimate::new(FourierCoefficients::constant(1, 0.3), 10);
        let d = distortion(&e, &FourierCoefficients::zero(1)).unwrap();
        assert!((d - 0.09).abs() < 1e-15);

        let wrong = FourierCoefficients::zero(2);
        assert!(matches!(
            distortion(&e, &wrong),
            Err(Error::BandwidthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn distortion_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for b in 1..5 {
            let truth = random_field(b, &mut rng, true);
            let e = estimate_coeffs(&observe(&truth, &deploy(40, &mut rng).unwrap()), b).unwrap();
            let m = 4096;
            let quad = (0..m)
                .map(|i| {
                    let t = i as f64 / m as f64;
                    (reconstruct(&e, t) - truth.eval(t)).norm_sqr()
                })
                .sum::<f64>()
                / m as f64;
            let exact = distortion(&e, &truth).unwrap();
            assert!(((quad - exact) / exact).abs() < 1e-6);
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(distortion_bound(0), 0.0);
        assert!((distortion_bound(1) - 3.0 * PI * PI).abs() < 1e-12);
        assert!((distortion_bound(1) - 29.608).abs() < 1e-3);
        assert!((distortion_bound(2) - 197.39).abs() < 1e-2);
        // π²·9·7
        assert!((distortion_bound(3) - 621.785).abs() < 1e-3);
    }

    #[test]
    fn error_shrinks_with_n() {
        let f = FourierCoefficients::cosine(0.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let median_err = |n: usize, rng: &mut ChaCha8Rng| {
            let mut errs: Vec<f64> = (0..40)
                .map(|_| {
                    let e = estimate_coeffs(&observe(&f, &deploy(n, rng).unwrap()), 1).unwrap();
                    distortion(&e, &f).unwrap().sqrt()
                })
                .collect();
            errs.sort_by(f64::total_cmp);
            errs[20]
        };
        let small = median_err(100, &mut rng);
        let large = median_err(10_000, &mut rng);
        assert!(small / large > 5.0, "{small} vs {large}");
    }

    #[test]
    fn json_includes_n() {
        let e = CoefficientEstimate::new(FourierCoefficients::constant(0, 0.5), 12);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"b":0,"real_valued":true,"coeffs":[[0.5,0.0]],"n":12}"#);
        assert_eq!(serde_json::from_str::<CoefficientEstimate>(&s).unwrap(), e);
    }
}
