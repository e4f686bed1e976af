//! Periodic bandlimited fields on the unit period.
//!
//! A field of bandwidth index `b` is `g(t) = Σ_{k=-b}^{b} a_k exp(j2πkt)`.
//! Coefficients are stored in the order `a_{-b}, …, a_b`, which is also the
//! column order of [`DftMatrix`].

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the conjugate-symmetry check on real-valued fields.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Number of coefficients (and grid samples) for bandwidth index `b`.
#[inline]
pub fn dimension(b: usize) -> usize {
    2 * b + 1
}

/// Grid spacing `1 / (2b + 1)`.
#[inline]
pub fn spacing(b: usize) -> f64 {
    1.0 / dimension(b) as f64
}

/// Fourier coefficients of a periodic bandlimited field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldDoc", into = "FieldDoc")]
pub struct FourierCoefficients {
    b: usize,
    coeffs: Vec<Complex64>,
    real_valued: bool,
}

impl FourierCoefficients {
    /// Builds a coefficient set, checking the length and, when `real_valued`
    /// is set, conjugate symmetry.
    pub fn new(b: usize, coeffs: Vec<Complex64>, real_valued: bool) -> Result<Self> {
        if coeffs.len() != dimension(b) {
            return Err(Error::LengthMismatch {
                expected: dimension(b),
                actual: coeffs.len(),
            });
        }
        let field = FourierCoefficients {
            b,
            coeffs,
            real_valued,
        };
        if real_valued {
            let deviation = field.symmetry_deviation();
            if deviation > SYMMETRY_TOL {
                return Err(Error::NotConjugateSymmetric { deviation });
            }
        }
        Ok(field)
    }

    pub fn zero(b: usize) -> Self {
        FourierCoefficients {
            b,
            coeffs: vec![Complex64::new(0.0, 0.0); dimension(b)],
            real_valued: true,
        }
    }

    /// Constant real field `g(t) = value`, padded with zeros up to bandwidth `b`.
    pub fn constant(b: usize, value: f64) -> Self {
        let mut field = Self::zero(b);
        field.coeffs[b] = Complex64::new(value, 0.0);
        field
    }

    /// `offset + amplitude·cos(2πt)` at bandwidth 1.
    pub fn cosine(offset: f64, amplitude: f64) -> Self {
        let half = Complex64::new(amplitude / 2.0, 0.0);
        FourierCoefficients {
            b: 1,
            coeffs: vec![half, Complex64::new(offset, 0.0), half],
            real_valued: true,
        }
    }

    #[inline]
    pub fn bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// Coefficient `a_k` for `k` in `-b..=b`.
    pub fn coeff(&self, k: i64) -> Option<Complex64> {
        let idx = k + self.b as i64;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize).copied()
    }

    /// `Σ |a_k|`, an upper bound on `sup |g|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }

    /// True when `Σ |a_k| ≤ 1`, which guarantees `|g(t)| ≤ 1`.
    pub fn is_bounded(&self) -> bool {
        self.l1_norm() <= 1.0 + SYMMETRY_TOL
    }

    /// `max_k |a_k - conj(a_{-k})|`.
    pub fn symmetry_deviation(&self) -> f64 {
        let n = self.coeffs.len();
        (0..n)
            .map(|i| (self.coeffs[i] - self.coeffs[n - 1 - i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Field value at `t` (reduced modulo 1).
    pub fn eval(&self, t: f64) -> Complex64 {
        eval_series(self.b, &self.coeffs, t)
    }

    /// Derivative `g'(t) = Σ j2πk a_k exp(j2πkt)`.
    pub fn eval_derivative(&self, t: f64) -> Complex64 {
        let b = self.b as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_harmonic(self.b, t, |idx, z| {
            let k = idx as i64 - b;
            acc += Complex64::new(0.0, TAU * k as f64) * self.coeffs[idx] * z;
        });
        acc
    }

    /// The same field viewed at a larger bandwidth index (zero-padded).
    /// `None` if `b` is below the current bandwidth.
    pub fn with_bandwidth(&self, b: usize) -> Option<Self> {
        if b < self.b {
            return None;
        }
        let pad = b - self.b;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dimension(b)];
        coeffs[pad..pad + self.coeffs.len()].copy_from_slice(&self.coeffs);
        Some(FourierCoefficients {
            b,
            coeffs,
            real_valued: self.real_valued,
        })
    }

    pub(crate) fn from_parts_unchecked(b: usize, coeffs: Vec<Complex64>, real_valued: bool) -> Self {
        debug_assert_eq!(coeffs.len(), dimension(b));
        FourierCoefficients {
            b,
            coeffs,
            real_valued,
        }
    }
}

/// Calls `f(idx, exp(j2π(idx-b)t))` for `idx = 0..2b+1`.
///
/// Powers are produced by repeated multiplication from `exp(-j2πbt)`; the
/// accumulated rounding stays near `2b` ulps.
#[inline]
fn for_each_harmonic(b: usize, t: f64, mut f: impl FnMut(usize, Complex64)) {
    let t = t.rem_euclid(1.0);
    let step = Complex64::from_polar(1.0, TAU * t);
    let mut z = Complex64::from_polar(1.0, -TAU * (b as f64) * t);
    for idx in 0..dimension(b) {
        f(idx, z);
        z *= step;
    }
}

/// `Σ_k c_k exp(j2πkt)` over a coefficient slice ordered `-b..=b`.
pub(crate) fn eval_series(b: usize, coeffs: &[Complex64], t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_harmonic(b, t, |idx, z| acc += coeffs[idx] * z);
    acc
}

/// Evaluates the field at `t`.
pub fn eval_field(c: &FourierCoefficients, t: f64) -> Complex64 {
    c.eval(t)
}

/// Evaluates the field derivative at `t`.
pub fn eval_derivative(c: &FourierCoefficients, t: f64) -> Complex64 {
    c.eval_derivative(t)
}

/// The matrix mapping coefficients to samples on the grid `l / (2b+1)`.
///
/// Row `l`, column `k + b` holds `exp(j2πkl / (2b+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DftMatrix {
    b: usize,
    entries: DMatrix<Complex64>,
}

impl DftMatrix {
    pub fn new(b: usize) -> Self {
        let dim = dimension(b);
        let entries = DMatrix::from_fn(dim, dim, |l, col| {
            let k = col as i64 - b as i64;
            // Reduce the phase index first so the angle stays in [0, 2π).
            let m = (k * l as i64).rem_euclid(dim as i64);
            Complex64::from_polar(1.0, TAU * m as f64 / dim as f64)
        });
        DftMatrix { b, entries }
    }

    #[inline]
    pub fn bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DMatrix<Complex64> {
        self.entries.adjoint()
    }

    /// Grid samples from coefficients.
    pub fn forward(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let dim = dimension(self.b);
        (0..dim)
            .map(|l| (0..dim).map(|c| self.entries[(l, c)] * coeffs[c]).sum())
            .collect()
    }

    /// Coefficients from grid samples: `Φ† g / (2b+1)`.
    pub fn inverse(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let dim = dimension(self.b);
        let scale = 1.0 / dim as f64;
        (0..dim)
            .map(|c| {
                let s: Complex64 = (0..dim)
                    .map(|l| self.entries[(l, c)].conj() * samples[l])
                    .sum();
                s * scale
            })
            .collect()
    }
}

/// Builds the DFT matrix, rejecting a negative bandwidth index.
pub fn build_dft_matrix(b: i64) -> Result<DftMatrix> {
    if b < 0 {
        return Err(Error::NegativeBandwidth(b));
    }
    Ok(DftMatrix::new(b as usize))
}

/// Recovers coefficients from the `2b+1` samples `g(l / (2b+1))`.
///
/// The result is flagged real-valued when every sample is real.
pub fn coeffs_from_samples(b: usize, samples: &[Complex64]) -> Result<FourierCoefficients> {
    if samples.len() != dimension(b) {
        return Err(Error::LengthMismatch {
            expected: dimension(b),
            actual: samples.len(),
        });
    }
    let coeffs = DftMatrix::new(b).inverse(samples);
    let real = samples.iter().all(|g| g.im.abs() <= SYMMETRY_TOL);
    let mut field = FourierCoefficients::from_parts_unchecked(b, coeffs, false);
    if real && field.symmetry_deviation() <= SYMMETRY_TOL {
        field.real_valued = true;
    }
    Ok(field)
}

/// Samples the field on the grid `l / (2b+1)`, `l = 0..=2b`.
pub fn samples_from_coeffs(c: &FourierCoefficients) -> Vec<Complex64> {
    DftMatrix::new(c.b).forward(&c.coeffs)
}

/// Draws a random field with `Σ |a_k| = 1`.
///
/// Magnitudes are uniform on `[0, 1)` and phases uniform on `[0, 2π)`,
/// independently per coefficient. With `real_valued`, only `a_0..a_b` are
/// drawn (`a_0` real) and the negative half is set by conjugate symmetry.
pub fn random_field<R: Rng + ?Sized>(b: usize, rng: &mut R, real_valued: bool) -> FourierCoefficients {
    let dim = dimension(b);
    loop {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        if real_valued {
            let m: f64 = rng.gen();
            let phase: f64 = rng.gen::<f64>() * TAU;
            coeffs[b] = Complex64::new(m * phase.cos(), 0.0);
            for k in 1..=b {
                let m: f64 = rng.gen();
                let phase: f64 = rng.gen::<f64>() * TAU;
                let a = Complex64::from_polar(m, phase);
                coeffs[b + k] = a;
                coeffs[b - k] = a.conj();
            }
        } else {
            for a in coeffs.iter_mut() {
                let m: f64 = rng.gen();
                let phase: f64 = rng.gen::<f64>() * TAU;
                *a = Complex64::from_polar(m, phase);
            }
        }
        let norm: f64 = coeffs.iter().map(|a| a.norm()).sum();
        if norm > 0.0 {
            for a in coeffs.iter_mut() {
                *a /= norm;
            }
            return FourierCoefficients::from_parts_unchecked(b, coeffs, real_valued);
        }
    }
}

/// On-disk JSON layout shared by fields and estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct FieldDoc {
    pub b: usize,
    pub real_valued: bool,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<FourierCoefficients> for FieldDoc {
    fn from(f: FourierCoefficients) -> Self {
        FieldDoc {
            b: f.b,
            real_valued: f.real_valued,
            coeffs: f.coeffs.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<FieldDoc> for FourierCoefficients {
    type Error = Error;

    fn try_from(doc: FieldDoc) -> Result<Self> {
        let coeffs = doc
            .coeffs
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        FourierCoefficients::new(doc.b, coeffs, doc.real_valued)
    }
}
