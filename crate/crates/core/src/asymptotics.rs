//! Asymptotic covariances of the quantile estimator and their Monte Carlo
//! verification.
//!
//! With grid points `p_l = l/(2b+1)`, the scaled quantile errors
//! `√n(U_{r_l:n} - p_l)` are asymptotically normal with covariance
//! `K_U[i][j] = p_min(1 - p_max)`. The delta method with the diagonal
//! Jacobian `D = diag(g'(p_l))` carries this to the sampled field values,
//! `K_G = D K_U D`, and the inverse DFT carries it to the coefficients:
//!
//! * Hermitian part `E[SS†] = Φ† K_G Φ / (2b+1)²`
//! * pseudo-covariance `E[SSᵀ] = Φ† K_G conj(Φ) / (2b+1)²`
//!
//! where `S = √n(Â - a)`. The row and column for `p_0 = 0` are identically
//! zero: the minimum order statistic converges at rate `1/n`, not `1/√n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::estimate_coeffs;
use crate::field::{dimension, spacing, DftMatrix, FourierCoefficients};
use crate::mc::{run_trials, trial_rng};
use crate::sampling::{deploy, observe, quantile_indices};

/// Largest imaginary part of `g'` tolerated when forming `K_G`.
pub const DERIVATIVE_IMAG_TOL: f64 = 1e-10;

/// Analytic covariances for one field.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBundle {
    pub b: usize,
    pub k_u: DMatrix<f64>,
    pub k_g: DMatrix<f64>,
    pub k_a_herm: DMatrix<Complex64>,
    pub k_a_pseudo: DMatrix<Complex64>,
}

impl CovarianceBundle {
    pub fn for_field(field: &FourierCoefficients) -> Result<Self> {
        let b = field.bandwidth();
        let k_u = quantile_covariance(b);
        let k_g = field_sample_covariance(field, b)?;
        let (k_a_herm, k_a_pseudo) = coeff_covariance(&k_g, b)?;
        Ok(CovarianceBundle {
            b,
            k_u,
            k_g,
            k_a_herm,
            k_a_pseudo,
        })
    }

    pub fn zero(b: usize) -> Self {
        let d = dimension(b);
        CovarianceBundle {
            b,
            k_u: DMatrix::zeros(d, d),
            k_g: DMatrix::zeros(d, d),
            k_a_herm: DMatrix::zeros(d, d),
            k_a_pseudo: DMatrix::zeros(d, d),
        }
    }
}

/// `K_U[i][j] = p_i (1 - p_j)` for `i ≤ j`, `p_i = i/(2b+1)`.
pub fn quantile_covariance(b: usize) -> DMatrix<f64> {
    let d = dimension(b);
    let s = spacing(b);
    DMatrix::from_fn(d, d, |i, j| {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        lo as f64 * s * (1.0 - hi as f64 * s)
    })
}

/// `K_G = D K_U D` with `D = diag(g'(l/(2b+1)))`.
///
/// The derivative must be real at every grid point.
pub fn field_sample_covariance(c: &FourierCoefficients, b: usize) -> Result<DMatrix<f64>> {
    if c.bandwidth() != b {
        return Err(Error::BandwidthMismatch {
            left: c.bandwidth(),
            right: b,
        });
    }
    let s = spacing(b);
    let mut jac = Vec::with_capacity(dimension(b));
    for l in 0..dimension(b) {
        let d = c.eval_derivative(l as f64 * s);
        if d.im.abs() > DERIVATIVE_IMAG_TOL {
            return Err(Error::NotReal { imag: d.im });
        }
        jac.push(d.re);
    }
    let k_u = quantile_covariance(b);
    Ok(DMatrix::from_fn(k_u.nrows(), k_u.ncols(), |i, j| {
        jac[i] * k_u[(i, j)] * jac[j]
    }))
}

/// Hermitian covariance and pseudo-covariance of `√n(Â - a)`.
pub fn coeff_covariance(k_g: &DMatrix<f64>, b: usize) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let d = dimension(b);
    if k_g.shape() != (d, d) {
        return Err(Error::LengthMismatch {
            expected: d,
            actual: k_g.nrows().max(k_g.ncols()),
        });
    }
    let phi = DftMatrix::new(b);
    let phi = phi.matrix();
    let kg = k_g.map(|x| Complex64::new(x, 0.0));
    let scale = Complex64::new(1.0 / (d * d) as f64, 0.0);
    let left = phi.adjoint() * kg;
    let herm = (&left * phi) * scale;
    let pseudo = (&left * phi.map(|z| z.conj())) * scale;
    Ok((herm, pseudo))
}

/// The complex vector `(exp(j2πkt))_{k=-b..b}`.
fn harmonics(b: usize, t: f64) -> Vec<Complex64> {
    let b_i = b as i64;
    (-b_i..=b_i)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 * t))
        .collect()
}

/// Asymptotic `(E[X²], E|X|²)` for `X = √n(Ĝ(t) - g(t))`.
pub fn pointwise_variance(bundle: &CovarianceBundle, t: f64) -> (Complex64, f64) {
    let v = harmonics(bundle.b, t);
    let d = v.len();
    let mut second = Complex64::new(0.0, 0.0);
    let mut abs_second = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            second += v[i] * bundle.k_a_pseudo[(i, j)] * v[j];
            abs_second += v[i] * bundle.k_a_herm[(i, j)] * v[j].conj();
        }
    }
    (second, abs_second.re.max(0.0))
}

/// Mean and variance of `U_{r:n} ~ Beta(r, n - r + 1)`.
pub fn beta_moments(r: usize, n: usize) -> Result<(f64, f64)> {
    if r == 0 || r > n {
        return Err(Error::RankOutOfRange { rank: r, n });
    }
    let (r, n) = (r as f64, n as f64);
    let mean = r / (n + 1.0);
    let var = r * (n - r + 1.0) / ((n + 1.0) * (n + 1.0) * (n + 2.0));
    Ok((mean, var))
}

/// Relative Frobenius distance `‖emp - ana‖ / ‖ana‖`, `None` when `ana = 0`.
pub fn frobenius_rel_err<T>(empirical: &DMatrix<T>, analytic: &DMatrix<T>) -> Option<f64>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let denom = analytic.norm();
    if denom == 0.0 {
        None
    } else {
        Some((empirical - analytic).norm() / denom)
    }
}

/// Row-major `[re, im]` pairs, the JSON layout for matrices.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn complex_matrix_doc(m: &DMatrix<Complex64>) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn real_matrix_doc(m: &DMatrix<f64>) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)], 0.0]).collect())
        .collect()
}

/// Monte Carlo moments of one tracked order statistic.
#[derive(Debug, Clone, Serialize)]
pub struct QuantileMoments {
    pub p: f64,
    pub rank: usize,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of `mean`.
    pub stderr_mean: f64,
    /// Standard error of `variance`, from the sample fourth central moment.
    pub stderr_variance: f64,
    /// `n·E(U_{r:n} - p)²`.
    pub n_mse: f64,
    pub beta_mean: f64,
    pub beta_variance: f64,
}

/// Per-trial values of one scalar statistic.
#[derive(Debug, Clone, Default)]
struct Moments {
    values: Vec<f64>,
}

impl Moments {
    fn summarize(&self, p: f64, rank: usize, n: usize) -> QuantileMoments {
        let t = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / t;
        let m2 = self.values.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / t;
        let m4 = self.values.iter().map(|u| (u - mean).powi(4)).sum::<f64>() / t;
        let variance = m2 * t / (t - 1.0);
        let mse = self.values.iter().map(|u| (u - p).powi(2)).sum::<f64>() / t;
        let (beta_mean, beta_variance) = beta_moments(rank, n).expect("rank validated");
        QuantileMoments {
            p,
            rank,
            n,
            trials: self.values.len(),
            mean,
            variance,
            stderr_mean: (variance / t).sqrt(),
            stderr_variance: ((m4 - m2 * m2).max(0.0) / t).sqrt(),
            n_mse: n as f64 * mse,
            beta_mean,
            beta_variance,
        }
    }
}

/// Rank `floor(n·p) + 1` for a real `p ∈ [0, 1)`.
///
/// A relative nudge of 1e-12 keeps products such as `3·(1/3)` from falling
/// just under an integer.
pub fn rank_for_quantile(n: usize, p: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("quantile level {p} outside [0, 1)")));
    }
    let r = ((n as f64 * p) * (1.0 + 1e-12)).floor() as usize + 1;
    Ok(r.min(n))
}

/// Monte Carlo moments of `U_{r:n}` at `r = floor(n·p) + 1` for each `p`.
///
/// Every trial draws one deployment and reads all requested ranks from it.
pub fn order_statistic_moments(
    ps: &[f64],
    n: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<QuantileMoments>> {
    if trials < 2 {
        return Err(Error::InsufficientTrials {
            required: 2,
            actual: trials,
        });
    }
    if n == 0 {
        return Err(Error::EmptyDeployment);
    }
    let ranks = ps
        .iter()
        .map(|&p| rank_for_quantile(n, p))
        .collect::<Result<Vec<_>>>()?;
    let draws = run_trials(trials, workers, |i| {
        let mut rng = trial_rng(seed, 0, n, i);
        deploy(n, &mut rng)
            .and_then(|d| d.order_statistics(&ranks))
            .expect("validated inputs")
    });
    Ok(ps
        .iter()
        .zip(&ranks)
        .enumerate()
        .map(|(j, (&p, &r))| {
            Moments {
                values: draws.iter().map(|u| u[j]).collect(),
            }
            .summarize(p, r, n)
        })
        .collect())
}

/// Empirical vs analytic pointwise variance of the reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct PointwiseCheck {
    pub t: f64,
    pub analytic_second_moment: [f64; 2],
    pub empirical_second_moment: [f64; 2],
    pub analytic_abs_second_moment: f64,
    pub empirical_abs_second_moment: f64,
}

/// Outcome of [`clt_empirical_check`].
#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub b: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub field: FourierCoefficients,
    pub analytic_k_a_herm: MatrixDoc,
    pub empirical_k_a_herm: MatrixDoc,
    pub frobenius_rel_err: Option<f64>,
    /// Largest entry magnitude of the empirical Hermitian covariance.
    pub empirical_max_abs: f64,
    pub analytic_k_a_pseudo: MatrixDoc,
    pub empirical_k_a_pseudo: MatrixDoc,
    pub pseudo_frobenius_rel_err: Option<f64>,
    /// `K_U` restricted to the non-degenerate quantiles `l ≥ 1`.
    pub analytic_k_u: MatrixDoc,
    pub empirical_k_u: MatrixDoc,
    pub k_u_frobenius_rel_err: Option<f64>,
    pub per_quantile_moments: Vec<QuantileMoments>,
    pub pointwise: Vec<PointwiseCheck>,
}

/// Times at which [`CltReport::pointwise`] is evaluated.
pub const POINTWISE_TIMES: [f64; 4] = [0.0, 0.125, 0.25, 0.5];

/// Runs `trials` independent deploy → observe → estimate pipelines on a fixed
/// field and compares second moments of `√n(Â - a)` and `√n(U_r - p)` with
/// their analytic limits.
///
/// Trial `i` uses the stream `trial_rng(seed, b, n, i)`.
pub fn clt_empirical_check(
    field: &FourierCoefficients,
    b: usize,
    n: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<CltReport> {
    if trials < 2 {
        return Err(Error::InsufficientTrials {
            required: 2,
            actual: trials,
        });
    }
    let bundle = CovarianceBundle::for_field(field)?;
    if bundle.b != b {
        return Err(Error::BandwidthMismatch {
            left: field.bandwidth(),
            right: b,
        });
    }
    let ranks = quantile_indices(n, b)?;
    let d = dimension(b);
    let root_n = (n as f64).sqrt();

    let samples = run_trials(trials, workers, |i| {
        let mut rng = trial_rng(seed, b, n, i);
        let draw = deploy(n, &mut rng).expect("n >= 2b+1 >= 1");
        let hidden = draw.order_statistics(&ranks).expect("ranks in range");
        let est = estimate_coeffs(&observe(field, &draw), b).expect("n >= 2b+1");
        let s: Vec<Complex64> = est
            .coeffs()
            .iter()
            .zip(field.coeffs())
            .map(|(e, a)| (e - a) * root_n)
            .collect();
        (s, hidden)
    });

    let t = trials as f64;
    let mut herm = DMatrix::<Complex64>::zeros(d, d);
    let mut pseudo = DMatrix::<Complex64>::zeros(d, d);
    let mut ku = DMatrix::<f64>::zeros(d - 1, d - 1);
    let p: Vec<f64> = (0..d).map(|l| l as f64 * spacing(b)).collect();
    for (s, u) in &samples {
        for i in 0..d {
            for j in 0..d {
                herm[(i, j)] += s[i] * s[j].conj();
                pseudo[(i, j)] += s[i] * s[j];
            }
        }
        for i in 1..d {
            for j in 1..d {
                ku[(i - 1, j - 1)] += n as f64 * (u[i] - p[i]) * (u[j] - p[j]);
            }
        }
    }
    herm /= Complex64::new(t, 0.0);
    pseudo /= Complex64::new(t, 0.0);
    ku /= t;

    let per_quantile_moments = (0..d)
        .map(|l| {
            Moments {
                values: samples.iter().map(|(_, u)| u[l]).collect(),
            }
            .summarize(p[l], ranks[l], n)
        })
        .collect();

    let pointwise = POINTWISE_TIMES
        .iter()
        .map(|&time| {
            let v = harmonics(b, time);
            let mut second = Complex64::new(0.0, 0.0);
            let mut abs_second = 0.0;
            for (s, _) in &samples {
                let x: Complex64 = v.iter().zip(s).map(|(a, b)| a * b).sum();
                second += x * x;
                abs_second += x.norm_sqr();
            }
            second /= t;
            abs_second /= t;
            let (a_second, a_abs) = pointwise_variance(&bundle, time);
            PointwiseCheck {
                t: time,
                analytic_second_moment: [a_second.re, a_second.im],
                empirical_second_moment: [second.re, second.im],
                analytic_abs_second_moment: a_abs,
                empirical_abs_second_moment: abs_second,
            }
        })
        .collect();

    let k_u_block = bundle.k_u.view((1, 1), (d - 1, d - 1)).into_owned();
    Ok(CltReport {
        b,
        n,
        trials,
        seed,
        field: field.clone(),
        frobenius_rel_err: frobenius_rel_err(&herm, &bundle.k_a_herm),
        empirical_max_abs: herm.iter().map(|z| z.norm()).fold(0.0, f64::max),
        pseudo_frobenius_rel_err: frobenius_rel_err(&pseudo, &bundle.k_a_pseudo),
        k_u_frobenius_rel_err: frobenius_rel_err(&ku, &k_u_block),
        analytic_k_a_herm: complex_matrix_doc(&bundle.k_a_herm),
        empirical_k_a_herm: complex_matrix_doc(&herm),
        analytic_k_a_pseudo: complex_matrix_doc(&bundle.k_a_pseudo),
        empirical_k_a_pseudo: complex_matrix_doc(&pseudo),
        analytic_k_u: real_matrix_doc(&k_u_block),
        empirical_k_u: real_matrix_doc(&ku),
        per_quantile_moments,
        pointwise,
    })
}
