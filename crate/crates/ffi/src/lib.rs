//! C ABI for the orderstat estimator.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_random`
//! style constructors and released by the matching `*_free`. Every fallible
//! call returns an [`OrderstatStatus`]; on failure the message is available
//! from [`orderstat_last_error_message`] on the same thread.
//!
//! Coefficient arrays are split into separate real and imaginary buffers of
//! length `2b+1`, ordered `a_{-b} .. a_b`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use orderstat::field::dimension;
use orderstat::{CoefficientEstimate, Error, FourierCoefficients, SampleSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result codes for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderstatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    InsufficientSamples = 4,
    Parse = 5,
    Panic = 6,
}

/// Fourier coefficients of a bandlimited field.
pub struct OrderstatField(FourierCoefficients);

/// Ordered, location-free field samples.
pub struct OrderstatSamples(SampleSet);

/// Estimated coefficients.
pub struct OrderstatEstimate(CoefficientEstimate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OrderstatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::LengthMismatch { .. } | Error::BandwidthMismatch { .. } => OrderstatStatus::LengthMismatch,
            Error::InsufficientSamples { .. } => OrderstatStatus::InsufficientSamples,
            Error::Json(_) | Error::Parse(_) => OrderstatStatus::Parse,
            _ => OrderstatStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OrderstatStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OrderstatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrderstatStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside orderstat".into());
            OrderstatStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_complex(re: *const f64, im: *const f64, len: usize) -> Result<Vec<Complex64>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if re.is_null() {
        return Err(null("re"));
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(im, len))
    };
    Ok((0..len)
        .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect())
}

unsafe fn write_complex(values: &[Complex64], re_out: *mut f64, im_out: *mut f64, len: usize) -> Result<(), Failure> {
    if len != values.len() {
        return Err(Failure(
            OrderstatStatus::LengthMismatch,
            format!("buffer length {len}, need {}", values.len()),
        ));
    }
    if re_out.is_null() || im_out.is_null() {
        return Err(null("output buffer"));
    }
    let re = std::slice::from_raw_parts_mut(re_out, len);
    let im = std::slice::from_raw_parts_mut(im_out, len);
    for (i, v) in values.iter().enumerate() {
        re[i] = v.re;
        im[i] = v.im;
    }
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn orderstat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn orderstat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a field from `len = 2b+1` coefficients. `im` may be NULL for
/// purely real coefficients.
///
/// # Safety
/// `re` (and `im` if non-NULL) must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_new(
    b: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    real_valued: bool,
    out: *mut *mut OrderstatField,
) -> OrderstatStatus {
    guard(|| {
        let coeffs = read_complex(re, im, len)?;
        let field = FourierCoefficients::new(b, coeffs, real_valued)?;
        write_out(out, boxed(OrderstatField(field)), "out")
    })
}

/// Draws a random field with `Σ|a_k| = 1` from a ChaCha8 stream seeded by `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_random(
    b: usize,
    seed: u64,
    real_valued: bool,
    out: *mut *mut OrderstatField,
) -> OrderstatStatus {
    guard(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = orderstat::random_field(b, &mut rng, real_valued);
        write_out(out, boxed(OrderstatField(field)), "out")
    })
}

/// Parses the coefficients JSON document `{"b", "real_valued", "coeffs"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_from_json(json: *const c_char, out: *mut *mut OrderstatField) -> OrderstatStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(OrderstatStatus::Parse, e.to_string()))?;
        let field: FourierCoefficients = serde_json::from_str(s).map_err(Error::from)?;
        write_out(out, boxed(OrderstatField(field)), "out")
    })
}

/// Serializes a field to JSON; release the string with `orderstat_string_free`.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_to_json(field: *const OrderstatField, out: *mut *mut c_char) -> OrderstatStatus {
    guard(|| {
        let field = as_ref(field, "field")?;
        let s = serde_json::to_string(&field.0).map_err(Error::from)?;
        let c = CString::new(s).expect("JSON has no NUL");
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_bandwidth(field: *const OrderstatField, out: *mut usize) -> OrderstatStatus {
    guard(|| write_out(out, as_ref(field, "field")?.0.bandwidth(), "out"))
}

/// Copies the `2b+1` coefficients into `re_out`/`im_out`.
///
/// # Safety
/// `field` must be a live handle; both buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_coeffs(
    field: *const OrderstatField,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
) -> OrderstatStatus {
    guard(|| write_complex(as_ref(field, "field")?.0.coeffs(), re_out, im_out, len))
}

/// Evaluates `g(t)`.
///
/// # Safety
/// `field` must be a live handle; `re_out`/`im_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_eval(
    field: *const OrderstatField,
    t: f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> OrderstatStatus {
    guard(|| {
        let v = as_ref(field, "field")?.0.eval(t);
        write_complex(&[v], re_out, im_out, 1)
    })
}

/// # Safety
/// `field` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orderstat_field_free(field: *mut OrderstatField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Samples `field` at `n` uniform locations drawn from `seed` and keeps the
/// values in location order.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_samples_simulate(
    field: *const OrderstatField,
    n: usize,
    seed: u64,
    out: *mut *mut OrderstatSamples,
) -> OrderstatStatus {
    guard(|| {
        let field = as_ref(field, "field")?;
        let draw = orderstat::sampling::deploy_seeded(n, seed)?;
        let set = orderstat::observe(&field.0, &draw);
        write_out(out, boxed(OrderstatSamples(set)), "out")
    })
}

/// Wraps externally ordered values. `im` may be NULL.
///
/// # Safety
/// `re` (and `im` if non-NULL) must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_samples_from_values(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut OrderstatSamples,
) -> OrderstatStatus {
    guard(|| {
        let set = SampleSet::from_ordered_values(read_complex(re, im, len)?)?;
        write_out(out, boxed(OrderstatSamples(set)), "out")
    })
}

/// # Safety
/// `samples` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_samples_len(samples: *const OrderstatSamples, out: *mut usize) -> OrderstatStatus {
    guard(|| write_out(out, as_ref(samples, "samples")?.0.len(), "out"))
}

/// # Safety
/// `samples` must be a live handle; both buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn orderstat_samples_values(
    samples: *const OrderstatSamples,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
) -> OrderstatStatus {
    guard(|| write_complex(as_ref(samples, "samples")?.0.values(), re_out, im_out, len))
}

/// # Safety
/// `samples` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orderstat_samples_free(samples: *mut OrderstatSamples) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

/// Writes the `2b+1` one-based quantile ranks for `n` samples into `out`.
///
/// # Safety
/// `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn orderstat_quantile_indices(n: usize, b: usize, out: *mut usize, len: usize) -> OrderstatStatus {
    guard(|| {
        let ranks = orderstat::quantile_indices(n, b)?;
        if len != ranks.len() {
            return Err(Failure(
                OrderstatStatus::LengthMismatch,
                format!("buffer length {len}, need {}", dimension(b)),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&ranks);
        Ok(())
    })
}

/// Estimates bandwidth-`b` coefficients from ordered samples.
///
/// # Safety
/// `samples` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_estimate(
    samples: *const OrderstatSamples,
    b: usize,
    out: *mut *mut OrderstatEstimate,
) -> OrderstatStatus {
    guard(|| {
        let est = orderstat::estimate_coeffs(&as_ref(samples, "samples")?.0, b)?;
        write_out(out, boxed(OrderstatEstimate(est)), "out")
    })
}

/// # Safety
/// `estimate` must be a live handle; both buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn orderstat_estimate_coeffs(
    estimate: *const OrderstatEstimate,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
) -> OrderstatStatus {
    guard(|| write_complex(as_ref(estimate, "estimate")?.0.coeffs(), re_out, im_out, len))
}

/// # Safety
/// `estimate` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_estimate_sample_count(estimate: *const OrderstatEstimate, out: *mut usize) -> OrderstatStatus {
    guard(|| write_out(out, as_ref(estimate, "estimate")?.0.n(), "out"))
}

/// Evaluates the reconstruction at `t`.
///
/// # Safety
/// `estimate` must be a live handle; `re_out`/`im_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_estimate_reconstruct(
    estimate: *const OrderstatEstimate,
    t: f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> OrderstatStatus {
    guard(|| {
        let v = as_ref(estimate, "estimate")?.0.reconstruct(t);
        write_complex(&[v], re_out, im_out, 1)
    })
}

/// `Σ|Â_k - a_k|²` against the true field.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orderstat_estimate_distortion(
    estimate: *const OrderstatEstimate,
    truth: *const OrderstatField,
    out: *mut f64,
) -> OrderstatStatus {
    guard(|| {
        let d = orderstat::distortion(&as_ref(estimate, "estimate")?.0, &as_ref(truth, "truth")?.0)?;
        write_out(out, d, "out")
    })
}

/// # Safety
/// `estimate` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orderstat_estimate_free(estimate: *mut OrderstatEstimate) {
    if !estimate.is_null() {
        drop(Box::from_raw(estimate));
    }
}

/// `π²b²(2b+1)`, the asymptotic bound on `n·E‖Ĝ - g‖²`.
#[no_mangle]
pub extern "C" fn orderstat_distortion_bound(b: usize) -> f64 {
    orderstat::distortion_bound(b)
}
