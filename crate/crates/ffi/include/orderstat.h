#ifndef ORDERSTAT_H
#define ORDERSTAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes for every fallible call.
typedef enum OrderstatStatus {
  ORDERSTAT_STATUS_OK = 0,
  ORDERSTAT_STATUS_NULL_POINTER = 1,
  ORDERSTAT_STATUS_INVALID_ARGUMENT = 2,
  ORDERSTAT_STATUS_LENGTH_MISMATCH = 3,
  ORDERSTAT_STATUS_INSUFFICIENT_SAMPLES = 4,
  ORDERSTAT_STATUS_PARSE = 5,
  ORDERSTAT_STATUS_PANIC = 6,
} OrderstatStatus;

// Estimated coefficients.
typedef struct OrderstatEstimate OrderstatEstimate;

// Fourier coefficients of a bandlimited field.
typedef struct OrderstatField OrderstatField;

// Ordered, location-free field samples.
typedef struct OrderstatSamples OrderstatSamples;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL if none.
// The pointer stays valid until the next failing call on this thread.
const char *orderstat_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void orderstat_string_free(char *s);

// Builds a field from `len = 2b+1` coefficients. `im` may be NULL for
// purely real coefficients.
//
// # Safety
// `re` (and `im` if non-NULL) must point to `len` doubles; `out` must be writable.
enum OrderstatStatus orderstat_field_new(size_t b,
                                         const double *re,
                                         const double *im,
                                         size_t len,
                                         bool real_valued,
                                         struct OrderstatField **out);

// Draws a random field with `Σ|a_k| = 1` from a ChaCha8 stream seeded by `seed`.
//
// # Safety
// `out` must be writable.
enum OrderstatStatus orderstat_field_random(size_t b,
                                            uint64_t seed,
                                            bool real_valued,
                                            struct OrderstatField **out);

// Parses the coefficients JSON document `{"b", "real_valued", "coeffs"}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum OrderstatStatus orderstat_field_from_json(const char *json, struct OrderstatField **out);

// Serializes a field to JSON; release the string with `orderstat_string_free`.
//
// # Safety
// `field` must be a live handle; `out` must be writable.
enum OrderstatStatus orderstat_field_to_json(const struct OrderstatField *field, char **out);

// # Safety
// `field` must be a live handle; `out` must be writable.
enum OrderstatStatus orderstat_field_bandwidth(const struct OrderstatField *field, size_t *out);

// Copies the `2b+1` coefficients into `re_out`/`im_out`.
//
// # Safety
// `field` must be a live handle; both buffers must hold `len` doubles.
enum OrderstatStatus orderstat_field_coeffs(const struct OrderstatField *field,
                                            double *re_out,
                                            double *im_out,
                                            size_t len);

// Evaluates `g(t)`.
//
// # Safety
// `field` must be a live handle; `re_out`/`im_out` must be writable.
enum OrderstatStatus orderstat_field_eval(const struct OrderstatField *field,
                                          double t,
                                          double *re_out,
                                          double *im_out);

// # Safety
// `field` must be NULL or a handle not yet freed.
void orderstat_field_free(struct OrderstatField *field);

// Samples `field` at `n` uniform locations drawn from `seed` and keeps the
// values in location order.
//
// # Safety
// `field` must be a live handle; `out` must be writable.
enum OrderstatStatus orderstat_samples_simulate(const struct OrderstatField *field,
                                                size_t n,
                                                uint64_t seed,
                                                struct OrderstatSamples **out);

// Wraps externally ordered values. `im` may be NULL.
//
// # Safety
// `re` (and `im` if non-NULL) must point to `len` doubles; `out` must be writable.
enum OrderstatStatus orderstat_samples_from_values(const double *re,
                                                   const double *im,
                                                   size_t len,
                                                   struct OrderstatSamples **out);

// # Safety
// `samples` must be a live handle; `out` must be writable.
enum OrderstatStatus orderstat_samples_len(const struct OrderstatSamples *samples, size_t *out);

// # Safety
// `samples` must be a live handle; both buffers must hold `len` doubles.
enum OrderstatStatus orderstat_samples_values(const struct OrderstatSamples *samples,
                                              double *re_out,
                                              double *im_out,
                                              size_t len);

// # Safety
// `samples` must be NULL or a handle not yet freed.
void orderstat_samples_free(struct OrderstatSamples *samples);

// Writes the `2b+1` one-based quantile ranks for `n` samples into `out`.
//
// # Safety
// `out` must hold `len` values.
enum OrderstatStatus orderstat_quantile_indices(size_t n, size_t b, size_t *out, size_t len);

// Estimates bandwidth-`b` coefficients from ordered samples.
//
// # Safety
// `samples` must be a live handle; `out` must be writable.
enum OrderstatStatus orderstat_estimate(const struct OrderstatSamples *samples,
                                        size_t b,
                                        struct OrderstatEstimate **out);

// # Safety
// `estimate` must be a live handle; both buffers must hold `len` doubles.
enum OrderstatStatus orderstat_estimate_coeffs(const struct OrderstatEstimate *estimate,
                                               double *re_out,
                                               double *im_out,
                                               size_t len);

// # Safety
// `estimate` must be a live handle; `out` must be writable.
enum OrderstatStatus orderstat_estimate_sample_count(const struct OrderstatEstimate *estimate,
                                                     size_t *out);

// Evaluates the reconstruction at `t`.
//
// # Safety
// `estimate` must be a live handle; `re_out`/`im_out` must be writable.
enum OrderstatStatus orderstat_estimate_reconstruct(const struct OrderstatEstimate *estimate,
                                                    double t,
                                                    double *re_out,
                                                    double *im_out);

// `Σ|Â_k - a_k|²` against the true field.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum OrderstatStatus orderstat_estimate_distortion(const struct OrderstatEstimate *estimate,
                                                   const struct OrderstatField *truth,
                                                   double *out);

// # Safety
// `estimate` must be NULL or a handle not yet freed.
void orderstat_estimate_free(struct OrderstatEstimate *estimate);

// `π²b²(2b+1)`, the asymptotic bound on `n·E‖Ĝ - g‖²`.
double orderstat_distortion_bound(size_t b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORDERSTAT_H */
