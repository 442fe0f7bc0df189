#ifndef GKCS_H
#define GKCS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum GkcsStatus {
  GKCS_STATUS_OK = 0,
  GKCS_STATUS_NULL_POINTER = 1,
  GKCS_STATUS_DOMAIN = 2,
  GKCS_STATUS_NON_CONVERGENCE = 3,
  GKCS_STATUS_OVERFLOW = 4,
  GKCS_STATUS_IDENTITY_VIOLATION = 5,
  GKCS_STATUS_CONFIG = 6,
  GKCS_STATUS_INVALID_UTF8 = 7,
  GKCS_STATUS_PANIC = 8,
} GkcsStatus;

// Opaque model handle.
typedef struct GkcsModel GkcsModel;

// Opaque normalized coherent-state handle.
typedef struct GkcsState GkcsState;

// Physical and reduced parameters of a model.
typedef struct GkcsParamValues {
  double rho;
  double kappa0;
  double alpha;
  double beta;
  double gamma;
  double q;
} GkcsParamValues;

typedef struct GkcsComplex {
  double re;
  double im;
} GkcsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next call into this library from the same thread.
const char *gkcs_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *gkcs_version(void);

// Model from the force constant ϱ and equilibrium length κ₀.
//
// # Safety
// `out` must be valid for writes.
enum GkcsStatus gkcs_model_from_physical(double rho, double kappa0, struct GkcsModel **out);

// # Safety
// `out` must be valid for writes.
enum GkcsStatus gkcs_model_from_reduced(double alpha, double beta, struct GkcsModel **out);

// # Safety
// `out` must be valid for writes.
enum GkcsStatus gkcs_model_from_gamma(double gamma, double beta, struct GkcsModel **out);

// # Safety
// `model` must be NULL or a handle from a `gkcs_model_from_*` call not yet freed.
void gkcs_model_free(struct GkcsModel *model);

// # Safety
// `model` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_model_values(const struct GkcsModel *model, struct GkcsParamValues *out);

// Reduced eigenvalue λ_m = 4β(m + γ/2).
//
// # Safety
// `model` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_eigenvalue(const struct GkcsModel *model, size_t m, double *out);

// Normalized eigenfunction ψ_m(ξ).
//
// # Safety
// `model` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_eigenfunction(const struct GkcsModel *model, size_t m, double xi, double *out);

// Meixner-Pollaczek polynomial P_m^(λ)(x; θ) by recurrence.
//
// # Safety
// `out` must be valid for writes.
enum GkcsStatus gkcs_mp_poly(size_t m, double lambda, double theta, double x, double *out);

// ₁F₁(a; c; z).
//
// # Safety
// `out` must be valid for writes.
enum GkcsStatus gkcs_hyp1f1(struct GkcsComplex a,
                            struct GkcsComplex c,
                            struct GkcsComplex z,
                            struct GkcsComplex *out);

// ₂F₁(a, b; c; z).
//
// # Safety
// `out` must be valid for writes.
enum GkcsStatus gkcs_hyp2f1(struct GkcsComplex a,
                            struct GkcsComplex b,
                            struct GkcsComplex c,
                            struct GkcsComplex z,
                            struct GkcsComplex *out);

// Normalized coherent state labelled by (x, θ, ε) on `model`.
//
// # Safety
// `model` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_state_new(const struct GkcsModel *model,
                               double theta,
                               double epsilon,
                               double x,
                               struct GkcsState **out);

// # Safety
// `state` must be NULL or a handle from `gkcs_state_new` not yet freed.
void gkcs_state_free(struct GkcsState *state);

// Normalization factor N(x) of the state.
//
// # Safety
// `state` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_state_normalization(const struct GkcsState *state, double *out);

// ⟨ξ|x, ε⟩ from the closed form.
//
// # Safety
// `state` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_state_wavefunction(const struct GkcsState *state,
                                        double xi,
                                        struct GkcsComplex *out);

// ⟨ξ|x, ε⟩ from the truncated eigenfunction superposition.
//
// # Safety
// `state` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_state_wavefunction_series(const struct GkcsState *state,
                                               double xi,
                                               double tol,
                                               struct GkcsComplex *out);

// ∫₀^∞ |⟨ξ|x, ε⟩|² dξ by quadrature; 1 up to `tol`.
//
// # Safety
// `state` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_state_l2_norm_sq(const struct GkcsState *state, double tol, double *out);

// Overlap ⟨a|b⟩ of two normalized states on the same model.
//
// # Safety
// Both handles must be live and `out` valid for writes.
enum GkcsStatus gkcs_state_overlap(const struct GkcsState *a,
                                   const struct GkcsState *b,
                                   struct GkcsComplex *out);

// Density N(x)Υ(x) of the labelling measure at the state's label.
//
// # Safety
// `state` must be a live handle and `out` valid for writes.
enum GkcsStatus gkcs_state_measure_density(const struct GkcsState *state, double *out);

// Runs one verification suite, or all of them when `suite` is NULL, and
// returns the reports as a JSON array in `*out_json` (release with
// [`gkcs_string_free`]) and the number of failed invariants in `*failed`.
//
// # Safety
// `suite` must be NULL or a NUL-terminated string; outputs valid for writes.
enum GkcsStatus gkcs_verify(const char *suite, char **out_json, size_t *failed);

// # Safety
// `s` must be NULL or a string returned by this library not yet freed.
void gkcs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GKCS_H */
