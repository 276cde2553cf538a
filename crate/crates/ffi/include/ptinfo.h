#ifndef PTINFO_H
#define PTINFO_H

#include <stdint.h>

typedef enum PtKineticMode {
  PT_KINETIC_MODE_PRINTED = 0,
  PT_KINETIC_MODE_IDENTITY = 1,
  PT_KINETIC_MODE_DERIVATIVE = 2,
} PtKineticMode;

typedef enum PtStatus {
  PT_STATUS_OK = 0,
  PT_STATUS_NULL_POINTER = 1,
  PT_STATUS_INVALID_PARAMETER = 2,
  PT_STATUS_NOT_BOUND = 3,
  PT_STATUS_MAGNETIC_OUT_OF_RANGE = 4,
  // Quadrature or special-function failure.
  PT_STATUS_NUMERICAL = 5,
  PT_STATUS_UNSUPPORTED = 6,
  PT_STATUS_FIXTURE = 7,
  // `pt_validate_fixtures` found printed values that break an identity.
  PT_STATUS_IDENTITY_FAILURE = 8,
  PT_STATUS_PANIC = 9,
} PtStatus;

// Opaque bound state.
typedef struct PtState PtState;

// Inputs for [`pt_state_new`]. `pt_params_default` fills table units.
typedef struct PtParams {
  double lambda;
  double alpha;
  double hbar;
  // Twice the reduced mass.
  double two_mu;
  double d0;
  uint32_t n;
  uint32_t l;
  int32_t m;
} PtParams;

typedef struct PtObservables {
  double energy;
  double r2;
  // ⟨p²⟩ in the requested mode.
  double p2;
  double p2_printed;
  double p2_identity;
  double p2_derivative;
  double r_inv2_numeric;
  double r_inv2_hft;
  double tanh2;
  double norm_constant;
  double delta_r;
  double delta_p;
  double product2;
  double bound;
  // 1 when (Δr)² < 0.5.
  int32_t squeezed;
} PtObservables;

typedef struct PtInformation {
  double fisher_rho;
  double fisher_gamma;
  double product;
  double product_bound;
  double cramer_rao;
  double cramer_rao_bound;
} PtInformation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Table units (ħ = 2μ = α = 1, d0 = 1/12), λ = 1 and the ground state.
struct PtParams pt_params_default(void);

// Build a state. On success `*out` owns a handle for [`pt_state_free`].
//
// # Safety
// `params` must be null or point to a valid `PtParams`; `out` must be null
// or valid for writes.
enum PtStatus pt_state_new(const struct PtParams *params, struct PtState **out);

// Release a handle from [`pt_state_new`]. Null is ignored.
//
// # Safety
// `state` must be null or a handle not yet freed.
void pt_state_free(struct PtState *state);

// # Safety
// `state` must be null or a live handle; `out` null or valid for writes.
enum PtStatus pt_state_energy(const struct PtState *state, double *out);

// Closed-form ⟨r⁻²⟩.
//
// # Safety
// `state` must be null or a live handle; `out` null or valid for writes.
enum PtStatus pt_state_r_inv2_hft(const struct PtState *state, double *out);

// Quadrature-backed observables. `rel_tol <= 0` selects 1e-10.
//
// # Safety
// `state` must be null or a live handle; `out` null or valid for writes.
enum PtStatus pt_state_observables(const struct PtState *state,
                                   enum PtKineticMode mode,
                                   double rel_tol,
                                   struct PtObservables *out);

// Fisher information and the Cramér-Rao product. Requires m = 0.
//
// # Safety
// `state` must be null or a live handle; `out` null or valid for writes.
enum PtStatus pt_state_information(const struct PtState *state,
                                   enum PtKineticMode mode,
                                   double rel_tol,
                                   struct PtInformation *out);

// P_n^(a,b)(x).
//
// # Safety
// `out` must be null or valid for writes.
enum PtStatus pt_jacobi(uint32_t n, double a, double b, double x, double *out);

// V(r). Only the potential fields of `params` are read.
//
// # Safety
// `params` must be null or valid; `out` null or valid for writes.
enum PtStatus pt_potential_value(const struct PtParams *params, double r, double *out);

// Check the identities among the embedded tables. Returns
// `IdentityFailure` when any check fails; the counts are written either way.
//
// # Safety
// `passed` and `total` must each be null or valid for writes.
enum PtStatus pt_validate_fixtures(uint32_t *passed, uint32_t *total);

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *pt_last_error_message(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PTINFO_H */
