#ifndef AVC_JSC_H
#define AVC_JSC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Built-in channels.
 */
typedef enum AvcBuiltin {
  AVC_BUILTIN_BINARY_EXAMPLE = 0,
  AVC_BUILTIN_ADDER = 1,
  AVC_BUILTIN_STATE_REVEALING = 2,
  AVC_BUILTIN_JAMMED_ERASURE = 3,
} AvcBuiltin;

/*
 Coding schemes of the simulator.
 */
typedef enum AvcScheme {
  /*
   Strictly causal, U = S.
   */
  AVC_SCHEME_DESCRIBE_STATE = 0,
  /*
   Strictly causal, constant U.
   */
  AVC_SCHEME_NO_DESCRIPTION = 1,
  /*
   Noncausal, U = X uniform and independent of the state.
   */
  AVC_SCHEME_STATE_BLIND = 2,
} AvcScheme;

/*
 Status code returned by every fallible function.
 */
typedef enum AvcStatus {
  AVC_STATUS_OK = 0,
  AVC_STATUS_NULL_POINTER = 1,
  AVC_STATUS_INVALID_UTF8 = 2,
  AVC_STATUS_PARSE = 3,
  AVC_STATUS_INVALID_CHANNEL = 4,
  AVC_STATUS_INVALID_ARGUMENT = 5,
  /*
   A bound's hypotheses fail or a rate plan has no headroom.
   */
  AVC_STATUS_INFEASIBLE = 6,
  /*
   An enumeration or codebook exceeded its budget.
   */
  AVC_STATUS_BUDGET = 7,
  AVC_STATUS_INTERNAL = 8,
} AvcStatus;

/*
 Opaque channel handle.
 */
typedef struct AvcChannel AvcChannel;

/*
 Opaque handle to the rows of a simulation.
 */
typedef struct AvcSimResult AvcSimResult;

typedef struct AvcShape {
  size_t nx;
  size_t ns;
  size_t nj;
  size_t ny;
  size_t ns_hat;
} AvcShape;

typedef struct AvcSymResult {
  /*
   Infinite when the variant has no pair to exchange.
   */
  double margin;
  bool symmetrizable;
  size_t pairs;
} AvcSymResult;

typedef struct AvcBound {
  double value;
  bool feasible;
  /*
   True when the outer maximum comes from a local search.
   */
  bool heuristic;
} AvcBound;

typedef struct AvcRatePlan {
  /*
   True for the noncausal plan.
   */
  bool noncausal;
  double r;
  double r_s;
  double r_s_tilde;
  double r_s_prime;
  double tau;
  double covering_rate;
  double max_r;
} AvcRatePlan;

/*
 Simulation settings. `jammers` is a comma-separated list of jammer
 names, or null for every constant jammer plus the uniform i.i.d. one.
 */
typedef struct AvcSimOptions {
  enum AvcScheme scheme;
  double tau;
  const size_t *blocklengths;
  size_t blocklengths_len;
  size_t trials;
  uint64_t seed;
  const char *jammers;
  uint64_t jam_budget;
} AvcSimOptions;

typedef struct AvcTrialStats {
  size_t n;
  size_t trials;
  size_t messages;
  double eta;
  double avg_error;
  double max_error;
  double distortion;
  size_t covering_failures;
  size_t ambiguities;
  size_t bad_codeword_errors;
  size_t explosions;
} AvcTrialStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *avc_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *avc_version(void);

/*
 Parses a channel from JSON text.

 # Safety
 `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum AvcStatus avc_channel_from_json(const char *json, struct AvcChannel **out);

/*
 # Safety
 `out` must be a writable pointer.
 */
enum AvcStatus avc_channel_builtin(enum AvcBuiltin which, struct AvcChannel **out);

/*
 Releases a channel. Null is ignored.

 # Safety
 `ch` must come from this library and not be used afterwards.
 */
void avc_channel_free(struct AvcChannel *ch);

/*
 # Safety
 `ch` must be a live channel handle and `out` a writable pointer.
 */
enum AvcStatus avc_channel_shape(const struct AvcChannel *ch, struct AvcShape *out);

/*
 Symmetrizability margin of one variant (`XS`, `X`, `S`, `X|S`, `S|X`).

 # Safety
 `ch` must be a live channel handle, `variant` a NUL-terminated string and
 `out` a writable pointer.
 */
enum AvcStatus avc_sym_margin(const struct AvcChannel *ch,
                              const char *variant,
                              double tol,
                              struct AvcSymResult *out);

/*
 Evaluates a bound by name (`minimax`, `strictly-causal`, `noncausal`, ...).
 Bounds without a distortion constraint ignore `d`. An infeasible
 minimax or lossless bound still reports its value with `feasible` unset;
 the other kinds return `Infeasible` when no point satisfies them.

 # Safety
 `ch` must be a live channel handle, `kind` a NUL-terminated string and
 `out` a writable pointer.
 */
enum AvcStatus avc_bound(const struct AvcChannel *ch,
                         const char *kind,
                         double d,
                         uint64_t seed,
                         struct AvcBound *out);

/*
 Rate plan of a scheme with uniform input and slack `tau`.

 # Safety
 `ch` must be a live channel handle and `out` a writable pointer.
 */
enum AvcStatus avc_rate_plan(const struct AvcChannel *ch,
                             enum AvcScheme scheme,
                             double tau,
                             struct AvcRatePlan *out);

/*
 Runs the Monte Carlo simulation. Rows are ordered by blocklength, then
 by jammer.

 # Safety
 `ch` must be a live channel handle, `opts` a readable pointer whose
 `blocklengths` holds `blocklengths_len` values, and `out` writable.
 */
enum AvcStatus avc_simulate(const struct AvcChannel *ch,
                            const struct AvcSimOptions *opts,
                            struct AvcSimResult **out);

/*
 Number of rows; zero for a null handle.

 # Safety
 `res` must be null or a live result handle.
 */
size_t avc_sim_result_len(const struct AvcSimResult *res);

/*
 # Safety
 `res` must be a live result handle and `out` a writable pointer.
 */
enum AvcStatus avc_sim_result_get(const struct AvcSimResult *res,
                                  size_t index,
                                  struct AvcTrialStats *out);

/*
 Name of the jammer behind a row, copied into `buf` with a terminating
 NUL and truncated to `len` bytes. Returns the full name length, or zero
 for an invalid row.

 # Safety
 `res` must be a live result handle and `buf` writable for `len` bytes
 (or null with `len` zero).
 */
size_t avc_sim_result_jammer(const struct AvcSimResult *res, size_t index, char *buf, size_t len);

/*
 Releases a simulation result. Null is ignored.

 # Safety
 `res` must come from `avc_simulate` and not be used afterwards.
 */
void avc_sim_result_free(struct AvcSimResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AVC_JSC_H */
