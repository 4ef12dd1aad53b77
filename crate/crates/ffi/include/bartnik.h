#ifndef BARTNIK_H
#define BARTNIK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BartnikStatus {
  BARTNIK_STATUS_OK = 0,
  BARTNIK_STATUS_NULL_POINTER = 1,
  BARTNIK_STATUS_INVALID_ARGUMENT = 2,
  BARTNIK_STATUS_ILL_POSED = 3,
  BARTNIK_STATUS_NUMERICAL = 4,
  BARTNIK_STATUS_PANIC = 5,
} BartnikStatus;

// Linearized boundary data in the spherical-harmonic potential convention.
typedef struct BartnikBoundaryData BartnikBoundaryData;

// Verification report: checks plus an optional payload, serialized as JSON.
typedef struct BartnikReport BartnikReport;

// Solution of the flat linearized problem with its verification report.
typedef struct BartnikSolution BartnikSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *bartnik_version(void);

// Message describing the last failure on this thread; empty after a success.
const char *bartnik_last_error(void);

// Run the symbolic suite against the embedded golden files and the numeric sweeps.
//
// # Safety
// `out` must be a valid pointer; on success it receives a report owned by the caller.
enum BartnikStatus bartnik_symbols_verify(uint64_t seed,
                                          size_t samples,
                                          struct BartnikReport **out);

// Run the geometry battery on a fixture (`minkowski`, `schwarzschild[:m]`, `kerr[:m,a]`).
//
// # Safety
// `fixture` must be a NUL-terminated string and `out` a valid pointer.
enum BartnikStatus bartnik_geometry_verify(const char *fixture,
                                           uint64_t seed,
                                           struct BartnikReport **out);

// Kernel analysis of the homogeneous flat problem at truncations `lmax[0..count]`.
//
// # Safety
// `lmax` must point to `count` values and `out` must be a valid pointer.
enum BartnikStatus bartnik_flat_kernel(const size_t *lmax,
                                       size_t count,
                                       uint64_t seed,
                                       struct BartnikReport **out);

// 1 if every check passed, 0 otherwise (also for a null handle).
//
// # Safety
// `report` must be null or a live handle.
int32_t bartnik_report_passed(const struct BartnikReport *report);

// Number of checks in the report.
//
// # Safety
// `report` must be null or a live handle.
size_t bartnik_report_check_count(const struct BartnikReport *report);

// Report as JSON, owned by the handle; null for a null handle.
//
// # Safety
// `report` must be null or a live handle.
const char *bartnik_report_json(const struct BartnikReport *report);

// # Safety
// `report` must be null or a handle not yet freed.
void bartnik_report_free(struct BartnikReport *report);

// Parse boundary data from JSON.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum BartnikStatus bartnik_data_from_json(const char *json, struct BartnikBoundaryData **out);

// Zero data at degree `lmax`.
//
// # Safety
// `out` must be a valid pointer.
enum BartnikStatus bartnik_data_zero(size_t lmax, struct BartnikBoundaryData **out);

// # Safety
// `data` must be null or a handle not yet freed.
void bartnik_data_free(struct BartnikBoundaryData *data);

// Solve at truncation `lmax`, verified against a solve at `lmax + 2`.
//
// # Safety
// `data` must be a live handle and `out` a valid pointer.
enum BartnikStatus bartnik_solve(const struct BartnikBoundaryData *data,
                                 size_t lmax,
                                 uint64_t seed,
                                 struct BartnikSolution **out);

// Number of solution components; their order is h11 h12 h13 h22 h23 h33 Y1 Y2 Y3 v G.
size_t bartnik_component_count(void);

// Evaluate all components at `x[0..3]` (|x| >= 1) into `values[0..11]`.
//
// # Safety
// `solution` must be a live handle, `x` must point to 3 values and `values` to 11.
enum BartnikStatus bartnik_solution_eval(const struct BartnikSolution *solution,
                                         const double *x,
                                         double *values);

// Coefficient of r^-(l+1) Y_lm in component `component`; zero beyond the truncation.
//
// # Safety
// `solution` must be a live handle and `out` a valid pointer.
enum BartnikStatus bartnik_solution_coefficient(const struct BartnikSolution *solution,
                                                size_t component,
                                                size_t l,
                                                int64_t m,
                                                double *out);

// Verification report of the solve, owned by the solution handle.
//
// # Safety
// `solution` must be null or a live handle.
const struct BartnikReport *bartnik_solution_report(const struct BartnikSolution *solution);

// # Safety
// `solution` must be null or a handle not yet freed.
void bartnik_solution_free(struct BartnikSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BARTNIK_H */
