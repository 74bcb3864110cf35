#ifndef NIKISHIN_H
#define NIKISHIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum NkStatus {
  NK_STATUS_OK = 0,
  NK_STATUS_NULL_POINTER = 1,
  NK_STATUS_INVALID_ARGUMENT = 2,
  NK_STATUS_NUMERICAL = 3,
  NK_STATUS_BUFFER_TOO_SMALL = 4,
  NK_STATUS_PANIC = 5,
} NkStatus;

// Solution of the vector equilibrium problem along a ray.
typedef struct NkEquilibrium NkEquilibrium;

// Multi-level Hermite-Pade polynomials for one multi-index.
typedef struct NkSolution NkSolution;

// Nikishin system of Jacobi-type generating measures.
typedef struct NkSystem NkSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *nk_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `cap`) and returns the full length including the NUL.
//
// # Safety
// `buf` must be null or valid for `cap` bytes.
size_t nk_last_error(char *buf, size_t cap);

// Builds a system from `m` probability measures proportional to
// `(b_j - x)^alpha_j (x - a_j)^beta_j dx` on `[a_j, b_j]`.
//
// # Safety
// `a`, `b`, `alpha`, `beta` must point to `m` doubles; `out` must be writable.
enum NkStatus nk_system_new(const double *a,
                            const double *b,
                            const double *alpha,
                            const double *beta,
                            size_t m,
                            struct NkSystem **out);

// # Safety
// `sys` must be null or a handle from [`nk_system_new`] not yet freed.
void nk_system_free(struct NkSystem *sys);

// Number of generating measures, or 0 for a null handle.
//
// # Safety
// `sys` must be null or a live handle.
size_t nk_system_m(const struct NkSystem *sys);

// Solves for the multi-index `n[0..m]`.
//
// # Safety
// `sys` must be a live handle, `n` must point to `m` values, `out` writable.
enum NkStatus nk_hp_solve(const struct NkSystem *sys,
                          const size_t *n,
                          size_t m,
                          struct NkSolution **out);

// # Safety
// `sol` must be null or a handle from [`nk_hp_solve`] not yet freed.
void nk_solution_free(struct NkSolution *sol);

// Writes the number of zeros of `Q_{n,j}` to `len`.
//
// # Safety
// `sol` must be a live handle and `len` writable.
enum NkStatus nk_solution_zero_count(const struct NkSolution *sol, size_t j, size_t *len);

// Copies the zeros of `Q_{n,j}` in increasing order. `len` receives the
// count; `BufferTooSmall` is returned (and nothing copied) if `cap < count`.
//
// # Safety
// `sol` must be a live handle, `buf` valid for `cap` doubles, `len` writable.
enum NkStatus nk_solution_zeros(const struct NkSolution *sol,
                                size_t j,
                                double *buf,
                                size_t cap,
                                size_t *len);

// Evaluates the form `A_{n,j}` at `z = re + i im`, `j` in `0..=m`.
//
// # Safety
// `sol` must be a live handle; `out_re`, `out_im` writable.
enum NkStatus nk_solution_form(const struct NkSolution *sol,
                               size_t j,
                               double re,
                               double im,
                               double *out_re,
                               double *out_im);

// Evaluates `a_{n,j}/a_{n,m} - s^_{m,j+1}` at `z = re + i im`, `j` in `0..m`.
//
// # Safety
// `sol` must be a live handle; `out_re`, `out_im` writable.
enum NkStatus nk_solution_approximation_error(const struct NkSolution *sol,
                                              size_t j,
                                              double re,
                                              double im,
                                              double *out_re,
                                              double *out_im);

// Solves the vector equilibrium problem on `[a_j, b_j]` for the ray `p`.
//
// # Safety
// `a`, `b`, `p` must point to `m` doubles; `out` must be writable.
enum NkStatus nk_equilibrium_solve(const double *a,
                                   const double *b,
                                   const double *p,
                                   size_t m,
                                   double tol,
                                   struct NkEquilibrium **out);

// # Safety
// `eq` must be null or a handle from [`nk_equilibrium_solve`] not yet freed.
void nk_equilibrium_free(struct NkEquilibrium *eq);

// Equilibrium constant `omega_j`.
//
// # Safety
// `eq` must be a live handle and `out` writable.
enum NkStatus nk_equilibrium_omega(const struct NkEquilibrium *eq, size_t j, double *out);

// Total mass of the `j`-th equilibrium measure.
//
// # Safety
// `eq` must be a live handle and `out` writable.
enum NkStatus nk_equilibrium_mass(const struct NkEquilibrium *eq, size_t j, double *out);

// Density of the `j`-th equilibrium measure at an interior point `x`.
//
// # Safety
// `eq` must be a live handle and `out` writable.
enum NkStatus nk_equilibrium_density(const struct NkEquilibrium *eq,
                                     size_t j,
                                     double x,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NIKISHIN_H */
