#ifndef POLMULTI_H
#define POLMULTI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmStatus {
  PM_STATUS_OK = 0,
  PM_STATUS_NULL_POINTER = 1,
  PM_STATUS_INVALID_ARGUMENT = 2,
  PM_STATUS_VALIDATION = 3,
  PM_STATUS_INFEASIBLE = 4,
  PM_STATUS_ILL_CONDITIONED = 5,
  PM_STATUS_TOLERANCE = 6,
  PM_STATUS_PARSE = 7,
  PM_STATUS_IO = 8,
  PM_STATUS_PANIC = 9,
} PmStatus;

/**
 * A validated spin-S density matrix.
 */
typedef struct PmSector PmSector;

/**
 * Multipole components of one sector.
 */
typedef struct PmSpectrum PmSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *pm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pm_version(void);

enum PmStatus pm_sector_maximally_mixed(int32_t two_s, struct PmSector **out);

enum PmStatus pm_sector_fock(int32_t two_s, int32_t two_m, struct PmSector **out);

enum PmStatus pm_sector_coherent(int32_t two_s, double theta, double phi, struct PmSector **out);

/**
 * Diagonal sector from `2S + 1` probabilities ordered by descending `m`.
 */
enum PmStatus pm_sector_diagonal(int32_t two_s,
                                 const double *probabilities,
                                 size_t len,
                                 struct PmSector **out);

/**
 * Sector from a row-major matrix of interleaved `(re, im)` pairs, `m`
 * descending; `len` must be `2 d²`. The matrix is validated.
 */
enum PmStatus pm_sector_from_matrix(int32_t two_s,
                                    const double *re_im,
                                    size_t len,
                                    struct PmSector **out);

/**
 * Parses a single-sector JSON state file.
 */
enum PmStatus pm_sector_from_json(const char *json, struct PmSector **out);

void pm_sector_free(struct PmSector *sector);

/**
 * `2S + 1`, or 0 for a null handle.
 */
size_t pm_sector_dim(const struct PmSector *sector);

/**
 * Copies the density matrix as interleaved `(re, im)` pairs into `buf`,
 * which must hold `2 d²` doubles.
 */
enum PmStatus pm_sector_matrix(const struct PmSector *sector, double *buf, size_t len);

enum PmStatus pm_sector_purity(const struct PmSector *sector, double *out);

/**
 * New sector `D ρ D†` for z-y-z Euler angles.
 */
enum PmStatus pm_sector_rotate(const struct PmSector *sector,
                               double alpha,
                               double beta,
                               double gamma,
                               struct PmSector **out);

/**
 * Husimi Q at a direction on the sphere.
 */
enum PmStatus pm_sector_q_value(const struct PmSector *sector,
                                double theta,
                                double phi,
                                double *out);

enum PmStatus pm_spectrum_new(const struct PmSector *sector, struct PmSpectrum **out);

void pm_spectrum_free(struct PmSpectrum *spectrum);

/**
 * Highest rank `2S`, or 0 for a null handle.
 */
size_t pm_spectrum_max_rank(const struct PmSpectrum *spectrum);

/**
 * `ρ_Kq = Tr[ρ T_Kq†]`.
 */
enum PmStatus pm_spectrum_component(const struct PmSpectrum *spectrum,
                                    size_t rank,
                                    int32_t q,
                                    double *re,
                                    double *im);

/**
 * `W_K`, rank 0 allowed.
 */
enum PmStatus pm_spectrum_strength(const struct PmSpectrum *spectrum, size_t rank, double *out);

/**
 * `A_K` for `1 ≤ K ≤ 2S`.
 */
enum PmStatus pm_spectrum_cumulative(const struct PmSpectrum *spectrum, size_t rank, double *out);

/**
 * `P_K` for `1 ≤ K ≤ 2S`.
 */
enum PmStatus pm_spectrum_degree(const struct PmSpectrum *spectrum, size_t rank, double *out);

/**
 * Largest `K` with `A_K ≤ tol`.
 */
enum PmStatus pm_spectrum_unpolarization_order(const struct PmSpectrum *spectrum,
                                               double tol,
                                               size_t *out);

/**
 * `A_K` of an SU(2) coherent state.
 */
enum PmStatus pm_coherent_cumulative_max(int32_t two_s, size_t rank, double *out);

/**
 * `⟨j1 m1 j2 m2 | J M⟩` with every argument doubled.
 */
enum PmStatus pm_clebsch_gordan(int32_t two_j1,
                                int32_t two_m1,
                                int32_t two_j2,
                                int32_t two_m2,
                                int32_t two_j,
                                int32_t two_m,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLMULTI_H */
