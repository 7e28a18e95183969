#ifndef CASCADE_H
#define CASCADE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CascadeStatus {
  CASCADE_STATUS_OK = 0,
  CASCADE_STATUS_NULL_POINTER = 1,
  CASCADE_STATUS_INVALID_UTF8 = 2,
  CASCADE_STATUS_INVALID_ARGUMENT = 3,
  CASCADE_STATUS_INVALID_DECOMPOSITION = 4,
  CASCADE_STATUS_INVALID_BASE = 5,
  CASCADE_STATUS_INVALID_OPERATION = 6,
  CASCADE_STATUS_SPEC_ERROR = 7,
  CASCADE_STATUS_NOT_APPLICABLE = 8,
  CASCADE_STATUS_DEGENERATE_CHAIN = 9,
  CASCADE_STATUS_NO_INTERIOR_ROOT = 10,
  CASCADE_STATUS_TOLERANCE_NOT_MET = 11,
  CASCADE_STATUS_OUT_OF_RANGE = 12,
  CASCADE_STATUS_INTERNAL = 13,
  CASCADE_STATUS_PANIC = 14,
} CascadeStatus;

/*
 An operation: a GEN/PROP/KILL decomposition or a general stateful
 operation with a forbidden state.
 */
typedef struct CascadeOperation CascadeOperation;

/*
 Counts `a(0..=L)` as arbitrary-precision integers.
 */
typedef struct CascadeSequence CascadeSequence;

/*
 Spectrum of the 2x2 transfer matrix. `coupling` is `INFINITY` when the
 determinant vanishes.
 */
typedef struct CascadeSpectral {
  double trace;
  double det;
  double discriminant;
  double lambda1;
  double lambda2;
  double coupling;
  bool degenerate;
} CascadeSpectral;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates an operation from class sizes `g`, `t`, `k`.

 # Safety
 `out` must be valid for writes.
 */
enum CascadeStatus cascade_operation_from_gpk(uint64_t g,
                                              uint64_t t,
                                              uint64_t k,
                                              struct CascadeOperation **out);

/*
 Creates a named instance (`carry`, `dbl`, `ternary3`, `binary4`,
 `sediment`). Pass `base = 0` for instances with a fixed base.

 # Safety
 `name` must be a nul-terminated string and `out` valid for writes.
 */
enum CascadeStatus cascade_operation_from_instance(const char *name,
                                                   uint64_t base,
                                                   struct CascadeOperation **out);

/*
 Parses a JSON operation file (schema version 1).

 # Safety
 `json` must be a nul-terminated string and `out` valid for writes.
 */
enum CascadeStatus cascade_operation_from_json(const char *json, struct CascadeOperation **out);

/*
 # Safety
 `op` must be null or a handle not yet freed.
 */
void cascade_operation_free(struct CascadeOperation *op);

/*
 Counts for every length `0..=len`.

 # Safety
 `op` must be a live handle and `out` valid for writes.
 */
enum CascadeStatus cascade_count(const struct CascadeOperation *op,
                                 size_t len,
                                 struct CascadeSequence **out);

/*
 Number of terms, or 0 for a null handle.

 # Safety
 `seq` must be null or a live handle.
 */
size_t cascade_sequence_len(const struct CascadeSequence *seq);

/*
 Term `index` as a decimal string.

 # Safety
 `seq` must be a live handle and `out` valid for writes.
 */
enum CascadeStatus cascade_sequence_get(const struct CascadeSequence *seq,
                                        size_t index,
                                        char **out);

/*
 Term `index` if it fits in 64 bits.

 # Safety
 `seq` must be a live handle and `out` valid for writes.
 */
enum CascadeStatus cascade_sequence_get_u64(const struct CascadeSequence *seq,
                                            size_t index,
                                            uint64_t *out);

/*
 # Safety
 `seq` must be null or a handle not yet freed.
 */
void cascade_sequence_free(struct CascadeSequence *seq);

/*
 Spectrum of the 2x2 transfer matrix. General operations qualify when
 their restricted matrix is 2x2.

 # Safety
 `op` must be a live handle and `out` valid for writes.
 */
enum CascadeStatus cascade_spectral(const struct CascadeOperation *op, struct CascadeSpectral *out);

/*
 Asymptotic dispersion index as an exact `"num/den"` string.

 # Safety
 `op` must be a live handle and `out` valid for writes.
 */
enum CascadeStatus cascade_asymptotic_dispersion(const struct CascadeOperation *op, char **out);

/*
 Poisson transition point `mu*(len)` of symmetric chains. `residual`
 may be null.

 # Safety
 `mu_star` must be valid for writes; `residual` null or valid.
 */
enum CascadeStatus cascade_poisson_root(size_t len, double tol, double *mu_star, double *residual);

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next call into the library from this thread.
 */
const char *cascade_last_error(void);

/*
 Static name of a status code.
 */
const char *cascade_status_name(enum CascadeStatus status);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void cascade_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASCADE_H */
