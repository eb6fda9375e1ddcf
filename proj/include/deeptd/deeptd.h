/*
 * C interface to the deeptd library.
 *
 * Objects are opaque handles created by *_create / *_run functions and
 * released with the matching *_destroy. Every fallible call returns a
 * dtd_status; on failure dtd_last_error() returns a message describing the
 * most recent error on the calling thread. Strings returned through char**
 * out-parameters are owned by the caller and released with dtd_string_free.
 */
#ifndef DEEPTD_DEEPTD_H
#define DEEPTD_DEEPTD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DEEPTD_BUILDING_LIBRARY)
#    define DEEPTD_API __declspec(dllexport)
#  else
#    define DEEPTD_API __declspec(dllimport)
#  endif
#else
#  define DEEPTD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dtd_status {
    DTD_OK = 0,
    DTD_ERR_DIMENSION = 1,
    DTD_ERR_ARGUMENT = 2,
    DTD_ERR_CONFIG = 3,
    DTD_ERR_DEGENERATE = 4,
    DTD_ERR_IO = 5,
    DTD_ERR_RUNTIME = 6
} dtd_status;

typedef struct dtd_tensor dtd_tensor;
typedef struct dtd_decomposition dtd_decomposition;
typedef struct dtd_experiment dtd_experiment;

typedef struct dtd_als_options {
    int restarts;
    int max_iters;
    double rel_tol;
    uint64_t seed;
} dtd_als_options;

DEEPTD_API const char* dtd_version(void);
DEEPTD_API const char* dtd_last_error(void);
DEEPTD_API const char* dtd_status_name(dtd_status status);
DEEPTD_API void dtd_string_free(char* s);

/* Defaults: 10 restarts, 500 iterations, rel_tol 1e-9, seed 0. */
DEEPTD_API dtd_als_options dtd_als_default_options(void);

/* ---- tensors ---------------------------------------------------------- */

/* entries in canonical order: mode 0 varies fastest. */
DEEPTD_API dtd_status dtd_tensor_create(const size_t* dims, size_t order, const double* entries, size_t count,
                                        dtd_tensor** out);
/* {"shape": [...], "entries": [...]} */
DEEPTD_API dtd_status dtd_tensor_from_json(const char* json, dtd_tensor** out);
DEEPTD_API void dtd_tensor_destroy(dtd_tensor* t);
DEEPTD_API size_t dtd_tensor_order(const dtd_tensor* t);
DEEPTD_API size_t dtd_tensor_dim(const dtd_tensor* t, size_t mode);
DEEPTD_API size_t dtd_tensor_size(const dtd_tensor* t);
DEEPTD_API dtd_status dtd_tensor_frobenius_norm(const dtd_tensor* t, double* out);

/* ---- rank-one decomposition ------------------------------------------ */

/* opts may be NULL for defaults. */
DEEPTD_API dtd_status dtd_decompose(const dtd_tensor* t, const dtd_als_options* opts, dtd_decomposition** out);
DEEPTD_API void dtd_decomposition_destroy(dtd_decomposition* d);
DEEPTD_API double dtd_decomposition_lambda(const dtd_decomposition* d);
DEEPTD_API int dtd_decomposition_converged(const dtd_decomposition* d);
DEEPTD_API size_t dtd_decomposition_order(const dtd_decomposition* d);
/* Copies factor `mode` into buf (capacity len). Fails with DTD_ERR_DIMENSION
   if len is smaller than the factor length. */
DEEPTD_API dtd_status dtd_decomposition_factor(const dtd_decomposition* d, size_t mode, double* buf, size_t len);
DEEPTD_API dtd_status dtd_decomposition_residual(const dtd_decomposition* d, const dtd_tensor* t, double* out);
DEEPTD_API dtd_status dtd_decomposition_to_json(const dtd_decomposition* d, char** out);

/* ---- experiments ------------------------------------------------------ */

DEEPTD_API dtd_status dtd_experiment_create(const char* config_json, dtd_experiment** out);
DEEPTD_API void dtd_experiment_destroy(dtd_experiment* e);
/* threads == 0 means one worker. */
DEEPTD_API dtd_status dtd_experiment_run(dtd_experiment* e, unsigned threads);
DEEPTD_API size_t dtd_experiment_trials_completed(const dtd_experiment* e);
DEEPTD_API dtd_status dtd_experiment_summary_json(const dtd_experiment* e, char** out);
DEEPTD_API dtd_status dtd_experiment_trials_csv(const dtd_experiment* e, char** out);
/* Writes summary.json and trials.csv into dir. */
DEEPTD_API dtd_status dtd_experiment_write(const dtd_experiment* e, const char* dir);

/* JSON dump of one trial's operational network and training set. */
DEEPTD_API dtd_status dtd_generate_json(const char* config_json, uint64_t trial, char** out);

#ifdef __cplusplus
}
#endif

#endif /* DEEPTD_DEEPTD_H */
