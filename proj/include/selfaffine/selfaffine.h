/* C interface to the selfaffine library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an sa_status; on failure a message is kept
 * per thread and read with sa_last_error(). Composite results are returned
 * as JSON strings owned by the caller and released with sa_string_free().
 * Matrices are row-major arrays of doubles.
 */
#ifndef SELFAFFINE_H
#define SELFAFFINE_H

#include <stddef.h>
#include <stdint.h>

#if defined(SELFAFFINE_BUILD)
#define SA_API __attribute__((visibility("default")))
#else
#define SA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sa_status {
  SA_OK = 0,
  SA_ERR_INVALID_INPUT = 1,
  SA_ERR_DOMAIN = 2,
  SA_ERR_INDEX = 3,
  SA_ERR_CONTRACTION = 4,
  SA_ERR_RESOURCE = 5,
  SA_ERR_DEGENERATE = 6,
  SA_ERR_IO = 7,
  SA_ERR_INTERNAL = 8
} sa_status;

typedef struct sa_system sa_system;
typedef struct sa_projection sa_projection;
typedef struct sa_measure sa_measure;
typedef struct sa_cloud sa_cloud;
typedef struct sa_sumset sa_sumset;

/* Enumeration limits. Zero fields take the library defaults. */
typedef struct sa_exec {
  uint64_t leaf_budget;
  unsigned prefix_length;
  unsigned workers;
} sa_exec;

SA_API const char* sa_version(void);
SA_API const char* sa_status_name(sa_status status);
/* Message of the last failed call on this thread, "" if none. */
SA_API const char* sa_last_error(void);
/* Largest feasible depth reported by the last SA_ERR_RESOURCE, else 0. */
SA_API unsigned sa_last_max_feasible_depth(void);
SA_API void sa_string_free(char* text);

/* Singular values and the singular value function. */
SA_API sa_status sa_singular_values(size_t rows, size_t cols, const double* m, double* out);
SA_API sa_status sa_svf(size_t rows, size_t cols, const double* m, double s, double* out);

/* Systems. translations may be NULL (all zero). */
SA_API sa_status sa_system_create(size_t dimension, size_t n_maps, const double* linear,
                                  const double* translations, sa_system** out);
SA_API sa_status sa_system_from_json(const char* json, sa_system** out);
SA_API sa_status sa_system_preset(const char* name, sa_system** out);
SA_API sa_status sa_system_to_json(const sa_system* sys, char** json);
SA_API sa_status sa_gen_perm_example(size_t d, double entry_low, double entry_high,
                                     size_t n_maps, uint64_t seed, sa_system** out);
SA_API sa_status sa_tensor_example(size_t d1, size_t d2, size_t n_maps, double scale,
                                   uint64_t seed, sa_system** out);
SA_API size_t sa_system_dimension(const sa_system* sys);
SA_API size_t sa_system_size(const sa_system* sys);
SA_API sa_status sa_contraction_report(const sa_system* sys, char** json);
/* SA_ERR_CONTRACTION unless every linear part has operator norm below 1. */
SA_API sa_status sa_require_contracting(const sa_system* sys);
SA_API void sa_system_free(sa_system* sys);

/* Projections: a preset name ("identity", "coord:k", "sum-block") or a
 * d x d matrix. */
SA_API sa_status sa_projection_create(size_t dimension, const double* matrix,
                                      sa_projection** out);
SA_API sa_status sa_projection_preset(const char* name, size_t dimension, sa_projection** out);
SA_API sa_status sa_projection_from_json(const char* json, size_t dimension,
                                         sa_projection** out);
SA_API size_t sa_projection_rank(const sa_projection* q);
SA_API void sa_projection_free(sa_projection* q);

/* Measures on words. transition is n x n row-major. */
SA_API sa_status sa_measure_bernoulli(size_t n, const double* probs, sa_measure** out);
SA_API sa_status sa_measure_markov(size_t n, const double* transition, sa_measure** out);
SA_API sa_status sa_measure_from_json(const char* json, sa_measure** out);
SA_API sa_status sa_measure_preset(const char* name, sa_measure** out);
SA_API void sa_measure_free(sa_measure* mu);

/* Pressure and dimension. exec may be NULL. */
SA_API sa_status sa_max_feasible_depth(size_t alphabet, uint64_t budget, unsigned* out);
SA_API sa_status sa_log_partition_sum(const sa_system* sys, const sa_projection* q, double s,
                                      unsigned n, const sa_exec* exec, double* out);
SA_API sa_status sa_pressure(const sa_system* sys, const sa_projection* q, double s,
                             unsigned n_max, unsigned n_min, const sa_exec* exec, char** json);
SA_API sa_status sa_dim_aff_q(const sa_system* sys, const sa_projection* q, unsigned n,
                              double tol, const sa_exec* exec, char** json);
SA_API sa_status sa_pressure_curve(const sa_system* sys, const sa_projection* q,
                                   const double* s_grid, size_t count, unsigned n,
                                   const sa_exec* exec, double* values);
SA_API sa_status sa_sublevel_membership(const sa_system* sys, double s, double t,
                                        const sa_projection* q, unsigned n,
                                        const sa_exec* exec, char** json);

/* Lyapunov exponents and per-orbit statistics. s may be NULL (norms). */
SA_API sa_status sa_lyapunov(const sa_system* sys, const sa_measure* mu, size_t n,
                             size_t trials, uint64_t seed, unsigned workers, char** json);
SA_API sa_status sa_local_dimension(const sa_system* sys, const sa_projection* q,
                                    const sa_measure* mu, const uint32_t* word, size_t length,
                                    char** json);
SA_API sa_status sa_exactness(const sa_system* sys, const sa_projection* q, const sa_measure* mu,
                              size_t n, size_t trials, uint64_t seed, const double* s,
                              unsigned workers, char** json);

/* Point clouds. probs may be NULL (uniform). */
SA_API sa_status sa_chaos_game(const sa_system* sys, const double* probs, size_t n_points,
                               uint64_t seed, unsigned workers, sa_cloud** out);
SA_API sa_status sa_cloud_create(size_t dimension, size_t n_points, const double* points,
                                 sa_cloud** out);
SA_API size_t sa_cloud_dimension(const sa_cloud* cloud);
SA_API size_t sa_cloud_size(const sa_cloud* cloud);
SA_API const double* sa_cloud_data(const sa_cloud* cloud);
SA_API sa_status sa_project_points(const sa_projection* q, const sa_cloud* cloud,
                                   unsigned workers, sa_cloud** out);
SA_API sa_status sa_box_count(const sa_cloud* cloud, double delta, unsigned workers,
                              uint64_t* out);
/* delta_hi / delta_lo of 0 take the defaults (diameter / 16, delta_hi / 64). */
SA_API sa_status sa_box_dim_fit(const sa_cloud* cloud, double delta_hi, double delta_lo,
                                size_t n_scales, unsigned workers, char** json);
SA_API sa_status sa_export_csv(const sa_cloud* cloud, const char* path);
SA_API sa_status sa_import_csv(const char* path, sa_cloud** out);
SA_API sa_status sa_export_ppm(const sa_cloud* cloud, const char* path, size_t width,
                               size_t height, size_t axis_x, size_t axis_y);
SA_API void sa_cloud_free(sa_cloud* cloud);

/* Sumsets of two tensor-product systems. */
SA_API sa_status sa_sumset_demo(unsigned dim_depth, const sa_exec* exec, sa_sumset** out);
/* {"a": factors, "b": factors}, factors as {"d1", "d2", "left", "right",
 * "translation_seed"}. */
SA_API sa_status sa_sumset_from_json(const char* json, unsigned dim_depth, const sa_exec* exec,
                                     sa_sumset** out);
SA_API sa_status sa_sumset_to_json(const sa_sumset* sumset, char** json);
SA_API sa_status sa_sumset_product(const sa_sumset* sumset, sa_system** out);
SA_API sa_status sa_domination_check(const sa_sumset* sumset, size_t k1, size_t k2, unsigned n,
                                     const sa_exec* exec, char** json);
SA_API sa_status sa_sumset_pressure_drop(const sa_sumset* sumset, unsigned n,
                                         const sa_exec* exec, char** json);
SA_API void sa_sumset_free(sa_sumset* sumset);

/* Acceptance suite. criteria may be NULL (all). The callback, if given, is
 * invoked after each criterion. */
typedef void (*sa_progress_fn)(int id, const char* name, int pass, double seconds,
                               double max_render_seconds, void* user);
SA_API sa_status sa_selftest(uint64_t seed, unsigned workers, const int* criteria, size_t count,
                             sa_progress_fn progress, void* user, char** json);
SA_API int sa_criterion_count(void);

#ifdef __cplusplus
}
#endif

#endif /* SELFAFFINE_H */
