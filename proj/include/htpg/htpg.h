/*
 * C interface to the heavy-tailed policy search library.
 *
 * Every fallible call returns an htpg_status; on failure a message for the
 * calling thread is available from htpg_last_error() until the next call on
 * that thread. Handles are opaque and owned by the caller once returned.
 */
#ifndef HTPG_H_
#define HTPG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HTPG_BUILDING_LIBRARY)
#define HTPG_API __declspec(dllexport)
#else
#define HTPG_API __declspec(dllimport)
#endif
#else
#define HTPG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum htpg_status {
  HTPG_OK = 0,
  HTPG_ERR_PARAMETER = 1,
  HTPG_ERR_UNSUPPORTED = 2,
  HTPG_ERR_USAGE = 3,
  HTPG_ERR_SCHEDULE = 4,
  HTPG_ERR_DIVERGED = 5,
  HTPG_ERR_CONFIG = 6,
  HTPG_ERR_IO = 7,
  HTPG_ERR_NOT_FOUND = 8,
  HTPG_ERR_INTERNAL = 99
} htpg_status;

HTPG_API const char* htpg_version(void);
HTPG_API const char* htpg_last_error(void);
HTPG_API const char* htpg_status_name(htpg_status status);

/* Symmetric alpha-stable closed forms (alpha must be 1 or 2). */
HTPG_API htpg_status htpg_sas_log_density(double alpha, double location,
                                          double scale, double x, double* out);
HTPG_API htpg_status htpg_sas_tail_probability(double alpha, double threshold,
                                               double* out);

typedef void (*htpg_check_fn)(const char* name, int passed, const char* detail,
                              void* user);

/* Runs the sampler self-test suite, reporting each check through `cb`
 * (may be NULL). *all_passed is set to 1 when every check passed. */
HTPG_API htpg_status htpg_dist_tests(uint64_t seed, htpg_check_fn cb,
                                     void* user, int* all_passed);

/* ---- experiment configs ------------------------------------------------ */

typedef struct htpg_config htpg_config;

HTPG_API htpg_status htpg_config_load(const char* path, htpg_config** out);
HTPG_API htpg_status htpg_config_parse(const char* text, size_t len,
                                       htpg_config** out);
/* Trapped car from the false goal, adaptive Cauchy vs adaptive Gaussian. */
HTPG_API htpg_status htpg_config_first_exit(const uint64_t* seeds,
                                            size_t n_seeds, int64_t episodes,
                                            htpg_config** out);
HTPG_API void htpg_config_free(htpg_config* cfg);

HTPG_API htpg_status htpg_config_set_seeds(htpg_config* cfg,
                                           const uint64_t* seeds, size_t n);
HTPG_API htpg_status htpg_config_set_output(htpg_config* cfg, const char* dir);
HTPG_API htpg_status htpg_config_set_episodes(htpg_config* cfg,
                                              int64_t episodes);
HTPG_API const char* htpg_config_name(const htpg_config* cfg);
HTPG_API const char* htpg_config_output(const htpg_config* cfg);
HTPG_API size_t htpg_config_family_count(const htpg_config* cfg);
HTPG_API size_t htpg_config_seed_count(const htpg_config* cfg);

/* ---- training sweeps --------------------------------------------------- */

typedef struct htpg_experiment htpg_experiment;

typedef struct htpg_run_info {
  const char* family;    /* valid while the experiment handle lives */
  const char* csv_path;  /* likewise */
  uint64_t seed;
  int64_t episodes;
  double final_avg_return_100;
  int64_t first_exit_episode; /* -1 when the run never exited */
  int64_t goal_episodes;      /* episodes that reached the goal */
  int diverged;
} htpg_run_info;

/* Trains every family x seed and writes CSVs and the chart under the
 * config's output directory. threads = 0 uses HTPG_THREADS or the core
 * count. */
HTPG_API htpg_status htpg_experiment_run(const htpg_config* cfg,
                                         unsigned threads,
                                         htpg_experiment** out);
HTPG_API void htpg_experiment_free(htpg_experiment* exp);
HTPG_API size_t htpg_experiment_run_count(const htpg_experiment* exp);
HTPG_API htpg_status htpg_experiment_run_info(const htpg_experiment* exp,
                                              size_t index,
                                              htpg_run_info* out);
HTPG_API const char* htpg_experiment_aggregate_path(const htpg_experiment* exp);
HTPG_API const char* htpg_experiment_svg_path(const htpg_experiment* exp);

/* Regenerates <dir>/<name>.svg from <dir>/aggregate.csv. */
HTPG_API htpg_status htpg_replot(const char* dir, const char* name);

/* ---- convergence bound ------------------------------------------------- */

typedef struct htpg_bound_request {
  double u_r;
  double gamma;
  double l1j;
  double y1;
  double y2;
  double b;
  int64_t n;
  int64_t seeds;
  uint64_t base_seed;
  int lipschitz_update;
} htpg_bound_request;

typedef struct htpg_bound_report {
  double lhs;
  double rhs;
  double lhs_stderr;
  int64_t seeds;
  int holds;
} htpg_bound_report;

HTPG_API void htpg_bound_request_defaults(htpg_bound_request* req);
HTPG_API htpg_status htpg_bound_rhs(const htpg_bound_request* req, int64_t n,
                                    double* out);
HTPG_API htpg_status htpg_check_bound(const htpg_bound_request* req,
                                      htpg_bound_report* out);

/* ---- first-exit comparison -------------------------------------------- */

typedef struct htpg_first_exit_report {
  char family[2][64];
  double median_exit[2]; /* INFINITY when the median run never exits */
  double sign_test_p;
  int wins;
  int losses;
  int ties;
} htpg_first_exit_report;

/* Runs the first two families of `cfg` from the false goal. */
HTPG_API htpg_status htpg_first_exit_run(const htpg_config* cfg,
                                         unsigned threads,
                                         htpg_first_exit_report* out);

#ifdef __cplusplus
}
#endif

#endif /* HTPG_H_ */
