#ifndef IRTSMOOTH_H
#define IRTSMOOTH_H

#include <stddef.h>

#if defined(_WIN32)
#  define IRTS_API __declspec(dllexport)
#else
#  define IRTS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum irts_status
{
  IRTS_OK = 0,
  IRTS_ERR_PARSE = 1,
  IRTS_ERR_DOMAIN = 2,
  IRTS_ERR_INPUT = 3,
  IRTS_ERR_DEGENERATE = 4,
  IRTS_ERR_EMPTY_NEIGHBORHOOD = 5,
  IRTS_ERR_IO = 6,
  IRTS_ERR_INTERNAL = 7,
  IRTS_ERR_NULL = 8
} irts_status;

typedef struct irts_config irts_config;
typedef struct irts_model irts_model;

/* Configuration. Options are set by name with their textual value, e.g.
   ("kernel", "uniform"), ("key", "1,3,2") or ("key", "path/to/key.txt"). */
IRTS_API irts_config* irts_config_create(void);
IRTS_API void irts_config_destroy(irts_config* config);
IRTS_API irts_status irts_config_set(irts_config* config,
                                     const char* key,
                                     const char* value);
/* Applies every IRTSMOOTH_<NAME> environment variable, with NAME the option
   name upper-cased and '-' replaced by '_'. */
IRTS_API irts_status irts_config_apply_env(irts_config* config);

/* Full pipeline; writes artifacts under the configured output directory. */
IRTS_API irts_status irts_run_analysis(const irts_config* config,
                                       irts_model** model);
/* Same plus group-wise curves; needs the "groups" option. */
IRTS_API irts_status irts_run_dif(const irts_config* config,
                                  irts_model** model);
/* Writes the cross-validation profile of the selected items. */
IRTS_API irts_status irts_cv_curve(const irts_config* config);
/* Simulates responses from the "items-spec" file and writes a CSV to the
   path given by "out". */
IRTS_API irts_status irts_simulate(const irts_config* config);

IRTS_API void irts_model_destroy(irts_model* model);
IRTS_API size_t irts_model_n_subjects(const irts_model* model);
IRTS_API size_t irts_model_n_items(const irts_model* model);
IRTS_API size_t irts_model_n_points(const irts_model* model);
/* Number of options of an item, including a synthetic missing option. */
IRTS_API size_t irts_model_n_options(const irts_model* model, size_t item);
/* Copy helpers; each returns the number of values available and writes at
   most `capacity` of them. */
IRTS_API size_t irts_model_points(const irts_model* model,
                                  double* out,
                                  size_t capacity);
IRTS_API size_t irts_model_thetas(const irts_model* model,
                                  double* out,
                                  size_t capacity);
IRTS_API size_t irts_model_bandwidths(const irts_model* model,
                                      double* out,
                                      size_t capacity);
IRTS_API size_t irts_model_ets(const irts_model* model,
                               double* out,
                               size_t capacity);
IRTS_API size_t irts_model_theta_ml(const irts_model* model,
                                    double* out,
                                    size_t capacity);
IRTS_API size_t irts_model_score_ml(const irts_model* model,
                                    double* out,
                                    size_t capacity);
/* Row-major n_points x n_options probabilities of one item. */
IRTS_API size_t irts_model_occ(const irts_model* model,
                               size_t item,
                               double* out,
                               size_t capacity);
/* Path of the manifest written by the run. */
IRTS_API const char* irts_model_manifest_path(const irts_model* model);
/* Number of warnings and the i-th warning text. */
IRTS_API size_t irts_model_n_warnings(const irts_model* model);
IRTS_API const char* irts_model_warning(const irts_model* model, size_t i);

/* Details of the last failure on the calling thread. */
IRTS_API const char* irts_last_error(void);
IRTS_API const char* irts_last_error_module(void);
IRTS_API const char* irts_last_error_operation(void);
IRTS_API const char* irts_last_error_location(void);
IRTS_API const char* irts_status_name(irts_status status);
IRTS_API const char* irts_version(void);

#ifdef __cplusplus
}
#endif

#endif
