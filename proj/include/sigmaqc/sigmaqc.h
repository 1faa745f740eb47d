/* sigmaqc C interface: opaque handles, status codes, caller-freed strings. */
#ifndef SIGMAQC_H
#define SIGMAQC_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SQC_BUILDING_LIBRARY)
#    define SQC_API __declspec(dllexport)
#  else
#    define SQC_API __declspec(dllimport)
#  endif
#else
#  define SQC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqc_status {
  SQC_OK = 0,
  SQC_ERR_ARGUMENT = 1,
  SQC_ERR_UNKNOWN_CASE = 2,
  SQC_ERR_ELLIPTICITY = 3,
  SQC_ERR_SOLVER = 4,
  SQC_ERR_CONFIG = 5,
  SQC_ERR_IO = 6,
  SQC_ERR_INTERNAL = 7
} sqc_status;

typedef struct sqc_case sqc_case;
typedef struct sqc_solution sqc_solution;

typedef struct sqc_dilatation_summary {
  double sup_d_sigma;
  double inf_d_sigma;
  double harnack_H;
  double identity_residual;
  size_t degenerate_cells;
  int degenerate_dominated;
} sqc_dilatation_summary;

typedef struct sqc_analysis_summary {
  double p;
  double delta;
  double bmo_norm;
  double ap_constant;
  int ap_infinite;
  double harnack_H;
  /* Zero unless has_global. */
  int has_global;
  double energy_sigma;
  double trace_integral;
  double area_integral;
  double sup_d_sigma;
  double C;
  double bound_M;
  int chain_ok;
} sqc_analysis_summary;

SQC_API const char* sqc_version(void);
/* Message of the last failed call on this thread; "" if none. */
SQC_API const char* sqc_last_error(void);

SQC_API size_t sqc_case_count(void);
/* NULL when index is out of range. */
SQC_API const char* sqc_case_name(size_t index);

/* params: "key=value,key=value" or NULL. */
SQC_API sqc_status sqc_case_create(const char* name, const char* params, sqc_case** out);
SQC_API void sqc_case_destroy(sqc_case* c);

/* Solves (or samples) the case on an n x n grid and runs every estimator. */
SQC_API sqc_status sqc_case_solve(const sqc_case* c, int n, sqc_solution** out);
SQC_API void sqc_solution_destroy(sqc_solution* s);

SQC_API sqc_status sqc_solution_dilatation(const sqc_solution* s, sqc_dilatation_summary* out);
SQC_API sqc_status sqc_solution_analysis(const sqc_solution* s, sqc_analysis_summary* out);
/* Any metric named in a run report, e.g. "identity_residual". */
SQC_API sqc_status sqc_solution_metric(const sqc_solution* s, const char* name, double* value);
/* Field table as text; free with sqc_string_free. */
SQC_API sqc_status sqc_solution_export(const sqc_solution* s, const char* field, char** text);
SQC_API void sqc_string_free(char* text);

/* Runs a config file. exit_code receives 0 (checks pass), 1 (check failed)
   or 2 (config or IO error); progress goes to stdout, diagnostics to stderr. */
SQC_API sqc_status sqc_run_file(const char* config, const char* out_dir, int* exit_code);
/* Field of the finest grid of a config as text. */
SQC_API sqc_status sqc_export_file(const char* config, const char* field, char** text, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
