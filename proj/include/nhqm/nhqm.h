#ifndef NHQM_NHQM_H
#define NHQM_NHQM_H

#include <stddef.h>

#if defined(NHQM_BUILDING_LIBRARY)
#define NHQM_API __attribute__((visibility("default")))
#else
#define NHQM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nhqm_status {
  NHQM_OK = 0,
  NHQM_INVALID_ARGUMENT = 1,
  NHQM_PARSE_ERROR = 2,
  NHQM_NUMERICAL_ERROR = 3,
  NHQM_IO_ERROR = 4,
  NHQM_INTERNAL_ERROR = 5
} nhqm_status;

typedef enum nhqm_state_class {
  NHQM_BOUND = 0,
  NHQM_RESONANCE = 1,
  NHQM_ROTATED_CONTINUUM = 2
} nhqm_state_class;

typedef enum nhqm_observable { NHQM_POSITION = 0, NHQM_MOMENTUM = 1 } nhqm_observable;

typedef struct nhqm_config nhqm_config;
typedef struct nhqm_report nhqm_report;
typedef struct nhqm_spectrum nhqm_spectrum;
typedef struct nhqm_wavepacket nhqm_wavepacket;

/* Message for the most recent failure on the calling thread ("" if none). */
NHQM_API const char* nhqm_last_error(void);
NHQM_API const char* nhqm_version(void);

/* Scenario configs: flat key=value text. */
NHQM_API nhqm_status nhqm_config_parse(const char* text, nhqm_config** out);
NHQM_API nhqm_status nhqm_config_load(const char* path, nhqm_config** out);
NHQM_API nhqm_status nhqm_config_set_out_dir(nhqm_config* cfg, const char* dir);
NHQM_API const char* nhqm_config_scenario(const nhqm_config* cfg);
NHQM_API void nhqm_config_free(nhqm_config* cfg);

/* Runs a scenario, writing CSVs and report.json to the config's out_dir. */
NHQM_API nhqm_status nhqm_run_scenario(const nhqm_config* cfg, nhqm_report** out);
NHQM_API int nhqm_report_passed(const nhqm_report* r);
/* JSON text owned by the report. */
NHQM_API const char* nhqm_report_json(const nhqm_report* r);
NHQM_API void nhqm_report_free(nhqm_report* r);

/* Spectrum of the default-model Hamiltonian (potential parameters from the
   config) on an n-point grid of extent l at angle theta. */
NHQM_API nhqm_status nhqm_spectrum_compute(const nhqm_config* cfg, int n, double l, double theta,
                                           nhqm_spectrum** out);
NHQM_API nhqm_status nhqm_spectrum_from_config(const nhqm_config* cfg, nhqm_spectrum** out);
NHQM_API size_t nhqm_spectrum_size(const nhqm_spectrum* s);
NHQM_API nhqm_status nhqm_spectrum_energy(const nhqm_spectrum* s, size_t index, double* re, double* im);
NHQM_API nhqm_status nhqm_spectrum_class(const nhqm_spectrum* s, size_t index, nhqm_state_class* cls);
NHQM_API nhqm_status nhqm_spectrum_write_csv(const nhqm_spectrum* s, const char* path);
NHQM_API void nhqm_spectrum_free(nhqm_spectrum* s);

/* Gaussian (sigma, k0, x0) expanded over the spectrum. */
NHQM_API nhqm_status nhqm_wavepacket_create(const nhqm_spectrum* s, double sigma, double k0, double x0,
                                            nhqm_wavepacket** out);
NHQM_API nhqm_status nhqm_fp_norm(const nhqm_wavepacket* wp, double t, double* re, double* im);
NHQM_API nhqm_status nhqm_fp_decay_rate(const nhqm_wavepacket* wp, double t, double* re, double* im);
NHQM_API nhqm_status nhqm_fp_expectation(const nhqm_wavepacket* wp, nhqm_observable obs, double t, double* re,
                                         double* im, double* phase);
NHQM_API nhqm_status nhqm_np_norm(const nhqm_wavepacket* wp, double t, double* value);
NHQM_API void nhqm_wavepacket_free(nhqm_wavepacket* wp);

/* Compares two CSV series (norm or observable layout) beyond tstar.
   scaled != 0 measures |a-b| / max|b|, otherwise |a-b| / |b| per sample.
   *passed receives 1 or 0; report_json (optional) receives a JSON string
   that must be released with nhqm_string_free. */
NHQM_API nhqm_status nhqm_compare_csv(const char* path_a, const char* path_b, double tstar, double threshold,
                                      int scaled, int* passed, char** report_json);
NHQM_API void nhqm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
