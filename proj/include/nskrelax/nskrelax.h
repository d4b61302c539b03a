#ifndef NSKRELAX_H
#define NSKRELAX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NSKR_API __declspec(dllexport)
#else
#define NSKR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returns one of these; on failure the message is
   available from nskr_last_error() on the calling thread. */
typedef enum {
    NSKR_OK = 0,
    NSKR_INVALID_ARGUMENT = 1,
    NSKR_DOMAIN = 2,
    NSKR_NUMERIC = 3,
    NSKR_IO = 4,
    NSKR_CONFIG = 5,
    NSKR_DIVERGENCE = 6,
    NSKR_CERTIFICATION = 7,
    NSKR_MODEL_SHAPE = 8,
    NSKR_STAGNATION = 9,
    NSKR_INTERNAL = 99
} nskr_status;

typedef struct nskr_config nskr_config;
typedef struct nskr_trajectory nskr_trajectory;
typedef struct nskr_report nskr_report;

NSKR_API const char* nskr_version(void);
NSKR_API const char* nskr_status_string(int status);
/* Message of the most recent failure on this thread ("" if none). */
NSKR_API const char* nskr_last_error(void);

/* Configuration (TOML). */
NSKR_API int nskr_config_load(const char* path, nskr_config** out);
NSKR_API int nskr_config_parse(const char* toml_text, nskr_config** out);
NSKR_API void nskr_config_free(nskr_config* cfg);
/* "relaxed" | "nsk" */
NSKR_API int nskr_config_set_system(nskr_config* cfg, const char* system);
NSKR_API int nskr_config_set_output_dir(nskr_config* cfg, const char* dir);
/* Output directory stored in the config; the pointer lives as long as cfg. */
NSKR_API int nskr_config_output_dir(const nskr_config* cfg, const char** dir);
/* The parsed config as JSON; lives as long as cfg. */
NSKR_API int nskr_config_json(const nskr_config* cfg, const char** json);

/* Experiments. Each yields a report; simulate can also hand back the run. */
NSKR_API int nskr_simulate(const nskr_config* cfg, nskr_report** report, nskr_trajectory** traj);
NSKR_API int nskr_sweep_alpha(const nskr_config* cfg, nskr_report** report);
NSKR_API int nskr_weak_strong(const nskr_config* cfg, nskr_report** report);
/* preset: "powerlaw" | "figure1" */
NSKR_API int nskr_thermo_check(const char* preset, nskr_report** report);
/* ref may be NULL. c_scheme_constant < 0 selects the default (10). */
NSKR_API int nskr_energy_audit(const nskr_trajectory* traj, const nskr_trajectory* ref,
                               double c_scheme_constant, nskr_report** report);

/* Reports. */
NSKR_API int nskr_report_passed(const nskr_report* report, int* passed);
/* Deterministic JSON; lives as long as report. */
NSKR_API int nskr_report_json(const nskr_report* report, const char** json);
/* Writes report.json plus CSV and SVG files into dir. */
NSKR_API int nskr_report_write(const nskr_report* report, const char* dir);
NSKR_API void nskr_report_free(nskr_report* report);

/* Trajectories (binary container). */
NSKR_API int nskr_trajectory_load(const char* path, nskr_trajectory** out);
NSKR_API int nskr_trajectory_save(const nskr_trajectory* traj, const char* path);
NSKR_API void nskr_trajectory_free(nskr_trajectory* traj);
NSKR_API int nskr_trajectory_info(const nskr_trajectory* traj, size_t* n_cells, size_t* n_frames,
                                  int* is_relaxed);
/* Copies frame k into caller buffers of n_cells doubles each; any buffer may
   be NULL, c must be NULL for NSK trajectories. */
NSKR_API int nskr_trajectory_frame(const nskr_trajectory* traj, size_t k, double* time, double* rho,
                                   double* mom, double* c);

#ifdef __cplusplus
}
#endif

#endif
