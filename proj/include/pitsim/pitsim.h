#ifndef PITSIM_PITSIM_H
#define PITSIM_PITSIM_H

/*
 * C interface of the pitsim shared library.
 *
 * Objects are opaque handles created by pitsim_*_parse / pitsim_run and
 * released with the matching *_free function. Every fallible call returns a
 * pitsim_status; on failure a description is available from
 * pitsim_last_error() until the next failing call on the same thread.
 * Strings returned through char** out-parameters are owned by the caller and
 * released with pitsim_string_free().
 */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(PITSIM_BUILDING_LIBRARY)
#    define PITSIM_API __declspec(dllexport)
#  else
#    define PITSIM_API __declspec(dllimport)
#  endif
#else
#  define PITSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pitsim_status {
    PITSIM_OK = 0,
    PITSIM_E_INVALID_ARGUMENT = 1,
    PITSIM_E_SINGULAR_SYSTEM = 2,
    PITSIM_E_NONPOSITIVE_STEP = 3,
    PITSIM_E_DEGENERATE_BASIS = 4,
    PITSIM_E_NONPERIODIC_SOURCE = 5,
    PITSIM_E_DEGENERATE_NORM = 6,
    PITSIM_E_PARSE = 7,
    PITSIM_E_VALIDATION = 8,
    PITSIM_E_IO = 9,
    PITSIM_E_LEDGER_MISMATCH = 10,
    PITSIM_E_INTERNAL = 99
} pitsim_status;

typedef struct pitsim_config pitsim_config;
typedef struct pitsim_result pitsim_result;

/* Sequential solve counts; cost_units weights each solve by system size / N_s. */
typedef struct pitsim_ledger {
    size_t state_size;
    size_t fine_solves;
    size_t fine_system_size;
    size_t coarse_solves;
    size_t coarse_system_size;
    double cost_units;
} pitsim_ledger;

PITSIM_API const char* pitsim_version(void);
PITSIM_API const char* pitsim_status_name(pitsim_status status);
PITSIM_API const char* pitsim_last_error(void);
PITSIM_API void pitsim_string_free(char* str);

/* Configuration ---------------------------------------------------------- */

PITSIM_API pitsim_status pitsim_config_parse(const char* json, pitsim_config** out);
PITSIM_API pitsim_status pitsim_config_load(const char* path, pitsim_config** out);
PITSIM_API pitsim_status pitsim_config_preset(const char* name, pitsim_config** out);
PITSIM_API void pitsim_config_free(pitsim_config* config);

/* variant: classical | dc | fft:M | mpde:N_p */
PITSIM_API pitsim_status pitsim_config_set_variant(pitsim_config* config, const char* variant);
/* lift: periodic | zero (how states enter the MPDE coarse propagator) */
PITSIM_API pitsim_status pitsim_config_set_mpde_lift(pitsim_config* config, const char* lift);
PITSIM_API pitsim_status pitsim_config_set_workers(pitsim_config* config, size_t workers);
PITSIM_API pitsim_status pitsim_config_set_output_dir(pitsim_config* config, const char* dir);
/* Borrowed pointer, valid until the config is modified or freed. */
PITSIM_API const char* pitsim_config_output_dir(const pitsim_config* config);
PITSIM_API pitsim_status pitsim_config_to_json(const pitsim_config* config, char** out_json);

/* Runs ---------------------------------------------------------------------- */

/* Runs Parareal. With write_outputs != 0 the configured artifacts are
 * written to the output directory. A run that hits max_iter still returns
 * PITSIM_OK; check pitsim_result_converged(). */
PITSIM_API pitsim_status pitsim_run(const pitsim_config* config, int write_outputs,
                                    pitsim_result** out);
PITSIM_API void pitsim_result_free(pitsim_result* result);

PITSIM_API int pitsim_result_converged(const pitsim_result* result);
/* 0 converged, 2 iteration limit reached. */
PITSIM_API int pitsim_result_exit_code(const pitsim_result* result);
PITSIM_API size_t pitsim_result_iterations(const pitsim_result* result);
PITSIM_API double pitsim_result_cost_units(const pitsim_result* result);
PITSIM_API double pitsim_result_wall_seconds(const pitsim_result* result);
PITSIM_API size_t pitsim_result_state_size(const pitsim_result* result);
PITSIM_API size_t pitsim_result_windows(const pitsim_result* result);
/* Relative jump of corrected sweep `iteration` (1-based). */
PITSIM_API pitsim_status pitsim_result_jump(const pitsim_result* result, size_t iteration,
                                            double* out);
PITSIM_API pitsim_status pitsim_result_ledger(const pitsim_result* result, pitsim_ledger* out);
/* State X_n after `iteration` (0 = coarse prediction) into out[0..len). */
PITSIM_API pitsim_status pitsim_result_sync_state(const pitsim_result* result, size_t iteration,
                                                  size_t n, double* out, size_t len);
PITSIM_API pitsim_status pitsim_result_report_json(const pitsim_result* result, char** out_json);

/* Re-derives the cost arithmetic of a report.json file; returns
 * PITSIM_E_LEDGER_MISMATCH when it does not add up. */
PITSIM_API pitsim_status pitsim_verify_ledger_file(const char* report_path);

/* Runs every variant in the comma-separated list on the same model and
 * writes a text table to out_table. With write_outputs != 0 the table is
 * also saved as comparison.csv in the output directory. Per-variant failures
 * are reported inside the table. */
PITSIM_API pitsim_status pitsim_compare(const pitsim_config* config, const char* variants,
                                        int write_outputs, char** out_table);

#ifdef __cplusplus
}
#endif

#endif /* PITSIM_PITSIM_H */
