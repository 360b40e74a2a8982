#ifndef SMECTIC_SMECTIC_H
#define SMECTIC_SMECTIC_H

/*
 * C interface to the smectic-A Q-tensor solver.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a smectic_status; on failure a message is
 * available from smectic_last_error() on the calling thread until the next
 * failing call on that thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SMECTIC_BUILDING)
#    define SMECTIC_API __declspec(dllexport)
#  else
#    define SMECTIC_API __declspec(dllimport)
#  endif
#else
#  define SMECTIC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smectic_status {
  SMECTIC_OK = 0,
  SMECTIC_ERR_ARGUMENT = 1,
  SMECTIC_ERR_CONFIG = 2,
  SMECTIC_ERR_PARAMETER = 3,
  SMECTIC_ERR_CONSTRAINT = 4,
  SMECTIC_ERR_NUMERICAL = 5,
  SMECTIC_ERR_BLOWUP = 6,
  SMECTIC_ERR_INVARIANT = 7,
  SMECTIC_ERR_IO = 8,
  SMECTIC_ERR_BUFFER = 9, /* output buffer too small; required size reported */
  SMECTIC_ERR_INTERNAL = 10
} smectic_status;

typedef struct smectic_config smectic_config;
typedef struct smectic_solver smectic_solver;
typedef struct smectic_report smectic_report;

typedef struct smectic_step_info {
  long step;
  double t;
  double tau;
  double g;
  double s_tilde;
  double xi;
  double R;
  double e1h;
  double s;
  double E_modified;
  double E_original;
  double sup_F;
  double max_u;
  double min_u;
} smectic_step_info;

typedef struct smectic_run_info {
  long steps;
  double t;
  double E_modified_initial;
  double E_modified_final;
  double E_original_final;
  double max_energy_increase;
  double g_min;
  double g_max;
  double tau_min_used;
  double tau_max_used;
  double mbp_eta;
  double mbp_kappa0;
  long mbp_violations;
  long blowup_step; /* step index of a blow-up, -1 otherwise */
} smectic_run_info;

SMECTIC_API const char* smectic_version(void);
SMECTIC_API const char* smectic_last_error(void);
SMECTIC_API const char* smectic_status_name(smectic_status status);

/* Configuration ---------------------------------------------------------- */

SMECTIC_API smectic_status smectic_config_preset(const char* name, smectic_config** out);
SMECTIC_API smectic_status smectic_config_parse(const char* text, smectic_config** out);
SMECTIC_API smectic_status smectic_config_clone(const smectic_config* cfg, smectic_config** out);
/* Sets one key without cross-key validation; see smectic_config_validate. */
SMECTIC_API smectic_status smectic_config_set(smectic_config* cfg, const char* key, const char* value);
SMECTIC_API smectic_status smectic_config_validate(smectic_config* cfg);
/* Copies the NUL-terminated value into buf; *needed receives the size including NUL. */
SMECTIC_API smectic_status smectic_config_get(const smectic_config* cfg, const char* key, char* buf,
                                              size_t cap, size_t* needed);
SMECTIC_API smectic_status smectic_config_to_text(const smectic_config* cfg, char* buf, size_t cap,
                                                  size_t* needed);
SMECTIC_API void smectic_config_destroy(smectic_config* cfg);

/* Solver ------------------------------------------------------------------ */

/* Validates cfg and builds the initial state it describes. */
SMECTIC_API smectic_status smectic_solver_create(const smectic_config* cfg, smectic_solver** out);
SMECTIC_API smectic_status smectic_solver_step(smectic_solver* solver, double tau, smectic_step_info* info);
/* Runs to the configured T_final, writing config.txt, diagnostics.csv,
 * snapshots and summary.json under out_dir. info may be NULL. */
SMECTIC_API smectic_status smectic_solver_run(smectic_solver* solver, const char* out_dir,
                                              smectic_run_info* info);
SMECTIC_API smectic_status smectic_solver_time(const smectic_solver* solver, double* t, double* s,
                                               long* step);
SMECTIC_API smectic_status smectic_solver_energy(const smectic_solver* solver, double* modified,
                                                 double* original);
/* Number of samples per field (J^d). */
SMECTIC_API size_t smectic_solver_field_size(const smectic_solver* solver);
/* Field names: "u", "q11", "q12", and in 3D "q22", "q13", "q23". */
SMECTIC_API smectic_status smectic_solver_get_field(const smectic_solver* solver, const char* name,
                                                    double* out, size_t len);
SMECTIC_API smectic_status smectic_solver_set_field(smectic_solver* solver, const char* name,
                                                    const double* values, size_t len);
SMECTIC_API void smectic_solver_destroy(smectic_solver* solver);

/* Verification reports ----------------------------------------------------- */

SMECTIC_API smectic_status smectic_conv_time(const smectic_config* cfg, const double* taus, size_t n,
                                             double tau_ref, smectic_report** out);
SMECTIC_API smectic_status smectic_conv_space(const smectic_config* cfg, const int* Js, size_t n, int J_ref,
                                              double tau, smectic_report** out);
SMECTIC_API smectic_status smectic_selfcheck(uint64_t seed, double gradient_perturbation,
                                             smectic_report** out);
SMECTIC_API smectic_status smectic_gradcheck(int dim, int J, uint64_t seed, double eps,
                                             smectic_report** out);

/* 1 when every check in the report passed (selfcheck, gradcheck); always 1 for
 * convergence tables, which carry no pass criterion of their own. */
SMECTIC_API int smectic_report_passed(const smectic_report* report);
SMECTIC_API const char* smectic_report_text(const smectic_report* report);
/* Convergence tables: rows x 7 errors and (rows-1) x 7 rates, row-major.
 * Columns: Q_inf, Q_l2, Q_H1, u_inf, u_l2, u_H2, s. */
SMECTIC_API size_t smectic_report_rows(const smectic_report* report);
SMECTIC_API smectic_status smectic_report_errors(const smectic_report* report, double* out, size_t len);
SMECTIC_API smectic_status smectic_report_rates(const smectic_report* report, double* out, size_t len);
/* Scalar result of a gradient check: relative error. */
SMECTIC_API double smectic_report_value(const smectic_report* report);
SMECTIC_API void smectic_report_destroy(smectic_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SMECTIC_SMECTIC_H */
