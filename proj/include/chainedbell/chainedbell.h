/*
 * C interface to the chainedbell library.
 *
 * Every fallible call returns a cb_status. On failure a human-readable message
 * (and, for parse errors, a 1-based line/column) is stored per thread and can
 * be read with cb_last_error*(). Objects are opaque handles created by
 * cb_*_create-style calls and released by the matching cb_*_free; free
 * functions accept NULL.
 */
#ifndef CHAINEDBELL_H
#define CHAINEDBELL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CHAINEDBELL_BUILD)
#    define CB_API __declspec(dllexport)
#  else
#    define CB_API __declspec(dllimport)
#  endif
#else
#  define CB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERR_INVALID_ARGUMENT = 1,
  CB_ERR_PRECONDITION = 2,
  CB_ERR_PARSE = 3,
  CB_ERR_SOLVER = 4,
  CB_ERR_IO = 5,
  CB_ERR_INTERNAL = 6
} cb_status;

CB_API const char* cb_last_error(void);
CB_API size_t cb_last_error_line(void);
CB_API size_t cb_last_error_column(void);
CB_API const char* cb_version(void);

/* ---- quantum model ---------------------------------------------------- */

CB_API cb_status cb_joint_probability(double alpha, double theta_a, double theta_b, int x, int y,
                                      double* out);
CB_API cb_status cb_alice_marginal(double alpha, double theta_a, double theta_b, int x,
                                   double* out);
/* out = 1 when p(x,y) = p(x) p(y); requires alpha in {0, 1}. */
CB_API cb_status cb_decorrelation_check(double alpha, double theta_a, double theta_b, int* out);

/* ---- scenarios -------------------------------------------------------- */

typedef struct cb_scenario cb_scenario;

CB_API cb_status cb_scenario_create(const double* alice, const double* bob, size_t n,
                                    cb_scenario** out);
CB_API cb_status cb_scenario_equally_spaced(size_t n, cb_scenario** out);
/* N = ceil(pi^2 / (4 epsilon)), at least 2. */
CB_API cb_status cb_scenario_for_epsilon(double epsilon, cb_scenario** out);
CB_API size_t cb_scenario_size(const cb_scenario* s);
/* Copies N angles (radians) into each non-NULL buffer. */
CB_API cb_status cb_scenario_angles(const cb_scenario* s, double* alice, double* bob);
CB_API void cb_scenario_free(cb_scenario* s);

/* ---- chained Bell measure --------------------------------------------- */

typedef enum cb_chained_source {
  CB_SOURCE_TRACE = 0,
  CB_SOURCE_CLOSED_FORM_PRINTED = 1,
  CB_SOURCE_CLOSED_FORM_CORRECTED = 2
} cb_chained_source;

typedef struct cb_chained_report cb_chained_report;

CB_API cb_status cb_chained_evaluate(double alpha, const cb_scenario* s, cb_chained_source source,
                                     cb_chained_report** out);
CB_API size_t cb_chained_report_n(const cb_chained_report* r);
/* Value selected by the source used at evaluation time. */
CB_API double cb_chained_report_value(const cb_chained_report* r);
CB_API double cb_chained_report_trace_value(const cb_chained_report* r);
CB_API double cb_chained_report_closed_form(const cb_chained_report* r, cb_chained_source variant);
CB_API double cb_chained_report_quantum_upper_bound(const cb_chained_report* r);
CB_API double cb_chained_report_local_lower_bound(const cb_chained_report* r);
/* Copies the 2N chain terms into out (capacity 2N). */
CB_API cb_status cb_chained_report_terms(const cb_chained_report* r, double* out, size_t capacity);
CB_API void cb_chained_report_free(cb_chained_report* r);

CB_API double cb_chain_quantum_bound(size_t n);
CB_API double cb_chain_small_angle_bound(size_t n);
CB_API cb_status cb_local_deterministic_minimum(size_t n, size_t* out);

typedef struct cb_discrepancy {
  size_t samples;
  double max_printed_error;
  double max_corrected_error;
  size_t printed_failures;
  size_t corrected_failures;
  double tol;
} cb_discrepancy;

CB_API cb_status cb_closed_form_discrepancy(size_t samples, size_t max_n, uint64_t seed, double tol,
                                            cb_discrepancy* out);

/* ---- decomposition models --------------------------------------------- */

typedef struct cb_model cb_model;

CB_API cb_status cb_model_load(const char* path, double tol, cb_model** out);
CB_API cb_status cb_model_parse(const char* text, double tol, cb_model** out);
CB_API cb_status cb_model_save(const cb_model* m, const char* path);
/* Writes at most capacity bytes including the terminator; *needed receives
 * the full length + 1. buf may be NULL when capacity is 0. */
CB_API cb_status cb_model_serialize(const cb_model* m, char* buf, size_t capacity, size_t* needed);
CB_API cb_status cb_model_identity(double alpha, const cb_scenario* s, cb_model** out);
/* alpha must be 0 or 1. */
CB_API cb_status cb_model_product_state(double alpha, const cb_scenario* s, cb_model** out);
CB_API size_t cb_model_atoms(const cb_model* m);
CB_API void cb_model_free(cb_model* m);

typedef struct cb_predicate {
  int pass;
  double max_deviation;
} cb_predicate;

typedef struct cb_model_check {
  cb_predicate normalization;
  cb_predicate no_signalling;
  cb_predicate no_conspiracy;
  cb_predicate averaging;
  double advantage;            /* max_{z,a} |p(0|a,z) - p(1|a,z)| */
  size_t witness_z;
  size_t witness_a;
  int witness_x;
  int bkp_applicable;          /* 0 when some atom signals */
  cb_predicate bkp;            /* max_deviation = -(min slack) when negative, else 0 */
  double bkp_min_slack;
} cb_model_check;

CB_API cb_status cb_model_check_run(const cb_model* m, double tol, cb_model_check* out);

/* ---- advantage LP ----------------------------------------------------- */

typedef enum cb_pair_set { CB_PAIRS_ALL = 0, CB_PAIRS_CHAIN = 1 } cb_pair_set;

typedef struct cb_lp_result cb_lp_result;

CB_API cb_status cb_lp_max_advantage(double alpha, const cb_scenario* s, size_t z_count,
                                     cb_pair_set pairs, double tol, cb_lp_result** out);
CB_API double cb_lp_result_t_star(const cb_lp_result* r);
CB_API double cb_lp_result_chained_bound(const cb_lp_result* r);
CB_API size_t cb_lp_result_a_star(const cb_lp_result* r);
CB_API double cb_lp_result_max_residual(const cb_lp_result* r);
/* Copies the optimal decomposition; release with cb_model_free. */
CB_API cb_status cb_lp_result_model(const cb_lp_result* r, cb_model** out);
CB_API void cb_lp_result_free(cb_lp_result* r);

/* ---- finite statistics ------------------------------------------------ */

typedef enum cb_schedule { CB_SCHEDULE_CHAIN_ONLY = 0, CB_SCHEDULE_UNIFORM = 1 } cb_schedule;
typedef enum cb_interval_mode { CB_INTERVAL_HOEFFDING = 0, CB_INTERVAL_CLOPPER_PEARSON = 1 } cb_interval_mode;

typedef struct cb_trial_record {
  uint64_t round;
  uint32_t a_index;
  uint32_t b_index;
  uint8_t x;
  uint8_t y;
} cb_trial_record;

typedef struct cb_certificate {
  uint64_t n_rounds;
  double i_n_hat;
  double confidence;
  double half_width;
  double certified_epsilon;
  double lower_bound;
  cb_interval_mode mode;
} cb_certificate;

typedef struct cb_trials cb_trials;

CB_API const char* cb_rng_algorithm(void);
CB_API cb_status cb_sample_rounds(double alpha, const cb_scenario* s, uint64_t rounds, uint64_t seed,
                                  cb_schedule schedule, cb_trials** out);
CB_API size_t cb_trials_count(const cb_trials* t);
CB_API cb_status cb_trials_get(const cb_trials* t, size_t index, cb_trial_record* out);
CB_API cb_status cb_trials_write_log(const cb_trials* t, const char* path);
CB_API cb_status cb_trials_read_log(const char* path, cb_trials** out);
CB_API cb_status cb_certify(const cb_trials* t, const cb_scenario* s, double confidence,
                            cb_interval_mode mode, cb_certificate* out);
CB_API void cb_trials_free(cb_trials* t);

#ifdef __cplusplus
}
#endif

#endif /* CHAINEDBELL_H */
