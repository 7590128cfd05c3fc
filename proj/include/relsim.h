/* relsim: reliability modeling for gang-scheduled GPU clusters.
 *
 * C interface over the native core. Conventions:
 *   - Every function returns a status code (RELSIM_OK on success) and
 *     writes results through out-parameters.
 *   - On failure, relsim_last_error() returns a thread-local message
 *     describing what went wrong in the current thread's last failing call.
 *   - Strings returned through `char**` out-parameters are heap-allocated;
 *     release them with relsim_string_free().
 *   - Traces are opaque handles; release with relsim_trace_free().
 *   - Configs are passed as flat `key = value` text (same format the CLI
 *     reads from files); durations are seconds, rates are per node-day.
 */

#ifndef RELSIM_H
#define RELSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ---- status codes ---- */

#define RELSIM_OK 0        /* success */
#define RELSIM_EINVAL 1    /* precondition or argument violation */
#define RELSIM_EIO 2       /* filesystem failure */
#define RELSIM_EPARSE 3    /* malformed input text */
#define RELSIM_EDOMAIN 4   /* inputs outside the model's domain */
#define RELSIM_EREGIME 5   /* analytic validity regime violated */
#define RELSIM_EINTERNAL 6 /* internal invariant broke */

/* Library version string, e.g. "1.0.0". Static storage; do not free. */
const char* relsim_version(void);

/* Message from this thread's most recent failing call ("" if none). The
 * buffer is thread-local and overwritten by the next failure. */
const char* relsim_last_error(void);

/* Frees any string returned through a char** out-parameter. NULL is ok. */
void relsim_string_free(char* s);

/* ---- closed-form ETTR / MTTF ---- */

typedef struct relsim_ettr_params {
  int32_t n_nodes;
  double failure_rate_per_node_day; /* per node, r_f */
  double restart_overhead_s;        /* u0 */
  double checkpoint_write_s;        /* w_cp */
  double checkpoint_interval_s;     /* dt_cp; ignored by interval searches */
  double queue_wait_s;              /* mean q per interruption */
  double required_productive_s;     /* R */
} relsim_ettr_params;

typedef struct relsim_ettr_estimate {
  double value;             /* expected ETTR, a lower bound on E[ETTR] */
  double expected_failures; /* E[N_f] over the run */
  double expected_slowdown; /* E[S] */
  double regime_term;       /* N * r_f * (u0 + dt/2), must be < 1 */
} relsim_ettr_estimate;

int relsim_expected_ettr_full(const relsim_ettr_params* p,
                              relsim_ettr_estimate* out);
int relsim_expected_ettr_simplified(const relsim_ettr_params* p, double* out);
int relsim_expected_failures(const relsim_ettr_params* p, double* out);

/* sqrt(2 * w_cp / (N * r_f)), seconds. */
int relsim_optimal_checkpoint_interval(double checkpoint_write_s,
                                       int32_t n_nodes,
                                       double rate_per_node_day,
                                       double* out_s);

/* Numeric maximizer of the full formula over dt; seconds. */
int relsim_numeric_optimal_interval(const relsim_ettr_params* p,
                                    double* out_s);

/* Independent Monte-Carlo estimate of E[ETTR]. queue_lognormal != 0 draws
 * lognormal queue waits (mean preserved, sigma in log space); 0 keeps every
 * wait at the mean. threads <= 0 picks hardware concurrency. */
int relsim_monte_carlo_ettr(const relsim_ettr_params* p, int32_t trials,
                            uint64_t seed, int32_t queue_lognormal,
                            double queue_sigma_log, int32_t threads,
                            double* out_mean, double* out_stderr);

/* (ceil(gpus/gpus_per_node) * r_f)^-1, hours. */
int relsim_project_mttf_hours(int32_t gpus, double rate_per_node_day,
                              int32_t gpus_per_node, double* out_hours);

/* Exact Poisson (Garwood) interval on failures/exposure. */
int relsim_garwood_interval(long long failures, double exposure,
                            double confidence, double* out_lower,
                            double* out_upper);

/* ---- ETTR design sweep ---- */

typedef struct relsim_sweep_spec {
  int32_t n_nodes;
  double restart_overhead_s;
  double queue_wait_s;
  double required_productive_s;
  double rate_lo, rate_hi; /* r_f axis bounds, per node-day */
  int32_t rate_points;
  double write_lo, write_hi; /* w_cp axis bounds, seconds */
  int32_t write_points;
  double min_interval_s;   /* <= 0 keeps the 10 s default */
  int32_t use_full_formula; /* 0: simplified formula, else full */
} relsim_sweep_spec;

/* CSV columns: rate_per_node_day,checkpoint_write_s,interval_s,ettr,valid,
 * floored. */
int relsim_ettr_sweep_csv(const relsim_sweep_spec* spec, char** out_csv);

/* Filled contour chart; levels NULL/0 uses {0.7,0.8,0.9,0.95,0.99}. */
int relsim_ettr_sweep_svg(const relsim_sweep_spec* spec,
                          const double* levels, size_t n_levels,
                          char** out_svg);

/* ---- traces ---- */

typedef struct relsim_trace relsim_trace;

int relsim_trace_read(const char* path, relsim_trace** out);
int relsim_trace_parse(const char* text, relsim_trace** out);
int relsim_trace_write(const relsim_trace* trace, const char* path);
int relsim_trace_serialize(const relsim_trace* trace, char** out_text);
void relsim_trace_free(relsim_trace* trace);

/* Header fields plus per-record-type counts, as a JSON object. */
int relsim_trace_info_json(const relsim_trace* trace, char** out_json);

/* ---- workload generation ---- */

/* Builds a workload trace from flat config text (see docs/config keys).
 * use_seed_override != 0 replaces the config's seed. */
int relsim_generate_workload(const char* workload_config_text,
                             int32_t use_seed_override,
                             uint64_t seed_override, relsim_trace** out);

/* ---- simulation ---- */

/* Runs the discrete-event cluster simulation of `workload` (a trace holding
 * job records) under the flat cluster config; returns the full sim trace. */
int relsim_simulate(const char* cluster_config_text,
                    const relsim_trace* workload, uint64_t seed,
                    relsim_trace** out_trace);

/* Aggregate outcome of a sim trace (runs, attempts, states, Q/R/U totals,
 * goodput loss), as a JSON object. */
int relsim_sim_summary_json(const relsim_trace* sim_trace, char** out_json);

/* ETTR of one logical run estimated from its scheduler log alone.
 * interval_override_s <= 0 derives the interval from the failure rate;
 * min_total_scheduled_s <= 0 keeps the 48 h default. */
typedef struct relsim_log_ettr_assumptions {
  double restart_overhead_s;
  double checkpoint_write_s;
  double failure_rate_per_node_day;
  double interval_override_s;
  double min_total_scheduled_s;
} relsim_log_ettr_assumptions;

int relsim_job_run_ettr(const relsim_trace* sim_trace,
                        const char* logical_run_id,
                        const relsim_log_ettr_assumptions* assume,
                        double* out_ettr);

/* ---- failure analytics over a sim trace ---- */

/* Window rule attribution of FAILED / NODE_FAIL attempts. Negative window
 * arguments keep the defaults (600 s before, 300 s after). */
int relsim_attribute_csv(const relsim_trace* sim_trace, double pre_window_s,
                         double post_window_s, char** out_csv);

/* Fleet failure rate over attempts with gpus > min_gpus (min_gpus < 0
 * keeps the 128 default). Rates are per node-day. */
int relsim_estimate_failure_rate(const relsim_trace* sim_trace,
                                 int32_t min_gpus, double* out_rate,
                                 double* out_ci_lower, double* out_ci_upper,
                                 long long* out_failures,
                                 double* out_exposure_node_days);

int relsim_status_csv(const relsim_trace* sim_trace, char** out_csv);

/* window_s <= 0 keeps the 30-day default. */
int relsim_rolling_rate_csv(const relsim_trace* sim_trace, double window_s,
                            int32_t by_cause, char** out_csv);
int relsim_rolling_rate_svg(const relsim_trace* sim_trace, double window_s,
                            char** out_svg);

/* bucket_lo_hi holds n_buckets pairs of inclusive node-count bounds. */
int relsim_mttf_by_size_csv(const relsim_trace* sim_trace,
                            const int32_t* bucket_lo_hi, size_t n_buckets,
                            double rate_per_node_day, char** out_csv);
int relsim_mttf_by_size_svg(const relsim_trace* sim_trace,
                            const int32_t* bucket_lo_hi, size_t n_buckets,
                            double rate_per_node_day, char** out_svg);

/* cap_s <= 0 keeps the 30-minute lost-work cap. */
int relsim_goodput_csv(const relsim_trace* sim_trace, double cap_s,
                       char** out_csv);
int relsim_goodput_svg(const relsim_trace* sim_trace, double cap_s,
                       char** out_svg);
int relsim_cascade_csv(const relsim_trace* sim_trace, double cap_s,
                       char** out_csv);

/* ---- lemon detection ---- */

/* Per-node signals over the trailing window ending at the trace end.
 * window_s <= 0 keeps the 28-day default. */
int relsim_lemon_signals_csv(const relsim_trace* sim_trace, double window_s,
                             char** out_csv);

/* Thresholds are flat config text: `<signal_name> = <cutoff>` lines; a
 * signal triggers when its value strictly exceeds the cutoff. */
int relsim_lemon_classify_csv(const relsim_trace* sim_trace, double window_s,
                              const char* thresholds_text, char** out_csv);

/* Verdicts against the trace's seeded lemon ground truth, as JSON. */
int relsim_lemon_evaluate_json(const relsim_trace* sim_trace, double window_s,
                               const char* thresholds_text, char** out_json);

/* Grid-search tuning against ground truth; JSON holds the chosen cutoffs
 * and their training metrics. recall_floor < 0 keeps the 0.5 default. */
int relsim_lemon_tune_json(const relsim_trace* sim_trace, double window_s,
                           double recall_floor, char** out_json);

/* Paired same-seed A/B simulation, detector off vs on; JSON reports the
 * fraction of large jobs (gpus >= min_gpus; min_gpus <= 0 keeps 512) whose
 * run ends in NODE_FAIL, and the relative reduction. */
int relsim_lemon_ab_compare_json(const char* cluster_config_text,
                                 const relsim_trace* workload,
                                 const char* thresholds_text, uint64_t seed,
                                 int32_t min_gpus, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RELSIM_H */
