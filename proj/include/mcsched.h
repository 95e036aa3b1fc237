/* C interface to the mcsched scheduling simulator.
 *
 * All functions return mcs_status; MCS_OK is 0. On failure,
 * mcs_last_error() returns a thread-local message describing the problem.
 * Objects returned through out-parameters are owned by the caller and
 * released with the matching _free function.
 */
#ifndef MCSCHED_H
#define MCSCHED_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcs_status {
  MCS_OK = 0,
  MCS_ERR_INVALID = 1, /* bad arguments or config */
  MCS_ERR_IO = 2,      /* file read/write failure */
  MCS_ERR_RUNTIME = 3  /* internal failure during execution */
} mcs_status;

typedef struct mcs_config mcs_config;

const char* mcs_version(void);

/* thread-local message for the most recent failure in this thread */
const char* mcs_last_error(void);

/* Parse a config from a file or from text (key = value lines). */
mcs_status mcs_config_load(const char* path, mcs_config** out);
mcs_status mcs_config_parse(const char* text, mcs_config** out);

/* Apply one "key = value" override line to an existing config. */
mcs_status mcs_config_set(mcs_config* cfg, const char* line);

void mcs_config_free(mcs_config* cfg);

/* Run the full experiment sweep; writes results.csv, backlog.csv and
 * manifest.json under the config's output_dir. */
mcs_status mcs_run(const mcs_config* cfg);

/* Run the sweep and additionally emit figure data. mode is "vs_n"
 * (fixed = threshold b) or "vs_b" (fixed = n). */
mcs_status mcs_sweep(const mcs_config* cfg, const char* mode, long long fixed);

/* Per-slot condition / dominance verification. check is "opf", "mwf" or
 * "dominance". slots and violations receive the totals (may be NULL). */
mcs_status mcs_verify(const mcs_config* cfg, const char* check,
                      long long* slots, long long* violations);

/* Per-slot decision timing on a saturated synthetic state; writes
 * bench.csv under the config's output_dir. */
mcs_status mcs_bench(const mcs_config* cfg);

/* I*0(b) upper-bound calculator. arrival_model may be NULL or empty for
 * L = 1; otherwise it is a model description such as
 * "markov_burst batch=5 P=0.5,0.5,0.1,0.9". */
mcs_status mcs_upper_bound(int L, double q, int b, const char* arrival_model,
                           double* out_value);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MCSCHED_H */
