/* C interface to the teamq library. All strings are UTF-8 JSON or CSV text.
 * Strings returned through char** are owned by the caller and released with
 * tq_string_free. On failure the status is nonzero and tq_last_error() holds a
 * message for the calling thread. */
#ifndef TEAMQ_H
#define TEAMQ_H

#include <stdint.h>

#if defined(_WIN32)
#define TQ_API __declspec(dllexport)
#else
#define TQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tq_status {
  TQ_OK = 0,
  TQ_ERR_INVALID_ARGUMENT = 1,
  TQ_ERR_PARSE = 2,
  TQ_ERR_VALIDATION = 3,
  TQ_ERR_MISSING = 4,
  TQ_ERR_INFEASIBLE = 5,
  TQ_ERR_RUNTIME = 6
} tq_status;

typedef struct tq_model tq_model;
typedef struct tq_qmdp tq_qmdp;

TQ_API const char* tq_version(void);
TQ_API const char* tq_last_error(void);
TQ_API const char* tq_status_name(tq_status status);
TQ_API void tq_string_free(char* text);

/* Models. tq_model_validate_json returns TQ_ERR_VALIDATION and, when report is
 * non-null, a JSON list of {field,row,observed,message}. */
TQ_API tq_status tq_model_load_json(const char* json, tq_model** out);
TQ_API tq_status tq_model_load_file(const char* path, tq_model** out);
TQ_API tq_status tq_model_validate_json(const char* json, char** report);
TQ_API tq_status tq_model_to_json(const tq_model* model, char** out);
/* {"states","agents":[{"actions","measurements"}],"joint_actions","cost_sup","beta"} */
TQ_API tq_status tq_model_info(const tq_model* model, char** out);
TQ_API void tq_model_free(tq_model* model);

/* Bounds report as key=value lines. config_json is a run config (reduction.K,
 * bounds.epsilon, bounds.window); NULL uses defaults. *feasible is set to 0
 * when no nonempty memory schedule meets epsilon. */
TQ_API tq_status tq_bounds_report(const tq_model* model, const char* config_json, char** out, int* feasible);

/* Quantized coordinator MDP built from a run config. */
TQ_API tq_status tq_qmdp_build(const tq_model* model, const char* config_json, tq_qmdp** out);
TQ_API tq_status tq_qmdp_load_json(const char* json, tq_qmdp** out);
TQ_API tq_status tq_qmdp_to_json(const tq_qmdp* qmdp, char** out);
/* {"states","actions","discount","cost_bound","max_row_defect","codebook_mode"} */
TQ_API tq_status tq_qmdp_info(const tq_qmdp* qmdp, char** out);
TQ_API void tq_qmdp_free(tq_qmdp* qmdp);

/* Value iteration; result JSON holds values, deltas, residual and the policy. */
TQ_API tq_status tq_value_iteration(const tq_qmdp* qmdp, const char* config_json, char** result);

/* Q-learning per the config's solver section. model may be NULL in surrogate
 * mode. steps >= 0 overrides solver.steps; seed overrides the config seed
 * unless negative. */
TQ_API tq_status tq_q_learning(const tq_qmdp* qmdp, const tq_model* model, const char* config_json, int64_t steps,
                               int64_t seed, char** qtable);

/* Greedy policy of a Q table artifact, as a policy artifact. */
TQ_API tq_status tq_greedy_policy(const tq_qmdp* qmdp, const char* qtable_json, char** policy);

/* Rollouts of a policy artifact from the config's eval centers. Result is a
 * JSON list of {center, weights, mean, std_error, horizon, episodes}. */
TQ_API tq_status tq_rollout(const tq_model* model, const tq_qmdp* qmdp, const char* policy_json,
                            const char* config_json, int64_t seed, char** result);

/* Predictor stability experiment; CSV columns t,mean_gap,std_error,envelope. */
TQ_API tq_status tq_stability(const tq_model* model, const char* config_json, int64_t seed, char** csv);

/* FNV-1a hash of a byte string (run directory naming). */
TQ_API uint64_t tq_hash(const char* bytes, uint64_t length);

#ifdef __cplusplus
}
#endif

#endif
