#ifndef CSYS_CAPI_H
#define CSYS_CAPI_H

/* C interface of the workbench core. All functions are thread-compatible:
 * distinct instances may be used concurrently, a single instance must not.
 *
 * Strings returned through out-parameters are heap-allocated and must be
 * released with csys_free. Status codes:
 *   0  success, all checks passed
 *   1  checks ran and at least one failed
 *   2  config / seed / budget parse error
 *   3  internal error
 */

#ifdef __cplusplus
extern "C" {
#endif

enum {
  CSYS_OK = 0,
  CSYS_CHECK_FAILED = 1,
  CSYS_PARSE_ERROR = 2,
  CSYS_INTERNAL_ERROR = 3
};

enum {
  CSYS_FORMAT_TEXT = 0,
  CSYS_FORMAT_JSON = 1
};

typedef struct csys_instance csys_instance;

const char* csys_version(void);

/* config_json: {"kind":"unit"} | {"kind":"context","base_sizes":[..]} |
 * {"kind":"universe","els":[..]} |
 * {"kind":"mutated","base":{..},"mutation":"permute_q"|"permute_sf"|
 *  "permute_star"|"permute_comp"}.
 * Returns NULL on parse error; *err (if non-NULL) receives a message. */
csys_instance* csys_instance_create(const char* config_json, char** err);
void csys_instance_destroy(csys_instance* inst);

/* budget_json: {"max_len":N,"point_cap":N,"hom_cap":N,"rng_seed":N}, every
 * field optional; NULL or "{}" keeps the defaults (3, 8, 4096, 0). */

/* Structural axiom suite plus the pullback equivalence suite. */
int csys_run_check(csys_instance* inst, const char* budget_json, int format, char** out,
                   char** err);

/* Subsystem closure of seed_json {"objects":[enc..],"sections":[enc..]}
 * (NULL means the empty seed): window dump plus the subsystem suite. */
int csys_run_close(csys_instance* inst, const char* budget_json, const char* seed_json,
                   int format, char** out, char** err);

/* Congruence suite for relation_json
 * {"ob_pairs":[[encA,encB]..],"sect_pairs":[[encS,encT]..]} (NULL means the
 * discrete relation), plus a dump of the quotient when the closure is
 * admissible. */
int csys_run_quotient(csys_instance* inst, const char* budget_json, const char* relation_json,
                      int format, char** out, char** err);

/* Every suite of every shipped fixture; budget_json fields override the
 * per-fixture budgets. */
int csys_run_suite_all(const char* budget_json, int format, char** out, char** err);

void csys_free(char* p);

#ifdef __cplusplus
}
#endif

#endif /* CSYS_CAPI_H */
