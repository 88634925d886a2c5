#ifndef COCO_LAB_H
#define COCO_LAB_H

/* C interface to the constrained online convex optimization lab.
 *
 * Handles are opaque; every function that can fail returns a coco_status
 * and leaves a human-readable message in coco_last_error() (per thread).
 * Strings returned through char** are malloc'd; release them with
 * coco_string_free.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coco_status {
    COCO_OK = 0,
    COCO_ERR_INVALID = 1, /* bad arguments, malformed JSON or CSV */
    COCO_ERR_IO = 2,      /* file or directory access failed */
    COCO_ERR_INTERNAL = 3
} coco_status;

typedef struct coco_instance coco_instance;
typedef struct coco_trace coco_trace;

/* Message for the most recent failure on this thread; empty when none. */
const char* coco_last_error(void);

/* Instance construction from the generator JSON schema: either
 * {generator, domain, T, G, seed, params} or a fully materialized
 * {losses, constraints, kernel, D, ...} description. */
coco_status coco_instance_from_json(const char* json_text, coco_instance** out);
void coco_instance_free(coco_instance* ins);

/* Stable identifier used in artifact file names. Fails when cap is too
 * small for the id plus its terminator. */
coco_status coco_instance_id(const coco_instance* ins, char* buf, size_t cap);

/* learner is one of "CocoOGD", "UnconstrainedOGD", "LazyFeasible". The
 * returned trace keeps its own copy of the instance, so the instance may
 * be freed first. */
coco_status coco_run_learner(const coco_instance* ins, const char* learner,
                             coco_trace** out);
void coco_trace_free(coco_trace* tr);

/* Trace rows as CSV. with_slacks != 0 appends the per-step certificate
 * slack columns. */
coco_status coco_trace_csv(const coco_trace* tr, int with_slacks, char** out);

/* Run header JSON: learner, config, instance id, seed, and the initial
 * and final set measurements. */
coco_status coco_trace_header_json(const coco_trace* tr, char** out);

/* Geometric certificate report. tol <= 0 selects the default 1e-7 base
 * tolerance. */
coco_status coco_trace_certificate_json(const coco_trace* tr, double tol,
                                        char** out);

/* Offline benchmark and regret report for the traced run. */
coco_status coco_trace_regret_json(const coco_trace* tr, char** out);

void coco_string_free(char* s);

/* Command entry points mirroring the CLI. exit_code receives 0 on
 * success, 1 when certificates fail (a machine-readable manifest is
 * written next to the artifacts), 2 on configuration or I/O errors.
 * out_dir may be NULL to keep the configured directory; jobs <= 0 and
 * seed_override < 0 keep the configured values. */
coco_status coco_cmd_run(const char* config_path, const char* out_dir, int jobs,
                         long long seed_override, int* exit_code);
coco_status coco_cmd_sweep(const char* config_path, const char* out_dir, int jobs,
                           long long seed_override, int* exit_code);
coco_status coco_cmd_verify(const char* trace_dir, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* COCO_LAB_H */
