// Copyright 2026 The Pilot-Quantum Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the pilotq runtime. All structured values cross the
 * boundary as UTF-8 JSON strings; strings returned through `char **out`
 * are owned by the caller and released with pq_free_string().
 *
 * Every function returns PQ_OK or an error status; the message of the
 * last failure on the calling thread is available from pq_last_error().
 */
#ifndef PILOTQ_PQ_H
#define PILOTQ_PQ_H

#include <stddef.h>

#if defined(_WIN32)
#define PQ_API __declspec(dllexport)
#else
#define PQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values mirror pilotq::ErrorCode. */
typedef enum pq_status {
    PQ_OK = 0,
    PQ_ERR_VALIDATION = 1,
    PQ_ERR_ILLEGAL_TRANSITION,
    PQ_ERR_CAPACITY,
    PQ_ERR_DOUBLE_RELEASE,
    PQ_ERR_QUBIT_CAPACITY_EXCEEDED,
    PQ_ERR_WALLTIME_EXPIRED,
    PQ_ERR_WORKER_OVERSUBSCRIPTION,
    PQ_ERR_AGENT_STOPPED,
    PQ_ERR_DUPLICATE_PILOT_NAME,
    PQ_ERR_UNKNOWN_PILOT,
    PQ_ERR_DUPLICATE_TASK_ID,
    PQ_ERR_UNKNOWN_TASK_ID,
    PQ_ERR_NO_FEASIBLE_PILOT,
    PQ_ERR_MEMORY_CAP_EXCEEDED,
    PQ_ERR_DIMENSION_MISMATCH,
    PQ_ERR_PARAM_COUNT_MISMATCH,
    PQ_ERR_NOT_CUT_FRIENDLY,
    PQ_ERR_WIDTH_EXCEEDED,
    PQ_ERR_UNSUPPORTED_OBSERVABLE,
    PQ_ERR_MISSING_FRAGMENT_VALUE,
    PQ_ERR_NO_ACTIVE_SESSION,
    PQ_ERR_IO,
    PQ_ERR_DIVERGENCE,
    PQ_ERR_UNKNOWN_FUNCTION,
    PQ_ERR_INTERNAL
} pq_status;

typedef struct pq_manager pq_manager;

PQ_API const char *pq_version(void);

/* Message of the last failing call on this thread, "" after success. */
PQ_API const char *pq_last_error(void);
PQ_API const char *pq_status_name(pq_status status);
PQ_API int pq_status_is_validation(pq_status status);
PQ_API void pq_free_string(char *s);

/*
 * options_json may be NULL or an object with "auto_schedule" (bool),
 * "dispatch_window" (int), "memory_cap_mb" (number) and "log" (JSONL path).
 */
PQ_API pq_status pq_manager_create(const char *options_json, pq_manager **out);
PQ_API void pq_manager_destroy(pq_manager *m);

/* workers == 0 uses every core of the pilot. */
PQ_API pq_status pq_manager_create_pilot(pq_manager *m, const char *pilot_json,
                                         size_t workers, char **name_out);
PQ_API pq_status pq_manager_remove_pilot(pq_manager *m, const char *name, int drain,
                                         char **metrics_json_out);
PQ_API pq_status pq_manager_submit_task(pq_manager *m, const char *task_json,
                                        char **id_out);
PQ_API pq_status pq_manager_schedule_pending(pq_manager *m, char **assignments_json_out);
/* ids_json is an array of task ids; records come back keyed by id. */
PQ_API pq_status pq_manager_wait(pq_manager *m, const char *ids_json, double timeout_s,
                                 int *complete_out, char **records_json_out);
PQ_API pq_status pq_manager_cancel(pq_manager *m, const char *task_id, int *canceled_out,
                                   char **record_json_out);
PQ_API pq_status pq_manager_task(pq_manager *m, const char *task_id, char **record_json_out);
PQ_API pq_status pq_manager_status(pq_manager *m, char **status_json_out);

/*
 * Runs a benchmark subcommand ("throughput", "circuits", "gradients", "cut",
 * "vqc", "status") with a JSON config object. The report carries "metrics",
 * "csv" and "timing_columns" ("status" returns {"status": ...}).
 */
PQ_API pq_status pq_run_workload(const char *command, const char *config_json,
                                 char **report_json_out);

/* Replays a JSONL event log into a status snapshot. */
PQ_API pq_status pq_status_from_log(const char *path, char **status_json_out);

#ifdef __cplusplus
}
#endif

#endif /* PILOTQ_PQ_H */
