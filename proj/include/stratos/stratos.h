/* Stratos engine, C interface.
 *
 * All functions are thread-safe as long as a handle is not shared between
 * threads. Strings returned through char** or char* results are heap copies
 * owned by the caller; release them with stratos_string_free. Functions
 * returning int report one of the STRATOS_* codes; on anything but
 * STRATOS_OK the thread-local stratos_last_error() holds a message.
 */
#ifndef STRATOS_H
#define STRATOS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef STRATOS_API
#if defined(_WIN32)
#define STRATOS_API __declspec(dllimport)
#else
#define STRATOS_API
#endif
#endif

enum {
    STRATOS_OK = 0,
    STRATOS_E_IO = 1,          /* file missing or unreadable */
    STRATOS_E_PARSE = 2,       /* scenario carries error diagnostics */
    STRATOS_E_DOMAIN = 3,      /* engine rejected the operation */
    STRATOS_E_INVALID_ARG = 4, /* null handle, bad index, malformed input */
};

typedef struct stratos_scenario stratos_scenario;
typedef struct stratos_run stratos_run;

STRATOS_API const char* stratos_version(void);

/* Message for the most recent failure on this thread. Valid until the next
 * failing call; never NULL. */
STRATOS_API const char* stratos_last_error(void);

STRATOS_API void stratos_string_free(char* s);

/* ------------------------------------------------------------ scenarios */

/* Parsing failures still yield a handle so diagnostics can be inspected;
 * only I/O trouble or null arguments fail outright. */
STRATOS_API int stratos_scenario_load(const char* path, stratos_scenario** out);
STRATOS_API int stratos_scenario_from_text(const char* text, stratos_scenario** out);
STRATOS_API void stratos_scenario_free(stratos_scenario* sc);

/* 1 when the scenario parsed without error diagnostics. */
STRATOS_API int stratos_scenario_ok(const stratos_scenario* sc);
STRATOS_API int stratos_scenario_diagnostics_json(const stratos_scenario* sc, char** out);

/* Canonical text; reparsing it reproduces the same digest. */
STRATOS_API int stratos_scenario_print(const stratos_scenario* sc, char** out);
STRATOS_API int stratos_scenario_digest(const stratos_scenario* sc, char** out);
STRATOS_API int stratos_scenario_world_json(const stratos_scenario* sc, char** out);

/* ----------------------------------------------------------------- runs */

/* Executes the script on creation. Requires a scenario without error
 * diagnostics (STRATOS_E_PARSE otherwise). Step or assertion failures do
 * not fail construction; they show up in stratos_run_ok and the report. */
STRATOS_API int stratos_run_new(const stratos_scenario* sc, int keep_going, int trace,
                                stratos_run** out);
STRATOS_API void stratos_run_free(stratos_run* r);

/* 1 when every step executed and every assertion held. */
STRATOS_API int stratos_run_ok(const stratos_run* r);
STRATOS_API int stratos_run_report_json(const stratos_run* r, char** out);
STRATOS_API int stratos_run_history_json(const stratos_run* r, char** out);
STRATOS_API int stratos_run_final_state_json(const stratos_run* r, char** out);
STRATOS_API int stratos_run_final_digest(const stratos_run* r, char** out);

/* Evaluates a query against the final state of the run. words holds the
 * whitespace-split query, e.g. {"selfsourcing", "U", "S"}. The result is
 * the rendered value ("true", "V", "41/50", ...). */
STRATOS_API int stratos_run_query(const stratos_run* r, const char* const* words, size_t count,
                                  char** out);

/* ------------------------------------------------------------- adapters */

/* Candidate transformation kinds for the delta between the declared worlds
 * of two scenarios, as a JSON array of kind names. */
STRATOS_API int stratos_classify(const stratos_scenario* pre, const stratos_scenario* post,
                                 const char* unit, char** out);

/* input is the JSON form of a scoring input; the result carries the exact
 * rational value and the rule trace. */
STRATOS_API int stratos_score(const char* input_json, char** out);

/* Builds the transition plan for script step `step` of the scenario,
 * starting from the state the preceding steps produce. */
STRATOS_API int stratos_plan(const stratos_scenario* sc, size_t step, char** out);

/* Checks a plan (JSON, as produced by stratos_plan) against script step
 * `step`. The result object reports {"ok": bool, "diagnostics": [...]}. */
STRATOS_API int stratos_verify(const stratos_scenario* sc, size_t step, const char* plan_json,
                               char** out);

/* Validates and ranks all bids declared on the given lot. The result
 * object lists each bid with its validity and diagnostics, in ranked
 * order, together with the ranking rule applied. */
STRATOS_API int stratos_match(const stratos_scenario* sc, const char* lot, char** out);

#ifdef __cplusplus
}
#endif

#endif /* STRATOS_H */
