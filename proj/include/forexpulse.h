/* forexpulse C API: batch analytics for announcement-keyed FX event studies
 * driven by tweet stance, with user segmentation and deletion forensics.
 *
 * Every function is safe to call from any thread; error text is thread-local.
 * Functions returning fxp_status leave outputs untouched on failure and store
 * a human-readable message retrievable with fxp_last_error().
 */
#ifndef FOREXPULSE_H
#define FOREXPULSE_H

#include <stdint.h>

#if defined(_WIN32)
#  ifdef FXP_BUILDING
#    define FXP_API __declspec(dllexport)
#  else
#    define FXP_API __declspec(dllimport)
#  endif
#else
#  define FXP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fxp_status {
  FXP_OK = 0,
  FXP_ERR_INVALID_ARGUMENT = 1, /* bad parameter, unknown key, malformed value */
  FXP_ERR_IO = 2,               /* missing or unwritable file */
  FXP_ERR_PARSE = 3,            /* malformed input syntax */
  FXP_ERR_DATA = 4,             /* well-formed input violating a data rule */
  FXP_ERR_NUMERIC = 5,          /* numerical degeneracy in a computation */
  FXP_ERR_INTERNAL = 6
} fxp_status;

/* Matches the core ordering: Sell < Hold < Buy. */
typedef enum fxp_stance { FXP_STANCE_SELL = 0, FXP_STANCE_HOLD = 1, FXP_STANCE_BUY = 2 } fxp_stance;

typedef struct fxp_config fxp_config; /* pipeline settings, opaque */
typedef struct fxp_model fxp_model;   /* trained stance classifier, opaque */

FXP_API const char* fxp_version(void);

/* Message for the most recent failure on this thread; never NULL. */
FXP_API const char* fxp_last_error(void);

/* Shell convention: 0 success, 1 usage or I/O trouble, 2 bad data. */
FXP_API int fxp_status_exit_code(fxp_status s);

/* Frees strings returned through char** outputs. */
FXP_API void fxp_string_free(char* s);

/* --- configuration ------------------------------------------------------ */

FXP_API fxp_config* fxp_config_new(void); /* defaults; NULL only on allocation failure */
FXP_API void fxp_config_free(fxp_config* cfg);

/* Merges "key = value" lines (# comments, [patterns] and [lexicon] sections). */
FXP_API fxp_status fxp_config_load_file(fxp_config* cfg, const char* path);

/* Sets one key ("tweets", "dim", "theta", ...); unknown keys are errors. */
FXP_API fxp_status fxp_config_set(fxp_config* cfg, const char* key, const char* value);

/* Renders the full effective configuration; free *out with fxp_string_free. */
FXP_API fxp_status fxp_config_render(const fxp_config* cfg, char** out);

/* --- pipeline ----------------------------------------------------------- */

/* Runs one subcommand: ingest, train, eval, classify, groups, event-study,
 * deletions, report or synth. Outputs land under the configured out dir. */
FXP_API fxp_status fxp_run(const fxp_config* cfg, const char* subcommand);

/* --- direct model access ------------------------------------------------ */

FXP_API fxp_status fxp_model_load(const char* path, fxp_model** out);
FXP_API void fxp_model_free(fxp_model* m);
FXP_API uint32_t fxp_model_dim(const fxp_model* m); /* 0 for NULL */
FXP_API fxp_status fxp_model_classify_text(const fxp_model* m, const char* text, fxp_stance* out);

/* --- small utilities exposed for integration ---------------------------- */

/* Levenshtein distance over UTF-8 scalar values; negative on NULL input. */
FXP_API int64_t fxp_edit_distance(const char* a, const char* b);

/* 1 when the text contains a trading-recommendation keyword, else 0. */
FXP_API int fxp_is_recommendation(const char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FOREXPULSE_H */
