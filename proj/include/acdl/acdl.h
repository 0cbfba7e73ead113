/* acdl: GAN-augmented accident-detection pipeline, C API.
 *
 * The library is driven through an opaque configuration handle: create one,
 * optionally load a config file, apply key=value overrides (flags win over
 * the file), then run pipeline commands against it. Every function returns
 * ACDL_OK, ACDL_ERROR_RUNTIME, or ACDL_ERROR_USAGE; the message for the most
 * recent failure on the calling thread is available via acdl_last_error().
 */

#ifndef ACDL_H
#define ACDL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ACDL_API __declspec(dllexport)
#else
#define ACDL_API __attribute__((visibility("default")))
#endif

typedef enum acdl_status {
    ACDL_OK = 0,
    ACDL_ERROR_RUNTIME = 1, /* training diverged, I/O failure, bad file contents */
    ACDL_ERROR_USAGE = 2    /* unknown key, bad value, missing prerequisite artifact */
} acdl_status;

typedef struct acdl_config acdl_config;

ACDL_API const char* acdl_version_string(void);

/* Fresh configuration with every key at its default. Never fails. */
ACDL_API acdl_config* acdl_config_create(void);
ACDL_API void acdl_config_destroy(acdl_config* config);

/* Applies a config file (key = value lines, '#' comments, [section]
 * headers). Errors carry the offending line number. */
ACDL_API acdl_status acdl_config_load_file(acdl_config* config, const char* path);

/* Sets one key from its string form; unknown keys fail with a suggestion. */
ACDL_API acdl_status acdl_config_set(acdl_config* config, const char* key, const char* value);

/* Copies the current value of `key` into buf (NUL-terminated, truncating).
 * Returns ACDL_ERROR_USAGE for unknown keys. */
ACDL_API acdl_status acdl_config_get(const acdl_config* config, const char* key, char* buf,
                                     size_t buflen);

/* Message for the most recent failure on this thread ("" when none). The
 * pointer stays valid until the next failing acdl_* call on the thread. */
ACDL_API const char* acdl_last_error(void);

/* Pipeline commands. Each writes its artifacts under the configured output
 * directory and streams progress to stdout. */
ACDL_API acdl_status acdl_run_synth_data(const acdl_config* config);
ACDL_API acdl_status acdl_run_preprocess(const acdl_config* config);
ACDL_API acdl_status acdl_run_train_gan(const acdl_config* config);
ACDL_API acdl_status acdl_run_augment(const acdl_config* config);
ACDL_API acdl_status acdl_run_train(const acdl_config* config);
ACDL_API acdl_status acdl_run_evaluate(const acdl_config* config);
ACDL_API acdl_status acdl_run_report(const acdl_config* config);

#ifdef __cplusplus
}
#endif

#endif /* ACDL_H */
