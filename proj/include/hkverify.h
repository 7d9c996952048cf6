/* C API of the hkverify engine.
 *
 * The core is C++; this header is the stable boundary used by the CLI and by
 * external callers. All objects are opaque handles created and destroyed
 * here; strings returned by the library stay owned by the object they came
 * from and live until that object is freed.
 *
 * Status codes double as process exit codes:
 *   0 pass, 1 fail, 2 indeterminate, 3 config error, 4 runtime error.
 */
#ifndef HKVERIFY_H
#define HKVERIFY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hkv_config hkv_config;
typedef struct hkv_report hkv_report;

typedef enum hkv_status {
    HKV_PASS = 0,
    HKV_FAIL = 1,
    HKV_INDETERMINATE = 2,
    HKV_CONFIG_ERROR = 3,
    HKV_RUNTIME_ERROR = 4
} hkv_status;

/* library version string, static storage */
const char* hkv_version(void);

/* Build a config from JSON text or file; NULL on error, with a message in
 * err (owned by the caller-provided buffer of err_len bytes, may be NULL). */
hkv_config* hkv_config_from_json(const char* json_text, char* err, size_t err_len);
hkv_config* hkv_config_from_file(const char* path, char* err, size_t err_len);
/* built-in defaults; smoke != 0 selects the reduced profile */
hkv_config* hkv_config_default(int smoke);
void hkv_config_free(hkv_config* cfg);

/* overrides applied after parsing */
void hkv_config_set_seed(hkv_config* cfg, uint64_t seed);
void hkv_config_set_out_dir(hkv_config* cfg, const char* dir);
void hkv_config_set_loop_file(hkv_config* cfg, const char* path);
/* canonical JSON text of the config; owned by cfg */
const char* hkv_config_json(hkv_config* cfg);

/* Run a command: "deform", "verify-realization", "twistor-verify",
 * "bundle-indices", "selftest". NULL on error with a message in err. */
hkv_report* hkv_run(const hkv_config* cfg, const char* command, char* err, size_t err_len);

/* aggregate status of a report */
hkv_status hkv_report_status(const hkv_report* rep);
/* JSON text (owned by rep); with_timing = 0 strips the timing object */
const char* hkv_report_json(const hkv_report* rep, int with_timing);
/* one line per check, human-readable (owned by rep) */
const char* hkv_report_text(const hkv_report* rep);
size_t hkv_report_num_checks(const hkv_report* rep);
void hkv_report_free(hkv_report* rep);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HKVERIFY_H */
