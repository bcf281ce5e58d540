/* Public C interface of the mean-field neuron-network toolkit.
 *
 * Usage pattern:
 *   fhn_config* cfg = NULL;
 *   if (fhn_config_load("run.cfg", NULL, &cfg) != FHN_OK) { ... }
 *   fhn_config_set(cfg, "seed", "7");
 *   int rc = fhn_run_solve_pde(cfg, "out/");
 *   if (rc != FHN_OK) fprintf(stderr, "%s\n", fhn_last_error());
 *   fhn_config_free(cfg);
 *
 * Every function returns FHN_OK (0) on success, FHN_ERR_CONFIG (2) for
 * invalid configuration or input files, and FHN_ERR_NUMERICS (3) for
 * numerical aborts during compute. On failure fhn_last_error() holds a
 * human-readable message (thread-local; valid until the next failing call
 * on the same thread). Runner functions write their data files, plots, and
 * a manifest into out_dir, creating it if needed.
 */
#ifndef FHN_FHN_H
#define FHN_FHN_H

#ifdef __cplusplus
extern "C" {
#endif

#ifndef FHN_API
#if defined(_WIN32)
#define FHN_API __declspec(dllexport)
#else
#define FHN_API __attribute__((visibility("default")))
#endif
#endif

#define FHN_OK 0
#define FHN_ERR_CONFIG 2
#define FHN_ERR_NUMERICS 3

/* Opaque run configuration (model, grid, run window, experiment blocks). */
typedef struct fhn_config fhn_config;

/* Library semantic version, e.g. "1.0.0". Static storage. */
FHN_API const char* fhn_version(void);

/* Message from the most recent failing call on this thread; empty string if
 * none. The pointer stays valid until the next failing call on the thread. */
FHN_API const char* fhn_last_error(void);

/* Comma-separated list of recognized preset names. Static storage. */
FHN_API const char* fhn_preset_names(void);

/* Fresh configuration with built-in defaults. */
FHN_API int fhn_config_create(fhn_config** out);

/* Parse a `key = value` / `[section]` config file. preset (may be NULL)
 * overrides any `preset =` line in the file and is applied before explicit
 * keys. */
FHN_API int fhn_config_load(const char* path, const char* preset, fhn_config** out);

/* Same, from an in-memory string. */
FHN_API int fhn_config_parse(const char* text, const char* preset, fhn_config** out);

/* Assign one dotted key, e.g. fhn_config_set(c, "model.eps", "0.2");
 * the key "preset" applies the named preset. */
FHN_API int fhn_config_set(fhn_config* cfg, const char* key, const char* value);

/* Canonical full-precision serialization; free with fhn_string_free. */
FHN_API int fhn_config_serialize(const fhn_config* cfg, char** out_text);

FHN_API void fhn_string_free(char* text);
FHN_API void fhn_config_free(fhn_config* cfg);

/* Experiment runners (one per CLI subcommand). */
FHN_API int fhn_run_simulate_particles(const fhn_config* cfg, const char* out_dir);
FHN_API int fhn_run_solve_pde(const fhn_config* cfg, const char* out_dir);
FHN_API int fhn_run_find_stationary(const fhn_config* cfg, const char* out_dir);
FHN_API int fhn_run_spectrum(const fhn_config* cfg, const char* out_dir);
FHN_API int fhn_run_chaos_rate(const fhn_config* cfg, const char* out_dir);
FHN_API int fhn_run_regime_scan(const fhn_config* cfg, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FHN_FHN_H */
