// Boundary translation for the public C interface: exceptions become error
// codes, C++ objects hide behind opaque pointers, and messages land in a
// thread-local buffer for fhn_last_error().
#include "fhn/fhn.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/runner.hpp"

struct fhn_config {
  fhn::Config cfg;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

/// Runs fn inside the standard exception-to-code translation.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return FHN_OK;
  } catch (const fhn::ConfigError& e) {
    return fail(FHN_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(FHN_ERR_CONFIG, e.what());
  } catch (const fhn::NumericalError& e) {
    return fail(FHN_ERR_NUMERICS, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FHN_ERR_NUMERICS, "out of memory");
  } catch (const std::exception& e) {
    return fail(FHN_ERR_NUMERICS, e.what());
  } catch (...) {
    return fail(FHN_ERR_NUMERICS, "unknown exception");
  }
}

int require(const void* p, const char* name) {
  if (p) return FHN_OK;
  return fail(FHN_ERR_CONFIG,
              (std::string(name) + " must not be NULL").c_str());
}

std::string opt_str(const char* s) { return s ? std::string(s) : std::string(); }

using Runner = std::vector<std::string> (*)(const fhn::Config&,
                                            const std::string&);

int run_with(Runner runner, const fhn_config* cfg, const char* out_dir) {
  if (int rc = require(cfg, "cfg")) return rc;
  if (int rc = require(out_dir, "out_dir")) return rc;
  return guarded([&] { runner(cfg->cfg, out_dir); });
}

} // namespace

extern "C" {

const char* fhn_version(void) { return fhn::kArtifactVersion; }

const char* fhn_last_error(void) { return g_last_error.c_str(); }

const char* fhn_preset_names(void) {
  static const std::string names = [] {
    std::string s;
    for (const std::string& n : fhn::preset_names()) {
      if (!s.empty()) s += ", ";
      s += n;
    }
    return s;
  }();
  return names.c_str();
}

int fhn_config_create(fhn_config** out) {
  if (int rc = require(out, "out")) return rc;
  *out = nullptr;
  return guarded([&] { *out = new fhn_config{fhn::Config{}}; });
}

int fhn_config_load(const char* path, const char* preset, fhn_config** out) {
  if (int rc = require(path, "path")) return rc;
  if (int rc = require(out, "out")) return rc;
  *out = nullptr;
  return guarded([&] {
    *out = new fhn_config{fhn::load_config_file(path, opt_str(preset))};
  });
}

int fhn_config_parse(const char* text, const char* preset, fhn_config** out) {
  if (int rc = require(text, "text")) return rc;
  if (int rc = require(out, "out")) return rc;
  *out = nullptr;
  return guarded([&] {
    *out = new fhn_config{fhn::parse_config(text, opt_str(preset))};
  });
}

int fhn_config_set(fhn_config* cfg, const char* key, const char* value) {
  if (int rc = require(cfg, "cfg")) return rc;
  if (int rc = require(key, "key")) return rc;
  if (int rc = require(value, "value")) return rc;
  return guarded([&] { fhn::set_config_key(cfg->cfg, key, value); });
}

int fhn_config_serialize(const fhn_config* cfg, char** out_text) {
  if (int rc = require(cfg, "cfg")) return rc;
  if (int rc = require(out_text, "out_text")) return rc;
  *out_text = nullptr;
  return guarded([&] {
    const std::string text = fhn::serialize_config(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_text = buf;
  });
}

void fhn_string_free(char* text) { std::free(text); }

void fhn_config_free(fhn_config* cfg) { delete cfg; }

int fhn_run_simulate_particles(const fhn_config* cfg, const char* out_dir) {
  return run_with(&fhn::run_simulate_particles, cfg, out_dir);
}

int fhn_run_solve_pde(const fhn_config* cfg, const char* out_dir) {
  return run_with(&fhn::run_solve_pde, cfg, out_dir);
}

int fhn_run_find_stationary(const fhn_config* cfg, const char* out_dir) {
  return run_with(&fhn::run_find_stationary, cfg, out_dir);
}

int fhn_run_spectrum(const fhn_config* cfg, const char* out_dir) {
  return run_with(&fhn::run_spectrum, cfg, out_dir);
}

int fhn_run_chaos_rate(const fhn_config* cfg, const char* out_dir) {
  return run_with(&fhn::run_chaos_rate, cfg, out_dir);
}

int fhn_run_regime_scan(const fhn_config* cfg, const char* out_dir) {
  return run_with(&fhn::run_regime_scan, cfg, out_dir);
}

} // extern "C"
