#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/model.hpp"

namespace fhn {

/// Shared run window: final time, time step (0 = automatic where supported),
/// and record stride in steps.
struct RunConfig {
  double t_final = 5.0;
  double dt = 1e-3;
  int stride = 10;
};

enum class InitKind { gaussian, uniform, point };

/// Initial law for particle ensembles and PDE initial densities.
struct InitialLaw {
  InitKind kind = InitKind::gaussian;
  double mean_x = 0.0, mean_v = 0.0;
  double var_x = 0.25, var_v = 0.25; // gaussian (diagonal covariance)
  double x_lo = -1.0, x_hi = 1.0;    // uniform rectangle
  double v_lo = -1.0, v_hi = 1.0;
  double x0 = 0.0, v0 = 0.0;         // point
  void validate() const;
};

struct ParticleConfig {
  long n = 2000;
  InitialLaw init;
};

struct PdeConfig {
  double cfl_safety = 0.9;
  double boundary_mass_tol = 1e-8;
  double vacuum_floor = 1e-30;
  double mass_renorm_warn = 1e-6;
};

struct StationaryConfig {
  std::vector<double> j_seeds;   // empty = auto (stable fixed points + {-1,0,1})
  double damping = 0.5;
  double j_tol = 1e-9;
  int max_outer = 80;
  double dedup_l1 = 1e-3;
  double power_mu = 1e-8;        // inverse-iteration shift
  double power_tol = 1e-12;      // sweep target for the inverse iteration
  int power_max_sweeps = 12;
  double residual_tol = 1e-9;    // success threshold on the stationary residual
  double longtime_chunk = 20.0;  // fallback integration chunk length
  double longtime_drift_tol = 1e-7;
  double longtime_t_max = 400.0;
};

struct SpectralConfig {
  int n_eigs = 8;
  int krylov_dim = 60;
  int max_restarts = 40;
  double tol = 1e-9;
  double shift_scale = 0.05; // shift = scale × power-iteration estimate
  int power_iters = 20;
  double perturbation_l2m = 1e-2; // decay-experiment amplitude
};

struct ChaosConfig {
  std::vector<long> n_list = {100, 200, 400, 800, 1600, 3200};
  int trials = 48;
  double t_final = 1.0;
  double dt = 1e-3;
  int record_points = 10; // α(t) rows per N
  std::string j_file;     // optional frozen reference (t, j) table; empty = PDE
};

struct RegimeScanConfig {
  std::vector<double> j_list = {0.1, 1.0, 3.0};
  int seeds = 5;
  long n = 2000;
  double t_final = 250.0;
  double dt = 2e-3;
  int stride = 25;
  double init_jitter = 0.05; // standard deviation around each attractor
  RegimeClassifierConfig classifier;
};

struct EpsScanConfig {
  std::vector<double> eps_list = {0.4, 0.2, 0.1, 0.05};
};

/// Full run configuration; sections map 1:1 onto the config-file layout.
struct Config {
  std::string preset; // applied before explicit keys; may be empty
  std::uint64_t seed = 12345;
  int threads = 0; // 0 = all available cores

  ModelParams model;
  WeightParams weight;
  Grid2D grid;
  RunConfig run;
  ParticleConfig particle;
  PdeConfig pde;
  StationaryConfig stationary;
  SpectralConfig spectral;
  ChaosConfig chaos;
  RegimeScanConfig regime;
  EpsScanConfig eps_scan;

  void validate() const; // throws ConfigError
};

/// Named parameter presets recorded in the default config:
///   excitable          — single stable rest state at the origin
///   bistable           — two stable states, saddle between (regime-scan base;
///                        selects the gap-junction coupling orientation)
///   small-connectivity — excitable with eps = 0.2
std::vector<std::string> preset_names();
void apply_preset(Config& c, const std::string& name); // throws ConfigError

/// Parse `key = value` / `[section]` text. Unknown keys or sections, bad
/// numbers, and unknown presets throw ConfigError. A `preset = NAME` line (or
/// the preset argument, which wins) is applied before explicit keys so that
/// file keys override preset values.
Config parse_config(const std::string& text,
                    const std::string& preset_override = "");
Config load_config_file(const std::string& path,
                        const std::string& preset_override = "");

/// Assign one dotted key ("model.eps", "seed", ...) from its textual value;
/// the key "preset" applies the named preset. Unknown keys or bad values
/// throw ConfigError; the result is re-validated.
void set_config_key(Config& c, const std::string& key,
                    const std::string& value);

/// Canonical serialization (all keys, fixed order, full precision). Reparsing
/// it reproduces the same Config.
std::string serialize_config(const Config& c);

/// FNV-1a 64-bit hash of the canonical serialization, hex-encoded.
std::string config_hash(const Config& c);

} // namespace fhn
