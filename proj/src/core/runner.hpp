#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"

namespace fhn {

/// One experiment end to end: compute, write the delimited data files, SVG
/// plots, and a manifest (config hash, seed, versions, wall time, file list)
/// into out_dir (created if missing). Returns the files written, relative to
/// out_dir, manifest last. Errors follow the module contracts: ConfigError
/// for bad inputs, NumericalError for compute aborts.
std::vector<std::string> run_simulate_particles(const Config& cfg,
                                                const std::string& out_dir);
std::vector<std::string> run_solve_pde(const Config& cfg,
                                       const std::string& out_dir);
std::vector<std::string> run_find_stationary(const Config& cfg,
                                             const std::string& out_dir);
std::vector<std::string> run_spectrum(const Config& cfg,
                                      const std::string& out_dir);
std::vector<std::string> run_chaos_rate(const Config& cfg,
                                        const std::string& out_dir);
std::vector<std::string> run_regime_scan(const Config& cfg,
                                         const std::string& out_dir);

} // namespace fhn
