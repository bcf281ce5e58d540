#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "core/diagnostics.hpp"
#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/model.hpp"
#include "core/particle.hpp"

namespace fhn {

/// Grid density realizing an initial law: product Gaussian, uniform
/// rectangle (clipped to the domain), or a single-cell spike at the nearest
/// cell center. Unit mass on the grid.
Density density_from_law(const InitialLaw& law, const Grid2D& g);

/// Connectivity-strength scan: for each strength in cfg.j_list, runs particle
/// ensembles started near each deterministic attractor across several seeds
/// and classifies the long-run mean-voltage behavior.
struct RegimeSeedOutcome {
  int seed_index = 0;
  RegimeDecision decision;
};

struct RegimeRow {
  double j = 0.0; // connectivity strength for this row
  RegimeLabel majority = RegimeLabel::inconclusive;
  int agree = 0;          // seeds voting the majority label
  int seeds = 0;
  std::vector<RegimeSeedOutcome> outcomes;
  Table trace; // seed-0 traces: t, mean_v_a, mean_v_b (for plots)
};

struct RegimeScanResult {
  std::vector<RegimeRow> rows;
  std::vector<FixedPoint> attractors; // the initialization points used
};

RegimeScanResult regime_scan(const ModelParams& base,
                             const RegimeScanConfig& cfg, std::uint64_t seed);

/// Propagation-of-chaos rate: the limit-equation copies need the
/// deterministic coupling path j(t), taken from a frozen (t, j) table when
/// cfg.chaos.j_file is set and otherwise derived by solving the mean-field
/// equation from the same initial law.
struct ChaosRateOutcome {
  ChaosResult result;
  Table j_table; // columns t, j — the path handed to the limit copies
  bool j_from_file = false;
};

ChaosRateOutcome chaos_rate_experiment(const Config& cfg);

/// Independent routes to the same frozen-coupling steady state: the algebraic
/// eigen-route and plain long-time integration from a uniform start. Their L¹
/// distance is the cross-validation figure.
struct TwoRouteCheck {
  Density algebraic;
  Density longtime;
  double l1_between = 0.0;
  double residual_algebraic = 0.0; // ‖Q g‖₁ per route
  double residual_longtime = 0.0;
  double longtime_t = 0.0;
};

TwoRouteCheck stationary_two_routes(const Grid2D& g, const ModelParams& p,
                                    double j, const StationaryConfig& cfg);

} // namespace fhn
