#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/config.hpp"
#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"

namespace fhn {

/// Paired (adaptation, voltage) states of N neurons plus the reproducible
/// counter-RNG coordinates (seed, trial lane, step count).
struct ParticleEnsemble {
  std::vector<double> x;
  std::vector<double> v;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t step_count = 0;

  std::size_t size() const { return v.size(); }
};

/// All-to-all mean-field coupling of strength j (J_ij = j/N), or an explicit
/// nonnegative N×N matrix (row-major).
struct CouplingSpec {
  enum class Kind { mean_field, matrix };
  Kind kind = Kind::mean_field;
  double j = 0.0;
  std::vector<double> j_matrix;

  static CouplingSpec mean_field(double j);
  static CouplingSpec matrix(std::vector<double> entries, std::size_t n);
  void validate(std::size_t n) const; // throws ConfigError
};

/// N i.i.d. draws from the initial law; reproducible given (seed, trial).
ParticleEnsemble init_ensemble(long n, const InitialLaw& law,
                               std::uint64_t seed, std::uint64_t trial = 0);

/// One Euler–Maruyama step of the interacting system. Mean-field coupling
/// evaluates the drift at the empirical mean voltage; matrix coupling adds the
/// row sums of J_ij. Aborts with NumericalError on non-finite states.
void step(ParticleEnsemble& ens, double dt, const ModelParams& p,
          const CouplingSpec& coupling);

struct SimulateOptions {
  double t_final = 5.0;
  double dt = 1e-3;
  int stride = 10;               // records every `stride` steps
  int snapshot_stride = 0;       // snapshots every N records; 0 = none
  const Grid2D* snapshot_grid = nullptr;
  std::vector<Density>* snapshots = nullptr;
};

/// Advances to t_final recording empirical moments per stride; returns the
/// time series with the particle-run column set.
Table simulate(ParticleEnsemble& ens, const ModelParams& p,
               const CouplingSpec& coupling, const SimulateOptions& opt);

/// Histogram density: count per cell / (N·Δx·Δv). Out-of-grid particles are
/// excluded from mass; their fraction is reported through out_fraction.
Density empirical_density(const ParticleEnsemble& ens, const Grid2D& grid,
                          double* out_fraction = nullptr);

struct ChaosResult {
  Table table;  // columns N, t, mse, stderr, trials
  double slope = 0.0;       // fitted d log mse(T) / d log N
  double intercept = 0.0;
};

/// Synchronous-coupling comparison between the N-particle system and N
/// independent copies of the limit SDE sharing initial draws and Brownian
/// increments; the copies read the mean voltage from j_of_t.
ChaosResult chaos_experiment(const std::vector<long>& n_list, double t_final,
                             double dt, int trials, const ModelParams& p,
                             const InitialLaw& law,
                             const std::function<double(double)>& j_of_t,
                             std::uint64_t seed, int record_points = 10);

} // namespace fhn
