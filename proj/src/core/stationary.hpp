#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/model.hpp"

namespace fhn {

/// Sparse generator Q of the semi-discrete evolution df/dt = Q f at frozen
/// coupling j, assembled from the same upwind face speeds and reflecting
/// diffusion stencil the time stepper uses — so steady states of the stepper
/// are exactly the null vectors of Q, for any stable dt. Column sums are
/// exactly zero (discrete mass conservation).
Eigen::SparseMatrix<double> generator_matrix(const Grid2D& g,
                                             const ModelParams& p, double j);

/// Discrete L¹ norm of Q f (cell-area weighted): ‖Q f‖₁, the stationarity
/// residual.
double generator_residual_l1(const Eigen::SparseMatrix<double>& Q,
                             const Density& f);

struct StationarySolution {
  Density G;
  double j = 0.0;              // mean voltage of G
  double residual_l1 = 0.0;    // ‖Q[j] G‖₁ at the returned j
  double fixed_point_gap = 0.0; // |mean_voltage(G) − j_input|
  int iterations = 0;          // outer fixed-point iterations
  double seed_j = 0.0;
  bool converged = false;
  std::vector<double> j_history; // outer iterates, seed first
};

/// Unique nonnegative mass-1 null vector of Q[j]: inverse power iteration
/// (Q − μI) g_next = g, renormalizing by signed mass each sweep. Falls back
/// to long-time integration at frozen j if the iteration stalls above the
/// success threshold. Throws NumericalError with the residual history if
/// both fail.
Density solve_linear_stationary(const Grid2D& g, const ModelParams& p,
                                double j, const StationaryConfig& cfg);

/// Self-consistent stationary states: damped scalar iteration
/// j ← (1−θ)j + θ·mean_voltage(G_j) from every seed, deduplicated by L¹
/// distance. Seeds: cfg.j_seeds, or if empty the stable deterministic
/// fixed-point voltages plus {−1, 0, 1}. Non-converged seeds are returned
/// with converged = false rather than thrown.
std::vector<StationarySolution> find_stationary(const Grid2D& g,
                                                const ModelParams& p,
                                                const StationaryConfig& cfg);

/// Distance table ‖G_ε − G₀‖_{L²(m)} for a list of connectivity strengths,
/// with a least-squares line through (ε, distance). G_ε is the solution whose
/// mean voltage lies closest to the ε=0 one.
struct EpsProximityRow {
  double eps = 0.0;
  double distance = 0.0;
  double j = 0.0;
};
struct EpsProximityScan {
  std::vector<EpsProximityRow> rows; // sorted by eps descending (input order)
  double slope = 0.0;                // fitted distance ≈ slope·ε + intercept
  double intercept = 0.0;
  bool monotone = false;             // nonincreasing toward ε = 0
};
EpsProximityScan epsilon_proximity_scan(const Grid2D& g, const ModelParams& p,
                                        const std::vector<double>& eps_list,
                                        const WeightParams& w,
                                        const StationaryConfig& cfg);

/// Minimum of G over interior cells more than `margin` cells away from every
/// boundary; passes when strictly positive.
struct PositivityReport {
  double min_value = 0.0;
  int i = 0, k = 0;
  double x = 0.0, v = 0.0;
  bool pass = false;
};
PositivityReport positivity_check(const Density& G, int margin = 2);

} // namespace fhn
