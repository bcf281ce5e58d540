#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <vector>

#include "core/config.hpp"
#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/model.hpp"

namespace fhn {

/// Discrete linearization of the nonlinear right-hand side N(f) = Q[j(f)] f
/// around a stationary density G: h ↦ Q h + u (wᵀ h), where
///   Q = generator at the frozen self-consistent coupling j* = mean_voltage(G),
///   u = the exact derivative of the upwind flux divergence with respect to
///       the coupling (orientation·eps times the flux-form v-derivative of G
///       with donors frozen at the stationary face signs; boundary faces are
///       speed-clamped, leaving one-sided differences there), and
///   w = the derivative of the mean-voltage functional: w_c = (v_c − j*)·ΔA.
/// u telescopes to total 0, so the full operator keeps exactly-zero column
/// sums; freezing the donor pattern makes the operator the Fréchet derivative
/// of the discrete N, which the τ-halving gradient check relies on.
struct LinearizedOperator {
  Grid2D grid;
  ModelParams params;
  double eps = 0.0;
  double j_star = 0.0;
  Eigen::SparseMatrix<double> Q; // sparse part, unweighted space
  Eigen::VectorXd u;             // rank-one column (zero when eps == 0)
  Eigen::VectorXd w;             // rank-one row weights
  Eigen::VectorXd m;             // diagonal similarity weight per cell
  Eigen::VectorXd mass_mode;     // G itself — the known null direction

  /// y = (Q + u wᵀ) x in the unweighted space.
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  /// y = Dm (Q + u wᵀ) Dm⁻¹ x — the operator conjugated into the weighted
  /// space whose Euclidean norm is the m-weighted L² norm.
  void apply_weighted(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
};

LinearizedOperator assemble_linearized(const Density& G, const ModelParams& p,
                                       const WeightParams& wp);

/// Discrete nonlinear right-hand side N(f) = Q[mean_voltage(f)] f as a flat
/// vector (gradient-check and cross-validation hook).
Eigen::VectorXd nonlinear_rhs(const Density& f, const ModelParams& p);

struct EigenMode {
  std::complex<double> value;
  double residual = 0.0; // ‖ℒ q − μ q‖₂ in the weighted space, ‖q‖ = 1
  bool is_mass_mode = false;
};

struct SpectralReport {
  std::vector<EigenMode> modes; // sorted by Re descending
  double mass_mode_defect = 0.0;
  double gap = 0.0;      // −max{Re μ : μ not the mass mode}
  bool gap_valid = false; // mass mode separated beyond solver tolerance
  double eps = 0.0;
  double shift = 0.0;       // shift-invert shift actually used
  double scale = 0.0;       // relaxation-rate scale from power iterations
  double operator_norm = 0.0; // ∞-norm bound of the weighted sparse part
  bool converged = false;
  int restarts = 0;
};

/// k rightmost eigenvalues of the linearized operator via shift-invert
/// Arnoldi in the weighted space. The rank-one part rides on the factorized
/// sparse part through the standard rank-one solve correction. Factorization
/// trouble retries with a doubled shift; running out of restarts returns the
/// best partial report with converged = false.
SpectralReport rightmost_eigenvalues(const LinearizedOperator& op, int k,
                                     double tol, const SpectralConfig& cfg);

struct DecayExperiment {
  double gap = 0.0;
  double fitted_rate = 0.0;
  bool window_found = false;
  double window_t_lo = 0.0, window_t_hi = 0.0;
  int window_points = 0;
  Table series; // columns t, distance
  std::string note;
};

/// Perturbs G by a mass-zero bump of given L²(m) amplitude, runs the full
/// nonlinear evolution, and fits the exponential decay of ‖f_t − G‖_{L²(m)}
/// over an automatically selected window (after the transient, above the
/// floor). No decaying window → window_found = false with the series
/// attached for inspection.
DecayExperiment predicted_vs_measured_decay(const Density& G,
                                            const ModelParams& p,
                                            const WeightParams& wp,
                                            double amplitude, double t_final,
                                            const SpectralConfig& cfg);

} // namespace fhn
