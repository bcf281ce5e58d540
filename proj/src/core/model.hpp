// Model coefficients, drift fields, weight/moment functions, and the
// deterministic fixed-point analysis. Every other module consumes these
// definitions, so sign conventions live in exactly one place:
//
//   A(x,v)        = a*x - b*v                       (adaptation drift field)
//   B(x,v; j)     = v(v-lambda)(v-1) + x - s*eps*(v-j) + i0
//   PDE           = d/dt f = d/dx(A f) + d/dv(B f) + D d2/dv2 f,  D = sigma^2/2
//   SDE           = dv = -B dt + sigma dW,  dx = -A dt
//
// so the particle system and the PDE describe the same dynamics by
// construction. s = coupling_orientation (+1 default) selects the sign with
// which the mean-voltage coupling enters B; see the field comment.
#pragma once

#include <string>
#include <vector>

namespace fhn {

struct ModelParams {
  double a = 1.0;      // adaptation relaxation rate, > 0
  double b = 1.0;      // adaptation-voltage coupling, > 0
  double lambda = 0.2; // cubic shape parameter
  double i0 = 0.0;     // constant input current
  double eps = 0.0;    // averaged connectivity strength, >= 0
  double sigma = 0.5;  // voltage noise amplitude, > 0

  // Orientation of the mean-voltage coupling term inside B.
  // +1 reproduces the published mean-field form literally: the SDE voltage
  //    drift carries +eps*(v - j), pushing voltages away from the mean.
  // -1 is the electrical gap-junction orientation, -eps*(v - j), pushing
  //    voltages toward the mean. Small-connectivity behavior is insensitive
  //    to the choice; the strong-coupling regime phenomenology (collective
  //    oscillation, attractor locking) requires -1, which the regime-scan
  //    preset selects. All modules honor the same orientation, so particle
  //    and PDE runs always remain mutually consistent.
  int coupling_orientation = +1;

  // When set, particle simulations use the literal sign conventions of the
  // original network system (input current enters with +i0 in the voltage
  // SDE instead of the -i0 implied by the PDE form). PDE-side code ignores
  // the flag, so enabling it deliberately breaks particle/PDE agreement;
  // it exists for side-by-side comparison only.
  bool paper_sde_signs = false;

  double diffusion() const { return 0.5 * sigma * sigma; }

  // Throws std::invalid_argument naming the offending field when the
  // positivity/sign constraints are violated.
  void validate() const;
};

struct WeightParams {
  double kappa = 1.0; // exponential rate of the confining weight, > 0

  void validate() const;
};

// Largest exponent allowed inside weight_m: exp(690) < 1e300, so weighted
// quadratures clip rather than overflow.
inline constexpr double kMaxWeightExponent = 690.0;

double drift_A(double x, double v, const ModelParams& p);
double drift_B(double x, double v, double j, const ModelParams& p);

// Voltage drift of the particle SDE: -drift_B (see header comment), with the
// paper_sde_signs input-current variant applied when requested.
double sde_drift_v(double x, double v, double j, const ModelParams& p);

// Adaptation drift of the particle SDE: -A = -a*x + b*v.
double sde_drift_x(double x, double v, const ModelParams& p);

// d/dv of the cubic v(v-lambda)(v-1): 3v^2 - 2(1+lambda)v + lambda.
double cubic_slope(double v, const ModelParams& p);

double weight_M(double x, double v);
double weight_m(double x, double v, const WeightParams& w);
// log of weight_m before clipping; callers that multiply by m should work in
// log space when this exceeds kMaxWeightExponent.
double log_weight_m(double x, double v, const WeightParams& w);

struct FixedPoint {
  double v = 0.0;
  double x = 0.0;
  double eig_re[2] = {0.0, 0.0}; // Jacobian eigenvalues of the noiseless ODE
  double eig_im[2] = {0.0, 0.0};
  bool stable = false;
  std::string tag; // "stable-node", "stable-focus", "saddle", ...
};

// All equilibria of the noiseless, uncoupled ODE: real roots of
// v(v-lambda)(v-1) + (b/a) v + i0 = 0 with x = (b/a) v, each classified by
// the eigenvalues of the 2x2 Jacobian. Sorted by v ascending.
std::vector<FixedPoint> deterministic_fixed_points(const ModelParams& p);

// Value of the fixed-point root polynomial at v (for residual checks).
double fixed_point_polynomial(double v, const ModelParams& p);

} // namespace fhn
