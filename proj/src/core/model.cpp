#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhn {

void ModelParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
  if (!(b > 0.0)) throw std::invalid_argument("ModelParams: b must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("ModelParams: sigma must be > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("ModelParams: eps must be >= 0");
  if (coupling_orientation != 1 && coupling_orientation != -1)
    throw std::invalid_argument("ModelParams: coupling_orientation must be +1 or -1");
  if (!std::isfinite(lambda) || !std::isfinite(i0))
    throw std::invalid_argument("ModelParams: lambda and i0 must be finite");
}

void WeightParams::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("WeightParams: kappa must be > 0");
}

double drift_A(double x, double v, const ModelParams& p) {
  return p.a * x - p.b * v;
}

double drift_B(double x, double v, double j, const ModelParams& p) {
  const double cubic = v * (v - p.lambda) * (v - 1.0);
  return cubic + x - p.coupling_orientation * p.eps * (v - j) + p.i0;
}

double sde_drift_v(double x, double v, double j, const ModelParams& p) {
  double drift = -drift_B(x, v, j, p);
  if (p.paper_sde_signs) drift += 2.0 * p.i0;
  return drift;
}

double sde_drift_x(double x, double v, const ModelParams& p) {
  return -p.a * x + p.b * v;
}

double cubic_slope(double v, const ModelParams& p) {
  return 3.0 * v * v - 2.0 * (1.0 + p.lambda) * v + p.lambda;
}

double weight_M(double x, double v) {
  return 1.0 + 0.5 * x * x + 0.5 * v * v;
}

double log_weight_m(double x, double v, const WeightParams& w) {
  return w.kappa * (weight_M(x, v) - 1.0);
}

double weight_m(double x, double v, const WeightParams& w) {
  return std::exp(std::min(log_weight_m(x, v, w), kMaxWeightExponent));
}

double fixed_point_polynomial(double v, const ModelParams& p) {
  return v * (v - p.lambda) * (v - 1.0) + (p.b / p.a) * v + p.i0;
}

namespace {

// Real roots of v^3 + c2 v^2 + c1 v + c0 via the trigonometric/Cardano closed
// form, polished by Newton on the original polynomial.
std::vector<double> cubic_real_roots(double c2, double c1, double c0) {
  // depressed cubic t^3 + p t + q with v = t - c2/3
  const double shift = c2 / 3.0;
  const double pc = c1 - c2 * c2 / 3.0;
  const double qc = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const double disc = -4.0 * pc * pc * pc - 27.0 * qc * qc;

  std::vector<double> roots;
  if (disc > 0.0) {
    // three distinct real roots
    const double r = 2.0 * std::sqrt(-pc / 3.0);
    const double phi = std::acos(std::clamp(
        3.0 * qc / (pc * r), -1.0, 1.0)); // 3q/(p*r) = -cos(3 theta)
    for (int k = 0; k < 3; ++k)
      roots.push_back(r * std::cos((phi + 2.0 * M_PI * k) / 3.0) - shift);
  } else {
    // one real root (Cardano); the multiple-root boundary also lands here
    const double half_q = 0.5 * qc;
    const double s = std::sqrt(std::max(half_q * half_q + pc * pc * pc / 27.0, 0.0));
    const double u = std::cbrt(-half_q + s);
    const double w = std::cbrt(-half_q - s);
    roots.push_back(u + w - shift);
    if (disc == 0.0 && (pc != 0.0 || qc != 0.0))
      roots.push_back(-0.5 * (u + w) - shift); // double root of the degenerate case
  }

  // polish and deduplicate
  auto poly = [&](double v) { return ((v + c2) * v + c1) * v + c0; };
  auto dpoly = [&](double v) { return (3.0 * v + 2.0 * c2) * v + c1; };
  std::vector<double> out;
  for (double v : roots) {
    for (int it = 0; it < 8; ++it) {
      const double d = dpoly(v);
      if (d == 0.0) break;
      const double step = poly(v) / d;
      v -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(v))) break;
    }
    bool dup = false;
    for (double u : out)
      if (std::abs(u - v) < 1e-9 * (1.0 + std::abs(v))) dup = true;
    if (!dup) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

std::vector<FixedPoint> deterministic_fixed_points(const ModelParams& p) {
  p.validate();
  // v(v-lambda)(v-1) + (b/a) v + i0 = v^3 - (1+lambda)v^2 + (lambda + b/a)v + i0
  const auto roots =
      cubic_real_roots(-(1.0 + p.lambda), p.lambda + p.b / p.a, p.i0);

  std::vector<FixedPoint> out;
  for (double v : roots) {
    FixedPoint fp;
    fp.v = v;
    fp.x = (p.b / p.a) * v;
    // Jacobian of (x' = -a x + b v, v' = -(cubic + x + i0)) at the root:
    // [[-a, b], [-1, -c]] with c = cubic_slope(v).
    const double c = cubic_slope(v, p);
    const double tr = -p.a - c;
    const double det = p.a * c + p.b;
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      fp.eig_re[0] = 0.5 * (tr - s);
      fp.eig_re[1] = 0.5 * (tr + s);
      fp.eig_im[0] = fp.eig_im[1] = 0.0;
    } else {
      const double s = std::sqrt(-disc);
      fp.eig_re[0] = fp.eig_re[1] = 0.5 * tr;
      fp.eig_im[0] = -0.5 * s;
      fp.eig_im[1] = 0.5 * s;
    }
    const bool complex_pair = disc < 0.0;
    if (det < 0.0) {
      fp.tag = "saddle";
      fp.stable = false;
    } else if (tr < 0.0) {
      fp.tag = complex_pair ? "stable-focus" : "stable-node";
      fp.stable = true;
    } else if (tr > 0.0) {
      fp.tag = complex_pair ? "unstable-focus" : "unstable-node";
      fp.stable = false;
    } else {
      fp.tag = "center";
      fp.stable = false;
    }
    out.push_back(fp);
  }
  return out;
}

} // namespace fhn
