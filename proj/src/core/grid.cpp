#include "core/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fhn {

bool Grid2D::same_as(const Grid2D& o) const {
  return nx == o.nx && nv == o.nv && x_min == o.x_min && x_max == o.x_max &&
         v_min == o.v_min && v_max == o.v_max;
}

void Grid2D::validate() const {
  if (nx < 4 || nv < 4)
    throw std::invalid_argument("Grid2D: nx and nv must be >= 4");
  if (!(x_max > x_min) || !(v_max > v_min))
    throw std::invalid_argument("Grid2D: empty extent");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(v_min) || !std::isfinite(v_max))
    throw std::invalid_argument("Grid2D: extents must be finite");
}

double kahan_sum(const std::vector<double>& vals) {
  double s = 0.0, c = 0.0;
  for (double x : vals) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double mass(const Density& d) { return kahan_sum(d.f) * d.grid.cell_area(); }

double mean_voltage(const Density& d) {
  double s = 0.0, c = 0.0, m = 0.0, cm = 0.0;
  for (int i = 0; i < d.grid.nx; ++i)
    for (int k = 0; k < d.grid.nv; ++k) {
      const double fv = d.at(i, k);
      double y = fv - cm;
      double t = m + y;
      cm = (t - m) - y;
      m = t;
      y = fv * d.grid.v_center(k) - c;
      t = s + y;
      c = (t - s) - y;
      s = t;
    }
  if (m == 0.0) return 0.0;
  return s / m;
}

Moments moments(const Density& d) {
  double m = 0.0, sx = 0.0, sv = 0.0, sxx = 0.0, svv = 0.0;
  for (int i = 0; i < d.grid.nx; ++i) {
    const double x = d.grid.x_center(i);
    for (int k = 0; k < d.grid.nv; ++k) {
      const double v = d.grid.v_center(k);
      const double fv = d.at(i, k);
      m += fv;
      sx += fv * x;
      sv += fv * v;
      sxx += fv * x * x;
      svv += fv * v * v;
    }
  }
  Moments out;
  if (m == 0.0) return out;
  out.mean_x = sx / m;
  out.mean_v = sv / m;
  out.var_x = std::max(sxx / m - out.mean_x * out.mean_x, 0.0);
  out.var_v = std::max(svv / m - out.mean_v * out.mean_v, 0.0);
  return out;
}

double min_value(const Density& d) {
  double mn = std::numeric_limits<double>::infinity();
  for (double x : d.f) mn = std::min(mn, x);
  return mn;
}

double l1_distance(const Density& a, const Density& b) {
  if (!a.grid.same_as(b.grid))
    throw std::invalid_argument("l1_distance: grids differ");
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i) {
    const double y = std::abs(a.f[i] - b.f[i]) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s * a.grid.cell_area();
}

void normalize(Density& d) {
  const double m = mass(d);
  if (!(m > 0.0)) throw std::runtime_error("normalize: nonpositive mass");
  for (double& x : d.f) x /= m;
}

Density gaussian_density(const Grid2D& g, double mean_x, double mean_v,
                         double var_x, double var_v) {
  g.validate();
  if (!(var_x > 0.0) || !(var_v > 0.0))
    throw std::invalid_argument("gaussian_density: variances must be > 0");
  Density d(g);
  for (int i = 0; i < g.nx; ++i) {
    const double ex = g.x_center(i) - mean_x;
    for (int k = 0; k < g.nv; ++k) {
      const double ev = g.v_center(k) - mean_v;
      d.at(i, k) =
          std::exp(-0.5 * (ex * ex / var_x + ev * ev / var_v));
    }
  }
  normalize(d);
  return d;
}

} // namespace fhn
