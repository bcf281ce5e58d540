#pragma once

#include <cstddef>
#include <vector>

namespace fhn {

/// Cell-centered uniform rectangular grid over [x_min,x_max] x [v_min,v_max].
/// Storage convention everywhere: row-major with the voltage index fastest,
/// flat index = i_x * nv + i_v.
struct Grid2D {
  int nx = 128;
  int nv = 128;
  double x_min = -4.0;
  double x_max = 4.0;
  double v_min = -3.0;
  double v_max = 3.5;

  double dx() const { return (x_max - x_min) / nx; }
  double dv() const { return (v_max - v_min) / nv; }
  double x_center(int i) const { return x_min + (i + 0.5) * dx(); }
  double v_center(int k) const { return v_min + (k + 0.5) * dv(); }
  double cell_area() const { return dx() * dv(); }
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv);
  }
  std::size_t index(int i, int k) const {
    return static_cast<std::size_t>(i) * nv + k;
  }

  bool same_as(const Grid2D& o) const;
  void validate() const; // throws std::invalid_argument on bad extents
};

/// Density sampled at cell centers; f.size() == grid.size().
struct Density {
  Grid2D grid;
  std::vector<double> f;
  double time = 0.0;

  Density() = default;
  explicit Density(const Grid2D& g) : grid(g), f(g.size(), 0.0) {}

  double& at(int i, int k) { return f[grid.index(i, k)]; }
  double at(int i, int k) const { return f[grid.index(i, k)]; }
};

struct Moments {
  double mean_x = 0.0;
  double mean_v = 0.0;
  double var_x = 0.0;
  double var_v = 0.0;
};

/// Compensated (Kahan) sum of a vector.
double kahan_sum(const std::vector<double>& vals);

/// Discrete mass: sum of cell values times cell area, compensated.
double mass(const Density& d);

/// Normalized first moment in v (the mean-voltage functional applied to
/// d rescaled to unit mass).
double mean_voltage(const Density& d);

/// Normalized first and second central moments in both coordinates.
Moments moments(const Density& d);

double min_value(const Density& d);

/// L1 distance: sum |a - b| times cell area; grids must match.
double l1_distance(const Density& a, const Density& b);

/// Rescale in place to unit mass. Throws if mass is not positive.
void normalize(Density& d);

/// Product Gaussian evaluated at cell centers, renormalized to unit discrete
/// mass. Variances must be positive.
Density gaussian_density(const Grid2D& g, double mean_x, double mean_v,
                         double var_x, double var_v);

} // namespace fhn
