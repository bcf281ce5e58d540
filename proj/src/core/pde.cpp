#include "core/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "core/errors.hpp"

namespace fhn {

namespace {

constexpr double kCflSlack = 1.0 + 1e-12;    // tolerate rounding in dt checks
constexpr double kNegativityScale = 1e-14;   // rounding allowance vs max f

std::size_t xface_index(const Grid2D& g, int i, int k) {
  return static_cast<std::size_t>(i) * g.nv + k;
}

std::size_t vface_index(const Grid2D& g, int i, int k) {
  return static_cast<std::size_t>(i) * (g.nv + 1) + k;
}

struct AxisMax {
  double speed = 0.0;
  int face_i = 0;
  int face_k = 0;
};

AxisMax max_x_speed(const Grid2D& g, const std::vector<double>& ux) {
  AxisMax m;
  for (int i = 1; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      const double s = std::abs(ux[xface_index(g, i, k)]);
      if (s > m.speed) m = {s, i, k};
    }
  }
  return m;
}

AxisMax max_v_speed(const Grid2D& g, const std::vector<double>& uv) {
  AxisMax m;
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 1; k < g.nv; ++k) {
      const double s = std::abs(uv[vface_index(g, i, k)]);
      if (s > m.speed) m = {s, i, k};
    }
  }
  return m;
}

/// Largest simultaneous outflow rate of any single cell (1/time units).
double max_outflow_rate(const Grid2D& g, const std::vector<double>& ux,
                        const std::vector<double>& uv) {
  const double inv_dx = 1.0 / g.dx();
  const double inv_dv = 1.0 / g.dv();
  double worst = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      const double ul = ux[xface_index(g, i, k)];
      const double ur = ux[xface_index(g, i + 1, k)];
      const double ub = uv[vface_index(g, i, k)];
      const double ut = uv[vface_index(g, i, k + 1)];
      const double rate = (std::max(-ul, 0.0) + std::max(ur, 0.0)) * inv_dx +
                          (std::max(-ub, 0.0) + std::max(ut, 0.0)) * inv_dv;
      worst = std::max(worst, rate);
    }
  }
  return worst;
}

[[noreturn]] void throw_cfl(const Grid2D& g, double dt, char axis,
                            const AxisMax& m, double bound,
                            const char* phase) {
  std::ostringstream os;
  const double pos = (axis == 'x') ? g.x_min + m.face_i * g.dx()
                                   : g.v_min + m.face_k * g.dv();
  os << phase << ": dt = " << dt
     << " violates the advective stability bound dt <= " << bound
     << " (limiting " << axis << "-face between cells "
     << (axis == 'x' ? m.face_i - 1 : m.face_k - 1) << " and "
     << (axis == 'x' ? m.face_i : m.face_k) << " at " << axis << " = " << pos
     << ", speed " << m.speed << "); reduce dt or refine the grid";
  throw NumericalError(os.str());
}

void check_axis_cfl(const Grid2D& g, double dt, double safety,
                    const AxisMax& mx, const AxisMax& mv, const char* phase) {
  if (mx.speed > 0.0) {
    const double bound = safety * g.dx() / mx.speed;
    if (dt > bound * kCflSlack) throw_cfl(g, dt, 'x', mx, bound, phase);
  }
  if (mv.speed > 0.0) {
    const double bound = safety * g.dv() / mv.speed;
    if (dt > bound * kCflSlack) throw_cfl(g, dt, 'v', mv, bound, phase);
  }
}

/// Donor-cell transport update, gather form: every term added to a cell is a
/// product of nonnegative factors, so the update preserves signs in floating
/// point as long as dt stays below the outflow bound.
void transport_gather(Density& f, double dt, const std::vector<double>& ux,
                      const std::vector<double>& uv,
                      std::vector<double>& scratch) {
  const Grid2D& g = f.grid;
  const double cdx = dt / g.dx();
  const double cdv = dt / g.dv();
  scratch.resize(g.size());
  const std::vector<double>& fo = f.f;
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      const std::size_t c = g.index(i, k);
      const double ul = ux[xface_index(g, i, k)];
      const double ur = ux[xface_index(g, i + 1, k)];
      const double ub = uv[vface_index(g, i, k)];
      const double ut = uv[vface_index(g, i, k + 1)];
      const double out = (std::max(-ul, 0.0) + std::max(ur, 0.0)) * cdx +
                         (std::max(-ub, 0.0) + std::max(ut, 0.0)) * cdv;
      double in = 0.0;
      if (ul > 0.0) in += cdx * ul * fo[c - static_cast<std::size_t>(g.nv)];
      if (ur < 0.0) in -= cdx * ur * fo[c + static_cast<std::size_t>(g.nv)];
      if (ub > 0.0) in += cdv * ub * fo[c - 1];
      if (ut < 0.0) in -= cdv * ut * fo[c + 1];
      scratch[c] = fo[c] * (1.0 - out) + in;
    }
  }
  f.f.swap(scratch);
}

/// Backward-Euler diffusion in v: (I - r L) f = rhs row by row, where L is
/// the zero-flux (reflecting) 1D Laplacian scaled by 1/dv². The tridiagonal
/// factorization is shared by all rows. All Thomas updates combine
/// nonnegative quantities, so nonnegative input stays nonnegative.
void diffuse_rows(Density& f, double dt, double diffusion,
                  std::vector<double>& denom, std::vector<double>& gp,
                  std::vector<double>& y) {
  const Grid2D& g = f.grid;
  const double r = dt * diffusion / (g.dv() * g.dv());
  if (!(r > 0.0)) return;
  const int n = g.nv;
  denom.resize(n);
  gp.resize(n);
  y.resize(n);
  // Matrix rows: [1+r, -r], [-r, 1+2r, -r], ..., [-r, 1+r].
  denom[0] = 1.0 + r;
  gp[0] = r / denom[0];
  for (int k = 1; k < n; ++k) {
    const double diag = (k == n - 1) ? 1.0 + r : 1.0 + 2.0 * r;
    denom[k] = diag - r * gp[k - 1];
    gp[k] = r / denom[k];
  }
  for (int i = 0; i < g.nx; ++i) {
    double* row = f.f.data() + g.index(i, 0);
    y[0] = row[0] / denom[0];
    for (int k = 1; k < n; ++k) y[k] = (row[k] + r * y[k - 1]) / denom[k];
    row[n - 1] = y[n - 1];
    for (int k = n - 2; k >= 0; --k) row[k] = y[k] + gp[k] * row[k + 1];
  }
}

void check_negativity(const Density& f, const char* phase) {
  double lo = 0.0, hi = 0.0;
  int lo_i = 0, lo_k = 0;
  const Grid2D& g = f.grid;
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      const double val = f.at(i, k);
      if (val > hi) hi = val;
      if (val < lo) {
        lo = val;
        lo_i = i;
        lo_k = k;
      }
    }
  }
  if (lo < -kNegativityScale * hi) {
    std::ostringstream os;
    os << phase << ": density went negative beyond rounding: f = " << lo
       << " at cell (" << lo_i << ", " << lo_k << "), x = "
       << g.x_center(lo_i) << ", v = " << g.v_center(lo_k)
       << " (allowance " << -kNegativityScale * hi
       << "); this indicates a broken update, not a tolerance issue";
    throw NumericalError(os.str());
  }
}

/// Reusable buffers plus the j-independent decomposition of the v-face speeds:
/// u_v(j) = u_v(0) - orientation*eps*j at interior faces, so a coupling change
/// is a constant shift rather than a re-evaluation of the drift.
struct Stepper {
  const Grid2D g;
  ModelParams p;
  double safety;
  std::vector<double> ux, uv0, uv;
  AxisMax mx;
  std::vector<double> scratch, denom, gp, y;

  Stepper(const Grid2D& grid, const ModelParams& params, double cfl_safety)
      : g(grid), p(params), safety(cfl_safety) {
    ux = x_face_speeds(g, p);
    uv0 = v_face_speeds(g, p, 0.0);
    uv = uv0;
    mx = max_x_speed(g, ux);
  }

  void advance(Density& f, double dt, double j) {
    const double shift = -p.coupling_orientation * p.eps * j;
    AxisMax mv;
    for (int i = 0; i < g.nx; ++i) {
      for (int k = 1; k < g.nv; ++k) {
        const std::size_t fi = vface_index(g, i, k);
        const double u = uv0[fi] + shift;
        uv[fi] = u;
        const double s = std::abs(u);
        if (s > mv.speed) mv = {s, i, k};
      }
    }
    check_axis_cfl(g, dt, safety, mx, mv, "pde step");
    transport_gather(f, dt, ux, uv, scratch);
    diffuse_rows(f, dt, p.diffusion(), denom, gp, y);
    check_negativity(f, "pde step");
    f.time += dt;
  }
};

long checked_record_steps(double t_final, double dt, double* remainder) {
  const long n = static_cast<long>(std::floor(t_final / dt + 1e-9));
  *remainder = t_final - static_cast<double>(n) * dt;
  if (*remainder <= 1e-12 * std::max(1.0, t_final)) *remainder = 0.0;
  return n;
}

} // namespace

std::vector<double> x_face_speeds(const Grid2D& g, const ModelParams& p) {
  std::vector<double> ux(static_cast<std::size_t>(g.nx + 1) * g.nv, 0.0);
  for (int i = 1; i < g.nx; ++i) {
    const double x = g.x_min + i * g.dx();
    for (int k = 0; k < g.nv; ++k)
      ux[xface_index(g, i, k)] = -drift_A(x, g.v_center(k), p);
  }
  return ux;
}

std::vector<double> v_face_speeds(const Grid2D& g, const ModelParams& p,
                                  double j) {
  std::vector<double> uv(static_cast<std::size_t>(g.nx) * (g.nv + 1), 0.0);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x_center(i);
    for (int k = 1; k < g.nv; ++k) {
      const double v = g.v_min + k * g.dv();
      uv[vface_index(g, i, k)] = -drift_B(x, v, j, p);
    }
  }
  return uv;
}

CflInfo cfl_limit(const Grid2D& g, const ModelParams& p, double j,
                  double safety) {
  const std::vector<double> ux = x_face_speeds(g, p);
  const std::vector<double> uv = v_face_speeds(g, p, j);
  const AxisMax mx = max_x_speed(g, ux);
  const AxisMax mv = max_v_speed(g, uv);
  const double inf = std::numeric_limits<double>::infinity();
  const double bx = mx.speed > 0.0 ? safety * g.dx() / mx.speed : inf;
  const double bv = mv.speed > 0.0 ? safety * g.dv() / mv.speed : inf;
  CflInfo info;
  info.dt_axis = std::min(bx, bv);
  if (bx < bv) {
    info.axis = 'x';
    info.face_i = mx.face_i;
    info.face_k = mx.face_k;
    info.speed = mx.speed;
  } else {
    info.axis = 'v';
    info.face_i = mv.face_i;
    info.face_k = mv.face_k;
    info.speed = mv.speed;
  }
  const double rate = max_outflow_rate(g, ux, uv);
  info.dt_positive = rate > 0.0 ? safety / rate : inf;
  return info;
}

double cfl_dt_for_solve(const Grid2D& g, const ModelParams& p, double safety) {
  const double lo = cfl_limit(g, p, g.v_min, safety).dt_positive;
  const double hi = cfl_limit(g, p, g.v_max, safety).dt_positive;
  return std::min(lo, hi);
}

void step(Density& f, double dt, const ModelParams& p, double j,
          double cfl_safety) {
  Stepper s(f.grid, p, cfl_safety);
  s.advance(f, dt, j);
}

void advance_frozen_j(Density& f, double duration, double dt,
                      const ModelParams& p, double j, double cfl_safety) {
  if (!(duration > 0.0)) return;
  Stepper s(f.grid, p, cfl_safety);
  if (!(dt > 0.0)) {
    dt = cfl_limit(f.grid, p, j, cfl_safety).dt_positive;
    if (!std::isfinite(dt)) dt = duration;
  }
  const long n = std::max<long>(1, static_cast<long>(
                                       std::ceil(duration / dt - 1e-12)));
  const double h = duration / static_cast<double>(n);
  for (long k = 0; k < n; ++k) s.advance(f, h, j);
}

void step_fields(Density& f, double dt, const DriftFields& fields,
                 double cfl_safety) {
  const Grid2D& g = f.grid;
  std::vector<double> ux(static_cast<std::size_t>(g.nx + 1) * g.nv, 0.0);
  std::vector<double> uv(static_cast<std::size_t>(g.nx) * (g.nv + 1), 0.0);
  for (int i = 1; i < g.nx; ++i) {
    const double x = g.x_min + i * g.dx();
    for (int k = 0; k < g.nv; ++k)
      ux[xface_index(g, i, k)] = -fields.a_field(x, g.v_center(k));
  }
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x_center(i);
    for (int k = 1; k < g.nv; ++k)
      uv[vface_index(g, i, k)] = -fields.b_field(x, g.v_min + k * g.dv());
  }
  check_axis_cfl(g, dt, cfl_safety, max_x_speed(g, ux), max_v_speed(g, uv),
                 "pde step");
  std::vector<double> scratch, denom, gp, y;
  transport_gather(f, dt, ux, uv, scratch);
  diffuse_rows(f, dt, fields.diffusion, denom, gp, y);
  check_negativity(f, "pde step");
  f.time += dt;
}

PdeRunResult solve(Density& f, const ModelParams& p, const PdeRunOptions& opt) {
  const Grid2D& g = f.grid;
  g.validate();
  if (f.f.size() != g.size())
    throw ConfigError("pde solve: density storage does not match its grid");
  if (!(opt.t_final > 0.0)) throw ConfigError("pde solve: t_final must be > 0");
  if (opt.stride < 1) throw ConfigError("pde solve: stride must be >= 1");

  PdeRunResult out;
  const double m0 = mass(f);
  if (!(m0 > 0.0) || !std::isfinite(m0))
    throw NumericalError("pde solve: initial density has nonpositive or "
                         "non-finite mass");
  out.initial_mass_defect = std::abs(m0 - 1.0);
  out.renormalized_on_load = out.initial_mass_defect > opt.pde.mass_renorm_warn;
  normalize(f);

  const double safety = opt.pde.cfl_safety;
  Stepper stepper(g, p, safety);
  double dt = opt.dt;
  long n_steps = 0;
  double remainder = 0.0;
  if (dt > 0.0) {
    const CflInfo c0 = cfl_limit(g, p, mean_voltage(f), safety);
    if (dt > c0.dt_axis * kCflSlack) {
      std::ostringstream os;
      os << "pde solve: configured dt = " << dt
         << " violates the advective stability bound dt <= " << c0.dt_axis
         << " (limiting " << c0.axis << "-face at "
         << (c0.axis == 'x' ? g.x_min + c0.face_i * g.dx()
                            : g.v_min + c0.face_k * g.dv())
         << ", speed " << c0.speed << "); reduce dt or leave it at 0 for an "
         << "automatic choice";
      throw ConfigError(os.str());
    }
    n_steps = checked_record_steps(opt.t_final, dt, &remainder);
  } else {
    const double dt_auto = cfl_dt_for_solve(g, p, safety);
    if (!std::isfinite(dt_auto))
      dt = opt.t_final; // advection-free: a single diffusion step is exact
    else
      dt = dt_auto;
    n_steps = std::max<long>(1, static_cast<long>(
                                    std::ceil(opt.t_final / dt - 1e-12)));
    dt = opt.t_final / static_cast<double>(n_steps);
    remainder = 0.0;
  }
  out.dt_used = dt;

  const double t0 = f.time;
  const long total_steps = n_steps + (remainder > 0.0 ? 1 : 0);
  out.series = Table{pde_series_columns(), {}};

  long record_index = 0;
  auto record = [&](double t) {
    DiagnosticsRecord r = diagnose(f, opt.weight, opt.pde.vacuum_floor);
    r.t = t;
    const Moments mo = moments(f);
    out.records.push_back(r);
    out.series.add_row({t, mo.mean_v, mo.mean_x, mo.var_v, mo.var_x, r.j,
                        std::abs(r.mass - 1.0), r.min_f, r.l1M, r.entropy,
                        r.fisher_v, r.boundary_mass});
    if (r.boundary_mass > opt.pde.boundary_mass_tol) {
      std::ostringstream os;
      os << "pde solve: boundary cells hold a mass fraction of "
         << r.boundary_mass << " at t = " << t << " (tolerance "
         << opt.pde.boundary_mass_tol
         << "); the density is leaning on the domain walls - enlarge the x/v "
         << "extents so it decays before reaching them";
      throw NumericalError(os.str());
    }
    if (opt.snapshot_stride > 0 && opt.snapshots &&
        record_index % opt.snapshot_stride == 0)
      opt.snapshots->push_back(f);
    ++record_index;
  };

  record(t0);
  for (long s = 0; s < total_steps; ++s) {
    const double dt_s = (s < n_steps) ? dt : remainder;
    const double j = mean_voltage(f);
    stepper.advance(f, dt_s, j);
    f.time = (s + 1 < total_steps)
                 ? t0 + static_cast<double>(s + 1) * dt
                 : t0 + opt.t_final;
    ++out.steps_taken;
    const bool last = (s + 1 == total_steps);
    if (last || ((s + 1) % opt.stride == 0)) record(f.time);
  }
  return out;
}

} // namespace fhn
