#include "core/stationary.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/pde.hpp"

namespace fhn {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

std::string history_string(const std::vector<double>& hist) {
  std::ostringstream os;
  for (std::size_t i = 0; i < hist.size(); ++i)
    os << (i ? ", " : "") << hist[i];
  return os.str();
}

struct LinearStats {
  double residual_l1 = 0.0;
  std::vector<double> history;
  bool used_fallback = false;
};

Density solve_linear_with_stats(const Grid2D& g, const ModelParams& p,
                                double j, const StationaryConfig& cfg,
                                LinearStats& stats);

} // namespace

Eigen::SparseMatrix<double> generator_matrix(const Grid2D& g,
                                             const ModelParams& p, double j) {
  const int n = static_cast<int>(g.size());
  const double inv_dx = 1.0 / g.dx();
  const double inv_dv = 1.0 / g.dv();
  const std::vector<double> ux = x_face_speeds(g, p);
  const std::vector<double> uv = v_face_speeds(g, p, j);

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(n) * 7);
  for (int c = 0; c < n; ++c) trip.emplace_back(c, c, 0.0); // pin the diagonal

  // Upwind transport, face by face: d f(cell)/dt picks up ±(speed · donor)/Δ.
  for (int i = 1; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      const double u = ux[static_cast<std::size_t>(i) * g.nv + k];
      if (u == 0.0) continue;
      const int hi = static_cast<int>(g.index(i, k));
      const int lo = static_cast<int>(g.index(i - 1, k));
      const int donor = u >= 0.0 ? lo : hi;
      trip.emplace_back(hi, donor, u * inv_dx);
      trip.emplace_back(lo, donor, -u * inv_dx);
    }
  }
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 1; k < g.nv; ++k) {
      const double u = uv[static_cast<std::size_t>(i) * (g.nv + 1) + k];
      if (u == 0.0) continue;
      const int hi = static_cast<int>(g.index(i, k));
      const int lo = static_cast<int>(g.index(i, k - 1));
      const int donor = u >= 0.0 ? lo : hi;
      trip.emplace_back(hi, donor, u * inv_dv);
      trip.emplace_back(lo, donor, -u * inv_dv);
    }
  }
  // Diffusion through interior v-faces (reflecting ends fall out of the
  // face form): flux D (f_hi − f_lo)/Δv² in and out of the two cells.
  const double r = p.diffusion() * inv_dv * inv_dv;
  if (r > 0.0) {
    for (int i = 0; i < g.nx; ++i) {
      for (int k = 1; k < g.nv; ++k) {
        const int hi = static_cast<int>(g.index(i, k));
        const int lo = static_cast<int>(g.index(i, k - 1));
        trip.emplace_back(hi, lo, r);
        trip.emplace_back(hi, hi, -r);
        trip.emplace_back(lo, hi, r);
        trip.emplace_back(lo, lo, -r);
      }
    }
  }

  SpMat Q(n, n);
  Q.setFromTriplets(trip.begin(), trip.end());

  // The algebra makes every column sum zero; floating-point merge order can
  // leave ~1e-13 crumbs. Fold them into the diagonal so conservation is
  // exact by construction.
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < Q.outerSize(); ++c)
    for (SpMat::InnerIterator it(Q, c); it; ++it) colsum[c] += it.value();
  for (int c = 0; c < n; ++c) Q.coeffRef(c, c) -= colsum[c];
  return Q;
}

double generator_residual_l1(const Eigen::SparseMatrix<double>& Q,
                             const Density& f) {
  const Eigen::Map<const Eigen::VectorXd> x(f.f.data(),
                                            static_cast<long>(f.f.size()));
  const Eigen::VectorXd r = Q * x;
  return r.lpNorm<1>() * f.grid.cell_area();
}

namespace {

Density solve_linear_with_stats(const Grid2D& g, const ModelParams& p,
                                double j, const StationaryConfig& cfg,
                                LinearStats& stats) {
  const int n = static_cast<int>(g.size());
  const SpMat Q = generator_matrix(g, p, j);

  SpMat I(n, n);
  I.setIdentity();
  SpMat shifted = Q - cfg.power_mu * I;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw NumericalError("stationary solve: sparse factorization of the "
                         "shifted generator failed");

  Density G(g);
  const double area = g.cell_area();
  std::fill(G.f.begin(), G.f.end(), 1.0 / (g.size() * area));
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(G.f.data(), n);

  stats.history.clear();
  double residual = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < cfg.power_max_sweeps; ++sweep) {
    Eigen::VectorXd y = lu.solve(x);
    if (!y.allFinite())
      throw NumericalError("stationary solve: inverse iteration produced "
                           "non-finite values");
    const double m = y.sum() * area; // signed mass fixes any sign flip
    if (std::abs(m) < 1e-300)
      throw NumericalError("stationary solve: inverse iteration collapsed "
                           "onto a zero-mass vector");
    y /= m;
    const double prev = residual;
    residual = (Q * y).lpNorm<1>() * area;
    stats.history.push_back(residual);
    x.swap(y);
    if (residual <= cfg.power_tol) break;
    if (residual > 0.9 * prev) break; // stalled
  }
  Eigen::Map<Eigen::VectorXd>(G.f.data(), n) = x;
  stats.residual_l1 = residual;

  if (residual > cfg.residual_tol) {
    // Long-time integration at frozen j, then one more polish sweep.
    stats.used_fallback = true;
    double t = 0.0;
    while (t < cfg.longtime_t_max && residual > cfg.residual_tol) {
      advance_frozen_j(G, cfg.longtime_chunk, 0.0, p, j);
      t += cfg.longtime_chunk;
      normalize(G);
      Eigen::VectorXd y =
          lu.solve(Eigen::Map<const Eigen::VectorXd>(G.f.data(), n));
      const double m = y.sum() * area;
      if (y.allFinite() && std::abs(m) >= 1e-300) {
        y /= m;
        Eigen::Map<Eigen::VectorXd>(G.f.data(), n) = y;
      }
      residual = generator_residual_l1(Q, G);
      stats.history.push_back(residual);
    }
    stats.residual_l1 = residual;
    if (residual > cfg.residual_tol) {
      std::ostringstream os;
      os << "stationary solve: residual " << residual
         << " still above tolerance " << cfg.residual_tol
         << " after inverse iteration and " << t
         << " time units of fallback integration (residual history: "
         << history_string(stats.history) << ")";
      throw NumericalError(os.str());
    }
  }
  return G;
}

} // namespace

Density solve_linear_stationary(const Grid2D& g, const ModelParams& p,
                                double j, const StationaryConfig& cfg) {
  LinearStats stats;
  return solve_linear_with_stats(g, p, j, cfg, stats);
}

std::vector<StationarySolution> find_stationary(const Grid2D& g,
                                                const ModelParams& p,
                                                const StationaryConfig& cfg) {
  std::vector<double> seeds = cfg.j_seeds;
  if (seeds.empty()) {
    for (const FixedPoint& fp : deterministic_fixed_points(p))
      if (fp.stable) seeds.push_back(fp.v);
    seeds.insert(seeds.end(), {-1.0, 0.0, 1.0});
  }

  std::vector<StationarySolution> found;
  for (double seed : seeds) {
    StationarySolution sol;
    sol.seed_j = seed;
    sol.j_history.push_back(seed);
    double j = seed;
    // Root problem phi(j) = mean_voltage(G_j) − j, advanced by the damped
    // update j ← j + θ·phi. The configured θ covers the first steps; after
    // two evaluations the two-point slope estimate Δ𝒥/Δj (the same quantity
    // the contraction diagnostic measures) sets θ to its optimal value
    // 1/(1 − slope), which handles both the slow crawl near slope ≈ 1 under
    // strong coupling and the oscillatory regime at negative slopes. A
    // sign-change bracket, once seen, confines every step (bisection
    // fallback when the secant candidate escapes it).
    double j_prev = 0.0, phi_prev = 0.0;
    bool have_prev = false;
    double j_pos = 0.0, j_neg = 0.0; // tightest known phi>0 / phi<0 points
    bool have_pos = false, have_neg = false;
    for (int it = 0; it < cfg.max_outer; ++it) {
      LinearStats stats;
      Density G = solve_linear_with_stats(g, p, j, cfg, stats);
      const double jg = mean_voltage(G);
      const double phi = jg - j;
      sol.iterations = it + 1;
      sol.fixed_point_gap = std::abs(phi);
      sol.j_history.push_back(jg);
      if (sol.fixed_point_gap <= cfg.j_tol) {
        sol.G = std::move(G);
        sol.j = jg;
        sol.residual_l1 = stats.residual_l1;
        sol.converged = true;
        break;
      }
      if (phi > 0.0) {
        if (!have_pos || j > j_pos) j_pos = j;
        have_pos = true;
      } else {
        if (!have_neg || j < j_neg) j_neg = j;
        have_neg = true;
      }
      const bool bracket = have_pos && have_neg && j_pos < j_neg;
      double theta = cfg.damping;
      if (have_prev) {
        const double dphi = phi - phi_prev;
        if (std::abs(dphi) > 1e-300) {
          const double est = -(j - j_prev) / dphi; // = 1/(1 − slope)
          if (std::isfinite(est) && est > 0.0) theta = std::min(est, 10.0);
        }
      }
      j_prev = j;
      phi_prev = phi;
      have_prev = true;
      double next = j + theta * phi;
      if (bracket && (next <= j_pos || next >= j_neg))
        next = 0.5 * (j_pos + j_neg);
      j = next;
      if (it + 1 == cfg.max_outer) {
        sol.G = std::move(G);
        sol.j = jg;
        sol.residual_l1 = stats.residual_l1;
      }
    }
    found.push_back(std::move(sol));
  }

  // Deduplicate converged solutions by L1 distance; keep non-converged seeds
  // as diagnostics entries after the distinct ones.
  std::vector<StationarySolution> out;
  for (auto& sol : found) {
    if (!sol.converged) continue;
    bool dup = false;
    for (const auto& kept : out)
      if (l1_distance(kept.G, sol.G) < cfg.dedup_l1) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(sol));
  }
  for (auto& sol : found)
    if (!sol.converged && !sol.G.f.empty()) out.push_back(std::move(sol));
  return out;
}

EpsProximityScan epsilon_proximity_scan(const Grid2D& g, const ModelParams& p,
                                        const std::vector<double>& eps_list,
                                        const WeightParams& w,
                                        const StationaryConfig& cfg) {
  ModelParams p0 = p;
  p0.eps = 0.0;
  const Density G0 = solve_linear_stationary(g, p0, 0.0, cfg);
  const double j0 = mean_voltage(G0);

  EpsProximityScan scan;
  for (double eps : eps_list) {
    EpsProximityRow row;
    row.eps = eps;
    if (eps == 0.0) {
      row.distance = 0.0;
      row.j = j0;
    } else {
      ModelParams pe = p;
      pe.eps = eps;
      StationaryConfig ce = cfg;
      if (ce.j_seeds.empty()) ce.j_seeds = {j0};
      const std::vector<StationarySolution> sols = find_stationary(g, pe, ce);
      const StationarySolution* best = nullptr;
      for (const auto& s : sols)
        if (s.converged && (!best || std::abs(s.j - j0) < std::abs(best->j - j0)))
          best = &s;
      if (!best)
        throw NumericalError("epsilon proximity scan: no converged stationary "
                             "state at eps = " + std::to_string(eps));
      Density diff(g);
      for (std::size_t c = 0; c < diff.f.size(); ++c)
        diff.f[c] = best->G.f[c] - G0.f[c];
      row.distance = l2m_norm(diff, w);
      row.j = best->j;
    }
    scan.rows.push_back(row);
  }

  // Least-squares line through (eps, distance).
  const std::size_t n = scan.rows.size();
  if (n >= 2) {
    double me = 0.0, md = 0.0;
    for (const auto& r : scan.rows) {
      me += r.eps;
      md += r.distance;
    }
    me /= n;
    md /= n;
    double num = 0.0, den = 0.0;
    for (const auto& r : scan.rows) {
      num += (r.eps - me) * (r.distance - md);
      den += (r.eps - me) * (r.eps - me);
    }
    scan.slope = den > 0.0 ? num / den : 0.0;
    scan.intercept = md - scan.slope * me;
  }

  // Monotone toward zero: sort a copy by eps ascending and require each
  // distance to be at most the next one plus solver noise.
  std::vector<EpsProximityRow> sorted = scan.rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const EpsProximityRow& a, const EpsProximityRow& b) {
              return a.eps < b.eps;
            });
  scan.monotone = true;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i].distance > sorted[i + 1].distance + 1e-8)
      scan.monotone = false;
  return scan;
}

PositivityReport positivity_check(const Density& G, int margin) {
  const Grid2D& g = G.grid;
  PositivityReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  const int lo = margin + 1; // strictly more than `margin` cells inside
  for (int i = lo; i <= g.nx - 1 - lo; ++i) {
    for (int k = lo; k <= g.nv - 1 - lo; ++k) {
      const double val = G.at(i, k);
      if (val < rep.min_value) {
        rep.min_value = val;
        rep.i = i;
        rep.k = k;
      }
    }
  }
  rep.x = g.x_center(rep.i);
  rep.v = g.v_center(rep.k);
  rep.pass = rep.min_value > 0.0;
  return rep;
}

} // namespace fhn
