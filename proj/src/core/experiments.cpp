#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "core/errors.hpp"
#include "core/pde.hpp"
#include "core/stationary.hpp"

namespace fhn {

Density density_from_law(const InitialLaw& law, const Grid2D& g) {
  law.validate();
  switch (law.kind) {
    case InitKind::gaussian:
      return gaussian_density(g, law.mean_x, law.mean_v, law.var_x, law.var_v);
    case InitKind::uniform: {
      Density d(g);
      long hits = 0;
      for (int i = 0; i < g.nx; ++i)
        for (int k = 0; k < g.nv; ++k) {
          const double x = g.x_center(i), v = g.v_center(k);
          if (x >= law.x_lo && x <= law.x_hi && v >= law.v_lo &&
              v <= law.v_hi) {
            d.at(i, k) = 1.0;
            ++hits;
          }
        }
      if (hits == 0)
        throw ConfigError(
            "uniform initial law does not overlap any grid cell center");
      normalize(d);
      return d;
    }
    case InitKind::point: {
      Density d(g);
      const int i = std::clamp(
          static_cast<int>((law.x0 - g.x_min) / g.dx()), 0, g.nx - 1);
      const int k = std::clamp(
          static_cast<int>((law.v0 - g.v_min) / g.dv()), 0, g.nv - 1);
      d.at(i, k) = 1.0 / g.cell_area();
      return d;
    }
  }
  throw ConfigError("unhandled initial-law kind");
}

namespace {

std::vector<double> table_column(const Table& t, const std::string& name) {
  const int c = t.column_index(name);
  if (c < 0)
    throw NumericalError("time series is missing the '" + name + "' column");
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.push_back(row[c]);
  return out;
}

InitialLaw attractor_law(const FixedPoint& fp, double jitter) {
  InitialLaw law;
  law.kind = InitKind::gaussian;
  law.mean_x = fp.x;
  law.mean_v = fp.v;
  law.var_x = jitter * jitter;
  law.var_v = jitter * jitter;
  return law;
}

} // namespace

RegimeScanResult regime_scan(const ModelParams& base,
                             const RegimeScanConfig& cfg, std::uint64_t seed) {
  if (cfg.j_list.empty())
    throw ConfigError("regime scan: the connectivity list is empty");
  if (cfg.seeds < 1) throw ConfigError("regime scan: seeds must be >= 1");
  if (!(cfg.init_jitter > 0.0))
    throw ConfigError("regime scan: init_jitter must be > 0");

  RegimeScanResult out;
  for (const FixedPoint& fp : deterministic_fixed_points(base))
    if (fp.stable) out.attractors.push_back(fp);
  if (out.attractors.empty())
    throw ConfigError("regime scan: the deterministic system has no stable "
                      "rest state to initialize near");
  // Lowest- and highest-voltage stable states; identical when only one exists.
  const FixedPoint fp_a = out.attractors.front();
  const FixedPoint fp_b = out.attractors.back();
  const InitialLaw law_a = attractor_law(fp_a, cfg.init_jitter);
  const InitialLaw law_b = attractor_law(fp_b, cfg.init_jitter);

  SimulateOptions opt;
  opt.t_final = cfg.t_final;
  opt.dt = cfg.dt;
  opt.stride = cfg.stride;
  const double dt_record = cfg.dt * cfg.stride;

  for (double J : cfg.j_list) {
    ModelParams p = base;
    p.eps = J;
    p.validate();
    const CouplingSpec coupling = CouplingSpec::mean_field(J);

    RegimeRow row;
    row.j = J;
    row.seeds = cfg.seeds;
    int counts[4] = {0, 0, 0, 0};
    for (int s = 0; s < cfg.seeds; ++s) {
      ParticleEnsemble ens_a =
          init_ensemble(cfg.n, law_a, seed, 2 * static_cast<std::uint64_t>(s));
      ParticleEnsemble ens_b = init_ensemble(
          cfg.n, law_b, seed, 2 * static_cast<std::uint64_t>(s) + 1);
      const Table ta = simulate(ens_a, p, coupling, opt);
      const Table tb = simulate(ens_b, p, coupling, opt);
      const std::vector<double> va = table_column(ta, "mean_v");
      const std::vector<double> vb = table_column(tb, "mean_v");

      RegimeSeedOutcome outcome;
      outcome.seed_index = s;
      outcome.decision = classify_regime(va, vb, dt_record, cfg.classifier);
      counts[static_cast<int>(outcome.decision.label)]++;
      row.outcomes.push_back(outcome);

      if (s == 0) {
        row.trace.columns = {"t", "mean_v_a", "mean_v_b"};
        const std::vector<double> tt = table_column(ta, "t");
        const std::size_t nrow = std::min(tt.size(), vb.size());
        for (std::size_t r = 0; r < nrow; ++r)
          row.trace.add_row({tt[r], va[r], vb[r]});
      }
    }
    int best = 0;
    for (int l = 1; l < 4; ++l)
      if (counts[l] > counts[best]) best = l;
    row.majority = static_cast<RegimeLabel>(best);
    row.agree = counts[best];
    out.rows.push_back(std::move(row));
  }
  return out;
}

ChaosRateOutcome chaos_rate_experiment(const Config& cfg) {
  const ChaosConfig& ch = cfg.chaos;
  if (ch.n_list.empty())
    throw ConfigError("chaos experiment: the ensemble-size list is empty");

  ChaosRateOutcome out;
  out.j_table.columns = {"t", "j"};
  JTable path;
  if (!ch.j_file.empty()) {
    path = read_j_table(ch.j_file);
    out.j_from_file = true;
  } else {
    // Derive the coupling path from the mean-field equation started at the
    // same initial law the ensembles use.
    Density f = density_from_law(cfg.particle.init, cfg.grid);
    PdeRunOptions opt;
    opt.t_final = ch.t_final;
    opt.pde = cfg.pde;
    opt.weight = cfg.weight;
    const double dt_auto = cfl_dt_for_solve(cfg.grid, cfg.model, opt.pde.cfl_safety);
    const long steps = static_cast<long>(std::ceil(ch.t_final / dt_auto));
    opt.stride = static_cast<int>(std::max(1L, steps / 200));
    const PdeRunResult run = solve(f, cfg.model, opt);
    path.t.reserve(run.records.size());
    path.j.reserve(run.records.size());
    for (const DiagnosticsRecord& r : run.records) {
      path.t.push_back(r.t);
      path.j.push_back(r.j);
    }
  }
  if (path.t.empty())
    throw NumericalError("chaos experiment: empty coupling path");
  for (std::size_t i = 0; i < path.t.size(); ++i)
    out.j_table.add_row({path.t[i], path.j[i]});

  out.result = chaos_experiment(
      ch.n_list, ch.t_final, ch.dt, ch.trials, cfg.model, cfg.particle.init,
      [path](double t) { return path(t); }, cfg.seed, ch.record_points);
  return out;
}

TwoRouteCheck stationary_two_routes(const Grid2D& g, const ModelParams& p,
                                    double j, const StationaryConfig& cfg) {
  TwoRouteCheck out;
  out.algebraic = solve_linear_stationary(g, p, j, cfg);

  Density f(g);
  std::fill(f.f.begin(), f.f.end(), 1.0);
  normalize(f);
  double drift = std::numeric_limits<double>::infinity();
  while (out.longtime_t < cfg.longtime_t_max &&
         drift >= cfg.longtime_drift_tol) {
    const Density prev = f;
    advance_frozen_j(f, cfg.longtime_chunk, 0.0, p, j);
    out.longtime_t += cfg.longtime_chunk;
    drift = l1_distance(f, prev) / cfg.longtime_chunk;
  }
  normalize(f);
  out.longtime = std::move(f);

  const Eigen::SparseMatrix<double> Q = generator_matrix(g, p, j);
  out.residual_algebraic = generator_residual_l1(Q, out.algebraic);
  out.residual_longtime = generator_residual_l1(Q, out.longtime);
  out.l1_between = l1_distance(out.algebraic, out.longtime);
  return out;
}

} // namespace fhn
