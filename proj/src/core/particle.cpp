#include "core/particle.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace fhn {

CouplingSpec CouplingSpec::mean_field(double j) {
  CouplingSpec c;
  c.kind = Kind::mean_field;
  c.j = j;
  return c;
}

CouplingSpec CouplingSpec::matrix(std::vector<double> entries, std::size_t n) {
  CouplingSpec c;
  c.kind = Kind::matrix;
  c.j_matrix = std::move(entries);
  c.validate(n);
  return c;
}

void CouplingSpec::validate(std::size_t n) const {
  if (kind == Kind::mean_field) {
    if (j < 0.0) throw ConfigError("coupling: mean-field strength must be >= 0");
    return;
  }
  if (j_matrix.size() != n * n)
    throw ConfigError("coupling: matrix size does not match ensemble");
  for (double e : j_matrix)
    if (!(e >= 0.0)) throw ConfigError("coupling: matrix entries must be >= 0");
}

ParticleEnsemble init_ensemble(long n, const InitialLaw& law,
                               std::uint64_t seed, std::uint64_t trial) {
  if (n < 1) throw ConfigError("init_ensemble: n must be >= 1");
  law.validate();
  ParticleEnsemble ens;
  ens.x.resize(n);
  ens.v.resize(n);
  ens.seed = seed;
  ens.trial = trial;
  CounterRng rng(seed);
  switch (law.kind) {
    case InitKind::gaussian: {
      const double sx = std::sqrt(law.var_x), sv = std::sqrt(law.var_v);
      for (long i = 0; i < n; ++i) {
        ens.x[i] = law.mean_x + sx * rng.normal(0, i, trial, Stream::init_x);
        ens.v[i] = law.mean_v + sv * rng.normal(0, i, trial, Stream::init_v);
      }
      break;
    }
    case InitKind::uniform:
      for (long i = 0; i < n; ++i) {
        ens.x[i] = law.x_lo + (law.x_hi - law.x_lo) *
                                  rng.uniform(0, i, trial, Stream::init_x);
        ens.v[i] = law.v_lo + (law.v_hi - law.v_lo) *
                                  rng.uniform(0, i, trial, Stream::init_v);
      }
      break;
    case InitKind::point:
      for (long i = 0; i < n; ++i) {
        ens.x[i] = law.x0;
        ens.v[i] = law.v0;
      }
      break;
  }
  return ens;
}

namespace {

double kahan_mean(const std::vector<double>& xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s / static_cast<double>(xs.size());
}

[[noreturn]] void abort_nonfinite(const ParticleEnsemble& ens, std::size_t i) {
  std::ostringstream os;
  os << "particle state non-finite at t=" << ens.t << " particle " << i
     << " (x=" << ens.x[i] << ", v=" << ens.v[i]
     << "); reduce dt or check parameters";
  throw NumericalError(os.str());
}

} // namespace

void step(ParticleEnsemble& ens, double dt, const ModelParams& p,
          const CouplingSpec& coupling) {
  const std::size_t n = ens.size();
  if (n == 0) throw ConfigError("step: empty ensemble");
  coupling.validate(n);
  const double noise = p.sigma * std::sqrt(dt);
  CounterRng rng(ens.seed);

  if (coupling.kind == CouplingSpec::Kind::mean_field) {
    // Drift evaluated through the shared model definitions at the empirical
    // mean voltage, with the configured strength as the connectivity value.
    ModelParams q = p;
    q.eps = coupling.j;
    const double jbar = kahan_mean(ens.v);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = ens.x[i], vi = ens.v[i];
      const double z =
          rng.normal(ens.step_count, i, ens.trial, Stream::path_noise);
      ens.v[i] = vi + sde_drift_v(xi, vi, jbar, q) * dt + noise * z;
      ens.x[i] = xi + sde_drift_x(xi, vi, q) * dt;
    }
  } else {
    ModelParams q = p;
    q.eps = 0.0; // pairwise term added explicitly below
    const std::vector<double> v0 = ens.v;
    for (std::size_t i = 0; i < n; ++i) {
      double pairwise = 0.0;
      const double* row = coupling.j_matrix.data() + i * n;
      for (std::size_t k = 0; k < n; ++k)
        pairwise += row[k] * (v0[i] - v0[k]);
      pairwise *= p.coupling_orientation;
      const double xi = ens.x[i], vi = v0[i];
      const double z =
          rng.normal(ens.step_count, i, ens.trial, Stream::path_noise);
      ens.v[i] = vi + (sde_drift_v(xi, vi, 0.0, q) + pairwise) * dt + noise * z;
      ens.x[i] = xi + sde_drift_x(xi, vi, q) * dt;
    }
  }

  ens.t += dt;
  ++ens.step_count;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(ens.x[i]) || !std::isfinite(ens.v[i]))
      abort_nonfinite(ens, i);
}

namespace {

void record_row(Table& tab, const ParticleEnsemble& ens) {
  const std::size_t n = ens.size();
  double mv = kahan_mean(ens.v), mx = kahan_mean(ens.x);
  double vv = 0.0, vx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vv += (ens.v[i] - mv) * (ens.v[i] - mv);
    vx += (ens.x[i] - mx) * (ens.x[i] - mx);
  }
  vv /= n;
  vx /= n;
  tab.add_row({ens.t, mv, mx, vv, vx, mv});
}

} // namespace

Table simulate(ParticleEnsemble& ens, const ModelParams& p,
               const CouplingSpec& coupling, const SimulateOptions& opt) {
  if (!(opt.t_final > 0.0)) throw ConfigError("simulate: t_final must be > 0");
  if (!(opt.dt > 0.0)) throw ConfigError("simulate: dt must be > 0");
  if (opt.stride < 1) throw ConfigError("simulate: stride must be >= 1");

  Table tab;
  tab.columns = particle_series_columns();
  record_row(tab, ens);
  long records = 0;
  auto maybe_snapshot = [&]() {
    if (opt.snapshot_stride > 0 && opt.snapshots && opt.snapshot_grid &&
        records % opt.snapshot_stride == 0) {
      Density d = empirical_density(ens, *opt.snapshot_grid);
      d.time = ens.t;
      opt.snapshots->push_back(std::move(d));
    }
  };
  maybe_snapshot();

  const double t0 = ens.t;
  const long n_full =
      static_cast<long>(std::floor(opt.t_final / opt.dt + 1e-9));
  for (long k = 1; k <= n_full; ++k) {
    step(ens, opt.dt, p, coupling);
    ens.t = t0 + k * opt.dt; // avoid accumulated addition error
    if (k % opt.stride == 0 || k == n_full) {
      ++records;
      record_row(tab, ens);
      maybe_snapshot();
    }
  }
  const double rem = t0 + opt.t_final - ens.t;
  if (rem > 1e-12 * std::max(1.0, opt.t_final)) {
    step(ens, rem, p, coupling);
    ens.t = t0 + opt.t_final;
    ++records;
    record_row(tab, ens);
    maybe_snapshot();
  }
  return tab;
}

Density empirical_density(const ParticleEnsemble& ens, const Grid2D& grid,
                          double* out_fraction) {
  const std::size_t n = ens.size();
  if (n == 0) throw ConfigError("empirical_density: empty ensemble");
  grid.validate();
  Density d(grid);
  std::size_t outside = 0;
  const double inv_dx = 1.0 / grid.dx(), inv_dv = 1.0 / grid.dv();
  for (std::size_t i = 0; i < n; ++i) {
    const long ix = static_cast<long>(std::floor((ens.x[i] - grid.x_min) * inv_dx));
    const long kv = static_cast<long>(std::floor((ens.v[i] - grid.v_min) * inv_dv));
    if (ix < 0 || ix >= grid.nx || kv < 0 || kv >= grid.nv) {
      ++outside;
      continue;
    }
    d.at(static_cast<int>(ix), static_cast<int>(kv)) += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(n) * grid.cell_area());
  for (double& f : d.f) f *= norm;
  d.time = ens.t;
  if (out_fraction)
    *out_fraction = static_cast<double>(outside) / static_cast<double>(n);
  return d;
}

ChaosResult chaos_experiment(const std::vector<long>& n_list, double t_final,
                             double dt, int trials, const ModelParams& p,
                             const InitialLaw& law,
                             const std::function<double(double)>& j_of_t,
                             std::uint64_t seed, int record_points) {
  if (n_list.empty()) throw ConfigError("chaos: empty N list");
  if (trials < 1) throw ConfigError("chaos: trials must be >= 1");
  if (record_points < 1) throw ConfigError("chaos: record_points must be >= 1");
  if (!(t_final > 0.0) || !(dt > 0.0))
    throw ConfigError("chaos: t_final and dt must be > 0");
  if (!j_of_t) throw ConfigError("chaos: mean-voltage lookup is required");

  const long n_steps = std::max<long>(1, std::lround(t_final / dt));
  std::vector<long> record_steps;
  for (int r = 1; r <= record_points; ++r)
    record_steps.push_back(n_steps * r / record_points);

  ChaosResult out;
  out.table.columns = chaos_table_columns();

  std::vector<double> log_n, log_mse;
  for (long n : n_list) {
    // per record point: per-trial mse values for mean/stderr
    std::vector<std::vector<double>> samples(record_steps.size());
    for (int trial = 0; trial < trials; ++trial) {
      ParticleEnsemble sys = init_ensemble(n, law, seed, trial);
      std::vector<double> cx = sys.x, cv = sys.v; // synchronous copies
      const double noise = p.sigma * std::sqrt(dt);
      CounterRng rng(seed);
      std::size_t next_rec = 0;
      for (long k = 0; k < n_steps; ++k) {
        const double tk = k * dt;
        const double jbar = kahan_mean(sys.v);
        const double jlim = j_of_t(tk);
        for (long i = 0; i < n; ++i) {
          const double z = noise * rng.normal(k, i, trial, Stream::path_noise);
          const double xi = sys.x[i], vi = sys.v[i];
          sys.v[i] = vi + sde_drift_v(xi, vi, jbar, p) * dt + z;
          sys.x[i] = xi + sde_drift_x(xi, vi, p) * dt;
          const double ci = cx[i], di = cv[i];
          cv[i] = di + sde_drift_v(ci, di, jlim, p) * dt + z;
          cx[i] = ci + sde_drift_x(ci, di, p) * dt;
        }
        while (next_rec < record_steps.size() &&
               k + 1 == record_steps[next_rec]) {
          double acc = 0.0;
          for (long i = 0; i < n; ++i) {
            const double ex = sys.x[i] - cx[i], ev = sys.v[i] - cv[i];
            acc += ex * ex + ev * ev;
          }
          samples[next_rec].push_back(acc / static_cast<double>(n));
          ++next_rec;
        }
      }
      for (long i = 0; i < n; ++i)
        if (!std::isfinite(sys.x[i]) || !std::isfinite(cv[i]))
          throw NumericalError("chaos experiment diverged; reduce dt");
    }
    for (std::size_t r = 0; r < record_steps.size(); ++r) {
      const auto& s = samples[r];
      double mean = 0.0;
      for (double m : s) mean += m;
      mean /= s.size();
      double var = 0.0;
      for (double m : s) var += (m - mean) * (m - mean);
      const double stderr_ =
          s.size() > 1 ? std::sqrt(var / (s.size() - 1) / s.size()) : 0.0;
      out.table.add_row({static_cast<double>(n), record_steps[r] * dt, mean,
                         stderr_, static_cast<double>(trials)});
      if (r + 1 == record_steps.size() && mean > 0.0) {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_mse.push_back(std::log(mean));
      }
    }
  }

  // least-squares fit of log mse(T) against log N
  if (log_n.size() >= 2) {
    const std::size_t m = log_n.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mx += log_n[i];
      my += log_mse[i];
    }
    mx /= m;
    my /= m;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      num += (log_n[i] - mx) * (log_mse[i] - my);
      den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    out.slope = den > 0.0 ? num / den : 0.0;
    out.intercept = my - out.slope * mx;
  }
  return out;
}

} // namespace fhn
