// Full acceptance battery: one independent pass/fail verdict per shipped
// guarantee, printed as a fixed-format line. Returns the number of failures
// so the harness can gate on it. Tolerances are pinned here on purpose.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/config.hpp"
#include "core/diagnostics.hpp"
#include "core/experiments.hpp"
#include "core/grid.hpp"
#include "core/model.hpp"
#include "core/particle.hpp"
#include "core/pde.hpp"
#include "core/spectral.hpp"
#include "core/stationary.hpp"

using namespace fhn;

namespace {

struct Verdict {
  bool pass = false;
  std::string label;
  std::string detail;
};

Verdict results[14];

void set_result(int idx, bool pass, const std::string& label,
                const std::string& detail) {
  results[idx] = {pass, label, detail};
  std::fprintf(stderr, "[acceptance] %2d %s (%s)\n", idx,
               pass ? "ok" : "FAILED", detail.c_str());
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ModelParams weakly_coupled() {
  ModelParams p;
  p.eps = 0.2;
  return p;
}

// ---------------------------------------------------------------- criteria

// Shared evidence pools for the positivity and monitor verdicts.
std::vector<const PdeRunResult*> tracked_runs;
std::vector<std::string> tracked_names;

void criterion_1_mass_conservation(PdeRunResult& keep, Density& f_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = weakly_coupled();
  const Grid2D g; // 128 x 128
  Density f = gaussian_density(g, 0.0, 0.0, 0.25, 0.25);

  // per-step budget, measured directly on the stepper
  Density probe = f;
  double worst_step = 0.0;
  const double dt_probe = cfl_dt_for_solve(g, p, 0.9);
  for (int s = 0; s < 100; ++s) {
    const double before = mass(probe);
    step(probe, dt_probe, p, 0.1);
    worst_step = std::max(worst_step, std::fabs(mass(probe) - before));
  }

  // long self-consistent run: exactly 1e5 steps at the automatic step
  PdeRunOptions opt;
  const long n_steps = 100000;
  opt.dt = 0.0;
  opt.stride = 500;
  opt.t_final = n_steps * dt_probe;
  keep = solve(f, p, opt);
  f_out = f;

  double worst_mass = 0.0;
  for (const auto& r : keep.records)
    worst_mass = std::max(worst_mass, std::fabs(r.mass - 1.0));
  const double wall = seconds_since(t0);

  const bool pass = worst_mass <= 1e-10 && worst_step <= 1e-13 &&
                    keep.steps_taken == n_steps && wall < 120.0;
  set_result(1, pass, "mass-conservation",
             "max|mass-1| " + fmt(worst_mass) + ", per-step " +
                 fmt(worst_step) + ", steps " +
                 std::to_string(keep.steps_taken) + ", " + fmt(wall) + " s");
  tracked_runs.push_back(&keep);
  tracked_names.push_back("long-run");
}

void criterion_3_coupling_error_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  apply_preset(cfg, "small-connectivity");
  const ChaosRateOutcome out = chaos_rate_experiment(cfg);
  const double wall = seconds_since(t0);
  const double slope = out.result.slope;
  const bool pass = slope >= -1.3 && slope <= -0.7 && cfg.chaos.trials >= 20 &&
                    wall < 15.0 * 60.0;
  set_result(3, pass, "coupling-error-rate",
             "slope " + fmt(slope) + ", trials " +
                 std::to_string(cfg.chaos.trials) + ", " + fmt(wall) + " s");
}

void criterion_4_moment_agreement(PdeRunResult& keep) {
  const ModelParams p = weakly_coupled();
  const InitialLaw law; // centered gaussian, variance 0.25

  Grid2D fine;
  fine.nx = 256;
  fine.nv = 256;
  Density f = density_from_law(law, fine);
  PdeRunOptions opt;
  opt.t_final = 5.0;
  opt.dt = 0.0;
  opt.stride = 250;
  keep = solve(f, p, opt);
  const Moments mf = moments(f);
  tracked_runs.push_back(&keep);
  tracked_names.push_back("moment-run");

  const int trials = 10;
  const double dt = 5e-4;
  const long steps = std::llround(5.0 / dt);
  double mv = 0.0, mx = 0.0, vv = 0.0, vx = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    ParticleEnsemble ens = init_ensemble(2000, law, 12345, trial);
    const CouplingSpec cpl = CouplingSpec::mean_field(p.eps);
    for (long s = 0; s < steps; ++s) step(ens, dt, p, cpl);
    const std::size_t n = ens.size();
    double sv = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sv += ens.v[i];
      sx += ens.x[i];
    }
    sv /= n;
    sx /= n;
    double qv = 0.0, qx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      qv += (ens.v[i] - sv) * (ens.v[i] - sv);
      qx += (ens.x[i] - sx) * (ens.x[i] - sx);
    }
    mv += sv;
    mx += sx;
    vv += qv / n;
    vx += qx / n;
  }
  mv /= trials;
  mx /= trials;
  vv /= trials;
  vx /= trials;

  auto within = [](double pde, double ref) {
    return std::fabs(pde - ref) <= std::max(0.05 * std::fabs(ref), 0.02);
  };
  const bool pass = within(mf.mean_v, mv) && within(mf.mean_x, mx) &&
                    within(mf.var_v, vv) && within(mf.var_x, vx);
  set_result(4, pass, "ensemble-vs-mean-field-moments",
             "d(mean_v) " + fmt(std::fabs(mf.mean_v - mv)) + ", d(mean_x) " +
                 fmt(std::fabs(mf.mean_x - mx)) + ", d(var_v) " +
                 fmt(std::fabs(mf.var_v - vv)) + ", d(var_x) " +
                 fmt(std::fabs(mf.var_x - vx)));
}

StationarySolution criterion_5_stationary_state() {
  const Grid2D g;
  const ModelParams p = weakly_coupled();
  const StationaryConfig cfg;
  const auto sols = find_stationary(g, p, cfg);
  StationarySolution best;
  for (const auto& s : sols)
    if (s.converged) best = s;
  const TwoRouteCheck routes =
      stationary_two_routes(g, p, best.converged ? best.j : 0.126, cfg);
  const bool pass = best.converged && best.residual_l1 <= 1e-8 &&
                    best.fixed_point_gap <= 1e-8 &&
                    routes.l1_between <= 1e-4;
  set_result(5, pass, "self-consistent-state",
             "residual " + fmt(best.residual_l1) + ", coupling gap " +
                 fmt(best.fixed_point_gap) + ", route distance " +
                 fmt(routes.l1_between));
  return best;
}

void criterion_6_uniqueness() {
  const Grid2D g;
  StationaryConfig cfg;
  cfg.j_seeds = {-1.0, -0.5, 0.0, 0.5, 1.0};

  const auto weak = find_stationary(g, weakly_coupled(), cfg);
  std::size_t weak_count = 0;
  for (const auto& s : weak)
    if (s.converged) ++weak_count;

  const ModelParams uncoupled; // eps = 0
  const auto zero = find_stationary(g, uncoupled, cfg);
  std::size_t zero_count = 0;
  for (const auto& s : zero)
    if (s.converged) ++zero_count;

  const bool pass = weak.size() == 1 && weak_count == 1 && zero.size() == 1 &&
                    zero_count == 1;
  set_result(6, pass, "uniqueness-at-small-coupling",
             "distinct states: coupled " + std::to_string(weak.size()) +
                 ", uncoupled " + std::to_string(zero.size()));
}

void criterion_7_proximity_scan() {
  const EpsProximityScan scan = epsilon_proximity_scan(
      Grid2D{}, ModelParams{}, {0.4, 0.2, 0.1, 0.05}, WeightParams{}, {});
  const bool pass = scan.monotone && scan.intercept <= 1e-3;
  std::string dists;
  for (const auto& r : scan.rows) {
    if (!dists.empty()) dists += " ";
    dists += fmt(r.distance);
  }
  set_result(7, pass, "weak-coupling-proximity",
             "distances " + dists + ", intercept " + fmt(scan.intercept) +
                 (scan.monotone ? ", monotone" : ", NOT monotone"));
}

SpectralReport criterion_8_spectrum(const StationarySolution& base,
                                    LinearizedOperator& op_out) {
  op_out = assemble_linearized(base.G, weakly_coupled(), {});
  const SpectralConfig cfg;
  const SpectralReport rep =
      rightmost_eigenvalues(op_out, cfg.n_eigs, cfg.tol, cfg);

  // column sums of the full operator (sparse part plus rank-one correction)
  const long n = op_out.Q.cols();
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < op_out.Q.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op_out.Q, c); it; ++it)
      colsum[c] += it.value();
  const double u_total = op_out.u.sum();
  double defect = 0.0;
  for (long c = 0; c < n; ++c)
    defect = std::max(defect, std::fabs(colsum[c] + u_total * op_out.w[c]));

  int mass_modes = 0;
  bool others_negative = true;
  double mass_mag = 0.0;
  for (const auto& m : rep.modes) {
    if (m.is_mass_mode) {
      ++mass_modes;
      mass_mag = std::abs(m.value);
    } else if (!(m.value.real() < 0.0)) {
      others_negative = false;
    }
  }
  const bool pass = rep.converged && mass_modes == 1 &&
                    mass_mag <= 1e-6 * rep.scale && others_negative &&
                    defect <= 1e-12;
  set_result(8, pass, "spectrum-structure",
             "neutral modes " + std::to_string(mass_modes) + ", |neutral| " +
                 fmt(mass_mag) + ", column defect " + fmt(defect) + ", gap " +
                 fmt(rep.gap));
  return rep;
}

void criterion_9_linearization_gradient(const StationarySolution& base,
                                        const LinearizedOperator& op) {
  const Grid2D& g = base.G.grid;
  const long n = static_cast<long>(g.size());
  const Density bump_a = gaussian_density(g, 0.5, 0.8, 0.3, 0.2);
  const Density bump_b = gaussian_density(g, -0.5, 0.2, 0.3, 0.2);
  Eigen::VectorXd h(n);
  for (long c = 0; c < n; ++c) h[c] = bump_a.f[c] - bump_b.f[c];
  h /= h.norm();

  const ModelParams p = weakly_coupled();
  Eigen::VectorXd lh(n);
  op.apply(h, lh);
  const Eigen::VectorXd n0 = nonlinear_rhs(base.G, p);
  auto remainder = [&](double tau) {
    Density f = base.G;
    for (long c = 0; c < n; ++c) f.f[c] += tau * h[c];
    return (nonlinear_rhs(f, p) - n0 - tau * lh).norm();
  };
  const double r1 = remainder(1e-2);
  const double r2 = remainder(5e-3);
  const double ratio = r2 > 0.0 ? r1 / r2 : 0.0;
  const bool pass = ratio >= 3.5 && ratio <= 4.5;
  set_result(9, pass, "linearization-gradient",
             "remainder ratio " + fmt(ratio) + " (r(tau) " + fmt(r1) + ")");
}

void criterion_10_decay_rate(const StationarySolution& base,
                             const SpectralReport& rep) {
  const SpectralConfig cfg;
  const ModelParams p = weakly_coupled();
  const DecayExperiment full =
      predicted_vs_measured_decay(base.G, p, {}, 1e-2, 40.0, cfg);
  const DecayExperiment half =
      predicted_vs_measured_decay(base.G, p, {}, 5e-3, 40.0, cfg);
  const double gap = rep.gap;
  const bool fit_ok =
      full.window_found && std::fabs(full.fitted_rate - gap) <= 0.2 * gap;
  const bool stable_ok =
      half.window_found &&
      std::fabs(half.fitted_rate - full.fitted_rate) <=
          0.1 * std::fabs(full.fitted_rate);
  set_result(10, fit_ok && stable_ok, "perturbation-decay-rate",
             "fitted " + fmt(full.fitted_rate) + " vs gap " + fmt(gap) +
                 ", half-amplitude fit " + fmt(half.fitted_rate));
}

void criterion_11_regime_labels() {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  apply_preset(cfg, "bistable");
  const RegimeScanResult res = regime_scan(cfg.model, cfg.regime, cfg.seed);
  const double wall = seconds_since(t0);

  auto expected = [](double j) {
    if (j == 0.1) return RegimeLabel::stationary_unimodal;
    if (j == 1.0) return RegimeLabel::oscillatory;
    return RegimeLabel::bistable;
  };
  bool pass = res.rows.size() == 3 && wall < 30.0 * 60.0;
  std::string detail;
  for (const auto& row : res.rows) {
    const bool row_ok =
        row.majority == expected(row.j) && row.agree >= 4 && row.seeds == 5;
    pass = pass && row_ok;
    if (!detail.empty()) detail += "; ";
    detail += "J " + fmt(row.j) + " -> " + to_string(row.majority) + " " +
              std::to_string(row.agree) + "/" + std::to_string(row.seeds);
  }
  set_result(11, pass, "regime-labels", detail + ", " + fmt(wall) + " s");
}

void criterion_13_diffusion_variance() {
  const Grid2D g;
  Density f = gaussian_density(g, 0.0, 0.0, 0.3, 0.05);
  DriftFields fields;
  fields.a_field = [](double, double) { return 0.0; };
  fields.b_field = [](double, double) { return 0.0; };
  fields.diffusion = 0.5;
  const Moments m0 = moments(f);
  const double dt = 1e-3, T = 0.2;
  const long steps = std::llround(T / dt);
  for (long s = 0; s < steps; ++s) step_fields(f, dt, fields);
  const Moments m1 = moments(f);
  const double expected = m0.var_v + 2.0 * fields.diffusion * T;
  const double rel = std::fabs(m1.var_v - expected) / expected;
  set_result(13, rel <= 0.01, "diffusion-variance",
             "relative error " + fmt(rel));
}

void criterion_2_and_12_positivity_and_monitors() {
  bool positive = true;
  double worst_min = 0.0;
  long records = 0;
  for (const PdeRunResult* run : tracked_runs)
    for (const auto& r : run->records) {
      ++records;
      worst_min = std::min(worst_min, r.min_f);
      if (r.min_f < 0.0) positive = false;
    }
  set_result(2, positive && records > 0, "positivity",
             "worst recorded minimum " + fmt(worst_min) + " over " +
                 std::to_string(records) + " records");

  bool monitors_ok = !tracked_runs.empty();
  std::string detail;
  for (std::size_t i = 0; i < tracked_runs.size(); ++i) {
    const MonitorReport rep = monitor(tracked_runs[i]->records);
    bool ok = rep.all_pass();
    monitors_ok = monitors_ok && ok;
    if (!detail.empty()) detail += "; ";
    detail += tracked_names[i] + (ok ? " clean" : " TRIPPED");
    if (!ok)
      for (const auto& c : rep.checks)
        if (!c.pass) detail += " [" + c.name + "]";
  }
  set_result(12, monitors_ok, "run-monitors", detail);
}

} // namespace

int main() {
  std::setbuf(stdout, nullptr);

  PdeRunResult long_run, moment_run;
  Density long_run_final;
  criterion_1_mass_conservation(long_run, long_run_final);
  criterion_4_moment_agreement(moment_run);
  criterion_2_and_12_positivity_and_monitors();

  const StationarySolution base = criterion_5_stationary_state();
  criterion_6_uniqueness();
  criterion_7_proximity_scan();
  LinearizedOperator op;
  const SpectralReport rep = criterion_8_spectrum(base, op);
  criterion_9_linearization_gradient(base, op);
  criterion_10_decay_rate(base, rep);
  criterion_13_diffusion_variance();
  criterion_3_coupling_error_rate();
  criterion_11_regime_labels();

  int failures = 0;
  std::printf("\n");
  for (int i = 1; i <= 13; ++i) {
    const Verdict& v = results[i];
    std::printf("criterion %2d %s %s — %s\n", i, v.pass ? "PASS" : "FAIL",
                v.label.c_str(), v.detail.c_str());
    if (!v.pass) ++failures;
  }
  std::printf("%d of 13 criteria passed\n", 13 - failures);
  return failures;
}
