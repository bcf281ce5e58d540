#include "core/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/io.hpp"
#include "core/particle.hpp"
#include "core/pde.hpp"
#include "core/spectral.hpp"
#include "core/stationary.hpp"
#include "core/svg.hpp"

namespace fhn {

namespace {

namespace fs = std::filesystem;

/// Shared bookkeeping: output paths, the file list, and the closing manifest.
struct RunDir {
  fs::path dir;
  std::vector<std::string> files;
  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();

  explicit RunDir(const std::string& out_dir) : dir(out_dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
      throw ConfigError("cannot create output directory '" + out_dir +
                        "': " + ec.message());
  }

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }

  std::vector<std::string> finish(const Config& cfg,
                                  const std::string& command) {
    ManifestInfo info;
    info.command = command;
    info.config_hash = config_hash(cfg);
    info.seed = cfg.seed;
    info.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    info.outputs = files;
    info.config_text = serialize_config(cfg);
    write_manifest(path("manifest.json"), info);
    return files;
  }
};

SvgSeries series_from_table(const Table& t, const std::string& xcol,
                            const std::string& ycol,
                            const std::string& label) {
  const int xc = t.column_index(xcol), yc = t.column_index(ycol);
  SvgSeries s;
  s.label = label;
  if (xc < 0 || yc < 0) return s;
  for (const auto& row : t.rows) {
    s.x.push_back(row[xc]);
    s.y.push_back(row[yc]);
  }
  return s;
}

std::string format_j(double j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", j);
  return buf;
}

} // namespace

std::vector<std::string> run_simulate_particles(const Config& cfg,
                                                const std::string& out_dir) {
  RunDir rd(out_dir);
  if (!(cfg.run.dt > 0.0))
    throw ConfigError("particle simulation requires run.dt > 0");

  ParticleEnsemble ens =
      init_ensemble(cfg.particle.n, cfg.particle.init, cfg.seed);
  SimulateOptions opt;
  opt.t_final = cfg.run.t_final;
  opt.dt = cfg.run.dt;
  opt.stride = cfg.run.stride;
  const Table series = simulate(ens, cfg.model,
                                CouplingSpec::mean_field(cfg.model.eps), opt);
  write_table(rd.path("particles_series.csv"), series);

  double out_fraction = 0.0;
  const Density final_hist = empirical_density(ens, cfg.grid, &out_fraction);
  write_density(rd.path("particles_final_density.txt"), final_hist);
  write_heatmap_svg(rd.path("particles_final_density.svg"), final_hist,
                    "empirical density at t = " + format_j(ens.t));

  SvgAxes axes;
  axes.title = "ensemble mean trajectories";
  axes.x_label = "t";
  write_line_svg(rd.path("particles_trace.svg"), axes,
                 {series_from_table(series, "t", "mean_v", "mean voltage"),
                  series_from_table(series, "t", "mean_x", "mean adaptation")});

  Sidecar side;
  side.numbers = {{"n", static_cast<double>(cfg.particle.n)},
                  {"out_of_grid_fraction", out_fraction},
                  {"t_final", ens.t}};
  write_sidecar(rd.path("particles_summary.json"), side);
  return rd.finish(cfg, "simulate-particles");
}

std::vector<std::string> run_solve_pde(const Config& cfg,
                                       const std::string& out_dir) {
  RunDir rd(out_dir);
  Density f = density_from_law(cfg.particle.init, cfg.grid);
  write_heatmap_svg(rd.path("pde_initial_density.svg"), f, "initial density");

  PdeRunOptions opt;
  opt.t_final = cfg.run.t_final;
  opt.dt = cfg.run.dt;
  opt.stride = cfg.run.stride;
  opt.pde = cfg.pde;
  opt.weight = cfg.weight;
  const PdeRunResult run = solve(f, cfg.model, opt);

  write_table(rd.path("pde_series.csv"), run.series);
  write_density(rd.path("pde_final_density.txt"), f);
  write_heatmap_svg(rd.path("pde_final_density.svg"), f,
                    "density at t = " + format_j(f.time));

  SvgAxes axes;
  axes.title = "mean-field summary statistics";
  axes.x_label = "t";
  write_line_svg(rd.path("pde_trace.svg"), axes,
                 {series_from_table(run.series, "t", "j_emp", "mean voltage"),
                  series_from_table(run.series, "t", "mean_x",
                                    "mean adaptation")});

  const MonitorReport mon = monitor(run.records);
  Sidecar side;
  side.numbers = {{"dt_used", run.dt_used},
                  {"steps_taken", static_cast<double>(run.steps_taken)},
                  {"initial_mass_defect", run.initial_mass_defect},
                  {"renormalized_on_load",
                   run.renormalized_on_load ? 1.0 : 0.0},
                  {"all_checks_pass", mon.all_pass() ? 1.0 : 0.0}};
  for (const MonitorCheck& c : mon.checks) {
    side.numbers.emplace_back("check_" + c.name + "_pass", c.pass ? 1.0 : 0.0);
    if (!c.pass)
      side.strings.emplace_back("check_" + c.name + "_detail", c.detail);
  }
  write_sidecar(rd.path("pde_monitor.json"), side);
  return rd.finish(cfg, "solve-pde");
}

std::vector<std::string> run_find_stationary(const Config& cfg,
                                             const std::string& out_dir) {
  RunDir rd(out_dir);
  const std::vector<StationarySolution> sols =
      find_stationary(cfg.grid, cfg.model, cfg.stationary);

  Table summary;
  summary.columns = {"index",      "j",          "residual_l1",
                     "fixed_point_gap", "iterations", "converged",
                     "seed_j"};
  int n_converged = 0;
  for (std::size_t s = 0; s < sols.size(); ++s) {
    const StationarySolution& sol = sols[s];
    summary.add_row({static_cast<double>(s), sol.j, sol.residual_l1,
                     sol.fixed_point_gap, static_cast<double>(sol.iterations),
                     sol.converged ? 1.0 : 0.0, sol.seed_j});
    if (!sol.converged) continue;
    const std::string stem = "stationary_G" + std::to_string(n_converged);
    write_density(rd.path(stem + ".txt"), sol.G);
    write_heatmap_svg(rd.path(stem + ".svg"), sol.G,
                      "stationary density, mean voltage " + format_j(sol.j));
    ++n_converged;
  }
  write_table(rd.path("stationary_summary.csv"), summary);

  Sidecar side;
  side.numbers = {{"solutions_converged", static_cast<double>(n_converged)},
                  {"seeds_tried", static_cast<double>(sols.size())},
                  {"eps", cfg.model.eps}};
  if (n_converged > 0) {
    const PositivityReport pos = positivity_check(sols.front().G);
    side.numbers.emplace_back("interior_min", pos.min_value);
    side.numbers.emplace_back("interior_positive", pos.pass ? 1.0 : 0.0);
  }
  write_sidecar(rd.path("stationary_summary.json"), side);
  return rd.finish(cfg, "find-stationary");
}

std::vector<std::string> run_spectrum(const Config& cfg,
                                      const std::string& out_dir) {
  RunDir rd(out_dir);
  const std::vector<StationarySolution> sols =
      find_stationary(cfg.grid, cfg.model, cfg.stationary);
  const StationarySolution* base = nullptr;
  for (const auto& s : sols)
    if (s.converged) {
      base = &s;
      break;
    }
  if (!base)
    throw NumericalError(
        "spectrum: no converged stationary state to linearize around");

  const LinearizedOperator op =
      assemble_linearized(base->G, cfg.model, cfg.weight);
  const SpectralReport rep = rightmost_eigenvalues(
      op, cfg.spectral.n_eigs, cfg.spectral.tol, cfg.spectral);

  Table t;
  t.columns = spectral_report_columns();
  for (const EigenMode& m : rep.modes)
    t.add_row({m.value.real(), m.value.imag(), m.residual,
               m.is_mass_mode ? 1.0 : 0.0});
  write_table(rd.path("spectral_report.csv"), t);

  Sidecar side;
  side.numbers = {{"eps", rep.eps},
                  {"j_star", op.j_star},
                  {"gap", rep.gap},
                  {"gap_valid", rep.gap_valid ? 1.0 : 0.0},
                  {"mass_mode_defect", rep.mass_mode_defect},
                  {"shift", rep.shift},
                  {"scale", rep.scale},
                  {"operator_norm", rep.operator_norm},
                  {"converged", rep.converged ? 1.0 : 0.0},
                  {"restarts", static_cast<double>(rep.restarts)}};
  write_sidecar(rd.path("spectral_summary.json"), side);
  return rd.finish(cfg, "spectrum");
}

std::vector<std::string> run_chaos_rate(const Config& cfg,
                                        const std::string& out_dir) {
  RunDir rd(out_dir);
  const ChaosRateOutcome out = chaos_rate_experiment(cfg);
  write_table(rd.path("chaos_table.csv"), out.result.table);
  write_table(rd.path("chaos_j_path.csv"), out.j_table);

  // Final-time deviation against ensemble size, with the fitted power law.
  SvgSeries meas, fit;
  meas.label = "measured";
  fit.label = "fitted slope " + format_j(out.result.slope);
  fit.color = "#888888";
  double t_max = 0.0;
  for (const auto& row : out.result.table.rows) t_max = std::max(t_max, row[1]);
  for (const auto& row : out.result.table.rows) {
    if (row[1] < t_max) continue;
    meas.x.push_back(row[0]);
    meas.y.push_back(row[2]);
    fit.x.push_back(row[0]);
    fit.y.push_back(std::exp(out.result.intercept +
                             out.result.slope * std::log(row[0])));
  }
  SvgAxes axes;
  axes.title = "coupling-to-limit deviation vs ensemble size";
  axes.x_label = "N";
  axes.y_label = "mean-square deviation";
  axes.log_x = true;
  axes.log_y = true;
  write_line_svg(rd.path("chaos_loglog.svg"), axes, {meas, fit});

  Sidecar side;
  side.numbers = {{"slope", out.result.slope},
                  {"intercept", out.result.intercept},
                  {"trials", static_cast<double>(cfg.chaos.trials)},
                  {"j_from_file", out.j_from_file ? 1.0 : 0.0}};
  write_sidecar(rd.path("chaos_fit.json"), side);
  return rd.finish(cfg, "chaos-rate");
}

std::vector<std::string> run_regime_scan(const Config& cfg,
                                         const std::string& out_dir) {
  RunDir rd(out_dir);
  const RegimeScanResult scan =
      regime_scan(cfg.model, cfg.regime, cfg.seed);

  Table summary;
  summary.columns = {"j", "label_code", "agree", "seeds"};
  Table details;
  details.columns = {"j",          "seed",      "label_code", "ratio_a",
                     "ratio_b",    "separation", "threshold",  "peak_freq"};
  Sidecar side;
  std::vector<SvgPanelEntry> panels;
  for (const RegimeRow& row : scan.rows) {
    summary.add_row({row.j, static_cast<double>(row.majority),
                     static_cast<double>(row.agree),
                     static_cast<double>(row.seeds)});
    side.strings.emplace_back("J_" + format_j(row.j),
                              to_string(row.majority));
    for (const RegimeSeedOutcome& o : row.outcomes)
      details.add_row({row.j, static_cast<double>(o.seed_index),
                       static_cast<double>(o.decision.label),
                       o.decision.power_ratio_a, o.decision.power_ratio_b,
                       o.decision.separation, o.decision.separation_threshold,
                       o.decision.peak_frequency});
    write_table(rd.path("regime_trace_J" + format_j(row.j) + ".csv"),
                row.trace);

    SvgPanelEntry pe;
    pe.axes.title = "connectivity " + format_j(row.j) + ": " +
                    std::string(to_string(row.majority));
    pe.axes.x_label = "t";
    pe.axes.y_label = "mean voltage";
    pe.series = {series_from_table(row.trace, "t", "mean_v_a", "low start"),
                 series_from_table(row.trace, "t", "mean_v_b", "high start")};
    panels.push_back(std::move(pe));
  }
  write_table(rd.path("regime_summary.csv"), summary);
  write_table(rd.path("regime_details.csv"), details);
  write_panel_svg(rd.path("regime_panel.svg"), panels);
  write_sidecar(rd.path("regime_labels.json"), side);
  return rd.finish(cfg, "regime-scan");
}

} // namespace fhn
