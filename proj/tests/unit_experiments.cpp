#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "core/config.hpp"
#include "core/experiments.hpp"
#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/runner.hpp"
#include "doctest.h"

using namespace fhn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "fhn_experiments" / leaf;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("initial laws materialize onto the grid as advertised") {
  Grid2D g;
  g.nx = 32;
  g.nv = 32;

  InitialLaw gs;
  gs.mean_x = 0.2;
  gs.mean_v = -0.3;
  gs.var_x = 0.3;
  gs.var_v = 0.2;
  const Density dg = density_from_law(gs, g);
  const Density ref = gaussian_density(g, 0.2, -0.3, 0.3, 0.2);
  CHECK(l1_distance(dg, ref) == 0.0);

  InitialLaw un;
  un.kind = InitKind::uniform;
  un.x_lo = -1.0;
  un.x_hi = 1.0;
  un.v_lo = 0.0;
  un.v_hi = 1.0;
  const Density du = density_from_law(un, g);
  CHECK(std::fabs(mass(du) - 1.0) <= 1e-12);
  double level = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.nv; ++k) {
      const double x = g.x_center(i), v = g.v_center(k);
      const bool inside = x >= -1.0 && x <= 1.0 && v >= 0.0 && v <= 1.0;
      if (!inside) {
        CHECK(du.at(i, k) == 0.0);
      } else {
        if (level == 0.0) level = du.at(i, k);
        CHECK(du.at(i, k) == level); // flat plateau
      }
    }

  InitialLaw off_grid = un;
  off_grid.x_lo = 10.0;
  off_grid.x_hi = 11.0;
  CHECK_THROWS_AS(density_from_law(off_grid, g), ConfigError);

  InitialLaw pt;
  pt.kind = InitKind::point;
  pt.x0 = 0.33;
  pt.v0 = -0.71;
  const Density dp = density_from_law(pt, g);
  CHECK(std::fabs(mass(dp) - 1.0) <= 1e-12);
  int hits = 0;
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.nv; ++k)
      if (dp.at(i, k) != 0.0) {
        ++hits;
        CHECK(std::fabs(g.x_center(i) - pt.x0) <= 0.5 * g.dx());
        CHECK(std::fabs(g.v_center(k) - pt.v0) <= 0.5 * g.dv());
      }
  CHECK(hits == 1);

  // a point beyond the box lands in the nearest corner cell
  InitialLaw far = pt;
  far.x0 = 100.0;
  far.v0 = 100.0;
  const Density dc = density_from_law(far, g);
  CHECK(dc.at(g.nx - 1, g.nv - 1) != 0.0);
}

TEST_CASE("the mean-field solver run leaves a complete artifact directory") {
  Config cfg;
  cfg.grid.nx = 48;
  cfg.grid.nv = 48;
  cfg.run.t_final = 1.5;
  cfg.run.dt = 0.0;
  cfg.run.stride = 10;
  const fs::path dir = fresh_dir("pde");

  const std::vector<std::string> files = run_solve_pde(cfg, dir.string());
  REQUIRE(!files.empty());
  CHECK(files.back() == "manifest.json");
  const std::set<std::string> names(files.begin(), files.end());
  for (const char* expect :
       {"pde_series.csv", "pde_final_density.txt", "pde_monitor.json",
        "pde_trace.svg", "pde_final_density.svg"})
    CHECK(names.count(expect) == 1);
  for (const auto& f : files) CHECK(fs::exists(dir / f));

  const auto manifest = load_json(dir / "manifest.json");
  CHECK(manifest["command"] == "solve-pde");
  CHECK(manifest["config_hash"] == config_hash(cfg));
  CHECK(manifest["seed"] == cfg.seed);
  for (const auto& out : manifest["outputs"])
    CHECK(fs::exists(dir / out.get<std::string>()));
  // the embedded config reproduces the run configuration exactly
  const Config embedded =
      parse_config(manifest["config"].get<std::string>());
  CHECK(config_hash(embedded) == config_hash(cfg));

  const auto mon = load_json(dir / "pde_monitor.json");
  CHECK(mon["all_checks_pass"] == 1.0);
  CHECK(mon["dt_used"].get<double>() > 0.0);

  const Table series = read_table((dir / "pde_series.csv").string());
  CHECK(series.columns == pde_series_columns());
  CHECK(series.rows.size() >= 8);
}

TEST_CASE("particle runs demand an explicit time step") {
  Config cfg;
  cfg.run.dt = 0.0;
  CHECK_THROWS_AS(
      run_simulate_particles(cfg, fresh_dir("particles_bad").string()),
      ConfigError);
}

TEST_CASE("the stationary-state run records solutions and positivity") {
  Config cfg;
  apply_preset(cfg, "small-connectivity");
  cfg.grid.nx = 48;
  cfg.grid.nv = 48;
  const fs::path dir = fresh_dir("stationary");
  const auto files = run_find_stationary(cfg, dir.string());
  const std::set<std::string> names(files.begin(), files.end());
  CHECK(names.count("stationary_summary.csv") == 1);
  CHECK(names.count("stationary_G0.txt") == 1);
  const auto side = load_json(dir / "stationary_summary.json");
  CHECK(side["solutions_converged"] == 1.0);
  CHECK(side["interior_positive"] == 1.0);
  CHECK(side["eps"] == 0.2);
  const Density G = read_density((dir / "stationary_G0.txt").string());
  CHECK(G.grid.nx == 48);
  CHECK(std::fabs(mass(G) - 1.0) <= 1e-10);
}

TEST_CASE("a frozen coupling path sidesteps the mean-field solve") {
  const fs::path dir = fresh_dir("chaos");
  const fs::path jpath = dir / "jref.csv";
  Table jt;
  jt.columns = {"t", "j"};
  jt.add_row({0.0, 0.1});
  jt.add_row({1.0, 0.1});
  write_table(jpath.string(), jt);

  Config cfg;
  apply_preset(cfg, "small-connectivity");
  cfg.chaos.n_list = {25, 50};
  cfg.chaos.trials = 2;
  cfg.chaos.t_final = 0.2;
  cfg.chaos.dt = 1e-3;
  cfg.chaos.record_points = 3;
  cfg.chaos.j_file = jpath.string();

  const ChaosRateOutcome out = chaos_rate_experiment(cfg);
  CHECK(out.j_from_file);
  CHECK(out.j_table.columns == std::vector<std::string>{"t", "j"});
  CHECK(out.result.table.columns == chaos_table_columns());
  CHECK(out.result.table.rows.size() == 2 * 3);
  const int c_mse = out.result.table.column_index("mse");
  for (const auto& row : out.result.table.rows) CHECK(row[c_mse] > 0.0);

  const auto files = run_chaos_rate(cfg, (dir / "run").string());
  const std::set<std::string> names(files.begin(), files.end());
  for (const char* expect : {"chaos_table.csv", "chaos_j_path.csv",
                             "chaos_fit.json", "chaos_loglog.svg"})
    CHECK(names.count(expect) == 1);
  const auto fit = load_json(dir / "run" / "chaos_fit.json");
  CHECK(fit.contains("slope"));
  CHECK(fit["j_from_file"] == 1.0);
}

TEST_CASE("strong gap-junction coupling is classified as bistable") {
  Config cfg;
  apply_preset(cfg, "bistable");
  cfg.model.eps = 3.0;
  cfg.regime.j_list = {3.0};
  cfg.regime.seeds = 1;
  cfg.regime.n = 300;
  cfg.regime.t_final = 40.0;

  const RegimeScanResult res = regime_scan(cfg.model, cfg.regime, 12345);
  CHECK(res.attractors.size() == 2);
  REQUIRE(res.rows.size() == 1);
  const RegimeRow& row = res.rows[0];
  CHECK(row.j == 3.0);
  CHECK(row.seeds == 1);
  CHECK(row.agree == 1);
  CHECK(row.majority == RegimeLabel::bistable);
  REQUIRE(row.outcomes.size() == 1);
  CHECK(row.outcomes[0].decision.label == RegimeLabel::bistable);
  CHECK(row.trace.columns ==
        std::vector<std::string>{"t", "mean_v_a", "mean_v_b"});
  CHECK(!row.trace.rows.empty());
}

TEST_CASE("regime scans validate their configuration") {
  ModelParams p;
  RegimeScanConfig cfg;
  cfg.j_list = {};
  CHECK_THROWS_AS(regime_scan(p, cfg, 1), ConfigError);
  cfg.j_list = {1.0};
  cfg.init_jitter = 0.0;
  CHECK_THROWS_AS(regime_scan(p, cfg, 1), ConfigError);
}
