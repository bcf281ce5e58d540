#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "core/diagnostics.hpp"
#include "core/grid.hpp"
#include "doctest.h"

using namespace fhn;

namespace {

Grid2D small_grid_with_origin_cell() {
  // odd cell counts put one cell center exactly at the origin
  Grid2D g;
  g.nx = 5;
  g.nv = 5;
  g.x_min = -1.0;
  g.x_max = 1.0;
  g.v_min = -1.0;
  g.v_max = 1.0;
  return g;
}

std::vector<DiagnosticsRecord> constant_series(int n) {
  std::vector<DiagnosticsRecord> s(n);
  for (int i = 0; i < n; ++i) {
    s[i].t = 0.1 * i;
    s[i].l1M = 1.3;
    s[i].j = 0.2;
    s[i].entropy = -1.0;
    s[i].fisher_v = 5.0;
    s[i].mass = 1.0;
  }
  return s;
}

} // namespace

TEST_CASE("entropy of flat and concentrated states has closed forms") {
  Grid2D g;
  const double area = (g.x_max - g.x_min) * (g.v_max - g.v_min);
  Density flat(g);
  for (double& f : flat.f) f = 1.0 / area;
  CHECK(entropy(flat) == doctest::Approx(-std::log(area)).epsilon(1e-12));

  Density cell(g);
  cell.f[g.index(10, 20)] = 1.0 / g.cell_area();
  CHECK(entropy(cell) ==
        doctest::Approx(-std::log(g.cell_area())).epsilon(1e-12));
  CHECK(entropy(cell) > 0.0); // concentration is positive in this convention

  Density zero(g);
  CHECK(entropy(zero) == 0.0); // 0*log(0) convention
}

TEST_CASE("entropy of a gaussian matches the analytic value") {
  Grid2D g;
  const double sx2 = 0.25, sv2 = 0.16;
  Density d = gaussian_density(g, 0.2, 0.3, sx2, sv2);
  const double exact = -(1.0 + std::log(2.0 * M_PI * std::sqrt(sx2 * sv2)));
  CHECK(entropy(d) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("voltage-direction fisher information") {
  Grid2D g;
  Density vconst(g);
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.nv; ++k)
      vconst.at(i, k) = 0.3 + 0.01 * i; // varies in x only
  CHECK(fisher_v(vconst) == 0.0);

  const double sv2 = 0.16;
  Density d = gaussian_density(g, 0.0, 0.0, 0.25, sv2);
  CHECK(fisher_v(d) == doctest::Approx(1.0 / sv2).epsilon(1e-3));

  // positive homogeneity of |df|^2/f
  Density scaled = d;
  for (double& f : scaled.f) f *= 3.0;
  CHECK(fisher_v(scaled) == doctest::Approx(3.0 * fisher_v(d)).epsilon(1e-12));

  // vacuum cells are skipped and counted rather than poisoning the sum
  Density sparse(g);
  sparse.at(5, 5) = 1.0;
  long skipped = 0;
  const double val = fisher_v(sparse, 1e-30, &skipped);
  CHECK(std::isfinite(val));
  CHECK(skipped > 0);
}

TEST_CASE("weighted norms have exact small-case values and scale linearly") {
  Grid2D g = small_grid_with_origin_cell();
  Density pm(g);
  pm.at(2, 2) = 1.0 / g.cell_area(); // unit mass at the origin
  CHECK(l1M_norm(pm) == doctest::Approx(1.0).epsilon(1e-14));

  WeightParams w;
  Density d = gaussian_density(Grid2D{}, 0.2, 0.3, 0.25, 0.16);
  const double l1M_exact =
      1.0 + 0.5 * (0.2 * 0.2 + 0.25) + 0.5 * (0.3 * 0.3 + 0.16);
  CHECK(l1M_norm(d) == doctest::Approx(l1M_exact).epsilon(1e-10));

  Density twice = d;
  for (double& f : twice.f) f *= 2.0;
  CHECK(l1M_norm(twice) == doctest::Approx(2.0 * l1M_norm(d)));
  CHECK(l1m_norm(twice, w) == doctest::Approx(2.0 * l1m_norm(d, w)));
  CHECK(l2m_norm(twice, w) == doctest::Approx(2.0 * l2m_norm(d, w)));
  CHECK(l2m_norm(d, w) > 0.0);
}

TEST_CASE("one-shot diagnosis agrees with the individual functionals") {
  Grid2D g;
  WeightParams w;
  Density d = gaussian_density(g, 0.1, -0.1, 0.3, 0.2);
  d.time = 2.5;
  const DiagnosticsRecord r = diagnose(d, w);
  CHECK(r.t == 2.5);
  CHECK(r.mass == doctest::Approx(mass(d)).epsilon(1e-14));
  CHECK(r.l1M == doctest::Approx(l1M_norm(d)).epsilon(1e-14));
  CHECK(r.entropy == doctest::Approx(entropy(d)).epsilon(1e-14));
  CHECK(r.fisher_v == doctest::Approx(fisher_v(d)).epsilon(1e-14));
  CHECK(r.j == doctest::Approx(mean_voltage(d)).epsilon(1e-14));
  CHECK(r.min_f == doctest::Approx(min_value(d)));
  CHECK(r.boundary_mass >= 0.0);
}

TEST_CASE("run monitor passes healthy constant series") {
  const auto series = constant_series(12);
  const MonitorReport rep = monitor(series);
  CHECK(rep.all_pass());
  REQUIRE(rep.checks.size() == 4);
}

TEST_CASE("run monitor flags a mean-voltage bound violation at its onset") {
  auto series = constant_series(12);
  series[7].j = 10.0; // far above sqrt(2 * 1.3)
  const MonitorReport rep = monitor(series);
  CHECK_FALSE(rep.all_pass());
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name == "mean-voltage-bound") {
      found = true;
      CHECK_FALSE(c.pass);
      CHECK(c.first_bad_t == doctest::Approx(series[7].t));
    } else if (c.name == "l1M-bounded" || c.name == "entropy-bound" ||
               c.name == "fisher-settled") {
      CHECK(c.pass);
    }
  CHECK(found);
}

TEST_CASE("run monitor flags weighted-norm blowup") {
  auto series = constant_series(16);
  for (int i = 8; i < 16; ++i) series[i].l1M = 1.3 * std::pow(3.0, i - 7);
  const MonitorReport rep = monitor(series);
  bool l1_failed = false;
  for (const auto& c : rep.checks)
    if (c.name == "l1M-bounded" && !c.pass) l1_failed = true;
  CHECK(l1_failed);
}

TEST_CASE("run monitor needs at least two records") {
  const MonitorReport rep = monitor(constant_series(1));
  CHECK_FALSE(rep.all_pass());
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].name == "record-count");
}

TEST_CASE("short series skip the settling check but still report it") {
  const auto series = constant_series(5); // < 8 records
  const MonitorReport rep = monitor(series);
  CHECK(rep.all_pass());
  bool fisher_seen = false;
  for (const auto& c : rep.checks)
    if (c.name == "fisher-settled") {
      fisher_seen = true;
      CHECK(c.pass);
      CHECK(c.detail.find("skip") != std::string::npos);
    }
  CHECK(fisher_seen);
}

TEST_CASE("spectral density estimate suppresses trends and finds tones") {
  std::vector<double> linear;
  for (int i = 0; i < 512; ++i) linear.push_back(0.3 + 0.01 * i);
  double total = 0.0;
  for (double p : welch_psd(linear, 8)) total += p;
  CHECK(total < 1e-12); // per-segment linear detrend removes it

  std::vector<double> tone;
  for (int i = 0; i < 512; ++i) tone.push_back(std::sin(2.0 * M_PI * i / 16.0));
  const auto psd = welch_psd(tone, 8);
  std::size_t peak = 0;
  for (std::size_t b = 1; b < psd.size(); ++b)
    if (psd[b] > psd[peak]) peak = b;
  CHECK(peak > 0);
  // period 16 samples → peak at bin L/16 for segment length L
  const double expected_bin = (psd.size() - 1) * 2.0 / 16.0;
  CHECK(std::fabs(double(peak) - expected_bin) <= 1.0);
}

TEST_CASE("regime classifier separates flat, oscillating, and split series") {
  std::mt19937 g(7);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double dt = 0.05;
  const int n = 2000;
  std::vector<double> flat_a, flat_b, osc_a, osc_b, bi_a, bi_b;
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    flat_a.push_back(0.3 + 0.01 * n01(g));
    flat_b.push_back(0.3 + 0.01 * n01(g));
    osc_a.push_back(0.5 * std::sin(2 * M_PI * 0.8 * t) + 0.02 * n01(g));
    osc_b.push_back(0.5 * std::sin(2 * M_PI * 0.8 * t + 1.0) + 0.02 * n01(g));
    bi_a.push_back(0.4 + 0.01 * n01(g));
    bi_b.push_back(1.9 + 0.01 * n01(g));
  }
  const RegimeDecision flat = classify_regime(flat_a, flat_b, dt);
  CHECK(flat.label == RegimeLabel::stationary_unimodal);
  CHECK(flat.power_ratio_a < 5.0);

  const RegimeDecision osc = classify_regime(osc_a, osc_b, dt);
  CHECK(osc.label == RegimeLabel::oscillatory);
  CHECK(osc.power_ratio_a > 5.0);
  CHECK(std::fabs(osc.peak_frequency - 0.8) < 0.15);

  const RegimeDecision bi = classify_regime(bi_a, bi_b, dt);
  CHECK(bi.label == RegimeLabel::bistable);
  CHECK(bi.separation > bi.separation_threshold);
  CHECK(bi.separation == doctest::Approx(1.5).epsilon(0.05));

  const std::vector<double> tiny(30, 0.1);
  CHECK(classify_regime(tiny, tiny, dt).label == RegimeLabel::inconclusive);

  CHECK(std::string(to_string(RegimeLabel::oscillatory)) == "oscillatory");
  CHECK(std::string(to_string(RegimeLabel::bistable)) == "bistable");
  CHECK(std::string(to_string(RegimeLabel::stationary_unimodal)) ==
        "stationary-unimodal");
}
