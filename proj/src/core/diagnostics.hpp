#pragma once

#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/model.hpp"

namespace fhn {

/// One row of run diagnostics, appended to time-series output.
struct DiagnosticsRecord {
  double t = 0.0;
  double l1M = 0.0;     // ∫ |f| M dx dv
  double l1m = 0.0;     // ∫ |f| m dx dv
  double l2m = 0.0;     // (∫ |f m|² dx dv)^{1/2}
  double entropy = 0.0; // ∫ f log f
  double fisher_v = 0.0; // ∫ |∂_v f|²/f over non-vacuum cells
  double j = 0.0;       // mean voltage
  double mass = 0.0;
  double min_f = 0.0;
  double boundary_mass = 0.0; // mass fraction in boundary cells
};

/// ∫ f log f with the 0·log 0 = 0 convention (natural log).
double entropy(const Density& d);

/// ∫ |∂_v f|² / f with centered differences (one-sided at the v-boundaries);
/// cells with f below `vacuum_floor` contribute 0 and are counted in
/// *skipped if given. Nonnegative by construction.
double fisher_v(const Density& d, double vacuum_floor = 1e-30,
                long* skipped = nullptr);

/// Weighted norms, convention ‖f‖_{L^p(ω)} = ‖f ω‖_{L^p}. Cells whose weight
/// exponent κ(M−1) exceeds the overflow clip are excluded from the quadrature.
double l1M_norm(const Density& d);
double l1m_norm(const Density& d, const WeightParams& w);
double l2m_norm(const Density& d, const WeightParams& w);

/// Full record computed from one density snapshot.
DiagnosticsRecord diagnose(const Density& d, const WeightParams& w,
                           double vacuum_floor = 1e-30);

/// Thresholds for the a-priori monitor checks.
struct MonitorConfig {
  double l1M_headroom = 2.0;     // sup over run ≤ headroom·max(initial, plateau)
  double plateau_tail = 0.5;     // fraction of the run treated as the plateau
  double entropy_slack = 1e-9;   // slack on the entropy lower bound
  double fisher_slope_slack = 0.10; // settling slack for the Fisher tail
};

struct MonitorCheck {
  std::string name;
  bool pass = true;
  double first_bad_t = 0.0; // time of first violation when !pass
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorCheck> checks;
  bool all_pass() const;
};

/// A-priori monitor over a recorded run, testing boundedness and settling
/// rather than monotonicity (healthy transients overshoot):
///   1. sup l1M ≤ headroom · max(initial, tail plateau)
///   2. |j| ≤ sqrt(2 · l1M) at every record
///   3. entropy ≥ −2π/e − l1M at every record (bounded below)
///   4. fisher_v settles: final-quarter mean ≤ (1+slack) · previous quarter,
///      i.e. the cumulative Fisher integral ends up growing linearly
/// Needs ≥ 2 records; check 4 needs ≥ 8 and reports itself as skipped in the
/// detail string otherwise.
MonitorReport monitor(const std::vector<DiagnosticsRecord>& series,
                      const MonitorConfig& cfg = {});

/// Welch power-spectral-density estimate of a uniformly sampled series:
/// segments with 50% overlap, per-segment linear detrend and Hann window.
/// Returns one-sided PSD bins (DC first). nseg is a target; the actual
/// segment count adapts to the series length.
std::vector<double> welch_psd(const std::vector<double>& series, int nseg = 8);

enum class RegimeLabel { stationary_unimodal, oscillatory, bistable, inconclusive };
const char* to_string(RegimeLabel r);

struct RegimeClassifierConfig {
  double osc_power_ratio = 5.0;  // dominant nonzero-f power vs broadband median
  double bistable_separation = 4.0; // mean separation vs pooled std
  double burn_in_fraction = 0.2;
  int welch_segments = 16;
  int min_samples = 64; // post-burn-in records needed for the spectral test
};

struct RegimeDecision {
  RegimeLabel label = RegimeLabel::inconclusive;
  double power_ratio_a = 0.0; // spectral ratio for each initialization
  double power_ratio_b = 0.0;
  double peak_frequency = 0.0; // of the larger-ratio series, cycles per time unit
  double separation = 0.0;
  double separation_threshold = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

/// Classifies a pair of post-burn-in mean-voltage series (one per deterministic
/// attractor initialization) as oscillatory / bistable / stationary-unimodal:
///   oscillatory — the dominant nonzero-frequency power of the first-differenced
///     series (prewhitening removes the red equilibrium-noise background)
///     exceeds osc_power_ratio × the broadband median on either series;
///   bistable — time-averaged means separated by > bistable_separation × pooled
///     standard deviation;
///   else stationary-unimodal. Too few samples → inconclusive.
RegimeDecision classify_regime(const std::vector<double>& series_a,
                               const std::vector<double>& series_b,
                               double dt_record,
                               const RegimeClassifierConfig& cfg = {});

} // namespace fhn
