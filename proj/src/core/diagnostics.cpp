#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

namespace fhn {

double entropy(const Density& d) {
  double s = 0.0, c = 0.0;
  for (double f : d.f) {
    if (f > 0.0) {
      const double y = f * std::log(f) - c;
      const double t = s + y;
      c = (t - s) - y;
      s = t;
    }
  }
  return s * d.grid.cell_area();
}

double fisher_v(const Density& d, double vacuum_floor, long* skipped) {
  const int nx = d.grid.nx, nv = d.grid.nv;
  const double dv = d.grid.dv();
  double s = 0.0;
  long skip = 0;
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < nv; ++k) {
      const double f = d.at(i, k);
      if (f < vacuum_floor) {
        ++skip;
        continue;
      }
      double dfdv;
      if (k == 0)
        dfdv = (d.at(i, 1) - f) / dv;
      else if (k == nv - 1)
        dfdv = (f - d.at(i, nv - 2)) / dv;
      else
        dfdv = (d.at(i, k + 1) - d.at(i, k - 1)) / (2.0 * dv);
      s += dfdv * dfdv / f;
    }
  }
  if (skipped) *skipped = skip;
  return s * d.grid.cell_area();
}

double l1M_norm(const Density& d) {
  double s = 0.0;
  for (int i = 0; i < d.grid.nx; ++i) {
    const double x = d.grid.x_center(i);
    for (int k = 0; k < d.grid.nv; ++k)
      s += std::abs(d.at(i, k)) * weight_M(x, d.grid.v_center(k));
  }
  return s * d.grid.cell_area();
}

double l1m_norm(const Density& d, const WeightParams& w) {
  double s = 0.0;
  for (int i = 0; i < d.grid.nx; ++i) {
    const double x = d.grid.x_center(i);
    for (int k = 0; k < d.grid.nv; ++k) {
      const double e = log_weight_m(x, d.grid.v_center(k), w);
      if (e > kMaxWeightExponent) continue; // outside the quadrature clip
      s += std::abs(d.at(i, k)) * std::exp(e);
    }
  }
  return s * d.grid.cell_area();
}

double l2m_norm(const Density& d, const WeightParams& w) {
  double s = 0.0;
  for (int i = 0; i < d.grid.nx; ++i) {
    const double x = d.grid.x_center(i);
    for (int k = 0; k < d.grid.nv; ++k) {
      const double e = log_weight_m(x, d.grid.v_center(k), w);
      if (e > 0.5 * kMaxWeightExponent) continue; // m² must not overflow
      const double fm = d.at(i, k) * std::exp(e);
      s += fm * fm;
    }
  }
  return std::sqrt(s * d.grid.cell_area());
}

DiagnosticsRecord diagnose(const Density& d, const WeightParams& w,
                           double vacuum_floor) {
  DiagnosticsRecord r;
  r.t = d.time;
  r.l1M = l1M_norm(d);
  r.l1m = l1m_norm(d, w);
  r.l2m = l2m_norm(d, w);
  r.entropy = entropy(d);
  r.fisher_v = fisher_v(d, vacuum_floor);
  r.j = mean_voltage(d);
  r.mass = mass(d);
  r.min_f = min_value(d);

  double bmass = 0.0;
  for (int i = 0; i < d.grid.nx; ++i)
    for (int k = 0; k < d.grid.nv; ++k)
      if (i == 0 || i == d.grid.nx - 1 || k == 0 || k == d.grid.nv - 1)
        bmass += d.at(i, k);
  bmass *= d.grid.cell_area();
  r.boundary_mass = (r.mass != 0.0) ? bmass / r.mass : 0.0;
  return r;
}

bool MonitorReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const MonitorCheck& c) { return c.pass; });
}

namespace {

template <class Getter>
double quarter_mean(const std::vector<DiagnosticsRecord>& series,
                    std::size_t lo, std::size_t hi, Getter get) {
  if (hi <= lo) return 0.0;
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += get(series[i]);
  return s / static_cast<double>(hi - lo);
}

} // namespace

MonitorReport monitor(const std::vector<DiagnosticsRecord>& series,
                      const MonitorConfig& cfg) {
  MonitorReport rep;
  if (series.size() < 2) {
    rep.checks.push_back({"record-count", false, 0.0,
                          "monitor needs at least 2 records"});
    return rep;
  }
  const std::size_t n = series.size();

  // 1. weighted-L1 boundedness: a healthy transient may overshoot its final
  // plateau, but the whole run must stay within a fixed headroom of
  // max(initial, plateau). A diverging norm escapes any fixed multiple.
  {
    std::size_t tail0 = static_cast<std::size_t>((1.0 - cfg.plateau_tail) * n);
    tail0 = std::min(tail0, n - 1);
    double plateau = 0.0;
    for (std::size_t i = tail0; i < n; ++i) plateau += series[i].l1M;
    plateau /= (n - tail0);
    const double bound =
        std::max(plateau, series.front().l1M) * cfg.l1M_headroom;
    MonitorCheck c{"l1M-bounded", true, 0.0, ""};
    for (const auto& r : series)
      if (r.l1M > bound) {
        c.pass = false;
        c.first_bad_t = r.t;
        break;
      }
    std::ostringstream os;
    os << "plateau=" << plateau << " bound=" << bound;
    c.detail = os.str();
    rep.checks.push_back(c);
  }

  // 2. |j| ≤ sqrt(2·l1M) pointwise
  {
    MonitorCheck c{"mean-voltage-bound", true, 0.0, "|j| <= sqrt(2*l1M)"};
    for (const auto& r : series)
      if (std::abs(r.j) > std::sqrt(2.0 * std::max(r.l1M, 0.0)) + 1e-12) {
        c.pass = false;
        c.first_bad_t = r.t;
        break;
      }
    rep.checks.push_back(c);
  }

  // 3. entropy bounded below: H ≥ −2π/e − l1M at every record
  {
    MonitorCheck c{"entropy-bound", true, 0.0, "H >= -2*pi/e - l1M"};
    const double offset = 2.0 * M_PI / std::exp(1.0);
    for (const auto& r : series)
      if (r.entropy < -offset - r.l1M - cfg.entropy_slack) {
        c.pass = false;
        c.first_bad_t = r.t;
        break;
      }
    rep.checks.push_back(c);
  }

  // 4. Fisher information settles: the slope of the cumulative Fisher
  // integral (= the instantaneous value) must stop rising by the final
  // quarter, so the integral ends up growing linearly rather than faster.
  // A roughening density shows up as a tail that keeps climbing.
  {
    MonitorCheck c{"fisher-settled", true, 0.0, ""};
    std::ostringstream os;
    if (n >= 8) {
      const double prev = quarter_mean(series, n / 2, 3 * n / 4,
                                       [](const DiagnosticsRecord& r) {
                                         return r.fisher_v;
                                       });
      const double last = quarter_mean(series, 3 * n / 4, n,
                                       [](const DiagnosticsRecord& r) {
                                         return r.fisher_v;
                                       });
      os << "tail mean " << prev << " -> " << last;
      if (last > prev * (1.0 + cfg.fisher_slope_slack) + 1e-300) {
        c.pass = false;
        c.first_bad_t = series[3 * n / 4].t;
      }
    } else {
      os << "skipped: short series";
    }
    c.detail = os.str();
    rep.checks.push_back(c);
  }

  return rep;
}

std::vector<double> welch_psd(const std::vector<double>& series, int nseg) {
  const long n = static_cast<long>(series.size());
  const long L = (nseg >= 1) ? 2 * n / (nseg + 1) : 0;
  if (L < 16) return {};
  const long step = L / 2;
  const long nbins = L / 2 + 1;
  std::vector<double> psd(nbins, 0.0);
  std::vector<double> seg(L), window(L);
  for (long t = 0; t < L; ++t)
    window[t] = 0.5 - 0.5 * std::cos(2.0 * M_PI * t / (L - 1));

  long count = 0;
  for (long s0 = 0; s0 + L <= n; s0 += step) {
    // linear detrend against t = 0..L-1
    double mt = 0.5 * (L - 1), my = 0.0;
    for (long t = 0; t < L; ++t) my += series[s0 + t];
    my /= L;
    double num = 0.0, den = 0.0;
    for (long t = 0; t < L; ++t) {
      num += (t - mt) * (series[s0 + t] - my);
      den += (t - mt) * (t - mt);
    }
    const double slope = den > 0.0 ? num / den : 0.0;
    for (long t = 0; t < L; ++t)
      seg[t] = (series[s0 + t] - my - slope * (t - mt)) * window[t];

    for (long k = 0; k < nbins; ++k) {
      const std::complex<double> w =
          std::exp(std::complex<double>(0.0, -2.0 * M_PI * k / L));
      std::complex<double> acc = 0.0, rot = 1.0;
      for (long t = 0; t < L; ++t) {
        acc += seg[t] * rot;
        rot *= w;
      }
      psd[k] += std::norm(acc);
    }
    ++count;
  }
  if (count == 0) return {};
  for (double& p : psd) p /= count;
  return psd;
}

const char* to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::stationary_unimodal: return "stationary-unimodal";
    case RegimeLabel::oscillatory: return "oscillatory";
    case RegimeLabel::bistable: return "bistable";
    case RegimeLabel::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct SpectralTest {
  double ratio = 0.0;
  double peak_freq = 0.0;
  bool valid = false;
};

// Dominant nonzero-frequency power of the first-differenced series against the
// broadband median. Differencing prewhitens the red background of equilibrium
// fluctuations so only a genuine narrowband component trips the threshold.
SpectralTest spectral_ratio(const std::vector<double>& series, double dt_record,
                            int nseg) {
  SpectralTest out;
  if (series.size() < 2) return out;
  std::vector<double> diff(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i)
    diff[i] = series[i + 1] - series[i];
  const std::vector<double> psd = welch_psd(diff, nseg);
  if (psd.size() < 4) return out;

  std::vector<double> band(psd.begin() + 1, psd.end()); // exclude DC
  std::size_t kmax = 0;
  for (std::size_t k = 1; k < band.size(); ++k)
    if (band[k] > band[kmax]) kmax = k;
  std::vector<double> sorted = band;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double med = sorted[sorted.size() / 2];
  if (med <= 0.0) return out;

  const long L = 2 * static_cast<long>(diff.size()) / (nseg + 1);
  out.ratio = band[kmax] / med;
  out.peak_freq = static_cast<double>(kmax + 1) / (L * dt_record);
  out.valid = true;
  return out;
}

} // namespace

RegimeDecision classify_regime(const std::vector<double>& series_a,
                               const std::vector<double>& series_b,
                               double dt_record,
                               const RegimeClassifierConfig& cfg) {
  RegimeDecision d;
  auto burn = [&](const std::vector<double>& s) {
    const std::size_t b =
        static_cast<std::size_t>(cfg.burn_in_fraction * s.size());
    return std::vector<double>(s.begin() + b, s.end());
  };
  const std::vector<double> a = burn(series_a);
  const std::vector<double> b = burn(series_b);
  if (static_cast<int>(a.size()) < cfg.min_samples ||
      static_cast<int>(b.size()) < cfg.min_samples)
    return d; // inconclusive

  const SpectralTest ta = spectral_ratio(a, dt_record, cfg.welch_segments);
  const SpectralTest tb = spectral_ratio(b, dt_record, cfg.welch_segments);
  if (!ta.valid || !tb.valid) return d; // inconclusive
  d.power_ratio_a = ta.ratio;
  d.power_ratio_b = tb.ratio;
  d.peak_frequency = (ta.ratio >= tb.ratio) ? ta.peak_freq : tb.peak_freq;

  auto mean_sd = [](const std::vector<double>& s, double& m, double& sd) {
    m = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
    double acc = 0.0;
    for (double x : s) acc += (x - m) * (x - m);
    sd = std::sqrt(acc / (s.size() - 1));
  };
  double sa, sb;
  mean_sd(a, d.mean_a, sa);
  mean_sd(b, d.mean_b, sb);
  d.separation = std::abs(d.mean_a - d.mean_b);
  d.separation_threshold =
      cfg.bistable_separation * std::sqrt(0.5 * (sa * sa + sb * sb));

  if (std::max(ta.ratio, tb.ratio) > cfg.osc_power_ratio)
    d.label = RegimeLabel::oscillatory;
  else if (d.separation > d.separation_threshold)
    d.label = RegimeLabel::bistable;
  else
    d.label = RegimeLabel::stationary_unimodal;
  return d;
}

} // namespace fhn
