#include "core/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace fhn {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct AxisRange {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double to_unit(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return (a - l) / (h - l);
  }
};

// Nice round tick step covering roughly `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double nice = 10.0;
  if (frac <= 1.0) nice = 1.0;
  else if (frac <= 2.0) nice = 2.0;
  else if (frac <= 5.0) nice = 5.0;
  return nice * mag;
}

std::vector<double> make_ticks(const AxisRange& r) {
  std::vector<double> ticks;
  if (r.log) {
    const int d0 = static_cast<int>(std::ceil(std::log10(r.lo) - 1e-9));
    const int d1 = static_cast<int>(std::floor(std::log10(r.hi) + 1e-9));
    const int stride = (d1 - d0) > 8 ? 2 : 1;
    for (int d = d0; d <= d1; d += stride) ticks.push_back(std::pow(10.0, d));
    if (ticks.empty()) ticks = {r.lo, r.hi};
    return ticks;
  }
  const double step = nice_step(r.hi - r.lo, 5);
  const double first = std::ceil(r.lo / step - 1e-9) * step;
  for (double t = first; t <= r.hi + 1e-9 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

AxisRange fit_range(const std::vector<SvgSeries>& series, bool use_x,
                    bool log) {
  AxisRange r;
  r.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const SvgSeries& s : series) {
    const std::vector<double>& vals = use_x ? s.x : s.y;
    for (double v : vals) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) {
    lo = log ? 0.1 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (log) {
    if (lo == hi) {
      lo /= 10.0;
      hi *= 10.0;
    }
    r.lo = lo;
    r.hi = hi;
    return r;
  }
  double pad = 0.05 * (hi - lo);
  if (pad == 0.0) pad = std::max(1e-12, 0.1 * std::abs(hi)) + 1e-12;
  r.lo = lo - pad;
  r.hi = hi + pad;
  return r;
}

struct Frame {
  double x0, y0, w, h; // plot box in SVG coordinates, y down
  double px(const AxisRange& rx, double v) const {
    return x0 + rx.to_unit(v) * w;
  }
  double py(const AxisRange& ry, double v) const {
    return y0 + h - ry.to_unit(v) * h;
  }
};

void render_chart(std::ostream& os, const SvgAxes& axes,
                  const std::vector<SvgSeries>& series, double off_y,
                  int width, int height) {
  const Frame fr{70.0, off_y + 44.0, width - 95.0, height - 100.0};
  const AxisRange rx = fit_range(series, true, axes.log_x);
  const AxisRange ry = fit_range(series, false, axes.log_y);

  os << "<rect x='" << fr.x0 << "' y='" << fr.y0 << "' width='" << fr.w
     << "' height='" << fr.h << "' fill='white' stroke='#444'/>\n";
  if (!axes.title.empty())
    os << "<text x='" << fr.x0 + fr.w / 2 << "' y='" << off_y + 24
       << "' text-anchor='middle' font-size='15'>" << xml_escape(axes.title)
       << "</text>\n";

  for (double t : make_ticks(rx)) {
    if (t < rx.lo || t > rx.hi) continue;
    const double X = fr.px(rx, t);
    os << "<line x1='" << X << "' y1='" << fr.y0 << "' x2='" << X << "' y2='"
       << fr.y0 + fr.h << "' stroke='#ddd'/>\n"
       << "<text x='" << X << "' y='" << fr.y0 + fr.h + 16
       << "' text-anchor='middle' font-size='11'>" << fmt(t) << "</text>\n";
  }
  for (double t : make_ticks(ry)) {
    if (t < ry.lo || t > ry.hi) continue;
    const double Y = fr.py(ry, t);
    os << "<line x1='" << fr.x0 << "' y1='" << Y << "' x2='" << fr.x0 + fr.w
       << "' y2='" << Y << "' stroke='#ddd'/>\n"
       << "<text x='" << fr.x0 - 6 << "' y='" << Y + 4
       << "' text-anchor='end' font-size='11'>" << fmt(t) << "</text>\n";
  }
  if (!axes.x_label.empty())
    os << "<text x='" << fr.x0 + fr.w / 2 << "' y='" << fr.y0 + fr.h + 36
       << "' text-anchor='middle' font-size='12'>" << xml_escape(axes.x_label)
       << "</text>\n";
  if (!axes.y_label.empty())
    os << "<text x='16' y='" << fr.y0 + fr.h / 2
       << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
       << fr.y0 + fr.h / 2 << ")'>" << xml_escape(axes.y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    const std::string color =
        s.color.empty() ? kPalette[si % kPaletteSize] : s.color;
    std::ostringstream pts;
    bool open = false;
    const std::size_t npt = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < npt; ++i) {
      const double xv = s.x[i], yv = s.y[i];
      const bool ok = std::isfinite(xv) && std::isfinite(yv) &&
                      (!rx.log || xv > 0.0) && (!ry.log || yv > 0.0);
      if (!ok) {
        if (open) {
          os << "<polyline points='" << pts.str() << "' fill='none' stroke='"
             << color << "' stroke-width='1.5'/>\n";
          pts.str("");
          open = false;
        }
        continue;
      }
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", fr.px(rx, xv),
                    fr.py(ry, yv));
      pts << buf;
      open = true;
    }
    if (open)
      os << "<polyline points='" << pts.str() << "' fill='none' stroke='"
         << color << "' stroke-width='1.5'/>\n";
  }

  double ly = fr.y0 + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    if (series[si].label.empty()) continue;
    const std::string color = series[si].color.empty()
                                  ? kPalette[si % kPaletteSize]
                                  : series[si].color;
    const double lx = fr.x0 + fr.w - 150;
    os << "<line x1='" << lx << "' y1='" << ly - 4 << "' x2='" << lx + 22
       << "' y2='" << ly - 4 << "' stroke='" << color
       << "' stroke-width='2'/>\n"
       << "<text x='" << lx + 28 << "' y='" << ly
       << "' font-size='11'>" << xml_escape(series[si].label) << "</text>\n";
    ly += 16;
  }
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream os(path);
  if (!os)
    throw ConfigError("cannot open '" + path + "' for writing");
  return os;
}

// Dark-blue → teal → yellow sequential ramp (piecewise-linear anchors).
void ramp_color(double t, int& r, int& g, int& b) {
  static const double anchors[][3] = {{13, 8, 135},    {84, 39, 143},
                                      {33, 113, 181},  {26, 152, 80},
                                      {166, 217, 106}, {255, 255, 191}};
  constexpr int n = 6;
  t = std::clamp(t, 0.0, 1.0) * (n - 1);
  const int i = std::min(static_cast<int>(t), n - 2);
  const double s = t - i;
  r = static_cast<int>(anchors[i][0] + s * (anchors[i + 1][0] - anchors[i][0]));
  g = static_cast<int>(anchors[i][1] + s * (anchors[i + 1][1] - anchors[i][1]));
  b = static_cast<int>(anchors[i][2] + s * (anchors[i + 1][2] - anchors[i][2]));
}

} // namespace

void write_line_svg(const std::string& path, const SvgAxes& axes,
                    const std::vector<SvgSeries>& series, int width,
                    int height) {
  std::ofstream os = open_or_throw(path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << height << "' font-family='monospace'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n";
  render_chart(os, axes, series, 0.0, width, height);
  os << "</svg>\n";
}

void write_panel_svg(const std::string& path,
                     const std::vector<SvgPanelEntry>& panels, int width,
                     int panel_height) {
  std::ofstream os = open_or_throw(path);
  const int total =
      panel_height * std::max<std::size_t>(1, panels.size());
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << total << "' font-family='monospace'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_chart(os, panels[i].axes, panels[i].series,
                 static_cast<double>(i) * panel_height, width, panel_height);
  os << "</svg>\n";
}

void write_heatmap_svg(const std::string& path, const Density& d,
                       const std::string& title, int width) {
  const Grid2D& g = d.grid;
  const double plot_w = width - 90.0;
  const double cell_w = plot_w / g.nx;
  const double cell_h = cell_w * (g.dv() / g.dx()); // equal data aspect
  const double plot_h = cell_h * g.nv;
  const double x0 = 62.0, y0 = 40.0;
  const int height = static_cast<int>(y0 + plot_h + 52.0);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : d.f) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  const double span = hi > lo ? hi - lo : 1.0;

  std::ofstream os = open_or_throw(path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << height << "' font-family='monospace'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n";
  if (!title.empty())
    os << "<text x='" << x0 + plot_w / 2
       << "' y='24' text-anchor='middle' font-size='15'>" << xml_escape(title)
       << "</text>\n";

  char buf[160];
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      int r, gg, b;
      ramp_color((d.at(i, k) - lo) / span, r, gg, b);
      // y axis points up in data space, down in SVG
      std::snprintf(buf, sizeof buf,
                    "<rect x='%.2f' y='%.2f' width='%.2f' height='%.2f' "
                    "fill='rgb(%d,%d,%d)'/>\n",
                    x0 + i * cell_w, y0 + (g.nv - 1 - k) * cell_h,
                    cell_w + 0.05, cell_h + 0.05, r, gg, b);
      os << buf;
    }
  }
  os << "<rect x='" << x0 << "' y='" << y0 << "' width='" << plot_w
     << "' height='" << plot_h << "' fill='none' stroke='#444'/>\n";
  os << "<text x='" << x0 + plot_w / 2 << "' y='" << y0 + plot_h + 30
     << "' text-anchor='middle' font-size='12'>x in [" << fmt(g.x_min) << ", "
     << fmt(g.x_max) << "]</text>\n";
  os << "<text x='16' y='" << y0 + plot_h / 2
     << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
     << y0 + plot_h / 2 << ")'>v in [" << fmt(g.v_min) << ", " << fmt(g.v_max)
     << "]</text>\n";
  os << "<text x='" << x0 << "' y='" << y0 + plot_h + 46
     << "' font-size='11'>range [" << fmt(lo) << ", " << fmt(hi)
     << "], t = " << fmt(d.time) << "</text>\n";
  os << "</svg>\n";
}

} // namespace fhn
