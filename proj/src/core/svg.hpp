#pragma once

#include <string>
#include <vector>

#include "core/grid.hpp"

namespace fhn {

/// Minimal static-SVG emitter: line charts and cell heatmaps. Plots are
/// conveniences for eyeballing runs; the delimited data files remain the
/// authoritative artifacts.

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color; // empty = pick from the default palette
};

struct SvgAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false; // log₁₀ axis; nonpositive points are dropped
  bool log_y = false;
};

/// Single chart with shared axes, decade or nice-step ticks, and a legend
/// when labels are present. Non-finite points split the polyline.
void write_line_svg(const std::string& path, const SvgAxes& axes,
                    const std::vector<SvgSeries>& series, int width = 900,
                    int height = 560);

/// Vertical stack of charts in one file (one row per entry).
struct SvgPanelEntry {
  SvgAxes axes;
  std::vector<SvgSeries> series;
};
void write_panel_svg(const std::string& path,
                     const std::vector<SvgPanelEntry>& panels, int width = 900,
                     int panel_height = 360);

/// One rect per grid cell, sequential dark-to-bright color ramp over
/// [min, max] of the data (annotated in the corner).
void write_heatmap_svg(const std::string& path, const Density& d,
                       const std::string& title, int width = 760);

} // namespace fhn
