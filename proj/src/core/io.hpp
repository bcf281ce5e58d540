#pragma once

#include <string>
#include <vector>

#include "core/grid.hpp"

namespace fhn {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Grid density file: header `# fhn-density nx nv x_min x_max v_min v_max
/// time`, then nx·nv values row-major (one x-row per line), full precision.
void write_density(const std::string& path, const Density& d);
Density read_density(const std::string& path); // throws ConfigError on malformed input

/// Generic delimited table with a `name, name, ...` header line.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const; // -1 when absent
  void add_row(std::initializer_list<double> vals);
};

void write_table(const std::string& path, const Table& t);
Table read_table(const std::string& path);

/// Time-series column sets (fixed order):
///   particle runs: t, mean_v, mean_x, var_v, var_x, j_emp
///   pde runs add:  mass_defect, min_f, l1M, entropy, fisher_v, boundary_mass
std::vector<std::string> particle_series_columns();
std::vector<std::string> pde_series_columns();

/// Chaos-rate table columns: N, t, mse, stderr, trials.
std::vector<std::string> chaos_table_columns();

/// Spectral report columns: re, im, residual, is_mass_mode.
std::vector<std::string> spectral_report_columns();

/// Small JSON sidecar / manifest writers (flat key → string/number maps kept
/// deliberately simple; arrays of file names allowed in the manifest).
struct ManifestInfo {
  std::string command;
  std::string config_hash;
  unsigned long long seed = 0;
  double wall_time_seconds = 0.0;
  std::vector<std::string> outputs;
  std::string config_text; // canonical serialization, embedded for provenance
};

void write_manifest(const std::string& path, const ManifestInfo& info);

/// Key/value JSON object of doubles (+ optional string fields).
struct Sidecar {
  std::vector<std::pair<std::string, double>> numbers;
  std::vector<std::pair<std::string, std::string>> strings;
};

void write_sidecar(const std::string& path, const Sidecar& s);

/// Reads a (t, j) lookup from a table file: prefers columns `t` and `j`;
/// falls back to `t` and `j_emp` (time-series files). Throws ConfigError if
/// neither pair is present or rows are empty/unsorted.
struct JTable {
  std::vector<double> t;
  std::vector<double> j;
  double operator()(double time) const; // clamped linear interpolation
};

JTable read_j_table(const std::string& path);

} // namespace fhn
