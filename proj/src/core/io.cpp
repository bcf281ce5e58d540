#include "core/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "core/errors.hpp"

namespace fhn {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  return in;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

} // namespace

void write_density(const std::string& path, const Density& d) {
  std::ofstream out = open_out(path);
  const Grid2D& g = d.grid;
  out << "# fhn-density " << g.nx << " " << g.nv << " " << g.x_min << " "
      << g.x_max << " " << g.v_min << " " << g.v_max << " " << d.time << "\n";
  for (int i = 0; i < g.nx; ++i) {
    for (int k = 0; k < g.nv; ++k) {
      if (k) out << " ";
      out << d.at(i, k);
    }
    out << "\n";
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

Density read_density(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string header;
  if (!std::getline(in, header))
    throw ConfigError("'" + path + "': empty density file");
  std::istringstream hs(header);
  std::string hash, tag;
  hs >> hash >> tag;
  Grid2D g;
  double time = 0.0;
  if (hash != "#" || tag != "fhn-density" ||
      !(hs >> g.nx >> g.nv >> g.x_min >> g.x_max >> g.v_min >> g.v_max >>
        time))
    throw ConfigError("'" + path + "': malformed density header");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  Density d(g);
  d.time = time;
  for (double& x : d.f)
    if (!(in >> x))
      throw ConfigError("'" + path + "': truncated density data");
  return d;
}

int Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1
                             : static_cast<int>(it - columns.begin());
}

void Table::add_row(std::initializer_list<double> vals) {
  if (vals.size() != columns.size())
    throw std::logic_error("Table::add_row: arity mismatch");
  rows.emplace_back(vals);
}

void write_table(const std::string& path, const Table& t) {
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out << ", ";
    out << t.columns[c];
  }
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ", ";
      out << row[c];
    }
    out << "\n";
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

Table read_table(const std::string& path) {
  std::ifstream in = open_in(path);
  Table t;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("'" + path + "': empty table file");
  std::istringstream hs(line);
  std::string name;
  while (std::getline(hs, name, ',')) t.columns.push_back(trim(name));
  if (t.columns.empty() || t.columns.front().empty())
    throw ConfigError("'" + path + "': malformed table header");
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream rs(line);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      try {
        row.push_back(std::stod(trim(cell)));
      } catch (const std::exception&) {
        throw ConfigError("'" + path + "': bad numeric cell '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size())
      throw ConfigError("'" + path + "': row arity mismatch");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> particle_series_columns() {
  return {"t", "mean_v", "mean_x", "var_v", "var_x", "j_emp"};
}

std::vector<std::string> pde_series_columns() {
  std::vector<std::string> cols = particle_series_columns();
  for (const char* extra : {"mass_defect", "min_f", "l1M", "entropy",
                            "fisher_v", "boundary_mass"})
    cols.push_back(extra);
  return cols;
}

std::vector<std::string> chaos_table_columns() {
  return {"N", "t", "mse", "stderr", "trials"};
}

std::vector<std::string> spectral_report_columns() {
  return {"re", "im", "residual", "is_mass_mode"};
}

void write_manifest(const std::string& path, const ManifestInfo& info) {
  nlohmann::json j;
  j["command"] = info.command;
  j["config_hash"] = info.config_hash;
  j["seed"] = info.seed;
  j["versions"] = {
      {"artifact", kArtifactVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
  };
  j["wall_time_seconds"] = info.wall_time_seconds;
  j["outputs"] = info.outputs;
  j["config"] = info.config_text;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_sidecar(const std::string& path, const Sidecar& s) {
  nlohmann::json j;
  for (const auto& [k, v] : s.numbers) j[k] = v;
  for (const auto& [k, v] : s.strings) j[k] = v;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

double JTable::operator()(double time) const {
  if (t.empty()) throw NumericalError("empty mean-voltage lookup table");
  if (time <= t.front()) return j.front();
  if (time >= t.back()) return j.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t hi = it - t.begin();
  const double w = (time - t[hi - 1]) / (t[hi] - t[hi - 1]);
  return (1.0 - w) * j[hi - 1] + w * j[hi];
}

JTable read_j_table(const std::string& path) {
  const Table tab = read_table(path);
  const int tc = tab.column_index("t");
  int jc = tab.column_index("j");
  if (jc < 0) jc = tab.column_index("j_emp");
  if (tc < 0 || jc < 0)
    throw ConfigError("'" + path +
                      "': need columns (t, j) or (t, j_emp) for a "
                      "mean-voltage table");
  JTable out;
  for (const auto& row : tab.rows) {
    out.t.push_back(row[tc]);
    out.j.push_back(row[jc]);
  }
  if (out.t.empty())
    throw ConfigError("'" + path + "': mean-voltage table has no rows");
  if (!std::is_sorted(out.t.begin(), out.t.end()))
    throw ConfigError("'" + path + "': mean-voltage table times not sorted");
  return out;
}

} // namespace fhn
