#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace fhn {

void InitialLaw::validate() const {
  switch (kind) {
    case InitKind::gaussian:
      if (!(var_x > 0.0) || !(var_v > 0.0))
        throw ConfigError("initial law: gaussian variances must be > 0");
      break;
    case InitKind::uniform:
      if (!(x_hi > x_lo) || !(v_hi > v_lo))
        throw ConfigError("initial law: uniform rectangle is empty");
      break;
    case InitKind::point:
      if (!std::isfinite(x0) || !std::isfinite(v0))
        throw ConfigError("initial law: point coordinates must be finite");
      break;
  }
}

void Config::validate() const {
  try {
    model.validate();
    weight.validate();
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(run.t_final > 0.0)) throw ConfigError("run.t_final must be > 0");
  if (run.dt < 0.0) throw ConfigError("run.dt must be >= 0 (0 = automatic)");
  if (run.stride < 1) throw ConfigError("run.stride must be >= 1");
  if (particle.n < 1) throw ConfigError("particle.n must be >= 1");
  particle.init.validate();
  if (!(pde.cfl_safety > 0.0) || pde.cfl_safety > 1.0)
    throw ConfigError("pde.cfl_safety must be in (0, 1]");
  if (!(pde.boundary_mass_tol > 0.0))
    throw ConfigError("pde.boundary_mass_tol must be > 0");
  if (!(stationary.damping > 0.0) || stationary.damping > 1.0)
    throw ConfigError("stationary.damping must be in (0, 1]");
  if (stationary.max_outer < 1)
    throw ConfigError("stationary.max_outer must be >= 1");
  if (!(stationary.dedup_l1 > 0.0))
    throw ConfigError("stationary.dedup_l1 must be > 0");
  if (!(stationary.power_mu > 0.0))
    throw ConfigError("stationary.power_mu must be > 0");
  if (!(stationary.residual_tol > 0.0))
    throw ConfigError("stationary.residual_tol must be > 0");
  if (spectral.n_eigs < 2) throw ConfigError("spectral.n_eigs must be >= 2");
  if (spectral.krylov_dim < spectral.n_eigs + 2)
    throw ConfigError("spectral.krylov_dim must exceed n_eigs + 1");
  if (!(spectral.shift_scale > 0.0))
    throw ConfigError("spectral.shift_scale must be > 0");
  if (chaos.n_list.empty()) throw ConfigError("chaos.n_list must be nonempty");
  for (long n : chaos.n_list)
    if (n < 2) throw ConfigError("chaos.n_list entries must be >= 2");
  if (!std::is_sorted(chaos.n_list.begin(), chaos.n_list.end()))
    throw ConfigError("chaos.n_list must be ascending");
  if (chaos.trials < 1) throw ConfigError("chaos.trials must be >= 1");
  if (!(chaos.t_final > 0.0)) throw ConfigError("chaos.t_final must be > 0");
  if (!(chaos.dt > 0.0)) throw ConfigError("chaos.dt must be > 0");
  if (regime.j_list.empty())
    throw ConfigError("regime.j_list must be nonempty");
  for (double j : regime.j_list)
    if (j < 0.0) throw ConfigError("regime.j_list entries must be >= 0");
  if (regime.seeds < 1) throw ConfigError("regime.seeds must be >= 1");
  if (regime.n < 2) throw ConfigError("regime.n must be >= 2");
  if (!(regime.t_final > 0.0)) throw ConfigError("regime.t_final must be > 0");
  if (!(regime.dt > 0.0)) throw ConfigError("regime.dt must be > 0");
  if (regime.stride < 1) throw ConfigError("regime.stride must be >= 1");
  if (!(regime.classifier.osc_power_ratio > 0.0) ||
      !(regime.classifier.bistable_separation > 0.0))
    throw ConfigError("regime classifier thresholds must be > 0");
  if (regime.classifier.burn_in_fraction < 0.0 ||
      regime.classifier.burn_in_fraction >= 1.0)
    throw ConfigError("regime.burn_in_fraction must be in [0, 1)");
  if (eps_scan.eps_list.empty())
    throw ConfigError("eps_scan.eps_list must be nonempty");
}

std::vector<std::string> preset_names() {
  return {"excitable", "bistable", "small-connectivity"};
}

void apply_preset(Config& c, const std::string& name) {
  if (name == "excitable") {
    c.model.a = 1.0;
    c.model.b = 1.0;
    c.model.lambda = 0.2;
    c.model.i0 = 0.0;
    c.model.eps = 0.0;
    c.model.sigma = 0.5;
    c.model.coupling_orientation = +1;
  } else if (name == "bistable") {
    c.model.a = 1.0;
    c.model.b = 1.0;
    c.model.lambda = 2.5;
    c.model.i0 = -0.9;
    c.model.eps = 0.0;
    c.model.sigma = 0.5;
    // Intermediate coupling develops collective oscillations only when the
    // interaction pulls voltages toward the population mean (gap-junction
    // orientation); the scan presets select that sign.
    c.model.coupling_orientation = -1;
  } else if (name == "small-connectivity") {
    apply_preset(c, "excitable");
    c.model.eps = 0.2;
  } else {
    throw ConfigError("unknown preset '" + name + "' (available: excitable, "
                      "bistable, small-connectivity)");
  }
  c.preset = name;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as a real number");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s;
  for (char ch : v) s.push_back(static_cast<char>(std::tolower(ch)));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse '" + v +
                    "' as a boolean");
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    std::istringstream ws(item);
    std::string tok;
    while (ws >> tok) out.push_back(parse_real(key, tok));
  }
  if (out.empty())
    throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<long> parse_int_list(const std::string& key,
                                 const std::string& v) {
  std::vector<long> out;
  for (double x : parse_real_list(key, v)) {
    if (x != std::floor(x))
      throw ConfigError("config key '" + key + "': expected integers");
    out.push_back(static_cast<long>(x));
  }
  return out;
}

InitKind parse_init_kind(const std::string& key, const std::string& v) {
  if (v == "gaussian") return InitKind::gaussian;
  if (v == "uniform") return InitKind::uniform;
  if (v == "point") return InitKind::point;
  throw ConfigError("config key '" + key + "': unknown initial law '" + v +
                    "' (gaussian|uniform|point)");
}

using KvMap = std::map<std::string, std::string>;

KvMap tokenize(const std::string& text) {
  KvMap kv;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (kv.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = val;
  }
  return kv;
}

/// Applies every recognized key from kv onto c, erasing consumed entries.
void bind_keys(Config& c, KvMap& kv) {
  auto real = [&](const char* k, double& dst) {
    auto it = kv.find(k);
    if (it != kv.end()) {
      dst = parse_real(k, it->second);
      kv.erase(it);
    }
  };
  auto integer = [&](const char* k, auto& dst) {
    auto it = kv.find(k);
    if (it != kv.end()) {
      dst = static_cast<std::decay_t<decltype(dst)>>(parse_int(k, it->second));
      kv.erase(it);
    }
  };
  auto boolean = [&](const char* k, bool& dst) {
    auto it = kv.find(k);
    if (it != kv.end()) {
      dst = parse_bool(k, it->second);
      kv.erase(it);
    }
  };
  auto real_list = [&](const char* k, std::vector<double>& dst) {
    auto it = kv.find(k);
    if (it != kv.end()) {
      dst = parse_real_list(k, it->second);
      kv.erase(it);
    }
  };

  integer("seed", c.seed);
  integer("threads", c.threads);

  real("model.a", c.model.a);
  real("model.b", c.model.b);
  real("model.lambda", c.model.lambda);
  real("model.i0", c.model.i0);
  real("model.eps", c.model.eps);
  real("model.sigma", c.model.sigma);
  integer("model.coupling_orientation", c.model.coupling_orientation);
  boolean("model.paper_sde_signs", c.model.paper_sde_signs);
  real("model.kappa", c.weight.kappa);

  integer("grid.nx", c.grid.nx);
  integer("grid.nv", c.grid.nv);
  real("grid.x_min", c.grid.x_min);
  real("grid.x_max", c.grid.x_max);
  real("grid.v_min", c.grid.v_min);
  real("grid.v_max", c.grid.v_max);

  real("run.t_final", c.run.t_final);
  real("run.dt", c.run.dt);
  integer("run.stride", c.run.stride);

  integer("particle.n", c.particle.n);
  {
    auto it = kv.find("particle.init");
    if (it != kv.end()) {
      c.particle.init.kind = parse_init_kind("particle.init", it->second);
      kv.erase(it);
    }
  }
  real("particle.init_mean_x", c.particle.init.mean_x);
  real("particle.init_mean_v", c.particle.init.mean_v);
  real("particle.init_var_x", c.particle.init.var_x);
  real("particle.init_var_v", c.particle.init.var_v);
  real("particle.init_x_lo", c.particle.init.x_lo);
  real("particle.init_x_hi", c.particle.init.x_hi);
  real("particle.init_v_lo", c.particle.init.v_lo);
  real("particle.init_v_hi", c.particle.init.v_hi);
  real("particle.init_x0", c.particle.init.x0);
  real("particle.init_v0", c.particle.init.v0);

  real("pde.cfl_safety", c.pde.cfl_safety);
  real("pde.boundary_mass_tol", c.pde.boundary_mass_tol);
  real("pde.vacuum_floor", c.pde.vacuum_floor);
  real("pde.mass_renorm_warn", c.pde.mass_renorm_warn);

  real_list("stationary.j_seeds", c.stationary.j_seeds);
  real("stationary.damping", c.stationary.damping);
  real("stationary.j_tol", c.stationary.j_tol);
  integer("stationary.max_outer", c.stationary.max_outer);
  real("stationary.dedup_l1", c.stationary.dedup_l1);
  real("stationary.power_mu", c.stationary.power_mu);
  real("stationary.power_tol", c.stationary.power_tol);
  integer("stationary.power_max_sweeps", c.stationary.power_max_sweeps);
  real("stationary.residual_tol", c.stationary.residual_tol);
  real("stationary.longtime_chunk", c.stationary.longtime_chunk);
  real("stationary.longtime_drift_tol", c.stationary.longtime_drift_tol);
  real("stationary.longtime_t_max", c.stationary.longtime_t_max);

  integer("spectral.n_eigs", c.spectral.n_eigs);
  integer("spectral.krylov_dim", c.spectral.krylov_dim);
  integer("spectral.max_restarts", c.spectral.max_restarts);
  real("spectral.tol", c.spectral.tol);
  real("spectral.shift_scale", c.spectral.shift_scale);
  integer("spectral.power_iters", c.spectral.power_iters);
  real("spectral.perturbation_l2m", c.spectral.perturbation_l2m);

  {
    auto it = kv.find("chaos.n_list");
    if (it != kv.end()) {
      c.chaos.n_list = parse_int_list("chaos.n_list", it->second);
      kv.erase(it);
    }
  }
  integer("chaos.trials", c.chaos.trials);
  real("chaos.t_final", c.chaos.t_final);
  real("chaos.dt", c.chaos.dt);
  integer("chaos.record_points", c.chaos.record_points);
  {
    auto it = kv.find("chaos.j_file");
    if (it != kv.end()) {
      c.chaos.j_file = it->second;
      kv.erase(it);
    }
  }

  real_list("regime.j_list", c.regime.j_list);
  integer("regime.seeds", c.regime.seeds);
  integer("regime.n", c.regime.n);
  real("regime.t_final", c.regime.t_final);
  real("regime.dt", c.regime.dt);
  integer("regime.stride", c.regime.stride);
  real("regime.init_jitter", c.regime.init_jitter);
  real("regime.osc_power_ratio", c.regime.classifier.osc_power_ratio);
  real("regime.bistable_separation", c.regime.classifier.bistable_separation);
  real("regime.burn_in_fraction", c.regime.classifier.burn_in_fraction);
  integer("regime.welch_segments", c.regime.classifier.welch_segments);
  integer("regime.min_samples", c.regime.classifier.min_samples);

  real_list("eps_scan.eps_list", c.eps_scan.eps_list);
}

} // namespace

Config parse_config(const std::string& text,
                    const std::string& preset_override) {
  KvMap kv = tokenize(text);
  Config c;

  std::string preset = preset_override;
  auto it = kv.find("preset");
  if (it != kv.end()) {
    if (preset.empty()) preset = it->second;
    kv.erase(it);
  }
  if (!preset.empty()) apply_preset(c, preset);

  bind_keys(c, kv);
  if (!kv.empty()) {
    std::string unknown;
    for (const auto& [k, v] : kv) {
      if (!unknown.empty()) unknown += ", ";
      unknown += k;
    }
    throw ConfigError("unknown config key(s): " + unknown);
  }
  c.validate();
  return c;
}

Config load_config_file(const std::string& path,
                        const std::string& preset_override) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), preset_override);
}

void set_config_key(Config& c, const std::string& key,
                    const std::string& value) {
  if (key == "preset") {
    apply_preset(c, value);
    c.validate();
    return;
  }
  KvMap kv;
  kv[key] = value;
  bind_keys(c, kv);
  if (!kv.empty()) throw ConfigError("unknown config key '" + key + "'");
  c.validate();
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string fmt(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += fmt(xs[i]);
  }
  return s;
}

std::string fmt(const std::vector<long>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(xs[i]);
  }
  return s;
}

const char* to_key(InitKind k) {
  switch (k) {
    case InitKind::gaussian: return "gaussian";
    case InitKind::uniform: return "uniform";
    case InitKind::point: return "point";
  }
  return "?";
}

} // namespace

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  if (!c.preset.empty()) os << "preset = " << c.preset << "\n";
  os << "seed = " << c.seed << "\n";
  os << "threads = " << c.threads << "\n";
  os << "\n[model]\n";
  os << "a = " << fmt(c.model.a) << "\n";
  os << "b = " << fmt(c.model.b) << "\n";
  os << "lambda = " << fmt(c.model.lambda) << "\n";
  os << "i0 = " << fmt(c.model.i0) << "\n";
  os << "eps = " << fmt(c.model.eps) << "\n";
  os << "sigma = " << fmt(c.model.sigma) << "\n";
  os << "kappa = " << fmt(c.weight.kappa) << "\n";
  os << "coupling_orientation = " << c.model.coupling_orientation << "\n";
  os << "paper_sde_signs = " << (c.model.paper_sde_signs ? "true" : "false")
     << "\n";
  os << "\n[grid]\n";
  os << "nx = " << c.grid.nx << "\n";
  os << "nv = " << c.grid.nv << "\n";
  os << "x_min = " << fmt(c.grid.x_min) << "\n";
  os << "x_max = " << fmt(c.grid.x_max) << "\n";
  os << "v_min = " << fmt(c.grid.v_min) << "\n";
  os << "v_max = " << fmt(c.grid.v_max) << "\n";
  os << "\n[run]\n";
  os << "t_final = " << fmt(c.run.t_final) << "\n";
  os << "dt = " << fmt(c.run.dt) << "\n";
  os << "stride = " << c.run.stride << "\n";
  os << "\n[particle]\n";
  os << "n = " << c.particle.n << "\n";
  os << "init = " << to_key(c.particle.init.kind) << "\n";
  os << "init_mean_x = " << fmt(c.particle.init.mean_x) << "\n";
  os << "init_mean_v = " << fmt(c.particle.init.mean_v) << "\n";
  os << "init_var_x = " << fmt(c.particle.init.var_x) << "\n";
  os << "init_var_v = " << fmt(c.particle.init.var_v) << "\n";
  os << "init_x_lo = " << fmt(c.particle.init.x_lo) << "\n";
  os << "init_x_hi = " << fmt(c.particle.init.x_hi) << "\n";
  os << "init_v_lo = " << fmt(c.particle.init.v_lo) << "\n";
  os << "init_v_hi = " << fmt(c.particle.init.v_hi) << "\n";
  os << "init_x0 = " << fmt(c.particle.init.x0) << "\n";
  os << "init_v0 = " << fmt(c.particle.init.v0) << "\n";
  os << "\n[pde]\n";
  os << "cfl_safety = " << fmt(c.pde.cfl_safety) << "\n";
  os << "boundary_mass_tol = " << fmt(c.pde.boundary_mass_tol) << "\n";
  os << "vacuum_floor = " << fmt(c.pde.vacuum_floor) << "\n";
  os << "mass_renorm_warn = " << fmt(c.pde.mass_renorm_warn) << "\n";
  os << "\n[stationary]\n";
  if (!c.stationary.j_seeds.empty())
    os << "j_seeds = " << fmt(c.stationary.j_seeds) << "\n";
  os << "damping = " << fmt(c.stationary.damping) << "\n";
  os << "j_tol = " << fmt(c.stationary.j_tol) << "\n";
  os << "max_outer = " << c.stationary.max_outer << "\n";
  os << "dedup_l1 = " << fmt(c.stationary.dedup_l1) << "\n";
  os << "power_mu = " << fmt(c.stationary.power_mu) << "\n";
  os << "power_tol = " << fmt(c.stationary.power_tol) << "\n";
  os << "power_max_sweeps = " << c.stationary.power_max_sweeps << "\n";
  os << "residual_tol = " << fmt(c.stationary.residual_tol) << "\n";
  os << "longtime_chunk = " << fmt(c.stationary.longtime_chunk) << "\n";
  os << "longtime_drift_tol = " << fmt(c.stationary.longtime_drift_tol)
     << "\n";
  os << "longtime_t_max = " << fmt(c.stationary.longtime_t_max) << "\n";
  os << "\n[spectral]\n";
  os << "n_eigs = " << c.spectral.n_eigs << "\n";
  os << "krylov_dim = " << c.spectral.krylov_dim << "\n";
  os << "max_restarts = " << c.spectral.max_restarts << "\n";
  os << "tol = " << fmt(c.spectral.tol) << "\n";
  os << "shift_scale = " << fmt(c.spectral.shift_scale) << "\n";
  os << "power_iters = " << c.spectral.power_iters << "\n";
  os << "perturbation_l2m = " << fmt(c.spectral.perturbation_l2m) << "\n";
  os << "\n[chaos]\n";
  os << "n_list = " << fmt(c.chaos.n_list) << "\n";
  os << "trials = " << c.chaos.trials << "\n";
  os << "t_final = " << fmt(c.chaos.t_final) << "\n";
  os << "dt = " << fmt(c.chaos.dt) << "\n";
  os << "record_points = " << c.chaos.record_points << "\n";
  if (!c.chaos.j_file.empty()) os << "j_file = " << c.chaos.j_file << "\n";
  os << "\n[regime]\n";
  os << "j_list = " << fmt(c.regime.j_list) << "\n";
  os << "seeds = " << c.regime.seeds << "\n";
  os << "n = " << c.regime.n << "\n";
  os << "t_final = " << fmt(c.regime.t_final) << "\n";
  os << "dt = " << fmt(c.regime.dt) << "\n";
  os << "stride = " << c.regime.stride << "\n";
  os << "init_jitter = " << fmt(c.regime.init_jitter) << "\n";
  os << "osc_power_ratio = " << fmt(c.regime.classifier.osc_power_ratio)
     << "\n";
  os << "bistable_separation = "
     << fmt(c.regime.classifier.bistable_separation) << "\n";
  os << "burn_in_fraction = " << fmt(c.regime.classifier.burn_in_fraction)
     << "\n";
  os << "welch_segments = " << c.regime.classifier.welch_segments << "\n";
  os << "min_samples = " << c.regime.classifier.min_samples << "\n";
  os << "\n[eps_scan]\n";
  os << "eps_list = " << fmt(c.eps_scan.eps_list) << "\n";
  return os.str();
}

std::string config_hash(const Config& c) {
  const std::string s = serialize_config(c);
  std::uint64_t h = 1469598103934665603ull; // FNV offset basis
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull; // FNV prime
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

} // namespace fhn
