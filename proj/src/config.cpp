#include "hyst/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hyst {

namespace {

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

// Raw key-value document: [section] headers or dotted keys, '#' comments.
std::map<std::string, std::string> read_document(const std::string& text,
                                                 std::vector<std::string>& issues) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back("line " + std::to_string(lineno) +
                         ": malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) +
                       ": expected 'key = value', got '" + line + "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) {
      key = section + "." + key;
    }
    kv[key] = value;
  }
  return kv;
}

class Extractor {
 public:
  Extractor(std::map<std::string, std::string> kv,
            std::vector<std::string>& issues)
      : kv_(std::move(kv)), issues_(issues) {}

  bool has(const std::string& key) {
    return kv_.find(key) != kv_.end();
  }

  std::string str(const std::string& key, const std::string& def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    return it->second;
  }

  double num(const std::string& key, double def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size() || !std::isfinite(v)) throw std::exception();
      return v;
    } catch (...) {
      issues_.push_back(key + ": '" + it->second + "' is not a finite number");
      return def;
    }
  }

  int integer(const std::string& key, int def) {
    const double v = num(key, def);
    if (v != std::floor(v)) {
      issues_.push_back(key + ": expected an integer");
      return def;
    }
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    issues_.push_back(key + ": expected true or false");
    return def;
  }

  std::vector<double> list(const std::string& key,
                           const std::vector<double>& def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        out.push_back(std::stod(item));
      } catch (...) {
        issues_.push_back(key + ": '" + item + "' is not a number");
      }
    }
    if (out.empty()) issues_.push_back(key + ": empty list");
    return out;
  }

  void require(const std::string& key, const char* why) {
    if (!has(key)) issues_.push_back(key + ": missing (" + why + ")");
  }

  void check_unknown() {
    for (const auto& [key, value] : kv_) {
      (void)value;
      if (used_.find(key) == used_.end()) {
        issues_.push_back(key + ": unknown key");
      }
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
  std::vector<std::string>& issues_;
};

SpaceProfile read_profile(Extractor& ex, const std::string& prefix,
                          const std::string& kind,
                          std::vector<std::string>& issues) {
  SpaceProfile p;
  // consume every profile key regardless of kind so a full echo re-parses
  p.amplitude = ex.num(prefix + ".amplitude", 1.0);
  p.frequency = ex.integer(prefix + ".frequency", 1);
  p.center = ex.num(prefix + ".center", 0.5);
  p.width = ex.num(prefix + ".width", 0.25);
  p.table = ex.list(prefix + ".table", {});
  p.bump_amplitude = ex.num(prefix + ".bump_amplitude", 0.0);
  p.bump_center = ex.num(prefix + ".bump_center", 0.5);
  p.bump_width = ex.num(prefix + ".bump_width", 0.25);
  if (kind == "zero") {
    p.kind = SpaceProfile::Kind::Zero;
  } else if (kind == "constant") {
    p.kind = SpaceProfile::Kind::Constant;
  } else if (kind == "sine") {
    p.kind = SpaceProfile::Kind::Sine;
    if (p.frequency < 1) issues.push_back(prefix + ".frequency: must be >= 1");
  } else if (kind == "bump") {
    p.kind = SpaceProfile::Kind::Bump;
    if (!(p.width > 0.0)) issues.push_back(prefix + ".width: must be positive");
  } else if (kind == "table") {
    p.kind = SpaceProfile::Kind::Table;
    if (p.table.empty()) issues.push_back(prefix + ".table: missing table");
  } else {
    issues.push_back(prefix + ".kind: unknown profile '" + kind + "'");
  }
  if (!(p.bump_width > 0.0)) {
    issues.push_back(prefix + ".bump_width: must be positive");
  }
  return p;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

std::string ConfigError::join(const std::vector<std::string>& issues) {
  std::string msg = "configuration invalid:";
  for (const auto& s : issues) msg += "\n  - " + s;
  return msg;
}

SimulationSpec parse_config_text(const std::string& text,
                                 const std::string& origin) {
  std::vector<std::string> issues;
  Extractor ex(read_document(text, issues), issues);
  SimulationSpec spec;

  ex.require("grid.n_cells", "mesh resolution");
  spec.n_cells = ex.integer("grid.n_cells", 2);
  if (spec.n_cells < 2) issues.push_back("grid.n_cells: must be >= 2");
  spec.length = ex.num("grid.length", 1.0);
  if (!(spec.length > 0.0)) issues.push_back("grid.length: must be positive");

  spec.energy_kind = ex.str("energy.kind", "ppower");
  spec.p = ex.num("energy.p", 2.0);
  spec.alpha1 = ex.num("energy.alpha1", 1.0);
  spec.delta = ex.num("energy.delta", 0.1);
  spec.k_values = ex.list("energy.k_values", {ex.num("energy.k", 1.0)});
  if (spec.energy_kind == "ppower" || spec.energy_kind == "regularized") {
    if (!(spec.p >= 2.0)) {
      issues.push_back("energy.p = " + fmt_double(spec.p) +
                       ": the convex integrand requires p >= 2");
    }
    if (!(spec.alpha1 > 0.0)) issues.push_back("energy.alpha1: must be positive");
    if (spec.energy_kind == "regularized" && !(spec.delta > 0.0)) {
      issues.push_back("energy.delta: must be positive");
    }
  } else if (spec.energy_kind == "quadratic") {
    for (std::size_t i = 0; i < spec.k_values.size(); ++i) {
      if (!(spec.k_values[i] > 0.0)) {
        issues.push_back("energy.k_values[" + std::to_string(i) +
                         "] = " + fmt_double(spec.k_values[i]) +
                         ": coefficient must stay above a positive bound");
      }
    }
  } else {
    issues.push_back("energy.kind: unknown kind '" + spec.energy_kind + "'");
  }

  spec.hysteresis_kind = ex.str("hysteresis.kind", "zero");
  spec.radius = ex.num("hysteresis.radius", 1.0);
  spec.initial_output = ex.num("hysteresis.initial_output", 0.0);
  spec.grid_lo = ex.num("hysteresis.grid_lo", -1.0);
  spec.grid_hi = ex.num("hysteresis.grid_hi", 1.0);
  spec.levels = ex.integer("hysteresis.levels", 10);
  spec.weight = ex.num("hysteresis.weight", 0.01);
  spec.initial_state = ex.integer("hysteresis.initial_state", -1);
  spec.sum_coeffs = ex.list("hysteresis.sum_coeffs", {});
  spec.sum_radii = ex.list("hysteresis.sum_radii", {});
  if (spec.hysteresis_kind == "play" || spec.hysteresis_kind == "stop") {
    if (!(spec.radius > 0.0)) {
      issues.push_back("hysteresis.radius: must be strictly positive");
    }
  } else if (spec.hysteresis_kind == "preisach") {
    if (spec.levels < 2) issues.push_back("hysteresis.levels: must be >= 2");
    if (!(spec.grid_lo < spec.grid_hi)) {
      issues.push_back("hysteresis.grid_lo/grid_hi: need grid_lo < grid_hi");
    }
    if (!(spec.weight >= 0.0)) {
      issues.push_back("hysteresis.weight: must be non-negative");
    }
    if (spec.initial_state != -1 && spec.initial_state != 1) {
      issues.push_back("hysteresis.initial_state: must be -1 or +1");
    }
  } else if (spec.hysteresis_kind == "sum") {
    if (spec.sum_coeffs.empty() ||
        spec.sum_coeffs.size() != spec.sum_radii.size()) {
      issues.push_back(
          "hysteresis.sum_coeffs/sum_radii: need matching non-empty lists");
    }
    for (double cc : spec.sum_coeffs) {
      if (!(cc >= 0.0)) {
        issues.push_back("hysteresis.sum_coeffs: must be non-negative");
      }
    }
    for (double rr : spec.sum_radii) {
      if (!(rr > 0.0)) {
        issues.push_back("hysteresis.sum_radii: must be strictly positive");
      }
    }
  } else if (spec.hysteresis_kind != "zero") {
    issues.push_back("hysteresis.kind: unknown kind '" + spec.hysteresis_kind +
                     "'");
  }

  spec.c_value = ex.num("coefficient.value", 1.0);
  spec.c_values = ex.list("coefficient.values", {});
  if (spec.c_values.empty()) {
    if (!(spec.c_value > 0.0)) {
      issues.push_back("coefficient.value = " + fmt_double(spec.c_value) +
                       ": c must stay above a positive lower bound");
    }
  } else {
    for (std::size_t i = 0; i < spec.c_values.size(); ++i) {
      if (!(spec.c_values[i] > 0.0)) {
        issues.push_back("coefficient.values[" + std::to_string(i) + "] = " +
                         fmt_double(spec.c_values[i]) +
                         ": c must stay above a positive lower bound");
      }
    }
    if (spec.n_cells >= 2 &&
        spec.c_values.size() != static_cast<std::size_t>(spec.n_cells) + 1) {
      issues.push_back("coefficient.values: expected one value per node");
    }
  }

  spec.load_kind = ex.str("load.kind", "zero");
  spec.load_space_kind = ex.str("load.space", "zero");
  spec.load_space = read_profile(ex, "load", spec.load_space_kind, issues);
  spec.gamma = ex.num("load.gamma", 1.0);
  spec.omega = ex.num("load.omega", 1.0);
  spec.t_on = ex.num("load.t_on", 0.0);
  spec.t_off = ex.num("load.t_off", 0.0);
  spec.t_center = ex.num("load.t_center", 0.0);
  spec.t_width = ex.num("load.t_width", 1.0);
  {
    static const std::set<std::string> kinds{"zero",     "constant", "exp",
                                             "sine",     "windowed", "pulse"};
    if (kinds.find(spec.load_kind) == kinds.end()) {
      issues.push_back("load.kind: unknown kind '" + spec.load_kind + "'");
    }
    if (spec.load_kind == "exp" && !(spec.gamma > 0.0)) {
      issues.push_back("load.gamma: must be positive");
    }
    if (spec.load_kind == "sine" && !(spec.omega > 0.0)) {
      issues.push_back("load.omega: must be positive");
    }
    if (spec.load_kind == "windowed" && !(spec.t_on <= spec.t_off)) {
      issues.push_back("load.t_on/t_off: need t_on <= t_off");
    }
    if (spec.load_kind == "pulse" && !(spec.t_width > 0.0)) {
      issues.push_back("load.t_width: must be positive");
    }
  }

  spec.initial_kind = ex.str("initial.kind", "zero");
  if (spec.initial_kind == "constant") {
    issues.push_back(
        "initial.kind: constant data violates the homogeneous Dirichlet "
        "condition on the initial state");
  }
  spec.initial_space = read_profile(ex, "initial", spec.initial_kind, issues);

  ex.require("time.ell", "number of time levels");
  spec.T = ex.num("time.T", 1.0);
  spec.ell = ex.integer("time.ell", 1);
  if (!(spec.T > 0.0)) issues.push_back("time.T: must be positive");
  if (spec.ell < 1) issues.push_back("time.ell: must be >= 1");

  spec.newton_tol = ex.num("solver.newton_tol", 1e-10);
  spec.newton_max_iter = ex.integer("solver.newton_max_iter", 50);
  spec.retry_halving = ex.boolean("solver.retry_halving", false);
  spec.retry_max_depth = ex.integer("solver.retry_max_depth", 3);
  if (!(spec.newton_tol > 0.0)) issues.push_back("solver.newton_tol: must be positive");
  if (spec.newton_max_iter < 1) issues.push_back("solver.newton_max_iter: must be >= 1");
  if (spec.retry_max_depth < 0) issues.push_back("solver.retry_max_depth: must be >= 0");

  spec.stride = ex.integer("output.stride", 1);
  if (spec.stride < 1) issues.push_back("output.stride: must be >= 1");

  spec.longtime_samples = ex.integer("longtime.samples", 12);
  spec.probe_tol = ex.num("longtime.probe_tol", 1e-4);
  spec.longtime_compare = ex.str("longtime.compare", "auto");
  if (spec.longtime_samples < 1) issues.push_back("longtime.samples: must be >= 1");
  if (!(spec.probe_tol > 0.0)) issues.push_back("longtime.probe_tol: must be positive");
  if (spec.longtime_compare != "auto" && spec.longtime_compare != "stationary" &&
      spec.longtime_compare != "zero") {
    issues.push_back("longtime.compare: expected auto, stationary or zero");
  }

  // table profiles need the grid size
  if (spec.load_space.kind == SpaceProfile::Kind::Table &&
      spec.load_space.table.size() !=
          static_cast<std::size_t>(spec.n_cells) + 1) {
    issues.push_back("load.table: expected one value per node");
  }
  if (spec.initial_space.kind == SpaceProfile::Kind::Table) {
    if (spec.initial_space.table.size() !=
        static_cast<std::size_t>(spec.n_cells) + 1) {
      issues.push_back("initial.table: expected one value per node");
    } else if (spec.initial_space.table.front() != 0.0 ||
               spec.initial_space.table.back() != 0.0) {
      issues.push_back(
          "initial.table: boundary entries must be 0 (homogeneous Dirichlet)");
    }
  }

  ex.check_unknown();
  if (!issues.empty()) {
    for (auto& s : issues) s = origin + ": " + s;
    throw ConfigError(std::move(issues));
  }
  return spec;
}

SimulationSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open configuration file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

Grid1D SimulationSpec::make_grid() const { return Grid1D(n_cells, length); }

EnergyModel SimulationSpec::make_energy() const {
  if (energy_kind == "ppower") return EnergyModel::p_power(p, alpha1);
  if (energy_kind == "regularized") {
    return EnergyModel::regularized_p_power(p, alpha1, delta);
  }
  PiecewiseConstant k;
  k.x_lo = 0.0;
  k.x_hi = length;
  k.values = k_values;
  return EnergyModel::quadratic(std::move(k));
}

HysteresisModel SimulationSpec::make_hysteresis() const {
  if (hysteresis_kind == "zero") return HysteresisModel::zero();
  if (hysteresis_kind == "play") {
    return HysteresisModel::play(radius, initial_output);
  }
  if (hysteresis_kind == "stop") return HysteresisModel::stop(radius);
  if (hysteresis_kind == "preisach") {
    return HysteresisModel::preisach_uniform(grid_lo, grid_hi, levels, weight,
                                             initial_state);
  }
  std::vector<std::pair<double, HysteresisModel>> terms;
  for (std::size_t i = 0; i < sum_coeffs.size(); ++i) {
    terms.emplace_back(sum_coeffs[i], HysteresisModel::play(sum_radii[i]));
  }
  return HysteresisModel::weighted_sum(std::move(terms));
}

std::vector<double> SimulationSpec::make_coefficient() const {
  if (!c_values.empty()) return c_values;
  return std::vector<double>(static_cast<std::size_t>(n_cells) + 1, c_value);
}

Load SimulationSpec::make_load() const {
  if (load_kind == "zero") return Load::none();
  if (load_kind == "constant") return Load::constant(load_space);
  if (load_kind == "exp") return Load::exp_decay(load_space, gamma);
  if (load_kind == "sine") return Load::sine(load_space, omega);
  if (load_kind == "windowed") return Load::windowed(load_space, t_on, t_off);
  return Load::gauss_pulse(load_space, t_center, t_width);
}

Field SimulationSpec::make_initial(const Grid1D& grid) const {
  Field u0 = Field::sample(
      grid, [&](double x) { return initial_space.at(x, grid); }, true);
  return u0;
}

RunSpec SimulationSpec::to_run_spec() const {
  Grid1D grid = make_grid();
  StepConfig cfg;
  cfg.ell = ell;
  cfg.T = T;
  cfg.newton_tol = newton_tol;
  cfg.newton_max_iter = newton_max_iter;
  return RunSpec{grid,        make_energy(),      make_hysteresis(),
                 make_coefficient(), make_load(), make_initial(grid),
                 cfg};
}

std::string SimulationSpec::echo() const {
  std::string s;
  const auto add = [&](const std::string& key, const std::string& value) {
    s += key + " = " + value + "\n";
  };
  add("grid.n_cells", std::to_string(n_cells));
  add("grid.length", fmt_double(length));
  add("energy.kind", energy_kind);
  add("energy.p", fmt_double(p));
  add("energy.alpha1", fmt_double(alpha1));
  add("energy.delta", fmt_double(delta));
  add("energy.k_values", fmt_list(k_values));
  add("hysteresis.kind", hysteresis_kind);
  add("hysteresis.radius", fmt_double(radius));
  add("hysteresis.initial_output", fmt_double(initial_output));
  add("hysteresis.grid_lo", fmt_double(grid_lo));
  add("hysteresis.grid_hi", fmt_double(grid_hi));
  add("hysteresis.levels", std::to_string(levels));
  add("hysteresis.weight", fmt_double(weight));
  add("hysteresis.initial_state", std::to_string(initial_state));
  if (!sum_coeffs.empty()) {
    add("hysteresis.sum_coeffs", fmt_list(sum_coeffs));
    add("hysteresis.sum_radii", fmt_list(sum_radii));
  }
  add("coefficient.value", fmt_double(c_value));
  if (!c_values.empty()) add("coefficient.values", fmt_list(c_values));
  add("load.kind", load_kind);
  add("load.space", load_space_kind);
  add("load.amplitude", fmt_double(load_space.amplitude));
  add("load.frequency", std::to_string(load_space.frequency));
  add("load.center", fmt_double(load_space.center));
  add("load.width", fmt_double(load_space.width));
  if (!load_space.table.empty()) add("load.table", fmt_list(load_space.table));
  add("load.bump_amplitude", fmt_double(load_space.bump_amplitude));
  add("load.bump_center", fmt_double(load_space.bump_center));
  add("load.bump_width", fmt_double(load_space.bump_width));
  add("load.gamma", fmt_double(gamma));
  add("load.omega", fmt_double(omega));
  add("load.t_on", fmt_double(t_on));
  add("load.t_off", fmt_double(t_off));
  add("load.t_center", fmt_double(t_center));
  add("load.t_width", fmt_double(t_width));
  add("initial.kind", initial_kind);
  add("initial.amplitude", fmt_double(initial_space.amplitude));
  add("initial.frequency", std::to_string(initial_space.frequency));
  add("initial.center", fmt_double(initial_space.center));
  add("initial.width", fmt_double(initial_space.width));
  if (!initial_space.table.empty()) {
    add("initial.table", fmt_list(initial_space.table));
  }
  add("initial.bump_amplitude", fmt_double(initial_space.bump_amplitude));
  add("initial.bump_center", fmt_double(initial_space.bump_center));
  add("initial.bump_width", fmt_double(initial_space.bump_width));
  add("time.T", fmt_double(T));
  add("time.ell", std::to_string(ell));
  add("solver.newton_tol", fmt_double(newton_tol));
  add("solver.newton_max_iter", std::to_string(newton_max_iter));
  add("solver.retry_halving", retry_halving ? "true" : "false");
  add("solver.retry_max_depth", std::to_string(retry_max_depth));
  add("output.stride", std::to_string(stride));
  add("longtime.samples", std::to_string(longtime_samples));
  add("longtime.probe_tol", fmt_double(probe_tol));
  add("longtime.compare", longtime_compare);
  return s;
}

}  // namespace hyst
