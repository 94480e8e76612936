// Key-value configuration for the CLI: flat sections, dotted keys, full
// validation with every violation collected before reporting.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hyst/stepper.hpp"

namespace hyst {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues);
  std::vector<std::string> issues_;
};

struct SimulationSpec {
  // grid
  int n_cells = 0;
  double length = 1.0;
  // energy
  std::string energy_kind = "ppower";
  double p = 2.0;
  double alpha1 = 1.0;
  double delta = 0.1;
  std::vector<double> k_values{1.0};
  // hysteresis
  std::string hysteresis_kind = "zero";
  double radius = 1.0;
  double initial_output = 0.0;
  double grid_lo = -1.0;
  double grid_hi = 1.0;
  int levels = 10;
  double weight = 0.01;
  int initial_state = -1;
  std::vector<double> sum_coeffs;
  std::vector<double> sum_radii;
  // coefficient c
  double c_value = 1.0;
  std::vector<double> c_values;  // optional nodal table
  // load
  std::string load_kind = "zero";
  SpaceProfile load_space;
  std::string load_space_kind = "zero";
  double gamma = 1.0;
  double omega = 1.0;
  double t_on = 0.0;
  double t_off = 0.0;
  double t_center = 0.0;
  double t_width = 1.0;
  // initial data
  std::string initial_kind = "zero";
  SpaceProfile initial_space;
  // time + solver
  double T = 1.0;
  int ell = 0;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  bool retry_halving = false;
  int retry_max_depth = 3;
  // output
  int stride = 1;
  // longtime probe
  int longtime_samples = 12;
  double probe_tol = 1e-4;
  std::string longtime_compare = "auto";  // auto | stationary | zero

  Grid1D make_grid() const;
  EnergyModel make_energy() const;
  HysteresisModel make_hysteresis() const;
  std::vector<double> make_coefficient() const;
  Load make_load() const;
  Field make_initial(const Grid1D& grid) const;
  RunSpec to_run_spec() const;

  // Canonical key = value rendering; re-parsing it reproduces the run.
  std::string echo() const;
};

SimulationSpec parse_config_text(const std::string& text,
                                 const std::string& origin);
SimulationSpec parse_config(const std::string& path);

}  // namespace hyst
