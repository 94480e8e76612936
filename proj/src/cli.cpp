#include "hyst/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "hyst/config.hpp"
#include "hyst/diagnostics.hpp"
#include "hyst/stationary.hpp"

namespace hyst {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_error(const std::string& category, const std::string& message) {
  std::cerr << "error: " << category << ": " << message << "\n";
}

struct Common {
  std::string config;
  std::string out = ".";
  int stride = 0;  // 0 = use the config value
  int workers = 1;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_config = true) {
  if (with_config) {
    cmd->add_option("--config", c.config, "configuration file")->required();
  }
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--stride", c.stride, "node stride for trace columns");
  cmd->add_option("--workers", c.workers, "worker count for paired runs");
  cmd->add_option("--seed", c.seed, "seed for randomized verifiers");
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

void write_header(std::ofstream& out, const SimulationSpec& spec) {
  out << "# schema_version = 1\n";
  std::istringstream echo(spec.echo());
  std::string line;
  while (std::getline(echo, line)) out << "# " << line << "\n";
}

Trace run_with_retry(const SimulationSpec& spec) {
  RunSpec rs = spec.to_run_spec();
  int depth = 0;
  for (;;) {
    try {
      return run(rs);
    } catch (const StepFailure& f) {
      if (!spec.retry_halving || depth >= spec.retry_max_depth) throw;
      ++depth;
      rs.step.ell *= 2;
      emit_error("step", std::string(f.what()) + "; retrying with halved step");
    }
  }
}

// per-level energy slack (identity form) for the trace CSV
std::vector<double> step_slacks(const Trace& trace, const EnergyModel& energy,
                                double alpha) {
  std::vector<double> slack(trace.levels.size(), 0.0);
  const double h = trace.h();
  for (int m = 1; m <= trace.ell; ++m) {
    const auto& lv = trace.levels[static_cast<std::size_t>(m)];
    const auto& pv = trace.levels[static_cast<std::size_t>(m - 1)];
    const double adot = flux_dot_dgrad(trace.grid, energy, lv.u, pv.u);
    slack[static_cast<std::size_t>(m)] =
        lv.load_dot_du + lv.resid_dot_du -
        (alpha / h) * lv.du_l2 * lv.du_l2 - adot;
  }
  return slack;
}

void write_trace(std::ofstream& out, const SimulationSpec& spec,
                 const Trace& trace, int stride, const EnergyModel& energy,
                 double alpha) {
  write_header(out, spec);
  const int n = trace.grid.node_count();
  out << "t,sigma,du_l2,grad_lp,newton_iters,achieved_resid,step_energy_slack";
  for (int i = 0; i < n; i += stride) out << ",u_" << i;
  for (int i = 0; i < n; i += stride) out << ",w_" << i;
  out << "\n";
  const std::vector<double> slack = step_slacks(trace, energy, alpha);
  for (std::size_t m = 0; m < trace.levels.size(); ++m) {
    const auto& lv = trace.levels[m];
    out << fmt(lv.t) << "," << fmt(lv.sigma) << "," << fmt(lv.du_l2) << ","
        << fmt(lv.grad_lp) << "," << lv.newton_iters << ","
        << fmt(lv.achieved_resid) << "," << fmt(slack[m]);
    for (int i = 0; i < n; i += stride) {
      out << "," << fmt(lv.u[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n; i += stride) {
      out << "," << fmt(lv.w[static_cast<std::size_t>(i)]);
    }
    out << "\n";
  }
}

int cmd_simulate(const Common& c) {
  const SimulationSpec spec = parse_config(c.config);
  const Trace trace = run_with_retry(spec);
  const RunSpec rs = spec.to_run_spec();
  auto out = open_out(c.out, "trace.csv");
  write_trace(out, spec, trace, c.stride > 0 ? c.stride : spec.stride,
              rs.energy, rs.alpha());
  return 0;
}

int cmd_stationary(const Common& c) {
  const SimulationSpec spec = parse_config(c.config);
  const Grid1D grid = spec.make_grid();
  const EnergyModel energy = spec.make_energy();
  const std::vector<double> g = spec.make_load().space.sample(grid);
  const StationaryResult res =
      solve_stationary(grid, energy, g, {spec.newton_tol, 200, true});
  auto out = open_out(c.out, "solution.csv");
  write_header(out, spec);
  out << "x,u\n";
  for (int i = 0; i < grid.node_count(); ++i) {
    out << fmt(grid.node(i)) << ","
        << fmt(res.u.values[static_cast<std::size_t>(i)]) << "\n";
  }
  std::cout << "stationary solve: scaled residual " << fmt(res.scaled_resid)
            << " in " << res.iters << " iterations\n";
  return 0;
}

struct CheckRow {
  std::string name;
  double value;
  double threshold;
  bool at_most;  // pass iff value <= threshold (else value >= threshold)

  bool pass() const { return at_most ? value <= threshold : value >= threshold; }
};

int write_report(const std::string& dir, const std::string& name,
                 const SimulationSpec& spec, const std::vector<CheckRow>& rows) {
  auto out = open_out(dir, name);
  write_header(out, spec);
  out << "check,value,threshold,pass\n";
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass();
    out << r.name << "," << fmt(r.value) << "," << fmt(r.threshold) << ","
        << (r.pass() ? 1 : 0) << "\n";
  }
  return all ? 0 : 1;
}

int cmd_verify(const Common& c) {
  const SimulationSpec spec = parse_config(c.config);
  const RunSpec rs = spec.to_run_spec();
  const Trace trace = run_with_retry(spec);
  const EnergyReport rep =
      energy_report(trace, rs.energy, rs.alpha(), spec.newton_tol);
  const InterpGap gap = interpolate_gap(trace);
  const double gap_rel =
      std::abs(gap.lhs - gap.rhs) / std::max(gap.rhs, 1e-300);
  const GrowthReport growth = verify_growth(rs.energy, 1000, c.seed);
  const MonotoneReport mono = verify_monotone(rs.energy, 1000, c.seed + 1);

  std::vector<CheckRow> rows{
      {"step_energy_slack", rep.step_slack_exact, -1e-8, false},
      {"step_energy_slack_tol", rep.step_slack_tol, -1e-8, false},
      {"window_estimate_slack", rep.window_slack, -1e-8, false},
      {"apriori_lhs_over_bound", rep.apriori_lhs, rep.apriori_bound, true},
      {"sandwich_low_violation", rep.sandwich_low_violation, 1e-8, true},
      {"sandwich_high_violation", rep.sandwich_high_violation, 1e-8, true},
      {"sigma_growth_margin", rep.sigma_bound_margin, -1e-10, false},
      {"dissipation_min", rep.dissipation_min, -1e-14, false},
      {"interpolate_gap_rel", gap_rel, 1e-12, true},
      {"energy_growth_margin", growth.worst(), -1e-12, false},
      {"flux_monotone_gap", mono.monotone_gap, -1e-12, false},
      {"flux_lipschitz_margin", mono.lipschitz_margin, -1e-12, false},
      {"subgradient_margin", mono.subgradient_margin, -1e-12, false},
  };
  const int rc = write_report(c.out, "report.csv", spec, rows);
  if (rc != 0) emit_error("verify", "one or more inequality checks failed");
  return rc;
}

int cmd_stability(const Common& c, const std::string& config2, double tol) {
  const SimulationSpec spec1 = parse_config(c.config);
  const SimulationSpec spec2 = parse_config(config2);
  if (spec1.n_cells != spec2.n_cells || spec1.length != spec2.length ||
      spec1.ell != spec2.ell || spec1.T != spec2.T) {
    throw ConfigError({"stability: the two runs must share grid and time "
                       "discretization"});
  }
  auto [t1, t2] = [&] {
    if (c.workers >= 2) {
      auto f2 = std::async(std::launch::async,
                           [&] { return run_with_retry(spec2); });
      Trace a = run_with_retry(spec1);
      return std::pair<Trace, Trace>(std::move(a), f2.get());
    }
    Trace a = run_with_retry(spec1);
    Trace b = run_with_retry(spec2);
    return std::pair<Trace, Trace>(std::move(a), std::move(b));
  }();

  const std::vector<double> cc = spec1.make_coefficient();
  const StabilityReport rep = l1_stability_report(t1, t2, cc);
  auto out = open_out(c.out, "stability.csv");
  write_header(out, spec1);
  out << "m,t,D,B,defect\n";
  const double h = t1.h();
  for (std::size_t m = 0; m < rep.D.size(); ++m) {
    out << m << "," << fmt(static_cast<double>(m) * h) << "," << fmt(rep.D[m])
        << "," << fmt(rep.B[m]) << "," << fmt(rep.D[m] - rep.B[m]) << "\n";
  }
  std::cout << "stability: max defect " << fmt(rep.max_defect) << " at level "
            << rep.argmax << " (tolerance " << fmt(tol) << ")\n";
  if (rep.max_defect > tol) {
    emit_error("stability", "defect exceeds the tolerance");
    return 1;
  }
  return 0;
}

int cmd_longtime(const Common& c) {
  const SimulationSpec spec = parse_config(c.config);
  const RunSpec rs = spec.to_run_spec();
  const Trace trace = run_with_retry(spec);

  std::vector<double> u_inf(static_cast<std::size_t>(rs.grid.node_count()), 0.0);
  const bool constant_load = spec.load_kind == "constant";
  const bool compare_stationary =
      spec.longtime_compare == "stationary" ||
      (spec.longtime_compare == "auto" && constant_load);
  if (compare_stationary) {
    const std::vector<double> g = rs.load.space.sample(rs.grid);
    u_inf = solve_stationary(rs.grid, rs.energy, g).u.values;
  }

  std::vector<double> samples = geometric_sample_times(spec.T, spec.longtime_samples);
  samples.push_back(spec.T);
  const OmegaReport rep =
      omega_limit_probe(trace, u_inf, rs.energy.p(), samples);

  auto out = open_out(c.out, "omega.csv");
  write_header(out, spec);
  out << "t,distance_lp,tail_window\n";
  for (std::size_t k = 0; k < rep.sample_times.size(); ++k) {
    out << fmt(rep.sample_times[k]) << "," << fmt(rep.distances[k]) << ","
        << fmt(rep.tail_windows[k]) << "\n";
  }
  std::cout << "longtime: final distance " << fmt(rep.final_distance)
            << (compare_stationary ? " to the stationary solution"
                                   : " to zero")
            << ", probe tolerance " << fmt(spec.probe_tol) << "\n";
  if (!(rep.final_distance <= spec.probe_tol)) {
    emit_error("longtime", "final distance exceeds the probe tolerance");
    return 1;
  }
  if (!rep.eventually_decreasing) {
    emit_error("longtime", "distance sequence is not eventually decreasing");
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"implicit-time simulation of a nonlinear parabolic equation "
               "with hysteresis"};
  app.require_subcommand(1);

  Common c_sim, c_sta, c_ver, c_stab, c_long;
  std::string config2;
  double stab_tol = 1e-6;

  add_common(app.add_subcommand("simulate", "run and export the trace"), c_sim);
  add_common(app.add_subcommand("stationary", "solve the stationary problem"),
             c_sta);
  add_common(app.add_subcommand("verify", "run and check the inequalities"),
             c_ver);
  CLI::App* stab =
      app.add_subcommand("stability", "two-run L1 comparison");
  add_common(stab, c_stab);
  stab->add_option("--config2", config2, "second configuration")->required();
  stab->add_option("--tol", stab_tol, "defect tolerance");
  add_common(app.add_subcommand("longtime", "long run plus stationary probe"),
             c_long);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(c_sim);
    if (app.got_subcommand("stationary")) return cmd_stationary(c_sta);
    if (app.got_subcommand("verify")) return cmd_verify(c_ver);
    if (app.got_subcommand("stability")) {
      return cmd_stability(c_stab, config2, stab_tol);
    }
    if (app.got_subcommand("longtime")) return cmd_longtime(c_long);
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) emit_error("config", issue);
    return 2;
  } catch (const StepFailure& e) {
    emit_error("step", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return 3;
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("hystpde");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hyst
