#include <doctest.h>

#include <cmath>
#include <vector>

#include "hyst/diagnostics.hpp"
#include "hyst/stationary.hpp"

using namespace hyst;

namespace {

RunSpec base_spec(int n, int ell, double T) {
  Grid1D grid(n, 1.0);
  return RunSpec{grid,
                 EnergyModel::p_power(3.0, 1.0 / 3.0),
                 HysteresisModel::play(0.2),
                 std::vector<double>(static_cast<std::size_t>(n) + 1, 1.0),
                 Load::constant(SpaceProfile::sine(1.0, 1)),
                 Field::sample(grid,
                               [](double x) { return 0.5 * std::sin(M_PI * x); }),
                 StepConfig{ell, T}};
}

}  // namespace

TEST_CASE("sigma of reference fields") {
  Grid1D grid(200, 1.0);
  auto ppower = EnergyModel::p_power(3.0, 1.0);
  CHECK(sigma(grid, ppower, Field::zeros(grid).values) == 0.0);

  Field u = Field::sample(grid, [](double x) { return std::sin(M_PI * x); });
  auto quad = EnergyModel::quadratic(1.0);
  CHECK(std::abs(sigma(grid, quad, u.values) - M_PI * M_PI / 4.0) <= 2e-3);
  auto p2 = EnergyModel::p_power(2.0, 0.5);
  CHECK(sigma(grid, p2, u.values) == doctest::Approx(sigma(grid, quad, u.values)));
}

TEST_CASE("energy report is clean on zero data") {
  Grid1D grid(10, 1.0);
  RunSpec spec{grid,
               EnergyModel::quadratic(1.0),
               HysteresisModel::zero(),
               std::vector<double>(11, 1.0),
               Load::none(),
               Field::zeros(grid),
               StepConfig{5, 1.0}};
  const Trace trace = run(spec);
  const EnergyReport rep = energy_report(trace, spec.energy, 1.0, 1e-10);
  CHECK(rep.pass());
  CHECK(rep.step_slack_exact >= 0.0);
  CHECK(rep.apriori_lhs == 0.0);
}

TEST_CASE("energy report passes on the unforced heat benchmark") {
  Grid1D grid(100, 1.0);
  RunSpec spec{grid,
               EnergyModel::p_power(2.0, 0.5),
               HysteresisModel::zero(),
               std::vector<double>(101, 1.0),
               Load::none(),
               Field::sample(grid, [](double x) { return std::sin(M_PI * x); }),
               StepConfig{100, 0.1}};
  const Trace trace = run(spec);
  const EnergyReport rep = energy_report(trace, spec.energy, 1.0, 1e-10);
  CHECK(rep.pass());
  // with f = 0 the windowed estimate forces sigma to be non-increasing
  for (std::size_t m = 1; m < trace.levels.size(); ++m) {
    CHECK(trace.levels[m].sigma <= trace.levels[m - 1].sigma + 1e-10);
  }
}

TEST_CASE("energy report passes on a forced play-hysteresis run") {
  RunSpec spec = base_spec(50, 100, 1.0);
  const Trace trace = run(spec);
  const EnergyReport rep = energy_report(trace, spec.energy, spec.alpha(), 1e-10);
  CHECK(rep.pass());
  CHECK(rep.step_slack_exact >= -1e-8);
  CHECK(rep.window_slack >= -1e-8);
  CHECK(rep.apriori_lhs <= rep.apriori_bound);
  CHECK(rep.sandwich_low_violation <= 1e-10);
  CHECK(rep.sandwich_high_violation <= 1e-10);
}

TEST_CASE("identical stability inputs give exactly zero distance") {
  RunSpec spec = base_spec(30, 30, 0.6);
  const Trace a = run(spec);
  const Trace b = run(spec);
  const StabilityReport rep = l1_stability_report(a, b, spec.c);
  CHECK(rep.identical());
  CHECK(rep.max_defect <= 0.0);
}

TEST_CASE("perturbed initial data stays within the stability bound") {
  RunSpec spec = base_spec(40, 60, 1.0);
  RunSpec pert = spec;
  pert.u0 = Field::sample(spec.grid, [](double x) {
    const double s = (x - 0.5) / 0.2;
    const double bump = std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    return 0.5 * std::sin(M_PI * x) + 0.01 * bump;
  });
  const Trace a = run(spec);
  const Trace b = run(pert);
  const StabilityReport rep = l1_stability_report(a, b, spec.c);
  CHECK(!rep.identical());
  CHECK(rep.max_defect <= 1e-6);
  CHECK(rep.B.front() > 0.0);
}

TEST_CASE("perturbed load grows the bound only while it acts") {
  // f2 = f1 + 0.1 on t in [0, 0.5], equal initial data
  RunSpec spec = base_spec(40, 80, 1.0);
  spec.load = Load::none();
  RunSpec pert = spec;
  pert.load = Load::windowed(SpaceProfile::constant(0.1), 0.0, 0.5);
  const Trace a = run(spec);
  const Trace b = run(pert);
  const StabilityReport rep = l1_stability_report(a, b, spec.c);
  // the load gap term of B becomes constant once the window closes
  const double h = a.h();
  const auto closed = static_cast<std::size_t>(std::ceil(0.5 / h)) + 1;
  CHECK(rep.B[closed] > rep.B.front());
  for (std::size_t m = closed + 1; m < rep.B.size(); ++m) {
    CHECK(rep.B[m] == rep.B[m - 1]);
  }
  CHECK(rep.max_defect <= 1e-6);
}

TEST_CASE("the stability mechanism holds for regularized Heaviside levels") {
  RunSpec spec = base_spec(30, 40, 0.8);
  RunSpec pert = spec;
  pert.u0 = Field::sample(spec.grid, [](double x) {
    return 0.48 * std::sin(M_PI * x);
  });
  const Trace a = run(spec);
  const Trace b = run(pert);
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 0.0}) {
    CHECK(stability_mechanism_gap(a, b, spec.c, eps) <= 1e-8);
  }
}

TEST_CASE("regularized Heaviside matches its definition") {
  CHECK(heaviside_reg(-1.0, 0.1) == 0.0);
  CHECK(heaviside_reg(0.0, 0.1) == 0.0);
  CHECK(heaviside_reg(0.05, 0.1) == doctest::Approx(0.5));
  CHECK(heaviside_reg(0.1, 0.1) == 1.0);
  CHECK(heaviside_reg(2.0, 0.1) == 1.0);
  CHECK(heaviside_reg(0.0, 0.0) == 0.0);
  CHECK(heaviside_reg(1e-300, 0.0) == 1.0);
}

TEST_CASE("a stationary initial state is a fixed point of the step map") {
  Grid1D grid(60, 1.0);
  auto energy = EnergyModel::p_power(3.0, 1.0 / 3.0);
  std::vector<double> g(61, 1.0);
  const auto stationary = solve_stationary(grid, energy, g);
  RunSpec spec{grid,
               energy,
               HysteresisModel::zero(),
               std::vector<double>(61, 1.0),
               Load::constant(SpaceProfile::constant(1.0)),
               stationary.u,
               StepConfig{20, 2.0}};
  const Trace trace = run(spec);
  const std::vector<double> samples{0.5, 1.0, 1.5, 2.0};
  const OmegaReport rep =
      omega_limit_probe(trace, stationary.u.values, 3.0, samples);
  for (double d : rep.distances) CHECK(d <= 1e-7);
}

TEST_CASE("nodal histories from stability runs satisfy the Hilpert bound") {
  RunSpec spec = base_spec(20, 40, 0.8);
  RunSpec pert = spec;
  pert.u0 = Field::sample(spec.grid, [](double x) {
    return 0.45 * std::sin(M_PI * x);
  });
  const Trace a = run(spec);
  const Trace b = run(pert);
  std::vector<double> times;
  for (const auto& lv : a.levels) times.push_back(lv.t);
  // skip the identical t = 0 sample so times stay strictly increasing
  for (int i = 1; i < spec.grid.n_cells; ++i) {
    std::vector<double> v1;
    std::vector<double> v2;
    double seg = 0.0;
    for (std::size_t m = 0; m < a.levels.size(); ++m) {
      v1.push_back(a.levels[m].u[static_cast<std::size_t>(i)]);
      v2.push_back(b.levels[m].u[static_cast<std::size_t>(i)]);
      if (m > 0) {
        seg = std::max(seg, std::abs(v1[m] - v1[m - 1]) +
                                std::abs(v2[m] - v2[m - 1]));
      }
    }
    const double tol = 2.0 * seg;  // play increments are 1-Lipschitz in v
    CHECK(hilpert_gap(spec.hysteresis, times, v1, v2) <= tol);
  }
}

TEST_CASE("window norms accumulate the recorded increments") {
  RunSpec spec = base_spec(20, 50, 1.0);
  const Trace trace = run(spec);
  double acc = 0.0;
  for (int m = 1; m <= trace.ell; ++m) {
    const double du = trace.levels[static_cast<std::size_t>(m)].du_l2;
    acc += du * du / trace.h();
  }
  CHECK(window_du_norm(trace, 0.0, 1.0) == doctest::Approx(std::sqrt(acc)));
  CHECK(window_du_norm(trace, 0.98, 1.0) >= 0.0);
  const auto times = geometric_sample_times(8.0, 3);
  CHECK(times == std::vector<double>{4.0, 6.0, 7.0});
}
