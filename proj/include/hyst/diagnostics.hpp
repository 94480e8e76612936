// Trace-level verifiers: the stored energy sigma(u), the per-step and
// windowed energy inequalities, the explicit a-priori constant, the
// two-trajectory L1-stability comparison, and the long-time probe against
// the stationary solution.
#pragma once

#include <span>
#include <vector>

#include "hyst/energy.hpp"
#include "hyst/grid.hpp"
#include "hyst/stepper.hpp"

namespace hyst {

// sigma(u) = sum_cells J(x_c, grad u_c) dx, the stored energy; bounded by
// alpha1 |grad u|_p^p from below and alpha2 (|Omega| + |grad u|_p^p) above.
double sigma(const Grid1D& grid, const EnergyModel& energy,
             std::span<const double> u);

// sum_cells a(x_c, grad u_new) . (grad u_new - grad u_old) dx
double flux_dot_dgrad(const Grid1D& grid, const EnergyModel& energy,
                      std::span<const double> u_new,
                      std::span<const double> u_old);

struct EnergyReport {
  // Per-step inequality slack (min over steps of RHS - LHS).  The exact
  // form charges the recorded solver residual tested against du; the tol
  // form charges max(newton_tol, achieved) * (1 + |f_m|) * |du|_L1.
  double step_slack_exact = 0.0;
  double step_slack_tol = 0.0;
  int worst_step = 0;
  // Windowed estimate over all discrete (t1, t2) pairs: min of RHS - LHS.
  double window_slack = 0.0;
  int worst_window_m1 = 0;
  int worst_window_m2 = 0;
  // Explicit a-priori constant: lhs <= bound must hold.
  double apriori_lhs = 0.0;
  double apriori_bound = 0.0;
  // Energy-derivative sandwich: violations (>= 0) of
  //   a(grad u_{m-1}).dgrad <= dsigma <= a(grad u_m).dgrad.
  double sandwich_low_violation = 0.0;
  double sandwich_high_violation = 0.0;
  // min over levels of the growth-sandwich margins for sigma.
  double sigma_bound_margin = 0.0;
  // min over steps of the nodal hysteresis dissipation (du)(dw).
  double dissipation_min = 0.0;

  bool pass(double tol = 1e-8) const;
};

EnergyReport energy_report(const Trace& trace, const EnergyModel& energy,
                           double alpha, double newton_tol);

struct StabilityReport {
  std::vector<double> D;  // int c|u2-u1| + int |w2-w1| per level
  std::vector<double> B;  // c-weighted initial terms + cumulative load gap
  std::vector<double> B_unweighted;  // initial-data term without c
  double max_defect = 0.0;           // max_m D(m) - B(m)
  double max_defect_unweighted = 0.0;
  int argmax = 0;

  bool identical() const;  // D == 0 at every level
};

// Both traces must share the grid and the time discretization.
StabilityReport l1_stability_report(const Trace& a, const Trace& b,
                                    std::span<const double> c);

// Per-step test of the stability proof mechanism with the regularized
// Heaviside H_eps (eps <= 0 selects the sharp H): returns the worst value of
//   sum_i [c ddelta + domega] H_eps(delta_m) dx - h sum_i |f2-f1| dx
// over the levels; non-positive up to solver residual when the hysteresis
// satisfies the scalar Hilpert inequality.
double stability_mechanism_gap(const Trace& a, const Trace& b,
                               std::span<const double> c, double eps);

double heaviside_reg(double x, double eps);

struct OmegaReport {
  std::vector<double> sample_times;
  std::vector<double> distances;     // |u(t_n) - u_inf|_{Lp}
  std::vector<double> tail_windows;  // |u'|_{L2(t_n, t_n + 1)}
  double final_distance = 0.0;
  bool eventually_decreasing = false;
};

OmegaReport omega_limit_probe(const Trace& trace, std::span<const double> u_inf,
                              double p, std::span<const double> sample_times);

// t_n = T (1 - 2^{-n}), n = 1..count.
std::vector<double> geometric_sample_times(double T, int count);

// ||u'||_{L2(Omega x (t0, t1))} accumulated from the trace increments.
double window_du_norm(const Trace& trace, double t0, double t1);

}  // namespace hyst
