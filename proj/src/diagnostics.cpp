#include "hyst/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyst {

namespace {

double trapz_abs(const Grid1D& grid, std::span<const double> a,
                 std::span<const double> b, std::span<const double> weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
    const double wt = weight.empty() ? 1.0 : weight[i];
    s += w * wt * std::abs(a[i] - b[i]);
  }
  return s * grid.dx();
}

double lumped_l1(const Grid1D& grid, std::span<const double> a,
                 std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * grid.dx();
}

void require_compatible(const Trace& a, const Trace& b) {
  if (a.grid.n_cells != b.grid.n_cells || a.grid.length != b.grid.length ||
      a.ell != b.ell || a.T != b.T) {
    throw std::invalid_argument(
        "stability comparison requires identical grid and time discretization");
  }
}

}  // namespace

double sigma(const Grid1D& grid, const EnergyModel& energy,
             std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(grid.node_count())) {
    throw std::invalid_argument("field length does not match grid");
  }
  const double dx = grid.dx();
  const double inv = 1.0 / dx;
  double s = 0.0;
  for (int c = 0; c < grid.n_cells; ++c) {
    const double g = (u[static_cast<std::size_t>(c + 1)] -
                      u[static_cast<std::size_t>(c)]) *
                     inv;
    s += energy.value1(grid.cell_midpoint(c), g) * dx;
  }
  return s;
}

double flux_dot_dgrad(const Grid1D& grid, const EnergyModel& energy,
                      std::span<const double> u_new,
                      std::span<const double> u_old) {
  const double dx = grid.dx();
  const double inv = 1.0 / dx;
  double s = 0.0;
  for (int c = 0; c < grid.n_cells; ++c) {
    const auto i = static_cast<std::size_t>(c);
    const double gn = (u_new[i + 1] - u_new[i]) * inv;
    const double go = (u_old[i + 1] - u_old[i]) * inv;
    s += energy.flux1(grid.cell_midpoint(c), gn) * (gn - go) * dx;
  }
  return s;
}

bool EnergyReport::pass(double tol) const {
  return step_slack_exact >= -tol && step_slack_tol >= -tol &&
         window_slack >= -tol && apriori_lhs <= apriori_bound &&
         sandwich_low_violation <= tol && sandwich_high_violation <= tol &&
         sigma_bound_margin >= -tol && dissipation_min >= -1e-14;
}

EnergyReport energy_report(const Trace& trace, const EnergyModel& energy,
                           double alpha, double newton_tol) {
  if (trace.levels.size() != static_cast<std::size_t>(trace.ell) + 1) {
    throw std::invalid_argument("trace is incomplete");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const Grid1D& grid = trace.grid;
  const double h = trace.h();
  const double p = trace.p;
  const double a1 = energy.alpha1();
  const double a2 = energy.alpha2();

  EnergyReport rep;
  rep.step_slack_exact = rep.step_slack_tol =
      std::numeric_limits<double>::infinity();
  rep.dissipation_min = std::numeric_limits<double>::infinity();
  rep.sigma_bound_margin = std::numeric_limits<double>::infinity();

  // sigma growth sandwich on every recorded level
  for (const LevelRecord& lv : trace.levels) {
    const double gp = std::pow(lv.grad_lp, p);
    rep.sigma_bound_margin =
        std::min({rep.sigma_bound_margin, lv.sigma - a1 * gp,
                  a2 * (grid.length + gp) - lv.sigma});
  }

  // per-step inequality and the windowed estimate share prefix sums
  double sum_eps_pos = 0.0;       // residual allowance, exact form
  double sum_allow_tol = 0.0;     // residual allowance, tol form
  double sum_abs_eps = 0.0;
  double A = 0.0;                 // alpha sum h |du/h|^2
  double B = 0.0;                 // (1/alpha) sum h |f_m|^2
  double G_min = std::numeric_limits<double>::infinity();
  double window_defect = -std::numeric_limits<double>::infinity();
  int min_at = 0;
  double X = 0.0;                 // sum h |du/h|^2
  double sup_grad_p = std::pow(trace.levels[0].grad_lp, p);
  double F2 = 0.0;                // sum h |f_m|^2

  {
    const double G0 = 2.0 * trace.levels[0].sigma;
    G_min = G0;
  }

  for (int m = 1; m <= trace.ell; ++m) {
    const LevelRecord& lv = trace.levels[static_cast<std::size_t>(m)];
    const LevelRecord& pv = trace.levels[static_cast<std::size_t>(m - 1)];
    const double du2 = lv.du_l2 * lv.du_l2;
    const double adot = flux_dot_dgrad(grid, energy, lv.u, pv.u);
    const double du_l1 = lumped_l1(grid, lv.u, pv.u);
    const double allow_tol =
        std::max(newton_tol, lv.achieved_resid) * (1.0 + lv.f_l2) * du_l1;

    const double lhs = (alpha / h) * du2 + adot;
    const double slack_exact = lv.load_dot_du + lv.resid_dot_du - lhs;
    const double slack_tol = lv.load_dot_du + allow_tol - lhs;
    if (slack_exact < rep.step_slack_exact) {
      rep.step_slack_exact = slack_exact;
      rep.worst_step = m;
    }
    rep.step_slack_tol = std::min(rep.step_slack_tol, slack_tol);
    rep.dissipation_min = std::min(rep.dissipation_min, lv.diss_min);

    // sandwich: a(grad u_{m-1}).dgrad <= dsigma <= a(grad u_m).dgrad
    const double low = [&] {
      const double inv = 1.0 / grid.dx();
      double s = 0.0;
      for (int c = 0; c < grid.n_cells; ++c) {
        const auto i = static_cast<std::size_t>(c);
        const double gn = (lv.u[i + 1] - lv.u[i]) * inv;
        const double go = (pv.u[i + 1] - pv.u[i]) * inv;
        s += energy.flux1(grid.cell_midpoint(c), go) * (gn - go) * grid.dx();
      }
      return s;
    }();
    const double dsigma = lv.sigma - pv.sigma;
    rep.sandwich_low_violation =
        std::max(rep.sandwich_low_violation, low - dsigma);
    rep.sandwich_high_violation =
        std::max(rep.sandwich_high_violation, dsigma - adot);

    // windowed estimate bookkeeping
    A += alpha * du2 / h;
    B += h * lv.f_l2 * lv.f_l2 / alpha;
    sum_eps_pos += 2.0 * std::max(lv.resid_dot_du, 0.0);
    sum_allow_tol += 2.0 * allow_tol;
    sum_abs_eps += std::abs(lv.resid_dot_du);
    const double G = A - B - sum_eps_pos + 2.0 * lv.sigma;
    if (G - G_min > window_defect) {
      window_defect = G - G_min;
      rep.worst_window_m2 = m;
      rep.worst_window_m1 = min_at;
    }
    if (G < G_min) {
      G_min = G;
      min_at = m;
    }

    X += du2 / h;
    sup_grad_p = std::max(sup_grad_p, std::pow(lv.grad_lp, p));
    F2 += h * lv.f_l2 * lv.f_l2;
  }

  rep.window_slack = -window_defect;

  // explicit constant of the a-priori estimate, traced through the proof:
  //   E0 = F^2/(2 alpha) + alpha2 (|Omega| + |grad u_0|_p^p) + residual slack
  //   sum h|du/h|^2 <= (2/alpha) E0,  sup_k |grad u_k|_p^p <= E0 / alpha1
  const double grad0_p = std::pow(trace.levels[0].grad_lp, p);
  const double E0 =
      F2 / (2.0 * alpha) + a2 * (grid.length + grad0_p) + sum_abs_eps;
  rep.apriori_lhs = X + sup_grad_p;
  rep.apriori_bound = (2.0 / alpha + 1.0 / a1) * E0;
  return rep;
}

bool StabilityReport::identical() const {
  return std::all_of(D.begin(), D.end(), [](double d) { return d == 0.0; });
}

StabilityReport l1_stability_report(const Trace& a, const Trace& b,
                                    std::span<const double> c) {
  require_compatible(a, b);
  const Grid1D& grid = a.grid;
  if (c.size() != static_cast<std::size_t>(grid.node_count())) {
    throw std::invalid_argument("coefficient length does not match grid");
  }
  const double h = a.h();
  StabilityReport rep;
  const auto levels = static_cast<std::size_t>(a.ell) + 1;
  rep.D.resize(levels);
  rep.B.resize(levels);
  rep.B_unweighted.resize(levels);

  const double u0_gap_c =
      trapz_abs(grid, b.levels[0].u, a.levels[0].u, c);
  const double u0_gap =
      trapz_abs(grid, b.levels[0].u, a.levels[0].u, {});
  const double w0_gap = trapz_abs(grid, b.levels[0].w, a.levels[0].w, {});

  rep.max_defect = -std::numeric_limits<double>::infinity();
  rep.max_defect_unweighted = -std::numeric_limits<double>::infinity();
  double load_gap = 0.0;
  for (std::size_t m = 0; m < levels; ++m) {
    if (m > 0) {
      load_gap += h * trapz_abs(grid, b.levels[m].f, a.levels[m].f, {});
    }
    rep.D[m] = trapz_abs(grid, b.levels[m].u, a.levels[m].u, c) +
               trapz_abs(grid, b.levels[m].w, a.levels[m].w, {});
    rep.B[m] = u0_gap_c + w0_gap + load_gap;
    rep.B_unweighted[m] = u0_gap + w0_gap + load_gap;
    const double defect = rep.D[m] - rep.B[m];
    if (defect > rep.max_defect) {
      rep.max_defect = defect;
      rep.argmax = static_cast<int>(m);
    }
    rep.max_defect_unweighted =
        std::max(rep.max_defect_unweighted, rep.D[m] - rep.B_unweighted[m]);
  }
  return rep;
}

double heaviside_reg(double x, double eps) {
  if (eps <= 0.0) return x > 0.0 ? 1.0 : 0.0;
  if (x >= eps) return 1.0;
  if (x <= 0.0) return 0.0;
  return x / eps;
}

double stability_mechanism_gap(const Trace& a, const Trace& b,
                               std::span<const double> c, double eps) {
  require_compatible(a, b);
  const Grid1D& grid = a.grid;
  const double h = a.h();
  const double dx = grid.dx();
  double worst = -std::numeric_limits<double>::infinity();
  for (int m = 1; m <= a.ell; ++m) {
    const auto& la = a.levels[static_cast<std::size_t>(m)];
    const auto& lb = b.levels[static_cast<std::size_t>(m)];
    const auto& pa = a.levels[static_cast<std::size_t>(m - 1)];
    const auto& pb = b.levels[static_cast<std::size_t>(m - 1)];
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 1; i + 1 < la.u.size(); ++i) {
      const double delta_m = lb.u[i] - la.u[i];
      const double delta_p = pb.u[i] - pa.u[i];
      const double omega_m = lb.w[i] - la.w[i];
      const double omega_p = pb.w[i] - pa.w[i];
      const double hh = heaviside_reg(delta_m, eps);
      lhs += (c[i] * (delta_m - delta_p) + (omega_m - omega_p)) * hh * dx;
      rhs += std::abs(lb.f[i] - la.f[i]) * dx;
    }
    worst = std::max(worst, lhs - h * rhs);
  }
  return worst;
}

OmegaReport omega_limit_probe(const Trace& trace, std::span<const double> u_inf,
                              double p, std::span<const double> sample_times) {
  if (u_inf.size() != static_cast<std::size_t>(trace.grid.node_count())) {
    throw std::invalid_argument("stationary field length does not match grid");
  }
  for (std::size_t k = 0; k + 1 < sample_times.size(); ++k) {
    if (!(sample_times[k] < sample_times[k + 1])) {
      throw std::invalid_argument("sample times must be increasing");
    }
  }
  if (!sample_times.empty() &&
      (sample_times.front() < 0.0 || sample_times.back() > trace.T)) {
    throw std::invalid_argument("sample times outside the trace horizon");
  }
  const Grid1D& grid = trace.grid;
  const double h = trace.h();
  OmegaReport rep;
  std::vector<double> diff(static_cast<std::size_t>(grid.node_count()));
  for (double t : sample_times) {
    const int m = std::clamp(static_cast<int>(std::llround(t / h)), 0, trace.ell);
    const auto& u = trace.levels[static_cast<std::size_t>(m)].u;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u[i] - u_inf[i];
    rep.sample_times.push_back(m * h);
    rep.distances.push_back(norms(grid, diff, p).lp);
    rep.tail_windows.push_back(
        window_du_norm(trace, m * h, std::min(m * h + 1.0, trace.T)));
  }
  if (!rep.distances.empty()) rep.final_distance = rep.distances.back();
  // eventually decreasing: the final half of the distance sequence is
  // non-increasing up to rounding
  rep.eventually_decreasing = true;
  const std::size_t half = rep.distances.size() / 2;
  for (std::size_t k = half; k + 1 < rep.distances.size(); ++k) {
    if (rep.distances[k + 1] >
        rep.distances[k] * (1.0 + 1e-9) + 1e-12) {
      rep.eventually_decreasing = false;
    }
  }
  return rep;
}

std::vector<double> geometric_sample_times(double T, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    out.push_back(T * (1.0 - std::pow(2.0, -n)));
  }
  return out;
}

double window_du_norm(const Trace& trace, double t0, double t1) {
  const double h = trace.h();
  double acc = 0.0;
  for (int m = 1; m <= trace.ell; ++m) {
    const double lo = (m - 1) * h;
    const double hi = m * h;
    if (lo >= t0 - 1e-12 * trace.T && hi <= t1 + 1e-12 * trace.T) {
      const double du = trace.levels[static_cast<std::size_t>(m)].du_l2;
      acc += du * du / h;
    }
  }
  return std::sqrt(acc);
}

}  // namespace hyst
