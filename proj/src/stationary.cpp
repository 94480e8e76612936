#include "hyst/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hyst {

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// One tridiagonal solve of -(u')' = g, the Newton seed.
Field laplace_solve(const Grid1D& grid, std::span<const double> g) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  const double dx = grid.dx();
  Tridiagonal jac(n - 2);
  std::vector<double> rhs(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    jac.diag[i - 1] = 2.0 / dx;
    if (i - 1 > 0) jac.lower[i - 2] = -1.0 / dx;
    if (i < n - 2) jac.upper[i - 1] = -1.0 / dx;
    rhs[i - 1] = g[i] * dx;
  }
  std::vector<double> sol = solve_tridiagonal(std::move(jac), std::move(rhs));
  Field u = Field::zeros(grid);
  for (std::size_t i = 1; i + 1 < n; ++i) u.values[i] = sol[i - 1];
  return u;
}

// For the p-power family the energy is s^p-homogeneous in the gradient
// part; scale the seed to the one-dimensional minimizer of E(s u).
void rescale_seed(const Grid1D& grid, const EnergyModel& energy,
                  std::span<const double> g, Field& u) {
  if (energy.kind() == EnergyModel::Kind::Quadratic) return;
  const double p = energy.p();
  if (p == 2.0) return;
  const std::vector<double> zero(u.values.size(), 0.0);
  const double grad_part = discrete_energy(grid, energy, u.values, zero);
  double load_part = 0.0;
  for (std::size_t i = 1; i + 1 < u.values.size(); ++i) {
    load_part += g[i] * u.values[i] * grid.dx();
  }
  if (!(grad_part > 0.0) || load_part == 0.0) return;
  const double s = std::pow(std::abs(load_part) / (p * grad_part), 1.0 / (p - 1.0)) *
                   (load_part > 0.0 ? 1.0 : -1.0);
  for (double& v : u.values) v *= s;
}

}  // namespace

StationaryResult solve_stationary(const Grid1D& grid, const EnergyModel& energy,
                                  std::span<const double> g,
                                  const StationaryOptions& opts,
                                  const Field* warm_start) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (g.size() != n) throw std::invalid_argument("load length does not match grid");
  for (double v : g) {
    if (!std::isfinite(v)) throw std::invalid_argument("load must be finite");
  }
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  StationaryResult out;
  if (warm_start != nullptr) {
    warm_start->validate(grid);
    out.u = *warm_start;
  } else {
    out.u = laplace_solve(grid, g);
    rescale_seed(grid, energy, g, out.u);
  }
  out.u.enforce_boundary();

  double g_l2 = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) g_l2 += g[i] * g[i] * grid.dx();
  g_l2 = std::sqrt(g_l2);
  const double scale = grid.dx() * (1.0 + g_l2);
  const double abs_tol = opts.tol * scale;

  std::vector<double>& u = out.u.values;
  std::vector<double> r = assemble_residual(grid, energy, u, g);
  double res_sup = sup_norm(r);
  double merit = discrete_energy(grid, energy, u, g);

  int iter = 0;
  double shift_boost = 1.0;
  std::vector<double> u_trial(n);
  while (res_sup > abs_tol && iter < opts.max_iter) {
    ++iter;
    Tridiagonal jac(n - 2);
    add_diffusion_jacobian(grid, energy, u, opts.regularize_degenerate, jac);
    if (shift_boost > 1.0) {
      for (double& d : jac.diag) d += (shift_boost - 1.0) * 1e-10;
    }
    std::vector<double> rhs(r);
    for (double& x : rhs) x = -x;
    std::vector<double> delta;
    try {
      delta = solve_tridiagonal(std::move(jac), std::move(rhs));
    } catch (const std::runtime_error&) {
      shift_boost *= 10.0;
      continue;
    }
    double directional = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) directional += r[i] * delta[i];
    // The residual is the energy gradient, so delta is a descent direction;
    // backtrack on the energy itself.
    double s = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      u_trial = u;
      for (std::size_t i = 1; i + 1 < n; ++i) u_trial[i] += s * delta[i - 1];
      const double m_trial = discrete_energy(grid, energy, u_trial, g);
      if (m_trial <= merit + 1e-4 * s * directional) {
        u.swap(u_trial);
        merit = m_trial;
        moved = true;
        break;
      }
      s *= 0.5;
    }
    if (!moved) {
      shift_boost *= 10.0;
      if (shift_boost > 1e12) break;
      continue;
    }
    shift_boost = 1.0;
    r = assemble_residual(grid, energy, u, g);
    res_sup = sup_norm(r);
  }

  out.converged = res_sup <= abs_tol;
  out.scaled_resid = res_sup / scale;
  out.iters = iter;
  if (!out.converged) {
    throw std::runtime_error("stationary solve did not converge: scaled residual " +
                             std::to_string(out.scaled_resid));
  }
  return out;
}

}  // namespace hyst
