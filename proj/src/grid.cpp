#include "hyst/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hyst {

Grid1D::Grid1D(int n_cells_, double length_)
    : n_cells(n_cells_), length(length_) {
  if (n_cells < 2) throw std::invalid_argument("grid needs n_cells >= 2");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid length must be positive");
  }
}

Field Field::zeros(const Grid1D& grid) {
  Field f;
  f.values.assign(static_cast<std::size_t>(grid.node_count()), 0.0);
  return f;
}

Field Field::sample(const Grid1D& grid, const std::function<double(double)>& fn,
                    bool dirichlet) {
  Field f;
  f.dirichlet = dirichlet;
  f.values.resize(static_cast<std::size_t>(grid.node_count()));
  for (int i = 0; i < grid.node_count(); ++i) {
    f.values[static_cast<std::size_t>(i)] = fn(grid.node(i));
  }
  if (dirichlet) f.enforce_boundary();
  return f;
}

void Field::enforce_boundary() {
  if (!values.empty()) {
    values.front() = 0.0;
    values.back() = 0.0;
  }
}

void Field::validate(const Grid1D& grid) const {
  if (values.size() != static_cast<std::size_t>(grid.node_count())) {
    throw std::invalid_argument("field length does not match grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("field entry not finite");
  }
  if (dirichlet && (values.front() != 0.0 || values.back() != 0.0)) {
    throw std::invalid_argument("Dirichlet field has nonzero boundary values");
  }
}

std::vector<double> gradient(const Grid1D& grid, std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(grid.node_count())) {
    throw std::invalid_argument("field length does not match grid");
  }
  std::vector<double> g(static_cast<std::size_t>(grid.n_cells));
  const double inv = 1.0 / grid.dx();
  for (int c = 0; c < grid.n_cells; ++c) {
    g[static_cast<std::size_t>(c)] =
        (u[static_cast<std::size_t>(c + 1)] - u[static_cast<std::size_t>(c)]) *
        inv;
  }
  return g;
}

std::vector<double> assemble_residual(const Grid1D& grid,
                                      const EnergyModel& energy,
                                      std::span<const double> u,
                                      std::span<const double> f) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (u.size() != n || f.size() != n) {
    throw std::invalid_argument("field length does not match grid");
  }
  const double dx = grid.dx();
  const double inv = 1.0 / dx;
  // cell fluxes at midpoints
  std::vector<double> a(static_cast<std::size_t>(grid.n_cells));
  for (int c = 0; c < grid.n_cells; ++c) {
    const double g = (u[static_cast<std::size_t>(c + 1)] -
                      u[static_cast<std::size_t>(c)]) *
                     inv;
    a[static_cast<std::size_t>(c)] = energy.flux1(grid.cell_midpoint(c), g);
  }
  std::vector<double> r(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    r[i - 1] = a[i - 1] - a[i] - f[i] * dx;
  }
  return r;
}

std::vector<double> lumped_mass_apply(const Grid1D& grid,
                                      std::span<const double> c,
                                      std::span<const double> v) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (c.size() != n || v.size() != n) {
    throw std::invalid_argument("field length does not match grid");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c[i] > 0.0)) {
      throw std::invalid_argument("coefficient c must be positive; c[" +
                                  std::to_string(i) + "] = " +
                                  std::to_string(c[i]));
    }
  }
  const double dx = grid.dx();
  std::vector<double> out(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i - 1] = c[i] * v[i] * dx;
  return out;
}

FieldNorms norms(const Grid1D& grid, std::span<const double> u, double p) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (u.size() != n) throw std::invalid_argument("field length mismatch");
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  const double dx = grid.dx();
  FieldNorms out;
  double s2 = 0.0;
  double sp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;  // trapezoid
    s2 += w * u[i] * u[i];
    sp += w * std::pow(std::abs(u[i]), p);
    out.sup = std::max(out.sup, std::abs(u[i]));
  }
  out.l2 = std::sqrt(s2 * dx);
  out.lp = std::pow(sp * dx, 1.0 / p);
  double gp = 0.0;
  const double inv = 1.0 / dx;
  for (int c = 0; c < grid.n_cells; ++c) {
    const double g = (u[static_cast<std::size_t>(c + 1)] -
                      u[static_cast<std::size_t>(c)]) *
                     inv;
    gp += std::pow(std::abs(g), p);
  }
  out.w1p_semi = std::pow(gp * dx, 1.0 / p);
  return out;
}

double discrete_energy(const Grid1D& grid, const EnergyModel& energy,
                       std::span<const double> u, std::span<const double> f) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (u.size() != n || f.size() != n) {
    throw std::invalid_argument("field length does not match grid");
  }
  const double dx = grid.dx();
  const double inv = 1.0 / dx;
  double e = 0.0;
  for (int c = 0; c < grid.n_cells; ++c) {
    const double g = (u[static_cast<std::size_t>(c + 1)] -
                      u[static_cast<std::size_t>(c)]) *
                     inv;
    e += energy.value1(grid.cell_midpoint(c), g) * dx;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) e -= f[i] * u[i] * dx;
  return e;
}

void add_diffusion_jacobian(const Grid1D& grid, const EnergyModel& energy,
                            std::span<const double> u, bool regularize,
                            Tridiagonal& jac) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (u.size() != n) throw std::invalid_argument("field length mismatch");
  if (jac.size() != n - 2) throw std::invalid_argument("jacobian size mismatch");
  const double dx = grid.dx();
  const double inv = 1.0 / dx;
  std::vector<double> ap(static_cast<std::size_t>(grid.n_cells));
  for (int c = 0; c < grid.n_cells; ++c) {
    const double g = (u[static_cast<std::size_t>(c + 1)] -
                      u[static_cast<std::size_t>(c)]) *
                     inv;
    const double x = grid.cell_midpoint(c);
    ap[static_cast<std::size_t>(c)] =
        regularize ? energy.flux_slope1_shifted(x, g) : energy.flux_slope1(x, g);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const std::size_t row = i - 1;
    jac.diag[row] += (ap[i - 1] + ap[i]) * inv;
    if (row > 0) jac.lower[row - 1] += -ap[i - 1] * inv;
    if (row + 1 < n - 2) jac.upper[row] += -ap[i] * inv;
  }
}

std::vector<double> solve_tridiagonal(Tridiagonal jac, std::vector<double> rhs) {
  const std::size_t n = jac.size();
  if (rhs.size() != n) throw std::invalid_argument("rhs size mismatch");
  if (n == 0) return rhs;
  for (std::size_t i = 1; i < n; ++i) {
    if (jac.diag[i - 1] == 0.0) {
      throw std::runtime_error("tridiagonal solve hit a zero pivot");
    }
    const double m = jac.lower[i - 1] / jac.diag[i - 1];
    jac.diag[i] -= m * jac.upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (jac.diag[n - 1] == 0.0) {
    throw std::runtime_error("tridiagonal solve hit a zero pivot");
  }
  rhs[n - 1] /= jac.diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - jac.upper[i] * rhs[i + 1]) / jac.diag[i];
  }
  return rhs;
}

}  // namespace hyst
