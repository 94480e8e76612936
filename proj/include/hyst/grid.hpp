// Uniform 1D mesh on (0, L) with homogeneous Dirichlet boundary, nodal
// fields, cellwise gradients, lumped mass, and the P1 weak-form residual
// with midpoint flux quadrature.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hyst/energy.hpp"

namespace hyst {

struct Grid1D {
  Grid1D(int n_cells, double length);

  int n_cells;
  double length;

  double dx() const { return length / n_cells; }
  int node_count() const { return n_cells + 1; }
  double node(int i) const { return length * i / n_cells; }
  double cell_midpoint(int c) const { return length * (c + 0.5) / n_cells; }
};

struct Field {
  std::vector<double> values;
  bool dirichlet = true;

  static Field zeros(const Grid1D& grid);
  static Field sample(const Grid1D& grid, const std::function<double(double)>& f,
                      bool dirichlet = true);
  void enforce_boundary();
  void validate(const Grid1D& grid) const;
};

// Per-cell (u_{i+1} - u_i) / dx; exact for affine data.
std::vector<double> gradient(const Grid1D& grid, std::span<const double> u);

// Interior-node residual of -div a(x, grad u) = f in weak form:
//   R_i = sum_cells a(x_c, grad u_c) * grad phi_i * dx - f_i * dx,
// P1 hats, midpoint flux quadrature, lumped load.  Index 0 is node 1.
std::vector<double> assemble_residual(const Grid1D& grid,
                                      const EnergyModel& energy,
                                      std::span<const double> u,
                                      std::span<const double> f);

// c_i * v_i * dx per interior node; c must be strictly positive.
std::vector<double> lumped_mass_apply(const Grid1D& grid,
                                      std::span<const double> c,
                                      std::span<const double> v);

struct FieldNorms {
  double l2 = 0.0;
  double lp = 0.0;
  double w1p_semi = 0.0;
  double sup = 0.0;
};

// Trapezoid quadrature for nodal powers, midpoint on cells for gradients.
FieldNorms norms(const Grid1D& grid, std::span<const double> u, double p);

// sum_cells J(x_c, grad u_c) dx - sum_i f_i u_i dx; the residual above is
// its gradient with respect to the interior nodal values.
double discrete_energy(const Grid1D& grid, const EnergyModel& energy,
                       std::span<const double> u, std::span<const double> f);

struct Tridiagonal {
  std::vector<double> lower;  // size n-1
  std::vector<double> diag;   // size n
  std::vector<double> upper;  // size n-1

  explicit Tridiagonal(std::size_t n) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}
  std::size_t size() const { return diag.size(); }
};

// Adds the interior-node Jacobian of the diffusion residual.  With
// regularize set, degenerate p-power slopes use the shifted Hessian.
void add_diffusion_jacobian(const Grid1D& grid, const EnergyModel& energy,
                            std::span<const double> u, bool regularize,
                            Tridiagonal& jac);

// Thomas algorithm; consumes the matrix.
std::vector<double> solve_tridiagonal(Tridiagonal jac, std::vector<double> rhs);

}  // namespace hyst
