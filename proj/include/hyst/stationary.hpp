// Stationary problem -div a(., grad u) = g with homogeneous Dirichlet data,
// solved by damped Newton on the gradient of the strictly convex discrete
// energy sum J(grad u) dx - sum g u dx.
#pragma once

#include <span>

#include "hyst/energy.hpp"
#include "hyst/grid.hpp"

namespace hyst {

struct StationaryOptions {
  double tol = 1e-10;  // sup-norm of the scaled residual
  int max_iter = 200;
  bool regularize_degenerate = true;
};

struct StationaryResult {
  Field u;
  bool converged = false;
  double scaled_resid = 0.0;
  int iters = 0;
};

// Warm start: the supplied field if any, otherwise a Laplace solve with the
// same load rescaled to the homogeneity of the energy.  Throws on
// non-convergence, carrying the best residual in the message.
StationaryResult solve_stationary(const Grid1D& grid, const EnergyModel& energy,
                                  std::span<const double> g,
                                  const StationaryOptions& opts = {},
                                  const Field* warm_start = nullptr);

}  // namespace hyst
