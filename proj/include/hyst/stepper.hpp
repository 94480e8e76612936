// Implicit time discretization of d/dt(c u + w) - div a(., grad u) = f:
// per-level semismooth Newton solve of the lumped nonlinear system with
// nodal hysteresis memories, time-averaged loads, and the piecewise
// linear/constant interpolates of the discrete trajectory.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hyst/energy.hpp"
#include "hyst/grid.hpp"
#include "hyst/hysteresis.hpp"

namespace hyst {

// Spatial factor g(x); profiles compose as primary + optional bump term.
struct SpaceProfile {
  enum class Kind { Zero, Constant, Sine, Bump, Table };

  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  int frequency = 1;           // sine: amplitude * sin(frequency * pi * x / L)
  double center = 0.5;         // bump center / width (absolute coordinates)
  double width = 0.25;
  std::vector<double> table;   // nodal values, size n_cells + 1
  double bump_amplitude = 0.0; // optional additive mollifier bump
  double bump_center = 0.5;
  double bump_width = 0.25;

  static SpaceProfile zero();
  static SpaceProfile constant(double value);
  static SpaceProfile sine(double amplitude, int frequency = 1);
  static SpaceProfile bump(double amplitude, double center, double width);

  double at(double x, const Grid1D& grid) const;
  std::vector<double> sample(const Grid1D& grid) const;
};

// Space-time load f(x, t) = g(x) * factor(t).  The per-level average
// f_m = (1/h) int_{(m-1)h}^{mh} f dt uses the closed-form antiderivative
// for the shipped presets and 4-point Gauss quadrature for the pulse.
struct Load {
  enum class Kind { Zero, Constant, ExpDecay, Sine, Windowed, GaussPulse };

  Kind kind = Load::Kind::Zero;
  SpaceProfile space;
  double gamma = 1.0;     // exp decay rate
  double omega = 1.0;     // sine angular frequency
  double t_on = 0.0;      // windowed: active on [t_on, t_off]
  double t_off = 0.0;
  double t_center = 0.0;  // gauss pulse
  double t_width = 1.0;

  static Load none();
  static Load constant(SpaceProfile g);
  static Load exp_decay(SpaceProfile g, double gamma);
  static Load sine(SpaceProfile g, double omega);
  static Load windowed(SpaceProfile g, double t_on, double t_off);
  static Load gauss_pulse(SpaceProfile g, double t_center, double t_width);

  double time_factor(double t) const;
  double time_factor_average(double t0, double t1) const;
  // Nodal f_m for the step ((m-1)h, mh], m >= 1.
  std::vector<double> average(const Grid1D& grid, int m, double h) const;
};

struct StepConfig {
  int ell = 1;
  double T = 1.0;
  double newton_tol = 1e-10;  // sup-norm of the scaled residual
  int newton_max_iter = 50;
  double line_search_shrink = 0.5;
  bool regularize_degenerate = true;

  double h() const { return T / ell; }
  void validate() const;
};

struct SimState {
  int level = 0;
  Field u;
  std::vector<MemoryState> memories;  // one per node
  std::vector<double> w;              // current nodal outputs
  double cum_du_sq = 0.0;             // sum_m h || (u_m - u_{m-1}) / h ||^2
};

struct StepResult {
  bool converged = false;
  int iters = 0;
  double scaled_resid = 0.0;   // achieved, sup-norm
  double resid_dot_du = 0.0;   // sum_i R_i (u_m - u_{m-1})_i at the accepted root
  double load_dot_du = 0.0;    // sum_i f_i du_i dx
  double diss_min = 0.0;       // min nodal (du)(dw)
  double diss_sum = 0.0;       // sum_i dw_i du_i dx
  int pinned_nodes = 0;        // nodes resolved only up to a hysteresis jump
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(int level, double residual);
  int level;
  double residual;
};

struct LevelRecord {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> f;       // averaged load driving this level (zeros at m=0)
  double sigma = 0.0;
  double du_l2 = 0.0;
  double grad_lp = 0.0;
  double f_l2 = 0.0;
  int newton_iters = 0;
  double achieved_resid = 0.0;
  double resid_dot_du = 0.0;
  double load_dot_du = 0.0;
  double diss_min = 0.0;
  double diss_sum = 0.0;
};

struct Trace {
  Grid1D grid;
  double T = 0.0;
  int ell = 0;
  double p = 2.0;  // gradient-norm exponent used in the records
  std::vector<LevelRecord> levels;

  double h() const { return T / ell; }
};

struct RunSpec {
  Grid1D grid;
  EnergyModel energy;
  HysteresisModel hysteresis;
  std::vector<double> c;   // nodal coefficient, c_i >= alpha > 0
  Load load;
  Field u0;
  StepConfig step;

  void validate() const;
  double alpha() const;  // min_i c_i
};

// One implicit level: solves the lumped system
//   c_i (u_i - u_i^{m-1}) dx/h + (W_f(.., u_i) - w_i^{m-1}) dx/h
//     + diffusion_i(u) - f_i dx = 0
// by damped semismooth Newton with a per-node monotone bisection fallback,
// then advances the nodal memories exactly once with the accepted values.
StepResult step(SimState& state, std::span<const double> f_m,
                const Grid1D& grid, const EnergyModel& energy,
                const HysteresisModel& hysteresis, std::span<const double> c,
                const StepConfig& cfg);

// Full run: initializes w_0 = W_f(u_0; x) per node, iterates step for
// m = 1..ell, and checks the interpolate-gap identity before returning.
Trace run(const RunSpec& spec);

enum class InterpKind { Linear, Constant };

// Piecewise interpolates of the trace: linear tau u_{m+1} + (1-tau) u_m on
// [mh, (m+1)h], constant u_{m+1} on (mh, (m+1)h].
Field interpolate(const Trace& trace, double t, InterpKind kind);

struct InterpGap {
  double lhs = 0.0;  // || u_l - u~_l ||^2_{L2(Q)} by per-interval Gauss-2
  double rhs = 0.0;  // (h/3) sum_m || u_{m+1} - u_m ||^2_{L2}
};

InterpGap interpolate_gap(const Trace& trace);

}  // namespace hyst
