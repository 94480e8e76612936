#include "hyst/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hyst/diagnostics.hpp"

namespace hyst {

namespace {

double mollifier(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

// 4-point Gauss-Legendre on (-1, 1)
constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};

}  // namespace

SpaceProfile SpaceProfile::zero() { return SpaceProfile{}; }

SpaceProfile SpaceProfile::constant(double value) {
  SpaceProfile p;
  p.kind = Kind::Constant;
  p.amplitude = value;
  return p;
}

SpaceProfile SpaceProfile::sine(double amplitude, int frequency) {
  SpaceProfile p;
  p.kind = Kind::Sine;
  p.amplitude = amplitude;
  p.frequency = frequency;
  return p;
}

SpaceProfile SpaceProfile::bump(double amplitude, double center, double width) {
  SpaceProfile p;
  p.kind = Kind::Bump;
  p.amplitude = amplitude;
  p.center = center;
  p.width = width;
  return p;
}

double SpaceProfile::at(double x, const Grid1D& grid) const {
  double v = 0.0;
  switch (kind) {
    case Kind::Zero:
      break;
    case Kind::Constant:
      v = amplitude;
      break;
    case Kind::Sine:
      v = amplitude * std::sin(frequency * M_PI * x / grid.length);
      break;
    case Kind::Bump:
      v = amplitude * mollifier((x - center) / width);
      break;
    case Kind::Table: {
      if (table.size() != static_cast<std::size_t>(grid.node_count())) {
        throw std::invalid_argument("profile table length does not match grid");
      }
      const double s = std::clamp(x / grid.length, 0.0, 1.0) * grid.n_cells;
      const auto c = std::min(static_cast<int>(s), grid.n_cells - 1);
      const double t = s - c;
      v = (1.0 - t) * table[static_cast<std::size_t>(c)] +
          t * table[static_cast<std::size_t>(c + 1)];
      break;
    }
  }
  if (bump_amplitude != 0.0) {
    v += bump_amplitude * mollifier((x - bump_center) / bump_width);
  }
  return v;
}

std::vector<double> SpaceProfile::sample(const Grid1D& grid) const {
  std::vector<double> out(static_cast<std::size_t>(grid.node_count()));
  for (int i = 0; i < grid.node_count(); ++i) {
    out[static_cast<std::size_t>(i)] = at(grid.node(i), grid);
  }
  return out;
}

Load Load::none() { return Load{}; }

Load Load::constant(SpaceProfile g) {
  Load l;
  l.kind = Kind::Constant;
  l.space = std::move(g);
  return l;
}

Load Load::exp_decay(SpaceProfile g, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("decay rate must be positive");
  Load l;
  l.kind = Kind::ExpDecay;
  l.space = std::move(g);
  l.gamma = gamma;
  return l;
}

Load Load::sine(SpaceProfile g, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("frequency must be positive");
  Load l;
  l.kind = Kind::Sine;
  l.space = std::move(g);
  l.omega = omega;
  return l;
}

Load Load::windowed(SpaceProfile g, double t_on, double t_off) {
  if (!(t_on <= t_off)) throw std::invalid_argument("window requires t_on <= t_off");
  Load l;
  l.kind = Kind::Windowed;
  l.space = std::move(g);
  l.t_on = t_on;
  l.t_off = t_off;
  return l;
}

Load Load::gauss_pulse(SpaceProfile g, double t_center, double t_width) {
  if (!(t_width > 0.0)) throw std::invalid_argument("pulse width must be positive");
  Load l;
  l.kind = Kind::GaussPulse;
  l.space = std::move(g);
  l.t_center = t_center;
  l.t_width = t_width;
  return l;
}

double Load::time_factor(double t) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return 1.0;
    case Kind::ExpDecay:
      return std::exp(-gamma * t);
    case Kind::Sine:
      return std::sin(omega * t);
    case Kind::Windowed:
      return (t >= t_on && t <= t_off) ? 1.0 : 0.0;
    case Kind::GaussPulse: {
      const double s = (t - t_center) / t_width;
      return std::exp(-s * s);
    }
  }
  return 0.0;
}

double Load::time_factor_average(double t0, double t1) const {
  const double len = t1 - t0;
  if (!(len > 0.0)) throw std::invalid_argument("empty averaging interval");
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return 1.0;
    case Kind::ExpDecay:
      return (std::exp(-gamma * t0) - std::exp(-gamma * t1)) / (gamma * len);
    case Kind::Sine:
      return (std::cos(omega * t0) - std::cos(omega * t1)) / (omega * len);
    case Kind::Windowed: {
      const double overlap =
          std::max(0.0, std::min(t1, t_off) - std::max(t0, t_on));
      return overlap / len;
    }
    case Kind::GaussPulse: {
      double acc = 0.0;
      for (int q = 0; q < 4; ++q) {
        const double t = 0.5 * (t0 + t1) + 0.5 * len * kGaussX[q];
        acc += kGaussW[q] * time_factor(t);
      }
      return 0.5 * acc;
    }
  }
  return 0.0;
}

std::vector<double> Load::average(const Grid1D& grid, int m, double h) const {
  if (m < 1) throw std::invalid_argument("load average requires m >= 1");
  const double factor = time_factor_average((m - 1) * h, m * h);
  std::vector<double> f = space.sample(grid);
  for (double& v : f) v *= factor;
  return f;
}

void StepConfig::validate() const {
  if (ell < 1) throw std::invalid_argument("time.ell must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("time.T must be positive");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
  if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0)) {
    throw std::invalid_argument("line_search_shrink must lie in (0, 1)");
  }
}

StepFailure::StepFailure(int level_, double residual_)
    : std::runtime_error("nonlinear solve did not converge at level " +
                         std::to_string(level_) + " (scaled residual " +
                         std::to_string(residual_) + ")"),
      level(level_),
      residual(residual_) {}

void RunSpec::validate() const {
  step.validate();
  if (energy.dim() != 1) {
    throw std::invalid_argument("the simulation runner is one-dimensional");
  }
  u0.validate(grid);
  if (!u0.dirichlet) {
    throw std::invalid_argument("initial data must satisfy the Dirichlet condition");
  }
  if (c.size() != static_cast<std::size_t>(grid.node_count())) {
    throw std::invalid_argument("coefficient c length does not match grid");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0) || !std::isfinite(c[i])) {
      throw std::invalid_argument("coefficient c must be >= alpha > 0; c[" +
                                  std::to_string(i) + "] = " +
                                  std::to_string(c[i]));
    }
  }
}

double RunSpec::alpha() const {
  double a = std::numeric_limits<double>::infinity();
  for (double v : c) a = std::min(a, v);
  return a;
}

namespace {

struct StepWork {
  const Grid1D& grid;
  const EnergyModel& energy;
  const HysteresisModel& hyst;
  std::span<const double> c;
  std::span<const double> f;
  const std::vector<double>& u_prev;
  const std::vector<double>& w_prev;
  const std::vector<MemoryState>& mem;
  double h;

  double dx() const { return grid.dx(); }
  std::size_t nodes() const { return u_prev.size(); }

  // Variational residual against the hat function of interior node i.
  double nodal_residual(std::span<const double> u, std::size_t i) const {
    const double dx_ = dx();
    const double gl = (u[i] - u[i - 1]) / dx_;
    const double gr = (u[i + 1] - u[i]) / dx_;
    const double al = energy.flux1(grid.cell_midpoint(static_cast<int>(i) - 1), gl);
    const double ar = energy.flux1(grid.cell_midpoint(static_cast<int>(i)), gr);
    const double mass =
        (c[i] * (u[i] - u_prev[i]) + (hyst.peek(mem[i], u[i]) - w_prev[i])) *
        dx_ / h;
    return mass + (al - ar) - f[i] * dx_;
  }

  void residual(std::span<const double> u, std::vector<double>& r) const {
    const std::size_t n = nodes();
    const double dx_ = dx();
    const double inv = 1.0 / dx_;
    double a_left =
        energy.flux1(grid.cell_midpoint(0), (u[1] - u[0]) * inv);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double a_right = energy.flux1(grid.cell_midpoint(static_cast<int>(i)),
                                          (u[i + 1] - u[i]) * inv);
      const double mass =
          (c[i] * (u[i] - u_prev[i]) + (hyst.peek(mem[i], u[i]) - w_prev[i])) *
          dx_ / h;
      r[i - 1] = mass + (a_left - a_right) - f[i] * dx_;
      a_left = a_right;
    }
  }
};

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double two_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Monotone scalar solve for node i with the neighbors frozen.  Returns the
// achieved |residual|; sets pinned when the nodal function jumps across zero
// (a hysteresis relay threshold) so no root exists.
double scalar_solve(const StepWork& w, std::vector<double>& u, std::size_t i,
                    double abs_tol, bool& pinned) {
  pinned = false;
  double v = u[i];
  double fv = w.nodal_residual(u, i);
  if (std::abs(fv) <= abs_tol) return std::abs(fv);
  // bracket: nodal residual is strictly increasing in u_i
  double lo = v;
  double hi = v;
  double flo = fv;
  double fhi = fv;
  double stride = std::max(1e-3, 1e-3 * std::abs(v));
  for (int k = 0; k < 200 && flo > 0.0; ++k) {
    lo -= stride;
    stride *= 2.0;
    u[i] = lo;
    flo = w.nodal_residual(u, i);
  }
  stride = std::max(1e-3, 1e-3 * std::abs(v));
  for (int k = 0; k < 200 && fhi < 0.0; ++k) {
    hi += stride;
    stride *= 2.0;
    u[i] = hi;
    fhi = w.nodal_residual(u, i);
  }
  if (flo > 0.0 || fhi < 0.0) {  // could not bracket; keep starting point
    u[i] = v;
    return std::abs(fv);
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating point resolution
    u[i] = mid;
    const double fm = w.nodal_residual(u, i);
    if (std::abs(fm) <= abs_tol) return std::abs(fm);
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // Interval collapsed without meeting the tolerance: the strictly
  // increasing nodal function jumps across zero here.  Keep the side with
  // the smaller magnitude.
  if (std::abs(flo) <= std::abs(fhi)) {
    u[i] = lo;
    pinned = true;
    return std::abs(flo);
  }
  u[i] = hi;
  pinned = true;
  return std::abs(fhi);
}

}  // namespace

StepResult step(SimState& state, std::span<const double> f_m,
                const Grid1D& grid, const EnergyModel& energy,
                const HysteresisModel& hysteresis, std::span<const double> c,
                const StepConfig& cfg) {
  const auto n = static_cast<std::size_t>(grid.node_count());
  if (state.u.values.size() != n || f_m.size() != n || c.size() != n ||
      state.memories.size() != n || state.w.size() != n) {
    throw std::invalid_argument("step: inconsistent state sizes");
  }
  const double dx = grid.dx();
  const double h = cfg.h();

  const std::vector<double> u_prev = state.u.values;
  const std::vector<double> w_prev = state.w;
  StepWork work{grid,  energy, hysteresis,  c,
                f_m,   u_prev, w_prev,      state.memories,
                h};

  double f_l2 = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) f_l2 += f_m[i] * f_m[i] * dx;
  f_l2 = std::sqrt(f_l2);
  const double scale = dx * (1.0 + f_l2);
  const double abs_tol = cfg.newton_tol * scale;

  std::vector<double>& u = state.u.values;
  std::vector<double> r(n - 2);
  std::vector<double> r_trial(n - 2);
  std::vector<double> u_trial(n);

  work.residual(u, r);
  double res_sup = sup_norm(r);
  double res_two = two_norm(r);

  StepResult result;
  bool accepted = res_sup <= abs_tol;
  int pinned_nodes = 0;

  int iter = 0;
  while (!accepted && iter < cfg.newton_max_iter) {
    ++iter;
    // semismooth Newton step
    Tridiagonal jac(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      jac.diag[i - 1] =
          (c[i] + hysteresis.slope(state.memories[i], u[i])) * dx / h;
    }
    add_diffusion_jacobian(grid, energy, u, cfg.regularize_degenerate, jac);
    std::vector<double> rhs(r);
    for (double& x : rhs) x = -x;
    bool improved = false;
    try {
      std::vector<double> delta = solve_tridiagonal(std::move(jac), std::move(rhs));
      double s = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        u_trial = u;
        for (std::size_t i = 1; i + 1 < n; ++i) u_trial[i] += s * delta[i - 1];
        work.residual(u_trial, r_trial);
        const double trial_two = two_norm(r_trial);
        if (trial_two <= (1.0 - 1e-4 * s) * res_two) {
          u.swap(u_trial);
          r.swap(r_trial);
          res_two = trial_two;
          res_sup = sup_norm(r);
          improved = true;
          break;
        }
        s *= cfg.line_search_shrink;
      }
    } catch (const std::runtime_error&) {
      improved = false;  // singular system; fall through to the sweep
    }
    if (res_sup <= abs_tol) {
      accepted = true;
      break;
    }
    if (!improved) {
      // Nonlinear Gauss-Seidel with per-node monotone bisection; handles
      // hysteresis jumps the Newton model cannot see.
      pinned_nodes = 0;
      for (int sweep = 0; sweep < 50; ++sweep) {
        double moved = 0.0;
        pinned_nodes = 0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
          const double before = u[i];
          bool pinned = false;
          scalar_solve(work, u, i, abs_tol, pinned);
          if (pinned) ++pinned_nodes;
          moved = std::max(moved, std::abs(u[i] - before));
        }
        if (moved <= 1e-15 * (1.0 + sup_norm(u))) break;
      }
      work.residual(u, r);
      res_two = two_norm(r);
      res_sup = sup_norm(r);
      if (res_sup <= abs_tol) {
        accepted = true;
        break;
      }
      // All nodes still above tolerance are pinned at hysteresis jumps:
      // that is the closest admissible state, accept it.
      int above = 0;
      int above_pinned = 0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::abs(r[i - 1]) > abs_tol) {
          ++above;
          bool pinned = false;
          std::vector<double> probe(u);
          scalar_solve(work, probe, i, abs_tol, pinned);
          if (pinned && std::abs(probe[i] - u[i]) <= 1e-12 * (1.0 + std::abs(u[i]))) {
            ++above_pinned;
          }
        }
      }
      if (above > 0 && above == above_pinned) {
        pinned_nodes = above;
        accepted = true;
        break;
      }
    }
  }

  if (!accepted) {
    state.u.values = u_prev;  // leave the state untouched on failure
    throw StepFailure(state.level + 1, res_sup / scale);
  }

  // boundary stays clamped
  u.front() = 0.0;
  u.back() = 0.0;

  // advance memories exactly once with the accepted values
  result.diss_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double w_new = hysteresis.advance(state.memories[i], u[i]);
    const double dw = w_new - w_prev[i];
    const double du = u[i] - u_prev[i];
    result.diss_min = std::min(result.diss_min, dw * du);
    result.diss_sum += dw * du * dx;
    state.w[i] = w_new;
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double du = u[i] - u_prev[i];
    result.resid_dot_du += r[i - 1] * du;
    result.load_dot_du += f_m[i] * du * dx;
  }

  result.converged = true;
  result.iters = iter;
  result.scaled_resid = res_sup / scale;
  result.pinned_nodes = pinned_nodes;

  double du_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double du = u[i] - u_prev[i];
    du_sq += du * du * dx;
  }
  state.cum_du_sq += du_sq / h;
  state.level += 1;
  return result;
}

Trace run(const RunSpec& spec) {
  spec.validate();
  const Grid1D& grid = spec.grid;
  const auto n = static_cast<std::size_t>(grid.node_count());
  const double h = spec.step.h();
  const double p = spec.energy.p();

  SimState state;
  state.u = spec.u0;
  state.memories.reserve(n);
  state.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    state.memories.push_back(spec.hysteresis.init_memory(spec.u0.values[i]));
    state.w[i] = spec.hysteresis.output(state.memories[i]);
  }

  Trace trace{grid, spec.step.T, spec.step.ell, p, {}};
  trace.levels.reserve(static_cast<std::size_t>(spec.step.ell) + 1);

  const auto record = [&](double t, const std::vector<double>& f_m,
                          const StepResult* s, double du_l2) {
    LevelRecord rec;
    rec.t = t;
    rec.u = state.u.values;
    rec.w = state.w;
    rec.f = f_m;
    rec.sigma = sigma(grid, spec.energy, state.u.values);
    rec.du_l2 = du_l2;
    rec.grad_lp = norms(grid, state.u.values, p).w1p_semi;
    double fl2 = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) fl2 += f_m[i] * f_m[i] * grid.dx();
    rec.f_l2 = std::sqrt(fl2);
    if (s != nullptr) {
      rec.newton_iters = s->iters;
      rec.achieved_resid = s->scaled_resid;
      rec.resid_dot_du = s->resid_dot_du;
      rec.load_dot_du = s->load_dot_du;
      rec.diss_min = s->diss_min;
      rec.diss_sum = s->diss_sum;
    }
    trace.levels.push_back(std::move(rec));
  };

  record(0.0, std::vector<double>(n, 0.0), nullptr, 0.0);

  std::vector<double> prev(n);
  for (int m = 1; m <= spec.step.ell; ++m) {
    const std::vector<double> f_m = spec.load.average(grid, m, h);
    prev = state.u.values;
    const StepResult s =
        step(state, f_m, grid, spec.energy, spec.hysteresis, spec.c, spec.step);
    double du_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double du = state.u.values[i] - prev[i];
      du_sq += du * du * grid.dx();
    }
    record(m * h, f_m, &s, std::sqrt(du_sq));
  }

  const InterpGap gap = interpolate_gap(trace);
  const double tol = 1e-12 * std::max(gap.rhs, 1e-300);
  if (std::abs(gap.lhs - gap.rhs) > tol) {
    throw std::logic_error("interpolate-gap identity violated: " +
                           std::to_string(gap.lhs) + " vs " +
                           std::to_string(gap.rhs));
  }
  return trace;
}

Field interpolate(const Trace& trace, double t, InterpKind kind) {
  if (t < 0.0 || t > trace.T) {
    throw std::invalid_argument("interpolation time outside [0, T]");
  }
  const double h = trace.h();
  Field out = Field::zeros(trace.grid);
  const auto& lv = trace.levels;
  if (kind == InterpKind::Linear) {
    int m = std::min(static_cast<int>(std::floor(t / h)), trace.ell - 1);
    m = std::max(m, 0);
    const double tau = t / h - m;
    const auto& a = lv[static_cast<std::size_t>(m)].u;
    const auto& b = lv[static_cast<std::size_t>(m + 1)].u;
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.values[i] = tau * b[i] + (1.0 - tau) * a[i];
    }
  } else {
    int m = static_cast<int>(std::ceil(t / h)) - 1;
    m = std::clamp(m, -1, trace.ell - 1);
    out.values = lv[static_cast<std::size_t>(m + 1)].u;
  }
  return out;
}

InterpGap interpolate_gap(const Trace& trace) {
  InterpGap gap;
  const double h = trace.h();
  const Grid1D& grid = trace.grid;
  const double g = 0.5 / std::sqrt(3.0);
  for (int m = 0; m + 1 <= trace.ell; ++m) {
    const auto& a = trace.levels[static_cast<std::size_t>(m)].u;
    const auto& b = trace.levels[static_cast<std::size_t>(m + 1)].u;
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
      const double d = b[i] - a[i];
      d2 += w * d * d * grid.dx();
    }
    gap.rhs += h / 3.0 * d2;
    for (const double tau : {0.5 - g, 0.5 + g}) {
      const double t = (m + tau) * h;
      const Field ul = interpolate(trace, t, InterpKind::Linear);
      const Field uc = interpolate(trace, t, InterpKind::Constant);
      double s = 0.0;
      for (std::size_t i = 0; i < ul.values.size(); ++i) {
        const double w = (i == 0 || i + 1 == ul.values.size()) ? 0.5 : 1.0;
        const double d = ul.values[i] - uc.values[i];
        s += w * d * d * grid.dx();
      }
      gap.lhs += 0.5 * h * s;
    }
  }
  return gap;
}

}  // namespace hyst
