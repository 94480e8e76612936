// Convex energy integrands J(x, lambda) with flux a(x, lambda) = grad_l J
// and second derivative, plus sampled verifiers for the structural
// growth/coercivity/monotonicity inequalities the solvers rely on.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hyst {

// Thrown by flux_jacobian at the degenerate origin of a pure p-power with
// p > 2; solvers switch to the regularized slope there.
class DegenerateJacobian : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Piecewise-constant coefficient over uniform bins of [x_lo, x_hi];
// lookups outside the interval clamp to the nearest bin.
struct PiecewiseConstant {
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::vector<double> values{1.0};

  double at(double x) const;
  double min_value() const;
  double max_value() const;
};

class EnergyModel {
 public:
  enum class Kind { PPower, RegularizedPPower, Quadratic };

  // J = alpha1 |lambda|^p, p >= 2.
  static EnergyModel p_power(double p, double alpha1, int dim = 1);
  // J = alpha1 ((delta^2 + |lambda|^2)^{p/2} - delta^p); J(0) = 0 and the
  // Hessian is defined everywhere.
  static EnergyModel regularized_p_power(double p, double alpha1, double delta,
                                         int dim = 1);
  // J = k(x) |lambda|^2 / 2 with k >= k_min > 0.
  static EnergyModel quadratic(PiecewiseConstant k, int dim = 1);
  static EnergyModel quadratic(double k, int dim = 1);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double p() const { return p_; }
  double delta() const { return delta_; }

  // Documented growth constants: alpha1|l|^p <= J <= alpha2(1+|l|^p),
  // alpha3 = sup_x J(x, 0), |a| <= c3(1+|l|^{p-1}), and the Lipschitz-type
  // constant c2 of |a(l1)-a(l2)| <= c2(1+|l1|+|l2|)^{p-2}|l1-l2|.
  double alpha1() const;
  double alpha2() const;
  double alpha3() const { return 0.0; }
  double growth_c3() const;
  double monotone_c2() const;

  double value(double x, std::span<const double> lambda) const;
  void flux(double x, std::span<const double> lambda,
            std::span<double> out) const;
  // Symmetric PSD matrix (row-major dim x dim); throws DegenerateJacobian
  // for PPower with p > 2 at lambda = 0.
  void flux_jacobian(double x, std::span<const double> lambda,
                     std::span<double> out) const;

  // Scalar fast paths for the 1D assembly.
  double value1(double x, double g) const;
  double flux1(double x, double g) const;
  double flux_slope1(double x, double g) const;
  // flux_slope1 with the eps = 1e-10 (1 + trace) shift applied, defined at
  // the degeneracy.
  double flux_slope1_shifted(double x, double g) const;

 private:
  EnergyModel() = default;
  double coeff(double x) const;  // quadratic k(x)

  Kind kind_ = Kind::PPower;
  int dim_ = 1;
  double p_ = 2.0;
  double alpha1_ = 1.0;
  double delta_ = 0.0;
  PiecewiseConstant k_;
};

struct GrowthReport {
  double lower_margin = 0.0;        // min of J - alpha1|l|^p
  double upper_margin = 0.0;        // min of alpha2(1+|l|^p) - J
  double flux_margin = 0.0;         // min of c3(1+|l|^{p-1}) - |a|
  double coercivity_margin = 0.0;   // min of a.l - alpha1|l|^p + alpha3
  std::array<double, 2> witness{};  // lambda attaining the worst margin
  int samples = 0;

  double worst() const;
  bool pass(double tol = -1e-12) const { return worst() >= tol; }
};

struct MonotoneReport {
  double monotone_gap = 0.0;    // min of (a(l1)-a(l2)).(l1-l2)
  double lipschitz_margin = 0.0;  // min of c2(1+|l1|+|l2|)^{p-2}|l1-l2| - |a1-a2|
  double subgradient_margin = 0.0;  // min of J(l1)-J(l2) - a(l2).(l1-l2)
  std::array<double, 2> witness_a{};
  std::array<double, 2> witness_b{};
  int pairs = 0;

  bool pass(double tol = -1e-12) const;
};

// Samples lambda on a log-radial grid plus random directions and checks the
// growth sandwich, the flux growth bound, and coercivity with the model's
// documented constants.
GrowthReport verify_growth(const EnergyModel& model, int sample_count,
                           std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

// Random pairs: monotonicity of the flux, the Lipschitz-type bound, and the
// subgradient inequality.
MonotoneReport verify_monotone(const EnergyModel& model, int pair_count,
                               std::uint64_t seed = 0x2545f4914f6cdd1dULL);

}  // namespace hyst
