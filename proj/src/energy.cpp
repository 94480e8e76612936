#include "hyst/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hyst {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void require_lambda(const EnergyModel& m, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != m.dim()) {
    throw std::invalid_argument("lambda dimension mismatch");
  }
  for (double x : lambda) {
    if (!std::isfinite(x)) throw std::invalid_argument("lambda must be finite");
  }
}

}  // namespace

double PiecewiseConstant::at(double x) const {
  if (values.empty()) throw std::invalid_argument("empty coefficient table");
  if (values.size() == 1) return values[0];
  const double t = (x - x_lo) / (x_hi - x_lo);
  const auto n = static_cast<long>(values.size());
  long i = static_cast<long>(std::floor(t * static_cast<double>(n)));
  i = std::clamp(i, long{0}, n - 1);
  return values[static_cast<std::size_t>(i)];
}

double PiecewiseConstant::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double PiecewiseConstant::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

EnergyModel EnergyModel::p_power(double p, double alpha1, int dim) {
  if (!(p >= 2.0)) throw std::invalid_argument("p must satisfy p >= 2");
  if (!(alpha1 > 0.0)) throw std::invalid_argument("alpha1 must be positive");
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  EnergyModel m;
  m.kind_ = Kind::PPower;
  m.dim_ = dim;
  m.p_ = p;
  m.alpha1_ = alpha1;
  return m;
}

EnergyModel EnergyModel::regularized_p_power(double p, double alpha1,
                                             double delta, int dim) {
  EnergyModel m = p_power(p, alpha1, dim);
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  m.kind_ = Kind::RegularizedPPower;
  m.delta_ = delta;
  return m;
}

EnergyModel EnergyModel::quadratic(PiecewiseConstant k, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  if (k.values.empty() || !(k.min_value() > 0.0)) {
    throw std::invalid_argument("quadratic coefficient must be >= k_min > 0");
  }
  EnergyModel m;
  m.kind_ = Kind::Quadratic;
  m.dim_ = dim;
  m.p_ = 2.0;
  m.k_ = std::move(k);
  return m;
}

EnergyModel EnergyModel::quadratic(double k, int dim) {
  PiecewiseConstant field;
  field.values = {k};
  return quadratic(std::move(field), dim);
}

double EnergyModel::coeff(double x) const { return k_.at(x); }

double EnergyModel::alpha1() const {
  switch (kind_) {
    case Kind::PPower:
    case Kind::RegularizedPPower:
      return alpha1_;
    case Kind::Quadratic:
      return 0.5 * k_.min_value();
  }
  return alpha1_;
}

double EnergyModel::alpha2() const {
  switch (kind_) {
    case Kind::PPower:
      return alpha1_;
    case Kind::RegularizedPPower:
      // (d^2+t^2)^{p/2} <= (d+t)^p <= 2^{p-1}(d^p + t^p)
      return alpha1_ * std::pow(2.0, p_ - 1.0) * (1.0 + std::pow(delta_, p_));
    case Kind::Quadratic:
      return 0.5 * k_.max_value();
  }
  return alpha1_;
}

double EnergyModel::growth_c3() const {
  switch (kind_) {
    case Kind::PPower:
      return alpha1_ * p_;
    case Kind::RegularizedPPower:
      return alpha1_ * p_ * std::pow(1.0 + delta_, p_ - 2.0) *
             std::pow(2.0, std::max(p_ - 2.0, 0.0));
    case Kind::Quadratic:
      return k_.max_value();
  }
  return 0.0;
}

double EnergyModel::monotone_c2() const {
  switch (kind_) {
    case Kind::PPower:
      return alpha1_ * p_ * (p_ - 1.0);
    case Kind::RegularizedPPower:
      return alpha1_ * p_ * (p_ - 1.0) * std::pow(1.0 + delta_, p_ - 2.0);
    case Kind::Quadratic:
      return k_.max_value();
  }
  return 0.0;
}

double EnergyModel::value(double x, std::span<const double> lambda) const {
  require_lambda(*this, lambda);
  const double r2 = norm2(lambda);
  switch (kind_) {
    case Kind::PPower:
      return alpha1_ * std::pow(r2, 0.5 * p_);
    case Kind::RegularizedPPower:
      return alpha1_ * (std::pow(delta_ * delta_ + r2, 0.5 * p_) -
                        std::pow(delta_, p_));
    case Kind::Quadratic:
      return 0.5 * coeff(x) * r2;
  }
  return 0.0;
}

void EnergyModel::flux(double x, std::span<const double> lambda,
                       std::span<double> out) const {
  require_lambda(*this, lambda);
  if (out.size() != lambda.size()) {
    throw std::invalid_argument("flux output size mismatch");
  }
  const double r2 = norm2(lambda);
  double scale = 0.0;
  switch (kind_) {
    case Kind::PPower:
      scale = (r2 == 0.0 && p_ > 2.0)
                  ? 0.0
                  : alpha1_ * p_ * std::pow(r2, 0.5 * p_ - 1.0);
      if (p_ == 2.0) scale = 2.0 * alpha1_;
      break;
    case Kind::RegularizedPPower:
      scale = alpha1_ * p_ * std::pow(delta_ * delta_ + r2, 0.5 * p_ - 1.0);
      break;
    case Kind::Quadratic:
      scale = coeff(x);
      break;
  }
  for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = scale * lambda[i];
}

void EnergyModel::flux_jacobian(double x, std::span<const double> lambda,
                                std::span<double> out) const {
  require_lambda(*this, lambda);
  const auto d = static_cast<std::size_t>(dim_);
  if (out.size() != d * d) {
    throw std::invalid_argument("jacobian output size mismatch");
  }
  const double r2 = norm2(lambda);
  double iso = 0.0;   // coefficient of the identity
  double rank1 = 0.0; // coefficient of lambda lambda^T
  switch (kind_) {
    case Kind::PPower:
      if (p_ == 2.0) {
        iso = 2.0 * alpha1_;
      } else if (r2 == 0.0) {
        throw DegenerateJacobian("p-power Hessian is degenerate at lambda = 0");
      } else {
        iso = alpha1_ * p_ * std::pow(r2, 0.5 * p_ - 1.0);
        rank1 = alpha1_ * p_ * (p_ - 2.0) * std::pow(r2, 0.5 * p_ - 2.0);
      }
      break;
    case Kind::RegularizedPPower: {
      const double s2 = delta_ * delta_ + r2;
      iso = alpha1_ * p_ * std::pow(s2, 0.5 * p_ - 1.0);
      rank1 = alpha1_ * p_ * (p_ - 2.0) * std::pow(s2, 0.5 * p_ - 2.0);
      break;
    }
    case Kind::Quadratic:
      iso = coeff(x);
      break;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] = rank1 * lambda[i] * lambda[j] + (i == j ? iso : 0.0);
    }
  }
}

double EnergyModel::value1(double x, double g) const {
  const double a = std::abs(g);
  switch (kind_) {
    case Kind::PPower:
      return alpha1_ * std::pow(a, p_);
    case Kind::RegularizedPPower:
      return alpha1_ * (std::pow(delta_ * delta_ + g * g, 0.5 * p_) -
                        std::pow(delta_, p_));
    case Kind::Quadratic:
      return 0.5 * coeff(x) * g * g;
  }
  return 0.0;
}

double EnergyModel::flux1(double x, double g) const {
  switch (kind_) {
    case Kind::PPower:
      if (p_ == 2.0) return 2.0 * alpha1_ * g;
      if (g == 0.0) return 0.0;
      return alpha1_ * p_ * std::pow(std::abs(g), p_ - 2.0) * g;
    case Kind::RegularizedPPower:
      return alpha1_ * p_ * std::pow(delta_ * delta_ + g * g, 0.5 * p_ - 1.0) *
             g;
    case Kind::Quadratic:
      return coeff(x) * g;
  }
  return 0.0;
}

double EnergyModel::flux_slope1(double x, double g) const {
  switch (kind_) {
    case Kind::PPower:
      if (p_ == 2.0) return 2.0 * alpha1_;
      if (g == 0.0) {
        throw DegenerateJacobian("p-power Hessian is degenerate at lambda = 0");
      }
      return alpha1_ * p_ * (p_ - 1.0) * std::pow(std::abs(g), p_ - 2.0);
    case Kind::RegularizedPPower: {
      const double s2 = delta_ * delta_ + g * g;
      return alpha1_ * p_ * std::pow(s2, 0.5 * p_ - 1.0) +
             alpha1_ * p_ * (p_ - 2.0) * std::pow(s2, 0.5 * p_ - 2.0) * g * g;
    }
    case Kind::Quadratic:
      return coeff(x);
  }
  return 0.0;
}

double EnergyModel::flux_slope1_shifted(double x, double g) const {
  double s = 0.0;
  if (kind_ == Kind::PPower && p_ > 2.0 && g == 0.0) {
    s = 0.0;
  } else {
    s = flux_slope1(x, g);
  }
  return s + 1e-10 * (1.0 + s);
}

double GrowthReport::worst() const {
  return std::min(std::min(lower_margin, upper_margin),
                  std::min(flux_margin, coercivity_margin));
}

bool MonotoneReport::pass(double tol) const {
  return monotone_gap >= tol && lipschitz_margin >= tol &&
         subgradient_margin >= tol;
}

namespace {

std::vector<std::array<double, 2>> sample_lambdas(const EnergyModel& model,
                                                  int count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<std::size_t>(count) + 32);
  out.push_back({0.0, 0.0});
  // log-radial sweep
  const int radial = std::min(count / 2, 200);
  for (int i = 0; i < radial; ++i) {
    const double t = static_cast<double>(i) / std::max(radial - 1, 1);
    const double r = std::pow(10.0, -4.0 + 6.0 * t);
    if (model.dim() == 1) {
      out.push_back({(i % 2 == 0 ? r : -r), 0.0});
    } else {
      const double phi = 2.0 * M_PI * t * 7.0;
      out.push_back({r * std::cos(phi), r * std::sin(phi)});
    }
  }
  while (static_cast<int>(out.size()) < count) {
    std::array<double, 2> l{10.0 * unit(rng),
                            model.dim() == 2 ? 10.0 * unit(rng) : 0.0};
    out.push_back(l);
  }
  return out;
}

}  // namespace

GrowthReport verify_growth(const EnergyModel& model, int sample_count,
                           std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count >= 1");
  GrowthReport rep;
  rep.lower_margin = rep.upper_margin = rep.flux_margin =
      rep.coercivity_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed ^ 0xabcdefULL);
  std::uniform_real_distribution<double> xs(0.0, 1.0);
  const double a1 = model.alpha1();
  const double a2 = model.alpha2();
  const double a3 = model.alpha3();
  const double c3 = model.growth_c3();
  std::array<double, 2> fl{};
  for (const auto& l : sample_lambdas(model, sample_count, seed)) {
    const double x = xs(rng);
    std::span<const double> lam(l.data(), static_cast<std::size_t>(model.dim()));
    const double J = model.value(x, lam);
    model.flux(x, lam, std::span<double>(fl.data(), lam.size()));
    const double r = std::sqrt(norm2(lam));
    const double rp = std::pow(r, model.p());
    double adotl = 0.0;
    double anorm2 = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      adotl += fl[i] * lam[i];
      anorm2 += fl[i] * fl[i];
    }
    const auto track = [&](double& slot, double margin) {
      if (margin < slot) {
        slot = margin;
        rep.witness = l;
      }
    };
    track(rep.lower_margin, J - a1 * rp);
    track(rep.upper_margin, a2 * (1.0 + rp) - J);
    track(rep.flux_margin,
          c3 * (1.0 + std::pow(r, model.p() - 1.0)) - std::sqrt(anorm2));
    track(rep.coercivity_margin, adotl - a1 * rp + a3);
    ++rep.samples;
  }
  return rep;
}

MonotoneReport verify_monotone(const EnergyModel& model, int pair_count,
                               std::uint64_t seed) {
  if (pair_count < 1) throw std::invalid_argument("pair_count >= 1");
  MonotoneReport rep;
  rep.monotone_gap = rep.lipschitz_margin = rep.subgradient_margin =
      std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  std::uniform_real_distribution<double> xs(0.0, 1.0);
  const double c2 = model.monotone_c2();
  std::array<double, 2> fa{};
  std::array<double, 2> fb{};
  for (int k = 0; k < pair_count; ++k) {
    std::array<double, 2> la{box(rng), model.dim() == 2 ? box(rng) : 0.0};
    std::array<double, 2> lb{box(rng), model.dim() == 2 ? box(rng) : 0.0};
    if (k % 37 == 0) lb = la;  // include identical pairs
    const double x = xs(rng);
    std::span<const double> sa(la.data(), static_cast<std::size_t>(model.dim()));
    std::span<const double> sb(lb.data(), static_cast<std::size_t>(model.dim()));
    model.flux(x, sa, std::span<double>(fa.data(), sa.size()));
    model.flux(x, sb, std::span<double>(fb.data(), sb.size()));
    double gap = 0.0;
    double dist2 = 0.0;
    double fdist2 = 0.0;
    double ra = 0.0;
    double rb = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const double dl = la[i] - lb[i];
      const double df = fa[i] - fb[i];
      gap += df * dl;
      dist2 += dl * dl;
      fdist2 += df * df;
      ra += la[i] * la[i];
      rb += lb[i] * lb[i];
    }
    ra = std::sqrt(ra);
    rb = std::sqrt(rb);
    const double lip = c2 * std::pow(1.0 + ra + rb, model.p() - 2.0) *
                           std::sqrt(dist2) -
                       std::sqrt(fdist2);
    double sub = model.value(x, sa) - model.value(x, sb);
    for (std::size_t i = 0; i < sa.size(); ++i) sub -= fb[i] * (la[i] - lb[i]);
    const auto track = [&](double& slot, double margin) {
      if (margin < slot) {
        slot = margin;
        rep.witness_a = la;
        rep.witness_b = lb;
      }
    };
    track(rep.monotone_gap, gap);
    track(rep.lipschitz_margin, lip);
    track(rep.subgradient_margin, sub);
    ++rep.pairs;
  }
  return rep;
}

}  // namespace hyst
