#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hyst/energy.hpp"

using namespace hyst;

namespace {

std::vector<std::pair<std::string, EnergyModel>> test_models(int dim) {
  PiecewiseConstant k;
  k.values = {1.0, 1.5, 2.0, 1.25};
  return {
      {"laplace", EnergyModel::p_power(2.0, 0.5, dim)},
      {"p3", EnergyModel::p_power(3.0, 1.0 / 3.0, dim)},
      {"p4", EnergyModel::p_power(4.0, 0.25, dim)},
      {"reg3", EnergyModel::regularized_p_power(3.0, 1.0, 0.1, dim)},
      {"quad_field", EnergyModel::quadratic(k, dim)},
  };
}

double fd_flux(const EnergyModel& m, double x, std::array<double, 2> lam,
               std::size_t i) {
  const double r = std::hypot(lam[0], lam[1]);
  const double step = 1e-6 * (1.0 + r);
  auto lp = lam;
  auto lm = lam;
  lp[i] += step;
  lm[i] -= step;
  std::span<const double> sp(lp.data(), static_cast<std::size_t>(m.dim()));
  std::span<const double> sm(lm.data(), static_cast<std::size_t>(m.dim()));
  return (m.value(x, sp) - m.value(x, sm)) / (2.0 * step);
}

}  // namespace

TEST_CASE("energy values match direct arithmetic") {
  auto laplace = EnergyModel::p_power(2.0, 0.5);
  const double two[] = {2.0};
  CHECK(laplace.value(0.3, std::span<const double>(two, 1)) ==
        doctest::Approx(2.0).epsilon(1e-15));
  auto p3 = EnergyModel::p_power(3.0, 1.0);
  const double zero[] = {0.0};
  CHECK(p3.value(0.0, std::span<const double>(zero, 1)) == 0.0);
  auto reg = EnergyModel::regularized_p_power(3.0, 1.0, 0.1);
  const double one[] = {1.0};
  const double oracle = std::pow(0.01 + 1.0, 1.5) - 0.001;
  CHECK(reg.value(0.0, std::span<const double>(one, 1)) ==
        doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("flux matches the symbolic derivative") {
  auto laplace = EnergyModel::p_power(2.0, 0.5);
  CHECK(laplace.flux1(0.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
  auto p3 = EnergyModel::p_power(3.0, 1.0 / 3.0);
  CHECK(p3.flux1(0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(p3.flux1(0.0, -2.0) == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(p3.flux1(0.0, 0.0) == 0.0);
  auto p4 = EnergyModel::p_power(4.0, 0.25);
  CHECK(p4.flux1(0.0, 0.0) == 0.0);
}

TEST_CASE("flux jacobian at reference points") {
  auto quad = EnergyModel::quadratic(2.0, 2);
  std::array<double, 4> out{};
  const double lam[] = {0.7, -0.2};
  quad.flux_jacobian(0.0, std::span<const double>(lam, 2), out);
  CHECK(out[0] == 2.0);
  CHECK(out[3] == 2.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);

  auto laplace = EnergyModel::p_power(2.0, 0.5);
  CHECK(laplace.flux_slope1(0.0, 12.5) == 1.0);

  auto reg = EnergyModel::regularized_p_power(4.0, 0.25, 1.0);
  // finite-difference oracle at the origin
  const double step = 1e-8;
  const double fd =
      (reg.flux1(0.0, step) - reg.flux1(0.0, -step)) / (2.0 * step);
  CHECK(reg.flux_slope1(0.0, 0.0) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("p-power jacobian is degenerate at the origin for p > 2") {
  auto p3 = EnergyModel::p_power(3.0, 1.0);
  CHECK_THROWS_AS(p3.flux_slope1(0.0, 0.0), DegenerateJacobian);
  std::array<double, 1> out{};
  const double zero[] = {0.0};
  CHECK_THROWS_AS(
      p3.flux_jacobian(0.0, std::span<const double>(zero, 1), out),
      DegenerateJacobian);
  CHECK(p3.flux_slope1_shifted(0.0, 0.0) > 0.0);
}

TEST_CASE("constructors enforce the structural constraints") {
  CHECK_THROWS_AS(EnergyModel::p_power(1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EnergyModel::p_power(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(EnergyModel::regularized_p_power(3.0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnergyModel::quadratic(0.0), std::invalid_argument);
  PiecewiseConstant bad;
  bad.values = {1.0, 0.0};
  CHECK_THROWS_AS(EnergyModel::quadratic(bad), std::invalid_argument);
}

TEST_CASE("piecewise constant coefficient lookup") {
  PiecewiseConstant k;
  k.x_lo = 0.0;
  k.x_hi = 1.0;
  k.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(k.at(0.1) == 1.0);
  CHECK(k.at(0.3) == 2.0);
  CHECK(k.at(0.99) == 4.0);
  CHECK(k.at(-5.0) == 1.0);
  CHECK(k.at(5.0) == 4.0);
  CHECK(k.min_value() == 1.0);
  CHECK(k.max_value() == 4.0);
}

TEST_CASE("flux equals central finite differences of the value") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(11 + dim);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    for (const auto& [name, m] : test_models(dim)) {
      INFO(name << " dim " << dim);
      int checked = 0;
      while (checked < 1000) {
        std::array<double, 2> lam{box(rng), dim == 2 ? box(rng) : 0.0};
        const double r = std::hypot(lam[0], lam[1]);
        if (m.kind() == EnergyModel::Kind::PPower && m.p() > 2.0 && r < 1e-2) {
          continue;  // away from the degeneracy
        }
        std::array<double, 2> fl{};
        std::span<const double> sl(lam.data(), static_cast<std::size_t>(dim));
        m.flux(0.37, sl, std::span<double>(fl.data(), sl.size()));
        for (std::size_t i = 0; i < sl.size(); ++i) {
          const double fd = fd_flux(m, 0.37, lam, i);
          const double scale =
              std::max({1.0, std::abs(fl[i]), std::abs(fd)});
          CHECK(std::abs(fl[i] - fd) / scale <= 1e-6);
        }
        ++checked;
      }
    }
  }
}

TEST_CASE("flux jacobian equals finite differences of the flux") {
  for (int dim : {1, 2}) {
    std::mt19937_64 rng(21 + dim);
    std::uniform_real_distribution<double> box(-5.0, 5.0);
    for (const auto& [name, m] : test_models(dim)) {
      INFO(name << " dim " << dim);
      for (int k = 0; k < 200; ++k) {
        std::array<double, 2> lam{box(rng), dim == 2 ? box(rng) : 0.0};
        const double r = std::hypot(lam[0], lam[1]);
        if (m.kind() == EnergyModel::Kind::PPower && m.p() > 2.0 && r < 5e-2) {
          continue;
        }
        const auto d = static_cast<std::size_t>(dim);
        std::vector<double> jac(d * d);
        std::span<const double> sl(lam.data(), d);
        m.flux_jacobian(0.2, sl, jac);
        const double step = 1e-6 * (1.0 + r);
        for (std::size_t j = 0; j < d; ++j) {
          auto lp = lam;
          auto lm = lam;
          lp[j] += step;
          lm[j] -= step;
          std::array<double, 2> fp{};
          std::array<double, 2> fm{};
          m.flux(0.2, std::span<const double>(lp.data(), d),
                 std::span<double>(fp.data(), d));
          m.flux(0.2, std::span<const double>(lm.data(), d),
                 std::span<double>(fm.data(), d));
          for (std::size_t i = 0; i < d; ++i) {
            const double fd = (fp[i] - fm[i]) / (2.0 * step);
            const double scale =
                std::max({1.0, std::abs(jac[i * d + j]), std::abs(fd)});
            CHECK(std::abs(jac[i * d + j] - fd) / scale <= 2e-5);
          }
        }
      }
    }
  }
}

TEST_CASE("convexity along random segments") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> box(-8.0, 8.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& [name, m] : test_models(1)) {
    INFO(name);
    for (int k = 0; k < 500; ++k) {
      const double a[] = {box(rng)};
      const double b[] = {box(rng)};
      const double t = unit(rng);
      const double mid[] = {t * a[0] + (1.0 - t) * b[0]};
      const double lhs = m.value(0.5, std::span<const double>(mid, 1));
      const double rhs = t * m.value(0.5, std::span<const double>(a, 1)) +
                         (1.0 - t) * m.value(0.5, std::span<const double>(b, 1));
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("growth and monotonicity verifiers pass for every model") {
  for (int dim : {1, 2}) {
    for (const auto& [name, m] : test_models(dim)) {
      INFO(name << " dim " << dim);
      const GrowthReport g = verify_growth(m, 1000);
      CHECK(g.pass(-1e-12));
      CHECK(g.samples >= 1000);
      const MonotoneReport mo = verify_monotone(m, 1000);
      CHECK(mo.pass(-1e-12));
      // strictness for separated pairs on the pure p-power
      if (m.kind() == EnergyModel::Kind::PPower) {
        const double l1[] = {2.0, 0.0};
        const double l2[] = {-1.0, 0.0};
        std::array<double, 2> f1{};
        std::array<double, 2> f2{};
        const auto d = static_cast<std::size_t>(dim);
        m.flux(0.0, std::span<const double>(l1, d), std::span<double>(f1.data(), d));
        m.flux(0.0, std::span<const double>(l2, d), std::span<double>(f2.data(), d));
        double gap = 0.0;
        for (std::size_t i = 0; i < d; ++i) gap += (f1[i] - f2[i]) * (l1[i] - l2[i]);
        CHECK(gap > 0.0);
      }
    }
  }
}

TEST_CASE("quadratic with lambda = 0 included keeps alpha3 = 0") {
  auto quad = EnergyModel::quadratic(1.0);
  const GrowthReport g = verify_growth(quad, 100);
  CHECK(g.pass(-1e-12));
  CHECK(quad.alpha3() == 0.0);
}
