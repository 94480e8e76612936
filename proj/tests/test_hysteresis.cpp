#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hyst/hysteresis.hpp"

using namespace hyst;

namespace {

// Independent clamp-recursion oracle for the play operator.
std::vector<double> play_reference(const std::vector<double>& values, double r,
                                   double w_init = 0.0) {
  std::vector<double> out;
  double w = std::max(values[0] - r, std::min(values[0] + r, w_init));
  out.push_back(w);
  for (std::size_t k = 1; k < values.size(); ++k) {
    w = std::max(values[k] - r, std::min(values[k] + r, w));
    out.push_back(w);
  }
  return out;
}

std::vector<double> fold_outputs(const HysteresisModel& model,
                                 const std::vector<double>& values) {
  MemoryState mem = model.init_memory(values[0]);
  std::vector<double> out{model.output(mem)};
  for (std::size_t k = 1; k < values.size(); ++k) {
    out.push_back(model.advance(mem, values[k]));
  }
  return out;
}

std::vector<std::pair<std::string, HysteresisModel>> property_models() {
  std::vector<std::pair<std::string, HysteresisModel>> models;
  models.emplace_back("play", HysteresisModel::play(1.0));
  models.emplace_back("play_offset", HysteresisModel::play(0.3, 0.5));
  models.emplace_back("stop", HysteresisModel::stop(1.0));
  models.emplace_back("preisach",
                      HysteresisModel::preisach_uniform(-1.0, 1.0, 10, 0.01));
  models.emplace_back(
      "sum", HysteresisModel::weighted_sum({{0.5, HysteresisModel::play(0.5)},
                                            {0.25, HysteresisModel::play(1.5)}}));
  models.emplace_back("zero", HysteresisModel::zero());
  return models;
}

std::vector<double> random_string(std::mt19937_64& rng, int max_len = 200) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::vector<double> s(static_cast<std::size_t>(len(rng)));
  for (double& v : s) v = val(rng);
  return s;
}

}  // namespace

TEST_CASE("play init memory clamps the initial output into the band") {
  auto play = HysteresisModel::play(1.0);
  CHECK(play.output(play.init_memory(0.5)) == 0.0);
  CHECK(play.output(play.init_memory(3.0)) == 2.0);
  CHECK(play.output(play.init_memory(-3.0)) == -2.0);
}

TEST_CASE("preisach init flips relays at closed thresholds") {
  auto single = HysteresisModel::preisach({Relay{-1.0, 1.0, 1.0, -1}});
  CHECK(single.output(single.init_memory(2.0)) == 1.0);
  CHECK(single.output(single.init_memory(1.0)) == 1.0);   // v == alpha flips up
  CHECK(single.output(single.init_memory(0.0)) == -1.0);  // keeps initial
  CHECK(single.output(single.init_memory(-1.0)) == -1.0);
  auto up = HysteresisModel::preisach({Relay{-1.0, 1.0, 1.0, 1}});
  CHECK(up.output(up.init_memory(0.0)) == 1.0);
  CHECK(up.output(up.init_memory(-1.0)) == -1.0);  // v == beta flips down
}

TEST_CASE("play update follows the clamp recursion") {
  auto play = HysteresisModel::play(1.0);
  CHECK(fold_outputs(play, {0.0, 2.0, -2.0}) ==
        std::vector<double>{0.0, 1.0, -1.0});
  // memory plateau inside the band, against the independent oracle
  const std::vector<double> s{0.0, 2.0, 1.5, 2.0};
  CHECK(fold_outputs(play, s) == play_reference(s, 1.0));
  CHECK(fold_outputs(play, s) == std::vector<double>{0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("stop clips accumulated increments") {
  auto stop = HysteresisModel::stop(1.0);
  CHECK(fold_outputs(stop, {0.0, 2.0}) == std::vector<double>{0.0, 1.0});
  auto small = HysteresisModel::stop(0.5);
  CHECK(fold_outputs(small, {0.0, 0.3}) == std::vector<double>{0.0, 0.3});
}

TEST_CASE("evaluate_string matches the fold and bounds") {
  auto play = HysteresisModel::play(1.0);
  CHECK(evaluate_string(play, ScalarString({0.0})) == 0.0);
  const std::vector<double> s{0.0, 2.0, -2.0, 0.0};
  CHECK(evaluate_string(play, ScalarString(s)) == play_reference(s, 1.0).back());
  CHECK(evaluate_string(play, ScalarString(s)) == -1.0);
  CHECK(evaluate_string(HysteresisModel::zero(), ScalarString(s)) == 0.0);
}

TEST_CASE("evaluate_path is rate independent") {
  auto play = HysteresisModel::play(1.0);
  const std::vector<double> values{0.0, 2.0, -2.0};
  const std::vector<double> t1{0.0, 1.0, 2.0};
  const std::vector<double> t2{0.0, 0.1, 0.2};
  const auto out1 = evaluate_path(play, t1, values);
  CHECK(out1 == std::vector<double>{0.0, 1.0, -1.0});
  CHECK(out1 == evaluate_path(play, t2, values));
}

TEST_CASE("path and string evaluation reject bad input") {
  auto play = HysteresisModel::play(1.0);
  CHECK_THROWS_AS(ScalarString({}), std::invalid_argument);
  CHECK_THROWS_AS(ScalarString({std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(play.init_memory(std::nan("")), std::invalid_argument);
  const std::vector<double> bad_t{0.0, 0.0};
  const std::vector<double> v{0.0, 1.0};
  CHECK_THROWS_AS(evaluate_path(play, bad_t, v), std::invalid_argument);
  // mismatched state and model kinds
  auto stop = HysteresisModel::stop(1.0);
  MemoryState play_state = play.init_memory(0.0);
  CHECK_THROWS_AS(stop.advance(play_state, 1.0), std::invalid_argument);
}

TEST_CASE("model constructors validate their parameters") {
  CHECK_THROWS_AS(HysteresisModel::play(0.0), std::invalid_argument);
  CHECK_THROWS_AS(HysteresisModel::stop(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(HysteresisModel::preisach({Relay{1.0, -1.0, 1.0, -1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HysteresisModel::preisach({Relay{-1.0, 1.0, -0.5, -1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HysteresisModel::preisach({Relay{-1.0, 1.0, 1.0, 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      HysteresisModel::weighted_sum({{-1.0, HysteresisModel::play(1.0)}}),
      std::invalid_argument);
}

TEST_CASE("dissipation gap examples") {
  auto play = HysteresisModel::play(1.0);
  CHECK(dissipation_gap(play, ScalarString({0.0, 2.0, -2.0})) >= 0.0);
  CHECK(dissipation_gap(HysteresisModel::zero(), ScalarString({0.0, 1.0})) ==
        0.0);
  auto preisach = HysteresisModel::preisach_uniform(-1.0, 1.0, 10, 0.01);
  std::mt19937_64 rng(7);
  const auto s = [&] {
    std::vector<double> v(50);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (double& x : v) x = val(rng);
    return v;
  }();
  // exhaustive per-segment oracle: recompute every consecutive product
  const auto outs = fold_outputs(preisach, s);
  double oracle = 0.0;
  bool first = true;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double prod = (s[k] - s[k - 1]) * (outs[k] - outs[k - 1]);
    oracle = first ? prod : std::min(oracle, prod);
    first = false;
  }
  CHECK(dissipation_gap(preisach, ScalarString(s)) == oracle);
  CHECK(oracle >= -1e-14);
}

TEST_CASE("piecewise monotonicity holds on random strings for every model") {
  std::mt19937_64 rng(42);
  for (const auto& [name, model] : property_models()) {
    INFO(name);
    for (int trial = 0; trial < 200; ++trial) {
      const auto s = random_string(rng);
      CHECK(dissipation_gap(model, ScalarString(s)) >= -1e-14);
    }
  }
}

TEST_CASE("affine bound holds with the documented constants") {
  std::mt19937_64 rng(43);
  for (const auto& [name, model] : property_models()) {
    INFO(name);
    const AffineBound b = model.affine_bound();
    for (int trial = 0; trial < 500; ++trial) {
      const ScalarString s(random_string(rng));
      const double w = evaluate_string(model, s);
      CHECK(std::abs(w) <= b.kappa0 + b.gamma0 * s.sup_norm() + 1e-14);
    }
  }
}

TEST_CASE("documented rate bounds hold per monotone segment") {
  std::mt19937_64 rng(44);
  for (const auto& [name, model] : property_models()) {
    INFO(name);
    const auto rb = model.rate_bound();
    if (!rb) {
      CHECK(model.kind() == HystKind::Preisach);
      continue;
    }
    for (int trial = 0; trial < 200; ++trial) {
      const auto values = random_string(rng, 60);
      std::vector<double> times(values.size());
      double t = 0.0;
      std::uniform_real_distribution<double> dt(1e-3, 1.0);
      for (std::size_t k = 0; k < times.size(); ++k) {
        times[k] = t;
        t += dt(rng);
      }
      const auto out = evaluate_path(model, times, values);
      for (std::size_t k = 1; k < out.size(); ++k) {
        const double bound = rb->kappa1 * (times[k] - times[k - 1]) +
                             rb->gamma1 * std::abs(values[k] - values[k - 1]);
        CHECK(std::abs(out[k] - out[k - 1]) <= bound + 1e-14);
      }
    }
  }
}

TEST_CASE("memory extension is consistent with string evaluation") {
  std::mt19937_64 rng(45);
  for (const auto& [name, model] : property_models()) {
    INFO(name);
    for (int trial = 0; trial < 100; ++trial) {
      const auto prefix = random_string(rng, 50);
      const auto tail = random_string(rng, 50);
      std::vector<double> whole(prefix);
      whole.insert(whole.end(), tail.begin(), tail.end());
      MemoryState mem = model.init_memory(prefix[0]);
      for (std::size_t k = 1; k < prefix.size(); ++k) {
        model.advance(mem, prefix[k]);
      }
      double w = model.output(mem);
      for (double v : tail) w = model.advance(mem, v);
      CHECK(w == evaluate_string(model, ScalarString(whole)));
    }
  }
}

TEST_CASE("the last-component map is nondecreasing") {
  std::mt19937_64 rng(46);
  for (const auto& [name, model] : property_models()) {
    INFO(name);
    for (int trial = 0; trial < 20; ++trial) {
      const auto prefix = random_string(rng, 30);
      MemoryState mem = model.init_memory(prefix[0]);
      for (std::size_t k = 1; k < prefix.size(); ++k) {
        model.advance(mem, prefix[k]);
      }
      double prev = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 400; ++i) {
        const double v = -4.0 + 8.0 * i / 400.0;
        const double w = model.peek(mem, v);
        CHECK(w >= prev - 1e-14);
        prev = w;
      }
    }
  }
}

TEST_CASE("rate independence is exact under reparameterization") {
  std::mt19937_64 rng(47);
  for (const auto& [name, model] : property_models()) {
    INFO(name);
    for (int trial = 0; trial < 50; ++trial) {
      const auto values = random_string(rng, 80);
      std::vector<double> t1(values.size());
      std::vector<double> t2(values.size());
      for (std::size_t k = 0; k < values.size(); ++k) {
        const double x = static_cast<double>(k);
        t1[k] = x;
        t2[k] = 0.03 * x + 0.001 * x * x;  // strictly increasing warp
      }
      CHECK(evaluate_path(model, t1, values) ==
            evaluate_path(model, t2, values));
    }
  }
}

TEST_CASE("hilpert defect vanishes for identical and in-band inputs") {
  auto play = HysteresisModel::play(1.0);
  std::vector<double> times(11);
  std::vector<double> zero(11, 0.0);
  std::vector<double> ramp(11);
  for (int k = 0; k <= 10; ++k) {
    times[static_cast<std::size_t>(k)] = 0.1 * k;
    ramp[static_cast<std::size_t>(k)] = 0.05 * k;  // 0 -> 0.5, inside the band
  }
  CHECK(hilpert_gap(play, times, zero, zero) == 0.0);
  CHECK(hilpert_gap(play, times, zero, ramp) == 0.0);
}

TEST_CASE("hilpert defect is non-positive for ordered play ramps") {
  auto play = HysteresisModel::play(1.0);
  const int segments = 100;
  std::vector<double> times(segments + 1);
  std::vector<double> v1(segments + 1);
  std::vector<double> v2(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    const double s = static_cast<double>(k) / segments;
    times[static_cast<std::size_t>(k)] = s;
    v1[static_cast<std::size_t>(k)] = 3.0 * s;
    v2[static_cast<std::size_t>(k)] = 2.0 * s;
  }
  CHECK(hilpert_gap(play, times, v1, v2) <= 1e-12);
}

TEST_CASE("the stop operator genuinely violates the Hilpert inequality") {
  // Stop is not of the increasing-superposition form the scalar inequality
  // requires; this pair keeps v2 - v1 > 0 throughout yet pushes the output
  // difference below zero, so the defect stays positive under refinement.
  auto stop = HysteresisModel::stop(1.0);
  const std::vector<double> times{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> v1{0.0, 5.0, 4.9, 4.9};
  const std::vector<double> v2{2.0, 5.5, 5.3, 5.2};
  CHECK(hilpert_gap(stop, times, v1, v2) > 0.05);
}

TEST_CASE("hilpert_gap rejects mismatched grids") {
  auto play = HysteresisModel::play(1.0);
  const std::vector<double> times{0.0, 1.0};
  const std::vector<double> v1{0.0, 1.0};
  const std::vector<double> v2{0.0};
  CHECK_THROWS_AS(hilpert_gap(play, times, v1, v2), std::invalid_argument);
}

TEST_CASE("derived constants of the shipped models") {
  auto play = HysteresisModel::play(0.7);
  CHECK(play.affine_bound().kappa0 == 0.7);
  CHECK(play.affine_bound().gamma0 == 1.0);
  CHECK(play.rate_bound()->gamma1 == 1.0);
  auto stop = HysteresisModel::stop(0.7);
  CHECK(stop.affine_bound().kappa0 == 0.7);
  CHECK(stop.affine_bound().gamma0 == 0.0);
  CHECK(stop.rate_bound()->gamma1 == 2.0);
  auto preisach = HysteresisModel::preisach_uniform(-1.0, 1.0, 10, 0.01);
  CHECK(preisach.relays().size() == 45);
  CHECK(preisach.affine_bound().kappa0 == doctest::Approx(0.45));
  CHECK(!preisach.rate_bound().has_value());
  auto sum = HysteresisModel::weighted_sum(
      {{0.5, HysteresisModel::play(0.5)}, {2.0, HysteresisModel::stop(0.25)}});
  CHECK(sum.affine_bound().kappa0 == doctest::Approx(0.5 * 0.5 + 2.0 * 0.25));
  CHECK(sum.affine_bound().gamma0 == doctest::Approx(0.5));
  CHECK(sum.rate_bound()->gamma1 == doctest::Approx(0.5 + 4.0));
}
