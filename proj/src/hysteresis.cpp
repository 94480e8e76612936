#include "hyst/hysteresis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hyst {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

ScalarString::ScalarString(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) {
    throw std::invalid_argument("string must have length >= 1");
  }
  for (double x : values) require_finite(x, "string entry");
}

double ScalarString::sup_norm() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

HysteresisModel HysteresisModel::zero() {
  HysteresisModel m;
  m.kind_ = HystKind::Zero;
  return m;
}

HysteresisModel HysteresisModel::play(double radius, double initial_output) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("play radius must be strictly positive");
  }
  require_finite(initial_output, "play initial output");
  HysteresisModel m;
  m.kind_ = HystKind::Play;
  m.radius_ = radius;
  m.initial_output_ = initial_output;
  return m;
}

HysteresisModel HysteresisModel::stop(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("stop radius must be strictly positive");
  }
  HysteresisModel m;
  m.kind_ = HystKind::Stop;
  m.radius_ = radius;
  return m;
}

HysteresisModel HysteresisModel::preisach(std::vector<Relay> relays) {
  for (const Relay& r : relays) {
    require_finite(r.beta, "relay beta");
    require_finite(r.alpha, "relay alpha");
    if (!(r.beta < r.alpha)) {
      throw std::invalid_argument("relay requires beta < alpha");
    }
    if (!(r.weight >= 0.0) || !std::isfinite(r.weight)) {
      throw std::invalid_argument("relay weight must be non-negative");
    }
    if (r.initial_state != -1 && r.initial_state != 1) {
      throw std::invalid_argument("relay initial state must be -1 or +1");
    }
  }
  HysteresisModel m;
  m.kind_ = HystKind::Preisach;
  m.relays_ = std::move(relays);
  return m;
}

HysteresisModel HysteresisModel::preisach_uniform(double lo, double hi,
                                                  int levels, double weight,
                                                  int initial_state) {
  if (!(lo < hi)) throw std::invalid_argument("preisach grid requires lo < hi");
  if (levels < 2) throw std::invalid_argument("preisach grid needs >= 2 levels");
  std::vector<Relay> relays;
  relays.reserve(static_cast<std::size_t>(levels) * (levels - 1) / 2);
  const double d = (hi - lo) / (levels - 1);
  for (int a = 0; a < levels; ++a) {
    for (int b = a + 1; b < levels; ++b) {
      relays.push_back(Relay{lo + a * d, lo + b * d, weight, initial_state});
    }
  }
  return preisach(std::move(relays));
}

HysteresisModel HysteresisModel::weighted_sum(
    std::vector<std::pair<double, HysteresisModel>> terms) {
  for (const auto& [coeff, child] : terms) {
    (void)child;
    if (!(coeff >= 0.0) || !std::isfinite(coeff)) {
      throw std::invalid_argument("weighted sum coefficients must be non-negative");
    }
  }
  HysteresisModel m;
  m.kind_ = HystKind::Sum;
  m.terms_ = std::move(terms);
  return m;
}

AffineBound HysteresisModel::affine_bound() const {
  switch (kind_) {
    case HystKind::Zero:
      return {0.0, 0.0};
    case HystKind::Play:
      return {radius_, 1.0};
    case HystKind::Stop:
      return {radius_, 0.0};
    case HystKind::Preisach: {
      double total = 0.0;
      for (const Relay& r : relays_) total += r.weight;
      return {total, 0.0};
    }
    case HystKind::Sum: {
      AffineBound b;
      for (const auto& [coeff, child] : terms_) {
        AffineBound cb = child.affine_bound();
        b.kappa0 += coeff * cb.kappa0;
        b.gamma0 += coeff * cb.gamma0;
      }
      return b;
    }
  }
  return {};
}

std::optional<RateBound> HysteresisModel::rate_bound() const {
  switch (kind_) {
    case HystKind::Zero:
      return RateBound{0.0, 0.0};
    case HystKind::Play:
      return RateBound{0.0, 1.0};
    case HystKind::Stop:
      // |dw| <= |dv| holds per monotone segment; 2 is the documented bound
      // matching stop = identity - play.
      return RateBound{0.0, 2.0};
    case HystKind::Preisach:
      return std::nullopt;
    case HystKind::Sum: {
      RateBound b{0.0, 0.0};
      for (const auto& [coeff, child] : terms_) {
        auto cb = child.rate_bound();
        if (!cb) return std::nullopt;
        b.kappa1 += coeff * cb->kappa1;
        b.gamma1 += coeff * cb->gamma1;
      }
      return b;
    }
  }
  return std::nullopt;
}

MemoryState HysteresisModel::init_memory(double v0) const {
  require_finite(v0, "hysteresis input");
  MemoryState s;
  s.kind_ = kind_;
  switch (kind_) {
    case HystKind::Zero:
      break;
    case HystKind::Play:
      s.w_ = std::clamp(initial_output_, v0 - radius_, v0 + radius_);
      break;
    case HystKind::Stop:
      s.w_ = std::clamp(v0, -radius_, radius_);
      s.v_last_ = v0;
      break;
    case HystKind::Preisach:
      s.signs_.resize(relays_.size());
      for (std::size_t j = 0; j < relays_.size(); ++j) {
        const Relay& r = relays_[j];
        int sign = r.initial_state;
        if (v0 >= r.alpha) sign = 1;
        else if (v0 <= r.beta) sign = -1;
        s.signs_[j] = static_cast<std::int8_t>(sign);
      }
      break;
    case HystKind::Sum:
      s.parts_.reserve(terms_.size());
      for (const auto& [coeff, child] : terms_) {
        (void)coeff;
        s.parts_.push_back(child.init_memory(v0));
      }
      break;
  }
  return s;
}

void HysteresisModel::check_state(const MemoryState& state) const {
  if (state.kind_ != kind_) {
    throw std::invalid_argument("memory state does not match model kind");
  }
  if (kind_ == HystKind::Preisach && state.signs_.size() != relays_.size()) {
    throw std::invalid_argument("memory state relay count mismatch");
  }
  if (kind_ == HystKind::Sum && state.parts_.size() != terms_.size()) {
    throw std::invalid_argument("memory state term count mismatch");
  }
}

double HysteresisModel::output(const MemoryState& state) const {
  check_state(state);
  switch (kind_) {
    case HystKind::Zero:
      return 0.0;
    case HystKind::Play:
    case HystKind::Stop:
      return state.w_;
    case HystKind::Preisach: {
      double w = 0.0;
      for (std::size_t j = 0; j < relays_.size(); ++j) {
        w += relays_[j].weight * state.signs_[j];
      }
      return w;
    }
    case HystKind::Sum: {
      double w = 0.0;
      for (std::size_t j = 0; j < terms_.size(); ++j) {
        w += terms_[j].first * terms_[j].second.output(state.parts_[j]);
      }
      return w;
    }
  }
  return 0.0;
}

double HysteresisModel::peek(const MemoryState& state, double v_new) const {
  check_state(state);
  require_finite(v_new, "hysteresis input");
  switch (kind_) {
    case HystKind::Zero:
      return 0.0;
    case HystKind::Play:
      return std::clamp(state.w_, v_new - radius_, v_new + radius_);
    case HystKind::Stop:
      return std::clamp(state.w_ + (v_new - state.v_last_), -radius_, radius_);
    case HystKind::Preisach: {
      // State consistency makes the update direction-free: a relay at -1
      // with alpha <= v_new flips up, at +1 with beta >= v_new flips down.
      double w = 0.0;
      for (std::size_t j = 0; j < relays_.size(); ++j) {
        const Relay& r = relays_[j];
        int sign = state.signs_[j];
        if (v_new >= r.alpha) sign = 1;
        else if (v_new <= r.beta) sign = -1;
        w += r.weight * sign;
      }
      return w;
    }
    case HystKind::Sum: {
      double w = 0.0;
      for (std::size_t j = 0; j < terms_.size(); ++j) {
        w += terms_[j].first * terms_[j].second.peek(state.parts_[j], v_new);
      }
      return w;
    }
  }
  return 0.0;
}

double HysteresisModel::slope(const MemoryState& state, double v_new) const {
  check_state(state);
  switch (kind_) {
    case HystKind::Zero:
    case HystKind::Preisach:
      return 0.0;
    case HystKind::Play:
      // Sliding iff the stored output lies outside the band around v_new.
      return (state.w_ <= v_new - radius_ || state.w_ >= v_new + radius_) ? 1.0
                                                                          : 0.0;
    case HystKind::Stop: {
      const double inc = state.w_ + (v_new - state.v_last_);
      return (inc > -radius_ && inc < radius_) ? 1.0 : 0.0;
    }
    case HystKind::Sum: {
      double s = 0.0;
      for (std::size_t j = 0; j < terms_.size(); ++j) {
        s += terms_[j].first * terms_[j].second.slope(state.parts_[j], v_new);
      }
      return s;
    }
  }
  return 0.0;
}

double HysteresisModel::advance(MemoryState& state, double v_new) const {
  check_state(state);
  require_finite(v_new, "hysteresis input");
  switch (kind_) {
    case HystKind::Zero:
      return 0.0;
    case HystKind::Play:
      state.w_ = std::clamp(state.w_, v_new - radius_, v_new + radius_);
      return state.w_;
    case HystKind::Stop:
      state.w_ =
          std::clamp(state.w_ + (v_new - state.v_last_), -radius_, radius_);
      state.v_last_ = v_new;
      return state.w_;
    case HystKind::Preisach: {
      double w = 0.0;
      for (std::size_t j = 0; j < relays_.size(); ++j) {
        const Relay& r = relays_[j];
        int sign = state.signs_[j];
        if (v_new >= r.alpha) sign = 1;
        else if (v_new <= r.beta) sign = -1;
        state.signs_[j] = static_cast<std::int8_t>(sign);
        w += r.weight * sign;
      }
      return w;
    }
    case HystKind::Sum: {
      double w = 0.0;
      for (std::size_t j = 0; j < terms_.size(); ++j) {
        w += terms_[j].first * terms_[j].second.advance(state.parts_[j], v_new);
      }
      return w;
    }
  }
  return 0.0;
}

std::pair<MemoryState, double> update(const HysteresisModel& model,
                                      const MemoryState& state, double v_new) {
  MemoryState next = state;
  double w = model.advance(next, v_new);
  return {std::move(next), w};
}

double evaluate_string(const HysteresisModel& model, const ScalarString& s) {
  MemoryState mem = model.init_memory(s.values[0]);
  double w = model.output(mem);
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    w = model.advance(mem, s.values[k]);
  }
  return w;
}

std::vector<double> evaluate_path(const HysteresisModel& model,
                                  std::span<const double> times,
                                  std::span<const double> values) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("times and values must have equal length");
  }
  if (times.empty()) throw std::invalid_argument("path must be non-empty");
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k] < times[k + 1])) {
      throw std::invalid_argument("times must be strictly increasing");
    }
  }
  std::vector<double> out(values.size());
  MemoryState mem = model.init_memory(values[0]);
  out[0] = model.output(mem);
  for (std::size_t k = 1; k < values.size(); ++k) {
    out[k] = model.advance(mem, values[k]);
  }
  return out;
}

double dissipation_gap(const HysteresisModel& model, const ScalarString& s) {
  MemoryState mem = model.init_memory(s.values[0]);
  double w_prev = model.output(mem);
  double gap = 0.0;
  bool first = true;
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    const double w = model.advance(mem, s.values[k]);
    const double prod = (s.values[k] - s.values[k - 1]) * (w - w_prev);
    gap = first ? prod : std::min(gap, prod);
    first = false;
    w_prev = w;
  }
  return gap;
}

double hilpert_gap(const HysteresisModel& model, std::span<const double> times,
                   std::span<const double> v1, std::span<const double> v2) {
  if (times.size() != v1.size() || times.size() != v2.size()) {
    throw std::invalid_argument("hilpert_gap requires paths on a shared grid");
  }
  if (times.empty()) throw std::invalid_argument("path must be non-empty");
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k] < times[k + 1])) {
      throw std::invalid_argument("times must be strictly increasing");
    }
  }
  MemoryState m1 = model.init_memory(v1[0]);
  MemoryState m2 = model.init_memory(v2[0]);
  double w = model.output(m2) - model.output(m1);
  double defect = 0.0;
  bool first = true;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double v_start = v2[k - 1] - v1[k - 1];
    const double heaviside = v_start > 0.0 ? 1.0 : 0.0;
    const double w_next = model.advance(m2, v2[k]) - model.advance(m1, v1[k]);
    const double d = std::max(w_next, 0.0) - std::max(w, 0.0) -
                     (w_next - w) * heaviside;
    defect = first ? d : std::max(defect, d);
    first = false;
    w = w_next;
  }
  return defect;
}

}  // namespace hyst
