// Scalar rate-independent hysteresis operators with explicit memory:
// play, stop, finite Preisach relay families, non-negative weighted sums,
// and the degenerate zero operator.  Evaluation is by string extension:
// the memory state plus one new input value determines the new output.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hyst {

enum class HystKind { Zero, Play, Stop, Preisach, Sum };

// Bistable relay: flips up when the input reaches alpha, down when it
// reaches beta (closed thresholds).  beta < alpha.
struct Relay {
  double beta = -1.0;
  double alpha = 1.0;
  double weight = 1.0;
  int initial_state = -1;  // -1 or +1
};

// |w| <= kappa0 + gamma0 * sup|input values|
struct AffineBound {
  double kappa0 = 0.0;
  double gamma0 = 0.0;
};

// |dw| <= kappa1 * dt + gamma1 * |dv| on monotone input segments.
// Finite relay families admit no such constants (the output jumps), so
// Preisach-containing models report none.
struct RateBound {
  double kappa1 = 0.0;
  double gamma1 = 0.0;
};

// A finite input string (v_0, ..., v_l), length >= 1, all entries finite.
struct ScalarString {
  std::vector<double> values;

  explicit ScalarString(std::vector<double> v);
  double sup_norm() const;
};

class HysteresisModel;

// Kind-matched mutable memory.  Play/Stop track the current output (Stop
// additionally the last input), Preisach the per-relay signs, Sum the
// child states.  Confined to one simulation worker at a time.
class MemoryState {
 public:
  HystKind kind() const { return kind_; }

 private:
  friend class HysteresisModel;
  HystKind kind_ = HystKind::Zero;
  double w_ = 0.0;       // play/stop output
  double v_last_ = 0.0;  // stop only
  std::vector<std::int8_t> signs_;   // preisach
  std::vector<MemoryState> parts_;   // sum
};

class HysteresisModel {
 public:
  static HysteresisModel zero();
  // initial_output is the internal output before the first input value is
  // consumed (w_{-1}); the default 0 matches init via clamp(0, [v0-r, v0+r]).
  static HysteresisModel play(double radius, double initial_output = 0.0);
  static HysteresisModel stop(double radius);
  static HysteresisModel preisach(std::vector<Relay> relays);
  // Triangular relay family on `levels` uniform thresholds in [lo, hi]:
  // one relay per pair beta = l_a < l_b = alpha, each with the given weight.
  static HysteresisModel preisach_uniform(double lo, double hi, int levels,
                                          double weight, int initial_state = -1);
  static HysteresisModel weighted_sum(
      std::vector<std::pair<double, HysteresisModel>> terms);

  HystKind kind() const { return kind_; }
  double radius() const { return radius_; }
  const std::vector<Relay>& relays() const { return relays_; }
  const std::vector<std::pair<double, HysteresisModel>>& terms() const {
    return terms_;
  }

  AffineBound affine_bound() const;
  std::optional<RateBound> rate_bound() const;

  // Memory after consuming the one-element string (v0).
  MemoryState init_memory(double v0) const;
  // Current output of a memory state.
  double output(const MemoryState& state) const;
  // Output after hypothetically extending the string by v_new; no mutation.
  double peek(const MemoryState& state, double v_new) const;
  // One-sided generalized derivative of peek in v_new (semismooth Newton).
  double slope(const MemoryState& state, double v_new) const;
  // Commit the extension; returns the new output.
  double advance(MemoryState& state, double v_new) const;

 private:
  HysteresisModel() = default;
  void check_state(const MemoryState& state) const;

  HystKind kind_ = HystKind::Zero;
  double radius_ = 0.0;
  double initial_output_ = 0.0;
  std::vector<Relay> relays_;
  std::vector<std::pair<double, HysteresisModel>> terms_;
};

// One string extension of the final-value functional; returns the updated
// memory and the new output.
std::pair<MemoryState, double> update(const HysteresisModel& model,
                                      const MemoryState& state, double v_new);

// Final value W_f(s) of the string.
double evaluate_string(const HysteresisModel& model, const ScalarString& s);

// Output samples for the piecewise-linear input through (times, values).
// Rate independence: the result depends on the values alone.
std::vector<double> evaluate_path(const HysteresisModel& model,
                                  std::span<const double> times,
                                  std::span<const double> values);

// min over consecutive string entries of (dv)(dw); >= 0 up to rounding for
// every model built through the public constructors.
double dissipation_gap(const HysteresisModel& model, const ScalarString& s);

// Discrete Hilpert defect for two inputs on a shared time grid: with
// w = w2 - w1 and v = v2 - v1, the max over segments of
//   (w_{k+1})_+ - (w_k)_+ - (w_{k+1} - w_k) * H(v_k),
// H the sharp Heaviside function (H(x) = 1 for x > 0, else 0).  Each
// segment of each input must be monotone (caller's duty: sample finely).
double hilpert_gap(const HysteresisModel& model, std::span<const double> times,
                   std::span<const double> v1, std::span<const double> v2);

}  // namespace hyst
