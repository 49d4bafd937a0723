#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "isoci/errors.hpp"

namespace isoci {

enum class Continuity { right_continuous, left_continuous };
enum class Direction { nondecreasing, nonincreasing };

//! Piecewise-constant monotone function.
//!
//! Right-continuous (distribution functions): value at knot k_i holds on
//! [k_i, k_{i+1}); 0 before the first knot, last value after the last.
//! Left-continuous (densities): value at knot k_i holds on (k_{i-1}, k_i]
//! with k_{-1} = origin (default 0); 0 outside (origin, k_last].
class StepFunction {
public:
  StepFunction(std::vector<double> knots, std::vector<double> values,
               Continuity continuity, Direction direction,
               double domain_lo = -std::numeric_limits<double>::infinity(),
               double domain_hi = std::numeric_limits<double>::infinity(),
               double origin = 0.0)
    : knots_(std::move(knots)), values_(std::move(values)),
      continuity_(continuity), direction_(direction), domain_lo_(domain_lo),
      domain_hi_(domain_hi), origin_(origin) {
    validate();
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  Continuity continuity() const { return continuity_; }
  Direction direction() const { return direction_; }
  std::size_t size() const { return knots_.size(); }
  double domain_lo() const { return domain_lo_; }
  double domain_hi() const { return domain_hi_; }
  double origin() const { return origin_; }

  double eval(double t) const {
    if (t < domain_lo_ || t > domain_hi_)
      throw std::domain_error("step function evaluated outside its domain");
    if (continuity_ == Continuity::right_continuous) {
      // index of last knot <= t
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      if (it == knots_.begin()) return 0.0;
      return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
    }
    if (t <= origin_ || t > knots_.back()) return 0.0;
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
    return values_[static_cast<std::size_t>(it - knots_.begin())];
  }

  double operator()(double t) const { return eval(t); }

  //! Exact integral over [a, b] as a finite sum of value * overlap length.
  double integral(double a, double b) const {
    if (a > b) throw std::domain_error("step integral: a > b");
    if (a < domain_lo_ || b > domain_hi_)
      throw std::domain_error("step integral: range outside domain");
    double total = 0.0;
    const std::size_t k = knots_.size();
    if (continuity_ == Continuity::right_continuous) {
      // pieces: [knots_[i], knots_[i+1]) with values_[i]; [knots_.back(), inf)
      for (std::size_t i = 0; i < k; ++i) {
        const double lo = knots_[i];
        const double hi = (i + 1 < k) ? knots_[i + 1]
                                      : std::numeric_limits<double>::infinity();
        const double cl = std::max(a, lo);
        const double ch = std::min(b, hi);
        if (ch > cl) total += values_[i] * (ch - cl);
      }
    } else {
      // pieces: (prev, knots_[i]] with values_[i], prev_0 = origin
      for (std::size_t i = 0; i < k; ++i) {
        const double lo = (i == 0) ? origin_ : knots_[i - 1];
        const double hi = knots_[i];
        const double cl = std::max(a, lo);
        const double ch = std::min(b, hi);
        if (ch > cl) total += values_[i] * (ch - cl);
      }
    }
    return total;
  }

  //! Copy with an extra knot (t, v); t must not collide with an existing knot.
  StepFunction with_knot(double t, double v) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
    if (it != knots_.end() && *it == t)
      throw std::invalid_argument("with_knot: knot already present");
    const std::size_t pos = static_cast<std::size_t>(it - knots_.begin());
    std::vector<double> ks = knots_;
    std::vector<double> vs = values_;
    ks.insert(ks.begin() + static_cast<std::ptrdiff_t>(pos), t);
    vs.insert(vs.begin() + static_cast<std::ptrdiff_t>(pos), v);
    return StepFunction(std::move(ks), std::move(vs), continuity_, direction_,
                        domain_lo_, domain_hi_, origin_);
  }

private:
  void validate() const {
    if (knots_.empty()) throw std::invalid_argument("step function: no knots");
    if (knots_.size() != values_.size())
      throw std::invalid_argument("step function: knots/values size mismatch");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (!(knots_[i] > knots_[i - 1]))
        throw std::invalid_argument(
            "step function: knots must be strictly increasing");
    constexpr double tol = 1e-10;
    for (std::size_t i = 1; i < values_.size(); ++i) {
      const double d = values_[i] - values_[i - 1];
      const bool bad = direction_ == Direction::nondecreasing ? (d < -tol)
                                                              : (d > tol);
      if (bad)
        throw std::invalid_argument(
            "step function: values violate declared monotone direction");
    }
  }

  std::vector<double> knots_;
  std::vector<double> values_;
  Continuity continuity_;
  Direction direction_;
  double domain_lo_;
  double domain_hi_;
  double origin_;
};

inline double step_eval(const StepFunction& f, double t) { return f.eval(t); }

inline double step_integral(const StepFunction& f, double a, double b) {
  return f.integral(a, b);
}

} // namespace isoci
