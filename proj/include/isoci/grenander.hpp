#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "isoci/csv.hpp"
#include "isoci/cusum.hpp"
#include "isoci/errors.hpp"
#include "isoci/interval.hpp"
#include "isoci/step_function.hpp"

namespace isoci {

//! Distinct sorted positive observation times with integer multiplicities.
class WeightedSample {
public:
  WeightedSample(std::vector<double> times, std::vector<long long> weights)
    : times_(std::move(times)), weights_(std::move(weights)) {
    if (times_.size() != weights_.size())
      throw std::invalid_argument("weighted sample: times/weights mismatch");
    if (times_.empty()) throw DataError("weighted sample: empty sample");
    n_ = 0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (i > 0 && !(times_[i] > times_[i - 1]))
        throw DataError("weighted sample: times must be strictly increasing");
      if (!(times_[i] > 0.0))
        throw DataError("weighted sample: times must be positive");
      if (weights_[i] < 1)
        throw DataError("weighted sample: weights must be >= 1");
      n_ += weights_[i];
    }
  }

  //! Sorts raw observations and aggregates exact ties into weights.
  static WeightedSample from_raw(std::vector<double> raw) {
    if (raw.empty()) throw DataError("weighted sample: empty sample");
    std::sort(raw.begin(), raw.end());
    std::vector<double> t;
    std::vector<long long> w;
    for (double x : raw) {
      if (!t.empty() && x == t.back())
        ++w.back();
      else {
        t.push_back(x);
        w.push_back(1);
      }
    }
    return WeightedSample(std::move(t), std::move(w));
  }

  //! One column `t` of raw observation times; ties aggregated.
  static WeightedSample from_csv(const std::string& path) {
    const auto rows = csv::read_rows(path);
    std::vector<double> raw;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double t;
      if (r == 0 && !csv::parse_double(rows[r].fields.empty() ? "" : rows[r].fields[0], t))
        continue; // header row
      raw.push_back(csv::require_double(rows[r], 0, path));
    }
    if (raw.empty()) throw DataError(path + ": no observations");
    return from_raw(std::move(raw));
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<long long>& weights() const { return weights_; }
  std::size_t m() const { return times_.size(); }
  long long n() const { return n_; }

private:
  std::vector<double> times_;
  std::vector<long long> weights_;
  long long n_ = 0;
};

namespace detail {

inline std::vector<double> cum_weight_fractions(const WeightedSample& ws) {
  std::vector<double> ys(ws.m() + 1, 0.0);
  const double n = static_cast<double>(ws.n());
  double cum = 0.0;
  for (std::size_t i = 0; i < ws.m(); ++i) {
    cum += static_cast<double>(ws.weights()[i]);
    ys[i + 1] = cum / n;
  }
  return ys;
}

inline std::vector<double> time_abscissae(const WeightedSample& ws,
                                          double scale = 1.0,
                                          double offset = 0.0) {
  std::vector<double> xs(ws.m() + 1);
  xs[0] = 0.0;
  for (std::size_t i = 0; i < ws.m(); ++i)
    xs[i + 1] = offset + scale * ws.times()[i];
  return xs;
}

// 1-based index with t0 in (t_{i0-1}, t_{i0}], clamped to [1, m].
inline std::size_t density_i0(const WeightedSample& ws, double t0) {
  const auto& t = ws.times();
  const auto it = std::lower_bound(t.begin(), t.end(), t0);
  std::size_t i0 = static_cast<std::size_t>(it - t.begin()) + 1;
  if (i0 > ws.m()) i0 = ws.m();
  return i0;
}

inline double interval_length(const WeightedSample& ws, std::size_t i) {
  // length of (t_{i-1}, t_i], 1-based, t_0 = 0
  return ws.times()[i - 1] - (i >= 2 ? ws.times()[i - 2] : 0.0);
}

} // namespace detail

//! Grenander MLE of a decreasing density: left-continuous slopes of the
//! least concave majorant of the cusum diagram (t_j, sum_{i<=j} w_i / n).
//! Integrates to 1 exactly.
inline StepFunction grenander_mle(const WeightedSample& ws) {
  const CusumDiagram d(detail::time_abscissae(ws),
                       detail::cum_weight_fractions(ws));
  auto hull = lcm_left_slopes(d);
  return StepFunction(ws.times(), std::move(hull.slopes),
                      Continuity::left_continuous, Direction::nonincreasing);
}

//! Restricted MLE of a decreasing density with the side conditions
//! integral = 1 and f(t_{i0}) = a.
struct DensityRestrictedFit {
  StepFunction fit;
  double mu = 0.0;
  double lambda = 1.0;
  double alpha = 0.0;
  double constraint_point = 0.0;
  double constraint_value = 0.0;
  double zero_value = 0.0;
  bool zero_constrained = false;
  bool active = false;
};

namespace detail {

// LCM left slope at i0 of the diagram with ordinate lift added at i0
// (cumulative beyond) and abscissae offset + scale * t_j.
inline double density_lifted_slope(const WeightedSample& ws, std::size_t i0,
                                   double lift, double scale, double offset) {
  auto ys = cum_weight_fractions(ws);
  for (std::size_t i = i0; i < ys.size(); ++i) ys[i] += lift;
  const CusumDiagram d(time_abscissae(ws, scale, offset), std::move(ys));
  return lcm_left_slopes(d).slopes[i0 - 1];
}

// phi(mu) = slope of the unscaled lifted diagram at i0 divided by (1+mu*a);
// increasing from -inf (mu -> -1/a) to 1/t_{i0} (mu -> inf).
inline double density_phi(const WeightedSample& ws, std::size_t i0, double a,
                          double mu) {
  return density_lifted_slope(ws, i0, mu * a, 1.0, 0.0) / (1.0 + mu * a);
}

inline double solve_mu_density_impl(const WeightedSample& ws, std::size_t i0,
                                    double a) {
  if (!(a > 0.0))
    throw std::domain_error("restricted density MLE: a must be positive");
  if (i0 < 1 || i0 > ws.m())
    throw std::out_of_range("restricted density MLE: i0 out of range");
  const double t_i0 = ws.times()[i0 - 1];
  if (!(a * t_i0 < 1.0 - 1e-9))
    throw ConstraintInfeasibleError(
        "restricted density MLE: a * t_{i0} >= 1, no density with unit mass "
        "can satisfy the constraint");

  const auto phi = [&](double mu) { return density_phi(ws, i0, a, mu); };
  const double phi0 = phi(0.0);
  double lo, hi;
  if (a > phi0) {
    lo = 0.0;
    hi = 1.0;
    int guard = 0;
    while (phi(hi) < a) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 200)
        throw NumericError("solve_mu_density: bracket expansion failed (mu > 0)");
    }
  } else {
    hi = 0.0;
    int guard = 1;
    // expand toward the pole at -1/a
    lo = -(1.0 - 0.5) / a;
    while (phi(lo) > a) {
      hi = lo;
      ++guard;
      if (guard > 60)
        throw NumericError("solve_mu_density: bracket expansion failed (mu < 0)");
      lo = -(1.0 - std::pow(0.5, guard)) / a;
    }
  }
  // Run well past the 1e-10 guarantee so the pinned block leaves the unit
  // integral intact at 1e-10 even for long constancy intervals.
  double best = 0.5 * (lo + hi);
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double v = phi(mid);
    const double err = std::abs(v - a);
    if (err < best_err) {
      best_err = err;
      best = mid;
    }
    if (err <= 1e-14) break;
    if (v < a)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

// Pin the hull block containing `index` (1-based) to the exact value v.
inline void snap_block(HullSlopes& hull, std::size_t index, double v) {
  for (std::size_t k = 1; k < hull.vertices.size(); ++k) {
    if (hull.vertices[k] >= index) {
      for (std::size_t i = hull.vertices[k - 1] + 1; i <= hull.vertices[k]; ++i)
        hull.slopes[i - 1] = v;
      return;
    }
  }
}

inline double step_total_integral(const WeightedSample& ws,
                                  const std::vector<double>& slopes) {
  double total = 0.0;
  for (std::size_t i = 1; i <= ws.m(); ++i)
    total += slopes[i - 1] * interval_length(ws, i);
  return total;
}

} // namespace detail

//! Lagrange multiplier mu of the single-restriction problem (1-based i0).
inline double solve_mu_density(const WeightedSample& ws, std::size_t i0,
                               double a) {
  return detail::solve_mu_density_impl(ws, i0, a);
}

inline DensityRestrictedFit restricted_mle_density(const WeightedSample& ws,
                                                   double t0, double a) {
  if (!(a > 0.0))
    throw std::domain_error("restricted density MLE: a must be positive");
  const std::size_t i0 = detail::density_i0(ws, t0);
  const StepFunction unrestricted = grenander_mle(ws);
  if (unrestricted.values()[i0 - 1] == a) {
    return DensityRestrictedFit{unrestricted, 0.0, 1.0, 0.0, t0, a,
                                0.0,          false, false};
  }
  const double mu = detail::solve_mu_density_impl(ws, i0, a);
  const double lambda = 1.0 + mu * a;
  auto ys = detail::cum_weight_fractions(ws);
  for (std::size_t i = i0; i < ys.size(); ++i) ys[i] += mu * a;
  const CusumDiagram d(detail::time_abscissae(ws, lambda), std::move(ys));
  auto hull = lcm_left_slopes(d);
  detail::snap_block(hull, i0, a);
  const double total = detail::step_total_integral(ws, hull.slopes);
  if (std::abs(total - 1.0) > 1e-9)
    throw NumericError("restricted density MLE: integral drifted to " +
                       fmt_double(total));
  StepFunction fit(ws.times(), std::move(hull.slopes),
                   Continuity::left_continuous, Direction::nonincreasing);
  return DensityRestrictedFit{std::move(fit), mu,  lambda, 0.0, t0, a,
                              0.0,            false, true};
}

//! Doubly restricted MLE: integral = 1, f(t_{i0}) = a and f(t_1) = b
//! (the value at zero pinned to a consistent estimate b). Solved by
//! alternating scalar updates of (alpha, lambda).
inline DensityRestrictedFit double_restricted_mle(const WeightedSample& ws,
                                                  double t0, double a,
                                                  double b) {
  if (!(a > 0.0))
    throw std::domain_error("double restricted MLE: a must be positive");
  if (!(b >= a))
    throw ConstraintInfeasibleError(
        "double restricted MLE: need b >= a for a nonincreasing density");
  const std::size_t i0 = detail::density_i0(ws, t0);
  const double t1 = ws.times()[0];
  const double t_i0 = ws.times()[i0 - 1];
  if (!(b * t1 + a * (t_i0 - t1) < 1.0 - 1e-9))
    throw ConstraintInfeasibleError(
        "double restricted MLE: constraints demand more than unit mass");
  if (i0 == 1 && a != b)
    throw ConstraintInfeasibleError(
        "double restricted MLE: t0 falls in the first block but a != b");

  const auto cum = detail::cum_weight_fractions(ws); // cum[j], j = 0..m

  // second equation, solved for alpha in closed form:
  // max_i C_i / (alpha + lambda t_i) = b  <=>  alpha = max_i (C_i/b - lambda t_i)
  const auto alpha_update = [&](double lambda) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= ws.m(); ++i)
      best = std::max(best, cum[i] / b - lambda * ws.times()[i - 1]);
    return best;
  };
  const auto first_slope = [&](double alpha, double lambda) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= ws.m(); ++i)
      best = std::max(best, cum[i] / (alpha + lambda * ws.times()[i - 1]));
    return best;
  };
  const auto slope_i0 = [&](double alpha, double lambda) {
    return detail::density_lifted_slope(ws, i0, lambda - 1.0 + alpha * b,
                                        lambda, alpha);
  };

  // solve slope_i0(alpha, .) = a in lambda near the current iterate
  const auto solve_lambda = [&](double alpha, double lambda_guess) {
    const double lambda_min =
        std::max(1e-12, alpha < 0.0 ? -alpha / t1 * (1.0 + 1e-12) : 1e-12);
    const auto g = [&](double l) { return slope_i0(alpha, l) - a; };
    double x = std::max(lambda_guess, lambda_min * 2.0);
    double gx = g(x);
    if (gx == 0.0) return x;
    // scan geometrically outward for a sign change, nearest bracket first
    double lo = x, hi = x, glo = gx, ghi = gx;
    for (int k = 1; k <= 80; ++k) {
      const double up = x * std::pow(1.5, k);
      const double gup = g(up);
      if (gup == 0.0) return up;
      if ((gup < 0.0) != (gx < 0.0)) {
        lo = x * std::pow(1.5, k - 1);
        hi = up;
        glo = g(lo);
        ghi = gup;
        break;
      }
      double down = x * std::pow(1.5, -k);
      if (down < lambda_min) down = lambda_min * (1.0 + 1e-9);
      const double gdown = g(down);
      if (gdown == 0.0) return down;
      if ((gdown < 0.0) != (gx < 0.0)) {
        lo = down;
        hi = x * std::pow(1.5, -(k - 1));
        glo = gdown;
        ghi = g(hi);
        break;
      }
      if (k == 80)
        throw NumericError("double restricted MLE: no bracket for lambda");
    }
    if ((glo < 0.0) == (ghi < 0.0))
      throw NumericError("double restricted MLE: lost the lambda bracket");
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (std::abs(gm) <= 1e-13) return mid;
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  double lambda = 1.0, alpha = 0.0;
  double r1 = 0.0, r2 = 0.0;
  bool converged = false;
  for (int outer = 0; outer < 500; ++outer) {
    alpha = alpha_update(lambda);
    lambda = solve_lambda(alpha, lambda);
    r1 = std::abs(slope_i0(alpha, lambda) - a);
    r2 = std::abs(first_slope(alpha, lambda) - b);
    if (r1 + r2 <= 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericError("double restricted MLE: no convergence, residuals " +
                       fmt_double(r1) + " / " + fmt_double(r2));

  auto ys = detail::cum_weight_fractions(ws);
  const double lift = lambda - 1.0 + alpha * b;
  for (std::size_t i = i0; i < ys.size(); ++i) ys[i] += lift;
  const CusumDiagram d(detail::time_abscissae(ws, lambda, alpha),
                       std::move(ys));
  auto hull = lcm_left_slopes(d);
  detail::snap_block(hull, 1, b);
  detail::snap_block(hull, i0, a);
  const double total = detail::step_total_integral(ws, hull.slopes);
  if (std::abs(total - 1.0) > 1e-9)
    throw NumericError("double restricted MLE: integral drifted to " +
                       fmt_double(total));
  StepFunction fit(ws.times(), std::move(hull.slopes),
                   Continuity::left_continuous, Direction::nonincreasing);
  const double mu = (lambda - 1.0 + alpha * b) / a;
  return DensityRestrictedFit{std::move(fit), mu, lambda, alpha, t0, a,
                              b,              true, true};
}

//! 2 sum_i w_i log(f(t_i) / f0(t_i)); exactly 0 when the constraint is
//! inactive.
inline double log_lr_density(const WeightedSample& ws, double t0, double a) {
  if (!(a > 0.0)) throw std::domain_error("log_lr_density: a must be positive");
  const StepFunction f = grenander_mle(ws);
  const DensityRestrictedFit rf = restricted_mle_density(ws, t0, a);
  if (!rf.active) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ws.m(); ++i) {
    const double v = f.values()[i];
    const double v0 = rf.fit.values()[i];
    if (v == v0) continue;
    if (!(v > 0.0 && v0 > 0.0))
      throw NumericError("log_lr_density: nonpositive fitted density");
    sum += static_cast<double>(ws.weights()[i]) * std::log(v / v0);
  }
  double lr = 2.0 * sum;
  if (lr < 0.0) {
    if (lr < -1e-12) throw NumericError("log_lr_density: negative statistic");
    lr = 0.0;
  }
  return lr;
}

//! LR-inversion confidence interval for f(t0); candidate grid over
//! (0, feasible upper bound], boundaries refined by bisection.
inline Interval lr_ci_density(const WeightedSample& ws, double t0, double level,
                              double q) {
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("lr_ci_density: level must lie in (0,1)");
  if (q < 0.0) throw std::domain_error("lr_ci_density: negative critical value");
  const std::size_t i0 = detail::density_i0(ws, t0);
  const double n = static_cast<double>(ws.n());
  const double ub = (1.0 - 1.0 / (2.0 * n)) / ws.times()[i0 - 1];

  const auto accept = [&](double a) {
    if (!(a > 0.0) || !(a <= ub)) return false;
    try {
      return log_lr_density(ws, t0, a) <= q;
    } catch (const ConstraintInfeasibleError&) {
      return false;
    }
  };

  const double point = grenander_mle(ws).values()[i0 - 1]; // always accepted
  double lo = point, hi = point;
  constexpr int grid_size = 512;
  for (int j = 1; j <= grid_size; ++j) {
    const double a = ub * static_cast<double>(j) / grid_size;
    if (accept(a)) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  double below_reject = 0.0, above_reject = ub;
  for (int j = 1; j <= grid_size; ++j) {
    const double a = ub * static_cast<double>(j) / grid_size;
    if (a < lo) below_reject = std::max(below_reject, a);
    if (a > hi) above_reject = std::min(above_reject, a);
  }
  lo = detail::refine_boundary(lo, below_reject, accept, 1e-4);
  hi = detail::refine_boundary(hi, above_reject, accept, 1e-4);
  return Interval{lo, hi};
}

//! Survival ratio fit(t)/fit(0+) of the current-duration model, clamped
//! to [0,1]. Requires a fit with a strictly positive value at zero.
inline double survival_ratio(const StepFunction& fit, double t) {
  if (fit.continuity() != Continuity::left_continuous)
    throw std::invalid_argument("survival_ratio: needs a left-continuous density fit");
  const double at_zero = fit.values().front();
  if (!(at_zero > 0.0))
    throw std::domain_error("survival_ratio: fit(0+) must be positive");
  if (t < 0.0) throw std::domain_error("survival_ratio: t must be >= 0");
  if (t == 0.0) return 1.0;
  const double r = fit.eval(t) / at_zero;
  return std::min(1.0, std::max(0.0, r));
}

} // namespace isoci
