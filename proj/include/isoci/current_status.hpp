#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isoci/csv.hpp"
#include "isoci/cusum.hpp"
#include "isoci/errors.hpp"
#include "isoci/interval.hpp"
#include "isoci/step_function.hpp"

namespace isoci {

//! Current status observations: sorted inspection times with binary
//! indicators delta_i = 1{X_i <= t_i}. Tied times are rejected; callers
//! must pre-aggregate or jitter.
class CurrentStatusSample {
public:
  CurrentStatusSample(std::vector<double> times, std::vector<int> indicators)
    : times_(std::move(times)), indicators_(std::move(indicators)) {
    if (times_.size() != indicators_.size())
      throw std::invalid_argument("current status: times/indicators mismatch");
    if (times_.empty()) throw DataError("current status: empty sample");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i] > times_[i - 1]))
        throw DataError("current status: tied or unsorted inspection times at t=" +
                        fmt_double(times_[i]));
    for (int d : indicators_)
      if (d != 0 && d != 1)
        throw DataError("current status: indicator not in {0,1}");
  }

  static CurrentStatusSample from_pairs(std::vector<std::pair<double, int>> obs) {
    std::sort(obs.begin(), obs.end());
    std::vector<double> t;
    std::vector<int> d;
    t.reserve(obs.size());
    d.reserve(obs.size());
    for (const auto& p : obs) {
      t.push_back(p.first);
      d.push_back(p.second);
    }
    return CurrentStatusSample(std::move(t), std::move(d));
  }

  //! Two columns `t,delta`; header row optional; '#' comments skipped.
  static CurrentStatusSample from_csv(const std::string& path) {
    const auto rows = csv::read_rows(path);
    std::vector<std::pair<double, int>> obs;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double t;
      if (r == 0 && (!csv::parse_double(rows[r].fields.empty() ? "" : rows[r].fields[0], t)))
        continue; // header row
      t = csv::require_double(rows[r], 0, path);
      const double d = csv::require_double(rows[r], 1, path);
      if (d != 0.0 && d != 1.0)
        throw DataError(path + ":" + std::to_string(rows[r].line_number) +
                        ": delta must be 0 or 1");
      obs.emplace_back(t, static_cast<int>(d));
    }
    if (obs.empty()) throw DataError(path + ": no observations");
    return from_pairs(std::move(obs));
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<int>& indicators() const { return indicators_; }
  std::size_t n() const { return times_.size(); }

private:
  std::vector<double> times_;
  std::vector<int> indicators_;
};

namespace detail {

inline std::vector<double> cum_indicators(const CurrentStatusSample& s) {
  std::vector<double> ys(s.n() + 1, 0.0);
  for (std::size_t i = 0; i < s.n(); ++i)
    ys[i + 1] = ys[i] + s.indicators()[i];
  return ys;
}

inline std::vector<double> index_abscissae(std::size_t n) {
  std::vector<double> xs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) xs[i] = static_cast<double>(i);
  return xs;
}

// Shifted cusum ordinates: + jump at index i0 (1-based), cumulative beyond.
inline std::vector<double> shifted_ys(const std::vector<double>& base,
                                      std::size_t i0, double jump) {
  std::vector<double> ys = base;
  for (std::size_t i = i0; i < ys.size(); ++i) ys[i] += jump;
  return ys;
}

// 1-based index i0 with t_{i0} <= t0 < t_{i0+1}, clamped to [1, n-1] so a
// bracketing pair of observations always exists.
inline std::size_t curstat_i0(const CurrentStatusSample& s, double t0) {
  const auto& t = s.times();
  const auto it = std::upper_bound(t.begin(), t.end(), t0);
  std::size_t i0 = static_cast<std::size_t>(it - t.begin());
  if (i0 < 1) i0 = 1;
  if (i0 > s.n() - 1) i0 = s.n() - 1;
  return i0;
}

struct RestrictedValues {
  std::vector<double> values; // restricted MLE at the observation points
  double mu = 0.0;
  bool active = false;
  std::size_t i0 = 0; // 1-based
  bool collision = false;
};

} // namespace detail

//! Unrestricted MLE of the distribution function: left derivative of the
//! greatest convex minorant of the diagram (i, sum_{j<=i} delta_j).
inline StepFunction mle(const CurrentStatusSample& s) {
  const CusumDiagram d(detail::index_abscissae(s.n()), detail::cum_indicators(s));
  auto hull = gcm_left_slopes(d);
  return StepFunction(s.times(), std::move(hull.slopes),
                      Continuity::right_continuous, Direction::nondecreasing);
}

namespace detail {

// phi(mu) = GCM left slope at i0 of the cusum diagram with ordinate jump
// n*mu*a*(1-a) inserted at i0; continuous and increasing in mu.
inline double curstat_phi(const std::vector<double>& xs,
                          const std::vector<double>& base_ys, std::size_t n,
                          std::size_t i0, double a, double mu) {
  const double jump = static_cast<double>(n) * mu * a * (1.0 - a);
  const CusumDiagram d(xs, shifted_ys(base_ys, i0, jump));
  return gcm_left_slopes(d).slopes[i0 - 1];
}

inline void require_nondegenerate(const CurrentStatusSample& s, std::size_t i0) {
  bool one_before = false, zero_after = false;
  for (std::size_t i = 0; i < i0; ++i)
    if (s.indicators()[i] == 1) { one_before = true; break; }
  for (std::size_t i = i0; i < s.n(); ++i)
    if (s.indicators()[i] == 0) { zero_after = true; break; }
  if (!one_before || !zero_after)
    throw ConstraintInfeasibleError(
        "restricted MLE: degenerate sample around the constraint point "
        "(needs delta=1 at or before i0 and delta=0 after i0)");
}

inline double solve_mu_impl(const CurrentStatusSample& s, std::size_t i0,
                            double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("restricted MLE: a must lie in (0,1)");
  if (i0 < 1 || i0 >= s.n())
    throw std::out_of_range("restricted MLE: i0 out of range");
  require_nondegenerate(s, i0);

  const auto xs = index_abscissae(s.n());
  const auto ys = cum_indicators(s);
  const auto phi = [&](double mu) {
    return curstat_phi(xs, ys, s.n(), i0, a, mu);
  };

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
        throw NumericError("solve_mu: bracket expansion failed (mu > 0)");
    }
  } else {
    hi = 0.0;
    lo = -1.0;
    int guard = 0;
    while (phi(lo) > a) {
      hi = lo;
      lo *= 2.0;
      if (++guard > 200)
        throw NumericError("solve_mu: bracket expansion failed (mu < 0)");
    }
  }
  // Bisect well past the 1e-10 guarantee: the pinned constraint block must
  // keep the Fenchel equality within 1e-8 even after n terms accumulate.
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

inline RestrictedValues restricted_values(const CurrentStatusSample& s,
                                          double t0, double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("restricted MLE: a must lie in (0,1)");
  if (s.n() < 2)
    throw ConstraintInfeasibleError("restricted MLE: need at least two observations");
  RestrictedValues rv;
  rv.i0 = curstat_i0(s, t0);
  rv.collision = (s.times()[rv.i0 - 1] == t0);

  const auto xs = index_abscissae(s.n());
  const auto ys = cum_indicators(s);
  const CusumDiagram base(xs, ys);
  auto unrestricted = gcm_left_slopes(base);

  const double f_lo = unrestricted.slopes[rv.i0 - 1];
  const double f_hi = unrestricted.slopes[rv.i0]; // i0 <= n-1
  const bool inactive = rv.collision ? (f_lo == a) : (f_lo <= a && a <= f_hi);
  if (inactive) {
    rv.values = std::move(unrestricted.slopes);
    rv.mu = 0.0;
    rv.active = false;
    return rv;
  }

  rv.mu = solve_mu_impl(s, rv.i0, a);
  rv.active = true;
  const double jump = static_cast<double>(s.n()) * rv.mu * a * (1.0 - a);
  const CusumDiagram mod(xs, shifted_ys(ys, rv.i0, jump));
  auto hull = gcm_left_slopes(mod);
  // Pin the hull block containing i0 to exactly a (the solver stops at
  // |phi - a| <= 1e-10; the constraint value must be exact).
  for (std::size_t k = 1; k < hull.vertices.size(); ++k) {
    if (hull.vertices[k] >= rv.i0) {
      for (std::size_t i = hull.vertices[k - 1] + 1; i <= hull.vertices[k]; ++i)
        hull.slopes[i - 1] = a;
      break;
    }
  }
  rv.values = std::move(hull.slopes);
  return rv;
}

} // namespace detail

//! Lagrange multiplier mu solving the maxmin equation of the restricted
//! MLE with constraint value a attached between observations i0 and i0+1.
//! i0 is 1-based.
inline double solve_mu(const CurrentStatusSample& s, std::size_t i0, double a) {
  return detail::solve_mu_impl(s, i0, a);
}

//! Restricted MLE of the distribution function under F(t0) = a.
struct RestrictedFit {
  StepFunction fit;
  double mu = 0.0;
  double constraint_point = 0.0;
  double constraint_value = 0.0;
  bool active = false; // false when the unrestricted MLE already satisfies F(t0)=a
};

inline RestrictedFit restricted_mle(const CurrentStatusSample& s, double t0,
                                    double a) {
  auto rv = detail::restricted_values(s, t0, a);
  StepFunction fit(s.times(), rv.values, Continuity::right_continuous,
                   Direction::nondecreasing);
  // In the inactive case the value a is attached by an extra jump at t0;
  // after an active solve the constrained block already evaluates to a.
  const bool interior =
      t0 > s.times()[rv.i0 - 1] && t0 < s.times()[rv.i0];
  if (interior && fit.eval(t0) != a) fit = fit.with_knot(t0, a);
  return RestrictedFit{std::move(fit), rv.mu, t0, a, rv.active};
}

//! Log likelihood ratio statistic 2 log l_n of Theorem-style form:
//! 2 sum_i { d_i log(F/F0) + (1-d_i) log((1-F)/(1-F0)) }. Exactly 0 when
//! the constraint is inactive.
inline double log_lr(const CurrentStatusSample& s, double t0, double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("log_lr: a must lie in (0,1)");
  const auto base = gcm_left_slopes(
      CusumDiagram(detail::index_abscissae(s.n()), detail::cum_indicators(s)));
  const auto rv = detail::restricted_values(s, t0, a);
  if (!rv.active) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double f = base.slopes[i];
    const double f0 = rv.values[i];
    if (f == f0) continue;
    if (s.indicators()[i] == 1) {
      if (!(f > 0.0 && f0 > 0.0))
        throw NumericError("log_lr: zero fitted probability with delta=1");
      sum += std::log(f / f0);
    } else {
      if (!(f < 1.0 && f0 < 1.0))
        throw NumericError("log_lr: unit fitted probability with delta=0");
      sum += std::log((1.0 - f) / (1.0 - f0));
    }
  }
  double lr = 2.0 * sum;
  if (lr < 0.0) {
    if (lr < -1e-12) throw NumericError("log_lr: negative statistic");
    lr = 0.0;
  }
  return lr;
}

//! Confidence interval for F(t0) by inverting the LR test at critical
//! value q: the convex hull of { a : 2 log l_n(a) <= q }, scanned on a
//! 512-point grid over (eps, 1-eps) with eps = 1/(2n), boundaries refined
//! by bisection to 1e-4. Always contains [F(t_{i0}), F(t_{i0+1})].
inline Interval lr_ci(const CurrentStatusSample& s, double t0, double level,
                      double q) {
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("lr_ci: level must lie in (0,1)");
  if (q < 0.0) throw std::domain_error("lr_ci: negative critical value");
  const double n = static_cast<double>(s.n());
  const double eps = 1.0 / (2.0 * n);

  const auto accept = [&](double a) {
    if (!(a > 0.0 && a < 1.0)) return false;
    try {
      return log_lr(s, t0, a) <= q;
    } catch (const ConstraintInfeasibleError&) {
      return false;
    }
  };

  const auto base = mle(s);
  const std::size_t i0 = detail::curstat_i0(s, t0);
  const double br_lo = base.values()[i0 - 1];
  const double br_hi = base.values()[i0];

  constexpr int grid_size = 512;
  std::vector<double> grid(grid_size);
  for (int j = 0; j < grid_size; ++j)
    grid[j] = eps + (1.0 - 2.0 * eps) * static_cast<double>(j) /
                        static_cast<double>(grid_size - 1);
  bool any_grid = false;
  double lo = br_lo, hi = br_hi; // the bracket is accepted by construction
  for (double a : grid) {
    if (accept(a)) {
      any_grid = true;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  if (!any_grid && br_hi - br_lo == 0.0 && (br_lo <= 0.0 || br_hi >= 1.0))
    throw DataError("lr_ci: no candidate value accepted (degenerate data)");

  // nearest rejected grid neighbours, then one bisection refinement per side
  double below_reject = 0.0;
  double above_reject = 1.0;
  for (double a : grid) {
    if (a < lo) below_reject = std::max(below_reject, a);
    if (a > hi) above_reject = std::min(above_reject, a);
  }
  if (accept(lo))
    lo = detail::refine_boundary(lo, below_reject, accept, 1e-4);
  if (accept(hi))
    hi = detail::refine_boundary(hi, above_reject, accept, 1e-4);
  return Interval{lo, hi};
}

//! Fenchel optimality certificate for a (restricted) fit: inequality sums
//! over the stripped index range and the equality condition, reported as
//! the largest violation.
struct FenchelReport {
  bool pass = false;
  double max_violation = 0.0;
};

inline FenchelReport verify_fenchel(const CurrentStatusSample& s,
                                    const RestrictedFit& fit,
                                    double tol = 1e-8) {
  const std::size_t n = s.n();
  const std::size_t i0 = detail::curstat_i0(s, fit.constraint_point);
  const double a = fit.constraint_value;
  const double jump = static_cast<double>(n) * fit.mu * a * (1.0 - a);

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = fit.fit.eval(s.times()[i]);

  // strip forced 0/1 blocks; inside them delta must match the fit exactly
  std::size_t lo = 0, hi = n; // [lo, hi)
  while (lo < n && f[lo] == 0.0) {
    if (s.indicators()[lo] != 0) return FenchelReport{false, 1.0};
    ++lo;
  }
  while (hi > lo && f[hi - 1] == 1.0) {
    if (s.indicators()[hi - 1] != 1) return FenchelReport{false, 1.0};
    --hi;
  }

  double max_violation = 0.0;
  // equality: sum(delta - F) + n mu a (1-a) = 0 (stripped blocks add 0)
  double eq = jump;
  for (std::size_t i = lo; i < hi; ++i)
    eq += s.indicators()[i] - f[i];
  max_violation = std::abs(eq);

  // inequalities: suffix sums of (delta - F + jump 1{i0}) / (F (1-F)) <= 0
  double suffix = 0.0;
  for (std::size_t i = hi; i-- > lo;) {
    double term = (s.indicators()[i] - f[i]);
    if (i + 1 == i0) term += jump; // i is 0-based
    suffix += term / (f[i] * (1.0 - f[i]));
    if (suffix > max_violation) max_violation = suffix;
  }
  return FenchelReport{max_violation <= tol, max_violation};
}

} // namespace isoci
