#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "isoci/current_status.hpp"
#include "isoci/errors.hpp"
#include "isoci/grenander.hpp"
#include "isoci/kernel.hpp"
#include "isoci/rng.hpp"
#include "isoci/smle.hpp"
#include "isoci/step_function.hpp"

namespace isoci {

enum class BandwidthRule {
  estimate_n15,    // (domain length) * n^{-1/5}
  undersmooth_n14, // (domain length) * n^{-1/4}
  fixed
};

struct BootstrapConfig {
  int replications = 1000;
  double level = 0.95;
  std::optional<double> tightened_alpha; // e.g. 0.04 for the 20th/980th percentiles
  BandwidthRule bandwidth_rule = BandwidthRule::undersmooth_n14;
  double fixed_bandwidth = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (replications < 1)
      throw std::invalid_argument("bootstrap: replications must be >= 1");
    if (!(level > 0.0 && level < 1.0))
      throw std::invalid_argument("bootstrap: level must lie in (0,1)");
    if (tightened_alpha) {
      const double alpha = 1.0 - level;
      if (!(*tightened_alpha > 0.0 && *tightened_alpha <= alpha))
        throw std::invalid_argument(
            "bootstrap: tightened alpha must lie in (0, 1-level]");
    }
    if (bandwidth_rule == BandwidthRule::fixed && !(fixed_bandwidth > 0.0))
      throw std::invalid_argument("bootstrap: fixed bandwidth must be positive");
  }

  double bandwidth(double domain_length, std::size_t n) const {
    switch (bandwidth_rule) {
      case BandwidthRule::estimate_n15: return bandwidth_estimate(domain_length, n);
      case BandwidthRule::undersmooth_n14: return bandwidth_ci(domain_length, n);
      default: return fixed_bandwidth;
    }
  }
};

struct ConfidenceBand {
  std::vector<double> ts;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> estimate;
  std::string method;
};

//! A bootstrap resample of (T, Delta) pairs: sorted, ties allowed.
struct PairSample {
  std::vector<double> times;
  std::vector<int> indicators;
  std::size_t n() const { return times.size(); }
};

//! n draws with replacement, re-sorted by time.
inline PairSample resample(const CurrentStatusSample& s, Rng& rng) {
  const std::size_t n = s.n();
  std::vector<std::pair<double, int>> obs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(n));
    obs[i] = {s.times()[j], s.indicators()[j]};
  }
  std::sort(obs.begin(), obs.end());
  PairSample out;
  out.times.resize(n);
  out.indicators.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.times[i] = obs[i].first;
    out.indicators[i] = obs[i].second;
  }
  return out;
}

//! MLE of a resample: tied times are aggregated into a weighted binomial
//! isotonic fit on the distinct times.
inline StepFunction mle_of_resample(const PairSample& s) {
  std::vector<double> xs{0.0}, ys{0.0}, knots;
  double cum_count = 0.0, cum_ones = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    cum_count += 1.0;
    cum_ones += s.indicators[i];
    if (i + 1 == s.n() || s.times[i + 1] != s.times[i]) {
      xs.push_back(cum_count);
      ys.push_back(cum_ones);
      knots.push_back(s.times[i]);
    }
  }
  auto hull = gcm_left_slopes(CusumDiagram(std::move(xs), std::move(ys)));
  return StepFunction(std::move(knots), std::move(hull.slopes),
                      Continuity::right_continuous, Direction::nondecreasing);
}

//! Order-statistic percentile: k-th smallest with k = round(count * p).
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: no values");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("percentile: p must lie in (0,1)");
  long long k = std::llround(static_cast<double>(values.size()) * p);
  if (k < 1) throw std::invalid_argument("percentile: too few values for p");
  if (k > static_cast<long long>(values.size()))
    k = static_cast<long long>(values.size());
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
  return values[static_cast<std::size_t>(k - 1)];
}

//! Studentized bootstrap statistic
//! Z*(t) = (F~*(t) - F~(t)) / S*(t), with S* built from the ordinary MLE
//! of the bootstrap sample. Returns NaN when the denominator vanishes.
template <class Kernel = TriweightKernel>
double z_star(double t, const PairSample& boot, double orig_smle_value,
              double h, double b) {
  const StepFunction boot_mle = mle_of_resample(boot);
  const SmoothCdf<Kernel> boot_smle(boot_mle, h, b);
  const double n = static_cast<double>(boot.n());
  double acc = 0.0;
  for (std::size_t i = 0; i < boot.n(); ++i) {
    const double ti = boot.times[i];
    const double w = (Kernel::density((t - ti) / h) -
                      Kernel::density((t + ti) / h) -
                      Kernel::density((2.0 * b - t - ti) / h)) /
                     h;
    const double resid = boot.indicators[i] - boot_mle.eval(ti);
    acc += w * w * resid * resid;
  }
  const double denom = std::sqrt(acc) / n;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (boot_smle(t) - orig_smle_value) / denom;
}

namespace detail {

template <class Kernel, class BiasFn>
ConfidenceBand smle_band(const CurrentStatusSample& s,
                         const std::vector<double>& t_grid,
                         const BootstrapConfig& config, double b,
                         const BiasFn& bias, const std::string& method) {
  config.validate();
  const std::size_t n = s.n();
  const int B = config.replications;
  const double alpha =
      config.tightened_alpha ? *config.tightened_alpha : 1.0 - config.level;
  if (static_cast<double>(B) * (alpha / 2.0) < 1.0)
    throw std::invalid_argument(
        "bootstrap: B too small for the requested percentile");
  const double h = config.bandwidth(b, n);

  const StepFunction fit = mle(s);
  const SmoothCdf<Kernel> smooth(fit, h, b);
  std::vector<double> est(t_grid.size()), sd(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    est[k] = smooth(t_grid[k]);
    sd[k] = studentized_sd<Kernel>(s, fit, t_grid[k], h, b);
  }

  std::vector<std::vector<double>> z(t_grid.size());
  for (auto& v : z) v.reserve(static_cast<std::size_t>(B));
  for (int r = 0; r < B; ++r) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(r));
    const PairSample boot = resample(s, rng);
    const StepFunction boot_mle = mle_of_resample(boot);
    const SmoothCdf<Kernel> boot_smle(boot_mle, h, b);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const double t = t_grid[k];
      double acc = 0.0;
      for (std::size_t i = 0; i < boot.n(); ++i) {
        const double ti = boot.times[i];
        const double w = (Kernel::density((t - ti) / h) -
                          Kernel::density((t + ti) / h) -
                          Kernel::density((2.0 * b - t - ti) / h)) /
                         h;
        const double resid = boot.indicators[i] - boot_mle.eval(ti);
        acc += w * w * resid * resid;
      }
      const double denom = std::sqrt(acc) / static_cast<double>(n);
      if (denom > 0.0) z[k].push_back((boot_smle(t) - est[k]) / denom);
    }
  }

  ConfidenceBand band;
  band.ts = t_grid;
  band.method = method;
  band.lower.resize(t_grid.size());
  band.upper.resize(t_grid.size());
  band.estimate = est;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (z[k].empty())
      throw NumericError("bootstrap: all replications degenerate at t=" +
                         fmt_double(t_grid[k]));
    const double u_lo = percentile(z[k], alpha / 2.0);
    const double u_hi = percentile(z[k], 1.0 - alpha / 2.0);
    const double shift = bias(t_grid[k]);
    band.lower[k] =
        std::min(1.0, std::max(0.0, est[k] - shift - u_hi * sd[k]));
    band.upper[k] =
        std::min(1.0, std::max(0.0, est[k] - shift - u_lo * sd[k]));
  }
  return band;
}

} // namespace detail

//! Studentized bootstrap band around the smoothed MLE (bias ignored).
template <class Kernel = TriweightKernel>
ConfidenceBand ci_type1(const CurrentStatusSample& s,
                        const std::vector<double>& t_grid,
                        const BootstrapConfig& config, double b) {
  return detail::smle_band<Kernel>(s, t_grid, config, b,
                                   [](double) { return 0.0; }, "SMLE-boot");
}

//! Same band shifted by a supplied pointwise bias (an oracle method: the
//! true bias is rarely available in practice).
template <class Kernel = TriweightKernel, class BiasFn>
ConfidenceBand ci_type2(const CurrentStatusSample& s,
                        const std::vector<double>& t_grid,
                        const BootstrapConfig& config, double b,
                        const BiasFn& bias) {
  return detail::smle_band<Kernel>(s, t_grid, config, b, bias,
                                   "SMLE-boot-biascorr");
}

//! Percentile bootstrap band for the survival ratio g(t)/g(0) of the
//! current-duration model, built from the plain differences
//! g~*(t)/g~*(0) - g~(t)/g~(0).
template <class Kernel = TriweightKernel>
ConfidenceBand density_ratio_ci(const std::vector<double>& raw_times,
                                const std::vector<double>& t_grid,
                                const BootstrapConfig& config, double b) {
  config.validate();
  const int B = config.replications;
  const double alpha =
      config.tightened_alpha ? *config.tightened_alpha : 1.0 - config.level;
  if (static_cast<double>(B) * (alpha / 2.0) < 1.0)
    throw std::invalid_argument(
        "bootstrap: B too small for the requested percentile");
  const WeightedSample ws = WeightedSample::from_raw(raw_times);
  const std::size_t n = static_cast<std::size_t>(ws.n());
  const double h = config.bandwidth(b, n);
  const StepFunction gren = grenander_mle(ws);
  const SmoothDensity<Kernel> smooth(gren, h, b);
  const double g0 = smooth(0.0);
  if (!(g0 > 0.0))
    throw DataError("density_ratio_ci: smoothed density at 0 is not positive");

  std::vector<double> est(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    est[k] = smooth(t_grid[k]) / g0;

  std::vector<std::vector<double>> diffs(t_grid.size());
  for (auto& v : diffs) v.reserve(static_cast<std::size_t>(B));
  for (int r = 0; r < B; ++r) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(r));
    std::vector<double> boot(n);
    for (std::size_t i = 0; i < n; ++i)
      boot[i] = raw_times[static_cast<std::size_t>(rng.below(raw_times.size()))];
    const WeightedSample bws = WeightedSample::from_raw(std::move(boot));
    const SmoothDensity<Kernel> bs(grenander_mle(bws), h, b);
    const double bg0 = bs(0.0);
    if (!(bg0 > 0.0)) continue; // degenerate replication, skipped
    for (std::size_t k = 0; k < t_grid.size(); ++k)
      diffs[k].push_back(bs(t_grid[k]) / bg0 - est[k]);
  }

  ConfidenceBand band;
  band.ts = t_grid;
  band.method = "density-ratio";
  band.lower.resize(t_grid.size());
  band.upper.resize(t_grid.size());
  band.estimate = est;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (diffs[k].empty())
      throw NumericError("density_ratio_ci: all replications degenerate");
    const double u_lo = percentile(diffs[k], alpha / 2.0);
    const double u_hi = percentile(diffs[k], 1.0 - alpha / 2.0);
    band.lower[k] = std::min(1.0, std::max(0.0, est[k] - u_hi));
    band.upper[k] = std::min(1.0, std::max(0.0, est[k] - u_lo));
  }
  return band;
}

} // namespace isoci
