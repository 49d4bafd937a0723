#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "isoci/csv.hpp"
#include "isoci/cusum.hpp"
#include "isoci/errors.hpp"
#include "isoci/rng.hpp"

#include "json.hpp"

namespace isoci {

//! Monte-Carlo discretization of the slope processes behind the universal
//! limit distribution D of the LR statistic.
struct LimitProcessConfig {
  double horizon = 3.0;    // simulate X(t) = W(t) - t^2 on [-horizon, horizon]
  double step = 0.005;     // grid step
  int replications = 10000;
  std::uint64_t seed = 20240901;

  void validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("limit process: horizon <= 0");
    if (!(step > 0.0)) throw std::invalid_argument("limit process: step <= 0");
    if (replications < 1)
      throw std::invalid_argument("limit process: replications < 1");
  }

  //! grid points per side; 0 is always a grid point
  std::size_t side_points() const {
    const auto m = static_cast<std::size_t>(std::llround(horizon / step));
    return m == 0 ? 1 : m;
  }
};

//! Unconstrained and constrained slope processes sampled per grid interval
//! (slope[k] is the left slope on (ts[k], ts[k+1]]).
struct SlopePair {
  std::vector<double> ts;  // grid, size 2M+1, ts[M] == 0
  std::vector<double> s;   // concave-majorant slopes over the whole grid, size 2M
  std::vector<double> s0;  // constrained slopes: one-sided majorants, sign-clamped
};

namespace detail {

inline std::vector<double> majorant_slopes(const std::vector<double>& ts,
                                           const std::vector<double>& xs,
                                           std::size_t first, std::size_t last) {
  std::vector<double> dx(ts.begin() + static_cast<std::ptrdiff_t>(first),
                         ts.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  std::vector<double> dy(xs.begin() + static_cast<std::ptrdiff_t>(first),
                         xs.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  const double y0 = dy.front();
  for (auto& y : dy) y -= y0; // hull slopes are shift invariant
  return lcm_left_slopes(CusumDiagram(std::move(dx), std::move(dy))).slopes;
}

} // namespace detail

//! Slope pair of a given path; exposed separately so degenerate paths can
//! be fed in directly. zero_index marks the grid point at t = 0.
inline SlopePair slope_pair_from_path(std::vector<double> ts,
                                      const std::vector<double>& xs,
                                      std::size_t zero_index) {
  if (ts.size() != xs.size() || ts.size() < 3)
    throw std::invalid_argument("slope pair: bad path");
  if (zero_index == 0 || zero_index + 1 >= ts.size())
    throw std::invalid_argument("slope pair: zero index must be interior");
  SlopePair out;
  out.s = detail::majorant_slopes(ts, xs, 0, ts.size() - 1);
  const auto left = detail::majorant_slopes(ts, xs, 0, zero_index);
  const auto right = detail::majorant_slopes(ts, xs, zero_index, ts.size() - 1);
  out.s0.resize(out.s.size());
  for (std::size_t k = 0; k < left.size(); ++k)
    out.s0[k] = std::max(left[k], 0.0);
  for (std::size_t k = 0; k < right.size(); ++k)
    out.s0[zero_index + k] = std::min(right[k], 0.0);
  out.ts = std::move(ts);
  // sign clamps hold by construction; the concatenation must stay nonincreasing
  for (std::size_t k = 1; k < out.s0.size(); ++k)
    if (out.s0[k] > out.s0[k - 1] + 1e-9)
      throw std::logic_error("slope pair: constrained slopes not monotone");
  return out;
}

//! One draw of (S, S0): two-sided Brownian motion with drift -t^2, built
//! from two independent random walks glued at 0.
inline SlopePair simulate_slope_pair(const LimitProcessConfig& config, Rng& rng) {
  config.validate();
  const std::size_t m = config.side_points();
  const double d = config.step;
  const double sd = std::sqrt(d);
  std::vector<double> ts(2 * m + 1), xs(2 * m + 1);
  for (std::size_t j = 0; j <= 2 * m; ++j)
    ts[j] = (static_cast<double>(j) - static_cast<double>(m)) * d;
  xs[m] = 0.0;
  double w = 0.0;
  for (std::size_t j = m + 1; j <= 2 * m; ++j) {
    w += sd * rng.normal();
    xs[j] = w - ts[j] * ts[j];
  }
  w = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    w += sd * rng.normal();
    xs[j] = w - ts[j] * ts[j];
  }
  return slope_pair_from_path(std::move(ts), xs, m);
}

//! Integral of S^2 - S0^2, exact for the piecewise-constant slopes.
//! Nonnegative: the constrained slopes are the sign-restricted isotonic
//! optimum of the same increments.
inline double d_draw_from_pair(const SlopePair& pair) {
  double acc = 0.0;
  for (std::size_t k = 0; k < pair.s.size(); ++k) {
    const double dt = pair.ts[k + 1] - pair.ts[k];
    acc += (pair.s[k] * pair.s[k] - pair.s0[k] * pair.s0[k]) * dt;
  }
  if (acc < 0.0) {
    if (acc < -1e-9) throw std::logic_error("limit draw: negative integral");
    acc = 0.0;
  }
  return acc;
}

//! R draws of D, one independent substream per replication.
inline std::vector<double> sample_D(const LimitProcessConfig& config) {
  config.validate();
  std::vector<double> draws(static_cast<std::size_t>(config.replications));
  for (int r = 0; r < config.replications; ++r) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(r));
    draws[static_cast<std::size_t>(r)] =
        d_draw_from_pair(simulate_slope_pair(config, rng));
  }
  return draws;
}

//! Order-statistic quantile: k-th smallest with k = round(count * p).
inline double mc_quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("quantile: no samples");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("quantile: p must lie in (0,1)");
  long long k = std::llround(static_cast<double>(samples.size()) * p);
  if (k < 1) k = 1;
  if (k > static_cast<long long>(samples.size()))
    k = static_cast<long long>(samples.size());
  std::sort(samples.begin(), samples.end());
  return samples[static_cast<std::size_t>(k - 1)];
}

//! Monte-Carlo quantiles of D with full provenance.
struct QuantileTable {
  std::vector<double> levels;
  std::vector<double> quantiles;
  LimitProcessConfig config;

  double at(double level) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (levels[i] == level) return quantiles[i];
    throw std::invalid_argument("quantile table: level " + fmt_double(level) +
                                " not tabulated");
  }
};

inline QuantileTable make_quantile_table(const LimitProcessConfig& config,
                                         std::vector<double> levels) {
  std::sort(levels.begin(), levels.end());
  auto draws = sample_D(config);
  std::sort(draws.begin(), draws.end());
  QuantileTable table;
  table.config = config;
  table.levels = levels;
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0))
      throw std::domain_error("quantile table: levels must lie in (0,1)");
    long long k = std::llround(static_cast<double>(draws.size()) * p);
    if (k < 1) k = 1;
    if (k > static_cast<long long>(draws.size()))
      k = static_cast<long long>(draws.size());
    table.quantiles.push_back(draws[static_cast<std::size_t>(k - 1)]);
  }
  return table;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string table_payload(const QuantileTable& t) {
  std::ostringstream os;
  os << fmt_double(t.config.horizon) << '|' << fmt_double(t.config.step) << '|'
     << t.config.replications << '|' << t.config.seed;
  for (std::size_t i = 0; i < t.levels.size(); ++i)
    os << '|' << fmt_double(t.levels[i]) << ':' << fmt_double(t.quantiles[i]);
  return os.str();
}

} // namespace detail

inline void cache_write(const std::string& path, const QuantileTable& t) {
  nlohmann::json j;
  j["version"] = 1;
  j["c"] = t.config.horizon;
  j["delta"] = t.config.step;
  j["R"] = t.config.replications;
  j["seed"] = t.config.seed;
  j["levels"] = t.levels;
  j["quantiles"] = t.quantiles;
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(
                    detail::fnv1a(detail::table_payload(t))));
  j["checksum"] = std::string(checksum);
  csv::write_file(path, {j.dump(2)});
}

inline QuantileTable cache_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open quantile cache: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("quantile cache " + path + ": parse error: " + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1)
      throw DataError("quantile cache " + path + ": unsupported version");
    QuantileTable t;
    t.config.horizon = j.at("c").get<double>();
    t.config.step = j.at("delta").get<double>();
    t.config.replications = j.at("R").get<int>();
    t.config.seed = j.at("seed").get<std::uint64_t>();
    t.levels = j.at("levels").get<std::vector<double>>();
    t.quantiles = j.at("quantiles").get<std::vector<double>>();
    for (std::size_t i = 1; i < t.quantiles.size(); ++i)
      if (t.quantiles[i] < t.quantiles[i - 1])
        throw DataError("quantile cache " + path + ": quantiles not monotone");
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(
                      detail::fnv1a(detail::table_payload(t))));
    if (j.at("checksum").get<std::string>() != checksum)
      throw DataError("quantile cache " + path + ": checksum mismatch");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("quantile cache " + path + ": missing field: " + e.what());
  }
}

} // namespace isoci
