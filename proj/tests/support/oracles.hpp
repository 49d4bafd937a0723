#pragma once

// Independent verification oracles for the test and acceptance suites.
// These deliberately avoid the hull/stack code paths of the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "isoci/current_status.hpp"
#include "isoci/grenander.hpp"

namespace oracles {

// Weighted pool-adjacent-violators for nondecreasing fits: block merging on
// (value, weight) pairs.
inline std::vector<double> pava_nondecreasing(const std::vector<double>& values,
                                              const std::vector<double>& weights) {
  struct Block {
    double sum, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i] * weights[i], weights[i], 1});
    while (blocks.size() >= 2) {
      const auto& b = blocks.back();
      const auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.weight <= b.sum / b.weight) break;
      Block merged{a.sum + b.sum, a.weight + b.weight, a.count + b.count};
      blocks.pop_back();
      blocks.pop_back();
      blocks.push_back(merged);
    }
  }
  std::vector<double> out;
  for (const auto& b : blocks)
    for (std::size_t c = 0; c < b.count; ++c) out.push_back(b.sum / b.weight);
  return out;
}

// Log likelihood of a current-status value vector.
inline double curstat_loglik(const isoci::CurrentStatusSample& s,
                             const std::vector<double>& f) {
  double ll = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double fi = f[i];
    if (s.indicators()[i] == 1) {
      if (fi <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += std::log(fi);
    } else {
      if (fi >= 1.0) return -std::numeric_limits<double>::infinity();
      ll += std::log(1.0 - fi);
    }
  }
  return ll;
}

// Log likelihood of a density value vector: sum w_i log f_i.
inline double density_loglik(const isoci::WeightedSample& ws,
                             const std::vector<double>& f) {
  double ll = 0.0;
  for (std::size_t i = 0; i < ws.m(); ++i) {
    if (f[i] <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(ws.weights()[i]) * std::log(f[i]);
  }
  return ll;
}

// Enumerates nondecreasing index vectors over a candidate value set and
// reports the best constrained log likelihood. candidates must be sorted.
inline double best_monotone_loglik(
    const isoci::CurrentStatusSample& s, const std::vector<double>& candidates,
    const std::function<bool(const std::vector<double>&)>& feasible) {
  const std::size_t n = s.n();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> f(n);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t i = 0; i < n; ++i) f[i] = candidates[idx[i]];
    if (feasible(f)) best = std::max(best, curstat_loglik(s, f));
    // next nondecreasing index vector
    std::size_t pos = n;
    while (pos-- > 0) {
      if (idx[pos] + 1 < candidates.size()) {
        ++idx[pos];
        for (std::size_t q = pos + 1; q < n; ++q) idx[q] = idx[pos];
        break;
      }
      if (pos == 0) return best;
    }
  }
}

// All current-status block averages i/j (plus optional extras): the value
// set that contains every attainable MLE block value.
inline std::vector<double> curstat_value_grid(std::size_t n,
                                              std::vector<double> extra = {}) {
  std::vector<double> vals = std::move(extra);
  for (std::size_t den = 1; den <= n; ++den)
    for (std::size_t num = 0; num <= den; ++num)
      vals.push_back(static_cast<double>(num) / static_cast<double>(den));
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

// Exact maximizer of the (restricted) density log likelihood by
// enumerating all partitions into consecutive blocks and solving each via
// its Lagrange closed form. Constraints pin the blocks containing fixed
// indices (1-based); pass 0 to leave a constraint out.
struct DensityOracleResult {
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
};

inline DensityOracleResult density_partition_oracle(
    const isoci::WeightedSample& ws, std::size_t i0 = 0, double a = 0.0,
    bool pin_first = false, double b = 0.0) {
  const std::size_t m = ws.m();
  const double n = static_cast<double>(ws.n());
  DensityOracleResult best;
  // partition encoded by bits: bit i set => block boundary after position i
  const std::size_t masks = static_cast<std::size_t>(1) << (m - 1);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks; // [lo, hi] 1-based
    std::size_t lo = 1;
    for (std::size_t i = 1; i <= m; ++i) {
      if (i == m || (mask >> (i - 1)) & 1) {
        blocks.emplace_back(lo, i);
        lo = i + 1;
      }
    }
    double pinned_len = 0.0, free_weight = 0.0;
    std::vector<double> block_vals(blocks.size(), -1.0);
    bool ok = true;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto [blo, bhi] = blocks[bi];
      const double t_lo = blo >= 2 ? ws.times()[blo - 2] : 0.0;
      const double len = ws.times()[bhi - 1] - t_lo;
      const bool has_i0 = i0 >= blo && i0 <= bhi;
      const bool has_first = pin_first && blo == 1;
      if (has_i0 && has_first && a != b) {
        ok = false;
        break;
      }
      if (has_i0 || has_first) {
        block_vals[bi] = has_i0 ? a : b;
        pinned_len += block_vals[bi] * len;
      } else {
        double w = 0.0;
        for (std::size_t i = blo; i <= bhi; ++i)
          w += static_cast<double>(ws.weights()[i - 1]);
        free_weight += w / n;
      }
    }
    if (!ok) continue;
    if (pinned_len >= 1.0) continue;
    const double lambda = free_weight > 0.0 ? free_weight / (1.0 - pinned_len) : 1.0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      if (block_vals[bi] >= 0.0) continue;
      const auto [blo, bhi] = blocks[bi];
      const double t_lo = blo >= 2 ? ws.times()[blo - 2] : 0.0;
      const double len = ws.times()[bhi - 1] - t_lo;
      double w = 0.0;
      for (std::size_t i = blo; i <= bhi; ++i)
        w += static_cast<double>(ws.weights()[i - 1]);
      block_vals[bi] = (w / n) / (lambda * len);
    }
    // admissibility: nonincreasing and positive
    ok = true;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      if (!(block_vals[bi] > 0.0)) ok = false;
      if (bi > 0 && block_vals[bi] > block_vals[bi - 1] + 1e-12) ok = false;
    }
    if (!ok) continue;
    std::vector<double> f(m);
    for (std::size_t bi = 0; bi < blocks.size(); ++bi)
      for (std::size_t i = blocks[bi].first; i <= blocks[bi].second; ++i)
        f[i - 1] = block_vals[bi];
    // integral check (free blocks normalized by construction)
    double total = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
      const double t_lo = i >= 2 ? ws.times()[i - 2] : 0.0;
      total += f[i - 1] * (ws.times()[i - 1] - t_lo);
    }
    if (std::abs(total - 1.0) > 1e-9) continue;
    const double ll = density_loglik(ws, f);
    if (ll > best.loglik) {
      best.loglik = ll;
      best.values = std::move(f);
    }
  }
  return best;
}

// Restricted current-status oracle via block partitions: the block holding
// i0 is pinned to a, free blocks take their delta averages.
inline double curstat_partition_oracle(const isoci::CurrentStatusSample& s,
                                       std::size_t i0, double a) {
  const std::size_t n = s.n();
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t masks = static_cast<std::size_t>(1) << (n - 1);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    std::vector<double> f(n);
    std::size_t lo = 1;
    bool ok = true;
    double prev = -1.0;
    for (std::size_t i = 1; i <= n && ok; ++i) {
      if (i == n || (mask >> (i - 1)) & 1) {
        double v;
        if (i0 >= lo && i0 <= i) {
          v = a;
        } else {
          double ones = 0.0;
          for (std::size_t j = lo; j <= i; ++j) ones += s.indicators()[j - 1];
          v = ones / static_cast<double>(i - lo + 1);
        }
        if (v < prev - 1e-12) ok = false;
        prev = std::max(prev, v);
        for (std::size_t j = lo; j <= i; ++j) f[j - 1] = v;
        lo = i + 1;
      }
    }
    if (!ok) continue;
    best = std::max(best, curstat_loglik(s, f));
  }
  return best;
}

} // namespace oracles
