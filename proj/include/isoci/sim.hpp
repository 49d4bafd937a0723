#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "isoci/bootstrap.hpp"
#include "isoci/current_status.hpp"
#include "isoci/errors.hpp"
#include "isoci/grenander.hpp"
#include "isoci/rng.hpp"
#include "isoci/smle.hpp"

namespace isoci::sim {

enum class Model { current_status, monotone_density, current_duration };

enum class Truth {
  uniform02,    // uniform on [0, 2]
  truncexp02,   // density e^-x / (1 - e^-2) on [0, 2]
  exponential1, // standard exponential (current-duration event times)
  point_mass    // point mass (current-duration degenerate check)
};

struct DesignSpec {
  Model model = Model::current_status;
  Truth truth = Truth::uniform02;
  std::size_t n = 200;
  Truth observation = Truth::uniform02; // current status inspection times
  double point_mass_at = 1.0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("design: n must be >= 1");
    if (model == Model::current_status) {
      if (observation != Truth::uniform02)
        throw std::invalid_argument(
            "design: only the uniform[0,2] observation distribution is built in");
      if (truth != Truth::uniform02 && truth != Truth::truncexp02)
        throw std::invalid_argument(
            "design: current status truth must live on [0,2]");
    }
    if (model == Model::monotone_density && truth != Truth::uniform02 &&
        truth != Truth::truncexp02)
      throw std::invalid_argument("design: density truth must live on [0,2]");
    if (model == Model::current_duration && truth == Truth::point_mass &&
        !(point_mass_at > 0.0))
      throw std::invalid_argument("design: point mass must sit at a positive time");
  }
};

inline double truth_cdf(Truth truth, double t) {
  switch (truth) {
    case Truth::uniform02:
      return std::min(1.0, std::max(0.0, t / 2.0));
    case Truth::truncexp02:
      if (t <= 0.0) return 0.0;
      if (t >= 2.0) return 1.0;
      return (1.0 - std::exp(-t)) / (1.0 - std::exp(-2.0));
    case Truth::exponential1:
      return t <= 0.0 ? 0.0 : 1.0 - std::exp(-t);
    default:
      throw std::invalid_argument("truth_cdf: unsupported truth");
  }
}

inline double truth_density(Truth truth, double t) {
  switch (truth) {
    case Truth::uniform02:
      return (t >= 0.0 && t <= 2.0) ? 0.5 : 0.0;
    case Truth::truncexp02:
      return (t >= 0.0 && t <= 2.0) ? std::exp(-t) / (1.0 - std::exp(-2.0))
                                    : 0.0;
    case Truth::exponential1:
      return t >= 0.0 ? std::exp(-t) : 0.0;
    default:
      throw std::invalid_argument("truth_density: unsupported truth");
  }
}

namespace detail {

inline double draw_from(Truth truth, Rng& rng) {
  const double u = rng.uniform01();
  switch (truth) {
    case Truth::uniform02:
      return 2.0 * u;
    case Truth::truncexp02:
      return -std::log1p(-u * (1.0 - std::exp(-2.0)));
    case Truth::exponential1:
      return rng.exponential();
    default:
      throw std::invalid_argument("draw_from: unsupported truth");
  }
}

} // namespace detail

//! (T_i, 1{X_i <= T_i}) with X and T independent; duplicate inspection
//! times are redrawn so the sorted times are strictly increasing.
inline CurrentStatusSample gen_current_status(const DesignSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<std::pair<double, int>> obs(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double t = detail::draw_from(spec.observation, rng);
    const double x = detail::draw_from(spec.truth, rng);
    obs[i] = {t, x <= t ? 1 : 0};
  }
  std::sort(obs.begin(), obs.end());
  for (std::size_t i = 1; i < obs.size(); ++i) {
    while (obs[i].first == obs[i - 1].first) {
      const double t = detail::draw_from(spec.observation, rng);
      const double x = detail::draw_from(spec.truth, rng);
      obs[i] = {t, x <= t ? 1 : 0};
      std::sort(obs.begin(), obs.end());
    }
  }
  return CurrentStatusSample::from_pairs(std::move(obs));
}

//! Sample from a decreasing density by inverse-CDF sampling.
inline WeightedSample gen_monotone_density(const DesignSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<double> raw(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i)
    raw[i] = detail::draw_from(spec.truth, rng);
  return WeightedSample::from_raw(std::move(raw));
}

//! Current durations X = U Z, with Z length-biased for the truth F and U
//! uniform on [0,1]; the observation density is g(x) = (1-F(x))/m_F.
inline std::vector<double> gen_current_duration(const DesignSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<double> out(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    double z;
    switch (spec.truth) {
      case Truth::point_mass:
        z = spec.point_mass_at;
        break;
      case Truth::exponential1:
        // length-biased exponential(1) is Gamma(2,1)
        z = rng.exponential() + rng.exponential();
        break;
      case Truth::uniform02:
      case Truth::truncexp02: {
        // rejection on [0,2]: accept z ~ f with probability z / 2
        do {
          z = detail::draw_from(spec.truth, rng);
        } while (rng.uniform01() * 2.0 > z);
        break;
      }
      default:
        throw std::invalid_argument("gen_current_duration: unsupported truth");
    }
    out[i] = rng.uniform01() * z;
  }
  return out;
}

enum class CiMethod { lr, smle_boot, smle_boot_biascorr, density_ratio };

inline std::string method_name(CiMethod m) {
  switch (m) {
    case CiMethod::lr: return "LR";
    case CiMethod::smle_boot: return "SMLE-boot";
    case CiMethod::smle_boot_biascorr: return "SMLE-boot-biascorr";
    default: return "density-ratio";
  }
}

struct CoverageRow {
  double t = 0.0;
  std::string method;
  double noncoverage = 0.0;
  int reps = 0;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  double runtime_seconds = 0.0; // not written to output files
};

struct CoverageConfig {
  std::vector<double> t_points{0.5, 1.0, 1.5};
  int replications = 300;
  int bootstrap_B = 200;
  double level = 0.95;
  std::uint64_t seed = 1;
  double lr_quantile = 0.0; // critical value of D for the LR method
  BandwidthRule bandwidth_rule = BandwidthRule::undersmooth_n14;
  double fixed_bandwidth = 0.0;
  double domain_end = 2.0;
};

//! Per-point non-coverage proportion of each method over seeded
//! replications. Deterministic: replication r always uses substream r.
inline CoverageReport coverage_experiment(const DesignSpec& design,
                                          const std::vector<CiMethod>& methods,
                                          const CoverageConfig& config) {
  design.validate();
  const std::size_t np = config.t_points.size();
  std::vector<std::vector<int>> misses(methods.size(), std::vector<int>(np, 0));

  for (int rep = 0; rep < config.replications; ++rep) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(rep));
    if (design.model == Model::current_status) {
      const CurrentStatusSample sample = gen_current_status(design, rng);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const CiMethod method = methods[mi];
        if (method == CiMethod::lr) {
          for (std::size_t k = 0; k < np; ++k) {
            const double t = config.t_points[k];
            const double truth = truth_cdf(design.truth, t);
            const Interval ci =
                lr_ci(sample, t, config.level, config.lr_quantile);
            if (truth < ci.lo || truth > ci.hi) ++misses[mi][k];
          }
        } else {
          BootstrapConfig bc;
          bc.replications = config.bootstrap_B;
          bc.level = config.level;
          bc.bandwidth_rule = config.bandwidth_rule;
          bc.fixed_bandwidth = config.fixed_bandwidth;
          bc.seed = Rng::derive_seed(config.seed, static_cast<std::uint64_t>(rep));
          ConfidenceBand band;
          if (method == CiMethod::smle_boot) {
            band = ci_type1(sample, config.t_points, bc, config.domain_end);
          } else {
            band = ci_type2(sample, config.t_points, bc, config.domain_end,
                            [&](double t) {
                              return asymptotic_bias_truncexp(
                                  t, bc.bandwidth(config.domain_end, sample.n()),
                                  config.domain_end);
                            });
          }
          for (std::size_t k = 0; k < np; ++k) {
            const double truth = truth_cdf(design.truth, config.t_points[k]);
            if (truth < band.lower[k] || truth > band.upper[k]) ++misses[mi][k];
          }
        }
      }
    } else if (design.model == Model::monotone_density) {
      const WeightedSample sample = gen_monotone_density(design, rng);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        if (methods[mi] != CiMethod::lr)
          throw std::invalid_argument(
              "coverage: only the LR method applies to the density model");
        for (std::size_t k = 0; k < np; ++k) {
          const double t = config.t_points[k];
          const double truth = truth_density(design.truth, t);
          const Interval ci =
              lr_ci_density(sample, t, config.level, config.lr_quantile);
          if (truth < ci.lo || truth > ci.hi) ++misses[mi][k];
        }
      }
    } else {
      const std::vector<double> raw = gen_current_duration(design, rng);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        if (methods[mi] != CiMethod::density_ratio)
          throw std::invalid_argument(
              "coverage: the current-duration model uses the density-ratio method");
        BootstrapConfig bc;
        bc.replications = config.bootstrap_B;
        bc.level = config.level;
        bc.bandwidth_rule = config.bandwidth_rule;
        bc.fixed_bandwidth = config.fixed_bandwidth;
        bc.seed = Rng::derive_seed(config.seed, static_cast<std::uint64_t>(rep));
        const ConfidenceBand band =
            density_ratio_ci(raw, config.t_points, bc, config.domain_end);
        for (std::size_t k = 0; k < np; ++k) {
          const double truth = 1.0 - truth_cdf(design.truth, config.t_points[k]);
          if (truth < band.lower[k] || truth > band.upper[k]) ++misses[mi][k];
        }
      }
    }
  }

  CoverageReport report;
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    for (std::size_t k = 0; k < np; ++k)
      report.rows.push_back(CoverageRow{
          config.t_points[k], method_name(methods[mi]),
          static_cast<double>(misses[mi][k]) / config.replications,
          config.replications});
  return report;
}

struct MuScalingRow {
  std::size_t n = 0;
  double median_abs_mu = 0.0;
};

//! Median |mu_n| under the null constraint a = truth(t0), per sample size.
inline std::vector<MuScalingRow> mu_scaling_experiment(
    Model model, Truth truth, const std::vector<std::size_t>& n_list, int reps,
    std::uint64_t seed, double t0 = 1.0) {
  std::vector<MuScalingRow> rows;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    std::vector<double> abs_mu;
    abs_mu.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
      Rng rng = Rng::stream(seed + 7919 * ni, static_cast<std::uint64_t>(rep));
      DesignSpec design;
      design.model = model;
      design.truth = truth;
      design.n = n_list[ni];
      if (model == Model::current_status) {
        const auto sample = gen_current_status(design, rng);
        const double a = truth_cdf(truth, t0);
        try {
          abs_mu.push_back(std::abs(restricted_mle(sample, t0, a).mu));
        } catch (const ConstraintInfeasibleError&) {
          // degenerate draw, skipped
        }
      } else {
        const auto sample = gen_monotone_density(design, rng);
        const double a = truth_density(truth, t0);
        try {
          abs_mu.push_back(std::abs(restricted_mle_density(sample, t0, a).mu));
        } catch (const ConstraintInfeasibleError&) {
        }
      }
    }
    if (abs_mu.empty()) throw NumericError("mu scaling: all draws degenerate");
    std::sort(abs_mu.begin(), abs_mu.end());
    rows.push_back(MuScalingRow{n_list[ni], abs_mu[abs_mu.size() / 2]});
  }
  return rows;
}

//! Empirical draws of 2 log l_n under the null constraint a = truth(t0).
inline std::vector<double> lr_null_distribution_experiment(Model model,
                                                           Truth truth,
                                                           std::size_t n,
                                                           int reps,
                                                           std::uint64_t seed,
                                                           double t0 = 1.0) {
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(rep));
    DesignSpec design;
    design.model = model;
    design.truth = truth;
    design.n = n;
    if (model == Model::current_status) {
      const auto sample = gen_current_status(design, rng);
      draws.push_back(log_lr(sample, t0, truth_cdf(truth, t0)));
    } else {
      const auto sample = gen_monotone_density(design, rng);
      draws.push_back(log_lr_density(sample, t0, truth_density(truth, t0)));
    }
  }
  return draws;
}

} // namespace isoci::sim
