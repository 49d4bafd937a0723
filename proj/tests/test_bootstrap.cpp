#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "isoci/bootstrap.hpp"
#include "isoci/rng.hpp"
#include "isoci/sim.hpp"

using namespace isoci;
using Catch::Approx;

namespace {

CurrentStatusSample make_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  sim::DesignSpec spec;
  spec.model = sim::Model::current_status;
  spec.truth = sim::Truth::uniform02;
  spec.n = n;
  return sim::gen_current_status(spec, rng);
}

} // namespace

TEST_CASE("resample basics") {
  const CurrentStatusSample one({1.5}, {1});
  Rng rng(3);
  const auto boot = resample(one, rng);
  CHECK(boot.times == std::vector<double>{1.5});
  CHECK(boot.indicators == std::vector<int>{1});

  const auto s = make_sample(50, 5);
  Rng r1(99), r2(99);
  const auto b1 = resample(s, r1);
  const auto b2 = resample(s, r2);
  CHECK(b1.times == b2.times);
  CHECK(b1.indicators == b2.indicators);
  for (std::size_t i = 1; i < b1.times.size(); ++i)
    CHECK(b1.times[i] >= b1.times[i - 1]);
}

TEST_CASE("expected multiplicity of each pair is one") {
  const auto s = make_sample(40, 7);
  const int reps = 4000;
  std::vector<double> count(s.n(), 0.0);
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(11, static_cast<std::uint64_t>(r));
    const auto boot = resample(s, rng);
    for (double t : boot.times) {
      const auto it = std::lower_bound(s.times().begin(), s.times().end(), t);
      count[static_cast<std::size_t>(it - s.times().begin())] += 1.0;
    }
  }
  // mean multiplicity 1, sd = sqrt((1-1/n)/reps) per time
  const double sd = std::sqrt(1.0 / reps);
  for (std::size_t i = 0; i < s.n(); ++i)
    CHECK(count[i] / reps == Approx(1.0).margin(3.5 * sd));
}

TEST_CASE("mle of a tied resample maximizes the aggregated likelihood") {
  PairSample boot;
  boot.times = {1.0, 1.0, 2.0, 2.0, 2.0};
  boot.indicators = {1, 0, 0, 1, 1};
  const auto f = mle_of_resample(boot);
  REQUIRE(f.knots() == std::vector<double>{1.0, 2.0});
  // distinct-time binomial fit: (1/2, 2/3) is already monotone
  CHECK(f.values()[0] == Approx(0.5).margin(1e-15));
  CHECK(f.values()[1] == Approx(2.0 / 3.0).margin(1e-15));
}

TEST_CASE("z_star at the original sample is zero") {
  const auto s = make_sample(60, 13);
  const double b = 2.0, h = bandwidth_ci(b, s.n());
  const auto smooth = smle_cdf(mle(s), h, b);
  PairSample same;
  same.times = s.times();
  same.indicators = s.indicators();
  const double t = 1.0;
  const double z = z_star(t, same, smooth(t), h, b);
  CHECK(z == Approx(0.0).margin(1e-12));

  // sign follows the smoothed difference
  Rng rng(17);
  const auto boot = resample(s, rng);
  const auto boot_fit = mle_of_resample(boot);
  const auto boot_smooth = smle_cdf(boot_fit, h, b);
  const double z2 = z_star(t, boot, smooth(t), h, b);
  if (boot_smooth(t) > smooth(t))
    CHECK(z2 > 0.0);
  else if (boot_smooth(t) < smooth(t))
    CHECK(z2 < 0.0);
}

TEST_CASE("percentile uses round(B p) order statistics") {
  std::vector<double> v(1000);
  for (int i = 0; i < 1000; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
  CHECK(percentile(v, 0.025) == 25.0);  // B=1000, alpha=0.05
  CHECK(percentile(v, 0.975) == 975.0);
  CHECK(percentile(v, 0.02) == 20.0);   // tightened alpha' = 0.04
  CHECK(percentile(v, 0.98) == 980.0);
  CHECK(percentile({1.0, 2.0, 3.0}, 0.5) == 2.0);
  CHECK_THROWS_AS(percentile({1.0, 2.0}, 0.01), std::invalid_argument);
}

TEST_CASE("ci_type1 band sanity and determinism") {
  const auto s = make_sample(80, 19);
  BootstrapConfig cfg;
  cfg.replications = 120;
  cfg.level = 0.95;
  cfg.seed = 12345;
  const std::vector<double> grid{0.5, 1.0, 1.5};
  const auto band1 = ci_type1(s, grid, cfg, 2.0);
  const auto band2 = ci_type1(s, grid, cfg, 2.0);
  CHECK(band1.lower == band2.lower);
  CHECK(band1.upper == band2.upper);
  CHECK(band1.method == "SMLE-boot");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(band1.lower[k] <= band1.upper[k]);
    CHECK(band1.lower[k] >= 0.0);
    CHECK(band1.upper[k] <= 1.0);
  }
  // too few replications for the percentile
  BootstrapConfig tiny = cfg;
  tiny.replications = 10;
  CHECK_THROWS_AS(ci_type1(s, grid, tiny, 2.0), std::invalid_argument);
}

TEST_CASE("band is invariant under permutation of the input order") {
  const auto s = make_sample(50, 23);
  // same observations fed in reverse order
  std::vector<std::pair<double, int>> rev;
  for (std::size_t i = s.n(); i-- > 0;)
    rev.emplace_back(s.times()[i], s.indicators()[i]);
  const auto s2 = CurrentStatusSample::from_pairs(rev);
  BootstrapConfig cfg;
  cfg.replications = 60;
  cfg.seed = 777;
  const std::vector<double> grid{0.8, 1.2};
  const auto b1 = ci_type1(s, grid, cfg, 2.0);
  const auto b2 = ci_type1(s2, grid, cfg, 2.0);
  CHECK(b1.lower == b2.lower);
  CHECK(b1.upper == b2.upper);
}

TEST_CASE("ci_type2 shifts the band by the bias") {
  const auto s = make_sample(70, 29);
  BootstrapConfig cfg;
  cfg.replications = 80;
  cfg.seed = 31;
  const std::vector<double> grid{0.7, 1.0, 1.3};
  const auto plain = ci_type1(s, grid, cfg, 2.0);
  const auto zero = ci_type2(s, grid, cfg, 2.0, [](double) { return 0.0; });
  CHECK(plain.lower == zero.lower);
  CHECK(plain.upper == zero.upper);

  const double c = 0.01;
  const auto shifted = ci_type2(s, grid, cfg, 2.0, [&](double) { return c; });
  for (std::size_t k = 0; k < grid.size(); ++k) {
    // both endpoints move by -c wherever the clamp at [0,1] is inactive
    if (plain.lower[k] > c && plain.upper[k] < 1.0) {
      CHECK(shifted.lower[k] == Approx(plain.lower[k] - c).margin(1e-12));
      CHECK(shifted.upper[k] == Approx(plain.upper[k] - c).margin(1e-12));
    }
  }
  CHECK(shifted.method == "SMLE-boot-biascorr");
}

TEST_CASE("density ratio band") {
  Rng rng(37);
  sim::DesignSpec spec;
  spec.model = sim::Model::current_duration;
  spec.truth = sim::Truth::exponential1;
  spec.n = 150;
  auto raw = sim::gen_current_duration(spec, rng);
  // truncate to a finite window as in the current-duration analysis
  for (auto& x : raw) x = std::min(x, 5.9);
  BootstrapConfig cfg;
  cfg.replications = 80;
  cfg.seed = 99;
  const std::vector<double> grid{0.0, 0.5, 1.5};
  const auto band = density_ratio_ci(raw, grid, cfg, 6.0);
  CHECK(band.method == "density-ratio");
  // at t = 0 the difference statistic is identically zero
  CHECK(band.estimate[0] == Approx(1.0).margin(1e-12));
  CHECK(band.lower[0] == Approx(1.0).margin(1e-12));
  CHECK(band.upper[0] == Approx(1.0).margin(1e-12));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(band.lower[k] <= band.estimate[k] + 1e-12);
    CHECK(band.estimate[k] <= band.upper[k] + 1e-12);
  }
  // determinism
  const auto band2 = density_ratio_ci(raw, grid, cfg, 6.0);
  CHECK(band.lower == band2.lower);
  CHECK(band.upper == band2.upper);
}

TEST_CASE("bootstrap config validation") {
  BootstrapConfig cfg;
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BootstrapConfig{};
  cfg.level = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BootstrapConfig{};
  cfg.tightened_alpha = 0.2; // > 1 - level
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BootstrapConfig{};
  cfg.tightened_alpha = 0.04;
  CHECK_NOTHROW(cfg.validate());
}
