#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pchaos/mc_harness.hpp"
#include "pchaos/ou_levy.hpp"
#include "pchaos/rng.hpp"

using namespace pchaos;

namespace {

ControlMeasure symmetric_pm1() { return ControlMeasure::discrete({1.0, -1.0}, {0.5, 0.5}); }

// Two-piece variance integral of the linear statistic with a past of depth L.
double linear_variance_oracle(double lambda, double horizon, double depth) {
  const double e = 1.0 - std::exp(-lambda * horizon);
  const double past = oracle::simpson([&](double x) { return std::pow(std::exp(lambda * x) * e, 2); }, -depth, 0.0, 20000);
  const double now = oracle::simpson([&](double x) { return std::pow(1.0 - std::exp(-lambda * (horizon - x)), 2); }, 0.0,
                                     horizon, 20000);
  return 2.0 / (lambda * horizon) * (past + now);
}

}  // namespace

TEST_SUITE("ou_levy") {
  TEST_CASE("configuration checks") {
    CHECK_NOTHROW(OUConfig::make(1.0, symmetric_pm1(), 10.0));
    CHECK_THROWS_AS(OUConfig::make(1.0, ControlMeasure::discrete({2.0}, {1.0}), 10.0), NormalizationError);
    CHECK_THROWS_AS(OUConfig::make(1.0, symmetric_pm1(), 10.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(OUConfig::make(-1.0, symmetric_pm1(), 10.0), std::invalid_argument);
    const auto cfg = OUConfig::make(2.0, symmetric_pm1(), 5.0);
    CHECK(cfg.depth == doctest::Approx(6.0));
    CHECK(cfg.window().time.lo == -6.0);
    CHECK(cfg.window().time.contains(5.0));
  }

  TEST_CASE("empty pattern gives a zero path") {
    const auto cfg = OUConfig::make(1.0, symmetric_pm1(), 4.0);
    PointPattern empty;
    empty.window = cfg.window();
    const std::vector<double> t{0.0, 1.0, 4.0};
    for (double y : ou_path(cfg, empty, t)) CHECK(y == 0.0);
    CHECK(ou_linear_stat(cfg, empty) == 0.0);
  }

  TEST_CASE("path is a sum of decaying kicks") {
    const auto cfg = OUConfig::make(0.5, symmetric_pm1(), 4.0);
    PointPattern p;
    p.window = cfg.window();
    p.atoms = {{1.0, -1.0}, {-1.0, 2.0}};
    const std::vector<double> t{0.0, 3.0};
    const auto y = ou_path(cfg, p, t);
    CHECK(y[0] == doctest::Approx(std::exp(-0.5)));
    CHECK(y[1] == doctest::Approx(std::exp(-2.0) - std::exp(-0.5)));
  }

  TEST_CASE("stationary variance and autocovariance") {
    const auto cfg = OUConfig::make(1.0, symmetric_pm1(), 12.0);
    const std::vector<double> lags{0.5, 1.0, 2.0};
    const std::vector<double> t{6.0, 6.5, 7.0, 8.0};
    const std::size_t R = 10000;
    std::vector<std::vector<double>> y(4, std::vector<double>(R));
    for (std::size_t r = 0; r < R; ++r) {
      const auto v = simulate_ou_path(cfg, derive_seed(12, r), t);
      for (std::size_t k = 0; k < 4; ++k) y[k][r] = v[k];
    }
    CHECK(std::abs(oracle::variance(y[0]) - 1.0) < 4.0 * oracle::variance_se(y[0]));
    for (std::size_t k = 0; k < lags.size(); ++k) {
      const Covariance c = covariance(y[0], y[k + 1]);
      CAPTURE(lags[k]);
      CHECK(std::abs(c.covariance - std::exp(-lags[k])) < 4.0 * c.se);
    }
  }

  TEST_CASE("finite-T linear variance") {
    for (double t : {1.0, 10.0, 100.0}) {
      CAPTURE(t);
      CHECK(linear_stat_variance(1.0, t, 12.0) == doctest::Approx(linear_variance_oracle(1.0, t, 12.0)).epsilon(1e-10));
      CHECK(linear_stat_variance(0.5, t, 24.0) == doctest::Approx(linear_variance_oracle(0.5, t, 24.0)).epsilon(1e-10));
    }
    CHECK(std::abs(linear_stat_variance(1.0, 800.0) / 2.0 - 1.0) < 0.02);
    const auto cfg = OUConfig::make(1.0, symmetric_pm1(), 30.0);
    CHECK(l2_norm_sq(ou_single_kernel(cfg), cfg.control) ==
          doctest::Approx(linear_stat_variance(1.0, 30.0, cfg.depth)).epsilon(1e-10));
  }

  TEST_CASE("linear statistic agrees with the time integral of the path") {
    const auto cfg = OUConfig::make(1.3, ControlMeasure::discrete({2.0, -0.5}, {0.2, 0.4 / 0.25 * 0.5}), 20.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto p = sample_ou_pattern(cfg, s);
      const PathIntegrals pi = ou_path_integrals(cfg, p);
      CHECK(ou_linear_stat(cfg, p) == doctest::Approx(pi.linear / std::sqrt(cfg.horizon)).epsilon(1e-10));
    }
  }

  TEST_CASE("quadratic statistic matches the path square integral") {
    const auto cfg = OUConfig::make(1.0, symmetric_pm1(), 10.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto p = sample_ou_pattern(cfg, s);
      const QuadraticStat q = ou_quadratic_stat(cfg, p);
      const PathIntegrals pi = ou_path_integrals(cfg, p);
      const double direct = std::sqrt(cfg.horizon) * (pi.square / cfg.horizon - 1.0);
      CHECK(q.total == doctest::Approx(direct).epsilon(1e-8));
      CHECK(q.k2 + q.k1 == doctest::Approx(q.total).epsilon(1e-15));
    }
    const auto p = sample_ou_pattern(cfg, 77);
    const double exact = ou_path_integrals(cfg, p).square;
    const double mid = ou_path_square_trapezoid(cfg, p, 8000000);
    const double fine = ou_path_square_trapezoid(cfg, p, 16000000);
    CHECK(std::abs(mid - exact) / exact < 1e-6);
    CHECK(std::abs(fine - exact) / exact < 1e-6);
    CHECK(std::abs(fine - mid) / exact < 1e-6);
  }

  TEST_CASE("sample-variance statistic identity") {
    const auto cfg = OUConfig::make(1.0, symmetric_pm1(), 50.0);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto p = sample_ou_pattern(cfg, s);
      const SampleVarianceStat v = ou_sample_variance_stat(cfg, p);
      const double lin = ou_linear_stat(cfg, p);
      CHECK(v.value == doctest::Approx(ou_quadratic_stat(cfg, p).total - lin * lin / std::sqrt(50.0)).epsilon(1e-14));
      const PathIntegrals pi = ou_path_integrals(cfg, p);
      const double mean = pi.linear / 50.0;
      CHECK(v.value == doctest::Approx(std::sqrt(50.0) * (pi.square / 50.0 - mean * mean - 1.0)).epsilon(1e-8));
    }
  }

  TEST_CASE("exact K2 and K1 variances") {
    const auto cfg = OUConfig::make(1.0, symmetric_pm1(), 200.0);
    CHECK(k2_variance(cfg) == doctest::Approx(2.0 - 1.0 / 200.0).epsilon(1e-9));
    const double lam = 1.0, t = 200.0, l = cfg.depth;
    auto w = [&](double m) { return m <= 0.0 ? -std::expm1(-2.0 * lam * t) * std::exp(2.0 * lam * m) : -std::expm1(-2.0 * lam * (t - m)); };
    const double oracle_k1 = (oracle::simpson([&](double x) { return w(x) * w(x); }, -l, 0.0, 20000) +
                              oracle::simpson([&](double x) { return w(x) * w(x); }, 0.0, t, 200000)) /
                             t;
    CHECK(k1_variance(cfg) == doctest::Approx(oracle_k1).epsilon(1e-10));
  }

  TEST_CASE("quadratic statistic needs finite higher moments") {
    const auto gg = ControlMeasure::generalized_gamma(0.5, 1.0, 1e-3, {});
    const double m2 = gg.moment(2);
    CHECK(m2 > 0.0);
    CHECK_THROWS_AS(OUConfig::make(1.0, gg, 10.0), NormalizationError);
  }
}
