#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pchaos/mc_harness.hpp"
#include "pchaos/rng.hpp"

using namespace pchaos;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double phi_inverse(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> normals(std::uint64_t seed, std::size_t n, double sd = 1.0) {
  Engine g(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(g);
  return v;
}

}  // namespace

TEST_SUITE("mc_harness") {
  TEST_CASE("seed derivation is stable and distinct") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 5) != derive_seed(2, 5));
  }

  TEST_CASE("normal CDF accuracy") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-13));
    CHECK(std::abs(normal_cdf(-8.0) - 6.220960574271785e-16) < 1e-25);
  }

  TEST_CASE("KS distance examples") {
    std::vector<double> zeros(1000, 0.0);
    CHECK(ks_statistic(zeros, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (std::size_t n : {10u, 100u, 1000u}) {
      std::vector<double> q;
      for (std::size_t i = 1; i <= n; ++i) q.push_back(phi_inverse((i - 0.5) / static_cast<double>(n)));
      CHECK(ks_statistic(q, 1.0) == doctest::Approx(0.5 / static_cast<double>(n)).epsilon(1e-9));
    }
  }

  TEST_CASE("KS rejects a doubled variance near the exact sup-gap") {
    double gap = 0.0;
    for (double x = 0.0; x <= 5.0; x += 1e-5) gap = std::max(gap, std::abs(phi(x / std::sqrt(2.0)) - phi(x)));
    CHECK(gap == doctest::Approx(0.0816).epsilon(2e-3));
    const auto v = normals(3, 10000, std::sqrt(2.0));
    const double ks = ks_statistic(v, 1.0);
    CHECK(std::abs(ks - gap) < 0.02);
    CHECK(ks > 1.63 / std::sqrt(10000.0));
  }

  TEST_CASE("KS of exact Gaussian samples stays below the 1% critical value") {
    const std::size_t R = 100000;
    int below = 0;
    for (std::uint64_t s = 0; s < 40; ++s)
      if (ks_statistic(normals(1000 + s, R), 1.0) < 1.63 / std::sqrt(static_cast<double>(R))) ++below;
    CHECK(below >= 38);
  }

  TEST_CASE("log-log slope fit") {
    std::vector<double> x{1, 2, 4, 8, 16, 32}, inv, root;
    for (double v : x) {
      inv.push_back(3.0 / v);
      root.push_back(3.0 / std::sqrt(v));
    }
    CHECK(slope_fit(x, inv).slope == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(slope_fit(x, inv).half_width < 1e-10);
    CHECK(slope_fit(x, root).slope == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK_THROWS(slope_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
    CHECK_THROWS(slope_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 2}));
  }

  TEST_CASE("moment summary matches direct formulas") {
    const auto v = normals(5, 500);
    const Moments m = summarize_moments(v);
    CHECK(m.mean == doctest::Approx(oracle::mean(v)).epsilon(1e-13));
    CHECK(m.variance == doctest::Approx(oracle::variance(v)).epsilon(1e-12));
    std::vector<double> loo;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::vector<double> w = v;
      w.erase(w.begin() + static_cast<long>(i));
      loo.push_back(oracle::variance(w));
    }
    const double n = static_cast<double>(v.size());
    const double lm = oracle::mean(loo);
    double s = 0.0;
    for (double x : loo) s += (x - lm) * (x - lm);
    CHECK(m.variance_se == doctest::Approx(std::sqrt((n - 1.0) / n * s)).epsilon(1e-9));
    const Moments z = summarize_moments(std::vector<double>(200, 0.0));
    CHECK(z.mean == 0.0);
    CHECK(z.variance == 0.0);
  }

  TEST_CASE("covariance of independent and identical columns") {
    const auto a = normals(6, 20000), b = normals(7, 20000);
    const Covariance ind = covariance(a, b);
    CHECK(std::abs(ind.covariance) < 4.0 * ind.se);
    CHECK(covariance(a, a).correlation == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("target judgement needs tolerance and three standard errors") {
    Moments m;
    m.variance = 4.1;
    m.variance_se = 0.05;
    CHECK(judge({"v", TargetKind::Variance, 4.0, 0.3}, m, 0.0).pass);
    CHECK_FALSE(judge({"v", TargetKind::Variance, 4.0, 0.05}, m, 0.0).pass);
    m.variance_se = 0.01;
    CHECK_FALSE(judge({"v", TargetKind::Variance, 4.0, 0.3}, m, 0.0).pass);
    CHECK(judge({"ks", TargetKind::KsBelow, 0.03, 0.0}, m, 0.01).pass);
    CHECK_FALSE(judge({"ks", TargetKind::KsBelow, 0.03, 0.0}, m, 0.04).pass);
  }

  TEST_CASE("experiments are reproducible for any worker count") {
    auto stat = [](const ReplicationContext& ctx) {
      Engine g(ctx.seed);
      std::normal_distribution<double> d;
      return d(g);
    };
    const auto one = run_experiment("n", stat, 1000, 42, {{"var", TargetKind::Variance, 1.0, 0.2}}, 1);
    const auto three = run_experiment("n", stat, 1000, 42, {{"var", TargetKind::Variance, 1.0, 0.2}}, 3);
    CHECK(one.values == three.values);
    auto j1 = to_json(one, false), j3 = to_json(three, false);
    j1.erase("workers");
    j3.erase("workers");
    CHECK(j1.dump() == j3.dump());
    CHECK(one.pass());
    CHECK_THROWS_AS(run_experiment("n", stat, 50, 42, {}, 1), std::invalid_argument);
  }

  TEST_CASE("a degenerate statistic is summarized exactly") {
    const auto r = run_experiment("zero", [](const ReplicationContext&) { return 0.0; }, 200, 1, {}, 2);
    CHECK(r.moments.mean == 0.0);
    CHECK(r.moments.variance == 0.0);
    CHECK(r.ks == doctest::Approx(0.5));
  }

  TEST_CASE("the lowest failing replication is reported") {
    auto stat = [](const ReplicationContext& ctx) -> double {
      if (ctx.index == 137 || ctx.index == 611) throw std::runtime_error("boom");
      return 1.0;
    };
    try {
      run_experiment("bad", stat, 1000, 9, {}, 4);
      FAIL("expected a replication error");
    } catch (const ReplicationError& e) {
      CHECK(e.index() == 137);
      CHECK(e.seed() == derive_seed(9, 137));
    }
  }

  TEST_CASE("report serialization") {
    const auto r = run_experiment("s", [](const ReplicationContext& c) { return static_cast<double>(c.index % 3); }, 120, 5,
                                  {{"mean", TargetKind::Mean, 1.0, 0.1}}, 1);
    const auto j = to_json(r);
    CHECK(j.at("replications") == 120);
    CHECK(j.at("master_seed") == 5);
    CHECK(j.contains("targets"));
    std::ostringstream os;
    write_replications_csv(os, r.values);
    CHECK(os.str().rfind("replication_index,value\n0,0\n1,1\n", 0) == 0);
  }
}
