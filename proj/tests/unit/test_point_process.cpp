#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "pchaos/mc_harness.hpp"
#include "pchaos/point_process.hpp"
#include "pchaos/rng.hpp"

using namespace pchaos;

namespace {

ControlMeasure symmetric_pm1(Interval time = {}) { return ControlMeasure::discrete({1.0, -1.0}, {0.5, 0.5}, time); }

// int_eps^inf u^i u^{-1-sigma} e^{-gamma u} du / Gamma(1 - sigma) in log coordinates.
double gg_moment_oracle(double sigma, double gamma, double eps, int i) {
  auto f = [&](double s) {
    const double u = std::exp(s);
    return std::exp((i - sigma) * s - gamma * u);
  };
  return oracle::simpson(f, std::log(eps), std::log(80.0 / gamma), 400000) / std::tgamma(1.0 - sigma);
}

}  // namespace

TEST_SUITE("point_process") {
  TEST_CASE("interval and window algebra") {
    Interval a{0.0, 2.0}, b{1.0, 3.0};
    CHECK(a.intersect(b) == Interval{1.0, 2.0});
    CHECK(a.contains(0.0));
    CHECK_FALSE(a.contains(2.0));
    CHECK(Interval{}.covers(a));
    CHECK(Interval{3.0, 1.0}.empty());
    Window w{{0.0, 1.0}, {0.0, 5.0}};
    CHECK(w.contains(Atom{0.5, 4.9}));
    CHECK_FALSE(w.contains(Atom{1.0, 1.0}));
  }

  TEST_CASE("discrete control mass is the product of finite masses") {
    const auto c = symmetric_pm1();
    CHECK(measure_of(c, Window{{}, {0.0, 4.0}}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(measure_of(c, Window{{}, {2.0, 2.0}}) == 0.0);
    CHECK(measure_of(c, Window{{0.0, kInf}, {0.0, 4.0}}) == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("generalized gamma mass and moments match log-space Simpson") {
    const auto c = ControlMeasure::generalized_gamma(0.5, 1.0, 0.1, {0.0, 1.0});
    CHECK(measure_of(c, Window{{}, {0.0, 1.0}}) == doctest::Approx(gg_moment_oracle(0.5, 1.0, 0.1, 0)).epsilon(1e-9));
    for (int i = 0; i <= 4; ++i) {
      CAPTURE(i);
      CHECK(c.moment(i) == doctest::Approx(gg_moment_oracle(0.5, 1.0, 0.1, i)).epsilon(1e-10));
    }
  }

  TEST_CASE("extended gamma mass on a window matches nested Simpson") {
    const double eps = 1e-2;
    const auto c = ControlMeasure::extended_gamma(PowerLaw{1.0, 1.0, 0.5, 0.0}, eps);
    auto inner = [&](double beta) {
      return oracle::simpson([&](double s) { return std::exp(-beta * std::exp(s)); }, std::log(eps),
                             std::log(60.0 / beta), 4000);
    };
    // x = y^2 removes the square-root kink at the origin.
    const double expected = oracle::simpson([&](double y) { return 2.0 * y * inner(1.0 + y); }, 0.0, 2.0, 400);
    CHECK(measure_of(c, Window{{}, {0.0, 4.0}}) == doctest::Approx(expected).epsilon(1e-8));
  }

  TEST_CASE("beta control mass on a window matches the digamma form") {
    const double eps = 1e-3;
    const auto c = ControlMeasure::beta(PowerLaw{0.0, 1.0, 0.5, 1.0}, eps);
    // int_eps^1 c u^{-1}(1-u)^{c-1} du = c [-log eps - psi(c) - gamma_E - sum_k C(c-1,k)(-eps)^k / k]
    auto inner = [&](double conc) {
      double tail = 0.0, term = 1.0;
      for (int k = 1; k < 60; ++k) {
        term *= (k - 1 - (conc - 1.0)) * eps / k;
        tail += term / k;
      }
      return conc * (-std::log(eps) - oracle::digamma(conc) - 0.57721566490153286 - tail);
    };
    CHECK(c.jump_mass(0.5, Interval{}) == doctest::Approx(inner(1.0)).epsilon(1e-12));
    CHECK(c.jump_mass(6.25, Interval{}) == doctest::Approx(inner(2.5)).epsilon(1e-12));
    CHECK(c.jump_mass(400.0, Interval{}) == doctest::Approx(inner(20.0)).epsilon(1e-12));
    const double flat = std::log(1.0 / eps);
    const double rest = oracle::simpson([&](double y) { return 2.0 * y * inner(y); }, 1.0, 3.0, 2000);
    CHECK(measure_of(c, Window{{}, {0.0, 9.0}}) == doctest::Approx(flat + rest).epsilon(1e-10));
  }

  TEST_CASE("infinite mass is reported") {
    const auto gg = ControlMeasure::generalized_gamma(0.5, 1.0, 0.0, {0.0, 1.0});
    CHECK_THROWS_AS(measure_of(gg, Window{{}, {0.0, 1.0}}), InfiniteMassError);
    CHECK_THROWS_AS(measure_of(symmetric_pm1(), Window{{}, {0.0, kInf}}), InfiniteMassError);
    CHECK_THROWS_AS(sample_pattern(gg, Window{{}, {0.0, 1.0}}, 1), InfiniteMassError);
  }

  TEST_CASE("zero-mass window samples an empty pattern") {
    const auto p = sample_pattern(symmetric_pm1({0.0, 1.0}), Window{{}, {2.0, 3.0}}, 9);
    CHECK(p.atoms.empty());
    CHECK(p.total_mass == 0.0);
  }

  TEST_CASE("sampling is seed-deterministic and stays in the window") {
    const auto c = ControlMeasure::generalized_gamma(0.5, 1.0, 0.05, {});
    const Window w{{}, {-1.0, 3.0}};
    const auto a = sample_pattern(c, w, 123), b = sample_pattern(c, w, 123), d = sample_pattern(c, w, 124);
    CHECK(a.atoms == b.atoms);
    CHECK_FALSE(a.atoms == d.atoms);
    for (const Atom& z : a.atoms) CHECK(w.intersect(Window{c.jump_support(), c.time_support()}).contains(z));
  }

  TEST_CASE("counts are Poisson with independent disjoint regions") {
    const auto c = symmetric_pm1();
    const Window w{{}, {0.0, 4.0}}, left{{}, {0.0, 2.0}}, right{{}, {2.0, 4.0}};
    const std::size_t R = 100000;
    std::vector<double> n(R), nl(R), nr(R), comp(R);
    for (std::size_t r = 0; r < R; ++r) {
      const auto p = sample_pattern(c, w, derive_seed(77, r));
      n[r] = static_cast<double>(p.atoms.size());
      nl[r] = static_cast<double>(count_in(p, left));
      nr[r] = static_cast<double>(count_in(p, right));
      comp[r] = compensated_count(p, left, c);
    }
    CHECK(std::abs(oracle::mean(n) - 4.0) < 0.05);
    CHECK(std::abs(oracle::variance(n) - 4.0) < 0.1);
    const Covariance cv = covariance(nl, nr);
    CHECK(std::abs(cv.covariance) < 3.0 * cv.se);
    CHECK(std::abs(oracle::mean(comp)) < 3.0 * oracle::mean_se(comp));
    CHECK(std::abs(oracle::variance(comp) - 2.0) < 3.0 * oracle::variance_se(comp));
  }

  TEST_CASE("generalized gamma jump sizes follow the normalized jump law") {
    const auto c = ControlMeasure::generalized_gamma(0.5, 1.0, 0.1, {});
    const Window w{{}, {0.0, 50.0}};
    std::vector<double> u, u2;
    for (std::size_t r = 0; r < 400; ++r)
      for (const Atom& a : sample_pattern(c, w, derive_seed(5, r)).atoms) {
        u.push_back(a.u);
        u2.push_back(a.u * a.u);
      }
    const double k0 = c.moment(0);
    CHECK(std::abs(oracle::mean(u) - c.moment(1) / k0) < 4.0 * oracle::mean_se(u));
    CHECK(std::abs(oracle::mean(u2) - c.moment(2) / k0) < 4.0 * oracle::mean_se(u2));
  }

  TEST_CASE("non-homogeneous controls sample with the right intensity") {
    SUBCASE("extended gamma counts") {
      const auto c = ControlMeasure::extended_gamma(PowerLaw{1.0, 1.0, 0.5, 0.0}, 1e-2);
      const Window w{{}, {0.0, 30.0}};
      std::vector<double> n;
      for (std::size_t r = 0; r < 2000; ++r) n.push_back(static_cast<double>(sample_pattern(c, w, derive_seed(3, r)).atoms.size()));
      CHECK(std::abs(oracle::mean(n) - measure_of(c, w)) < 4.0 * oracle::mean_se(n));
    }
    SUBCASE("beta jump sums match (1 - eps)^c per unit time") {
      const double eps = 1e-3;
      const auto c = ControlMeasure::beta(PowerLaw{0.0, 1.0, 0.5, 1.0}, eps);
      const Window w{{}, {0.0, 16.0}};
      const double expected = 1.0 * (1.0 - eps) + oracle::simpson([&](double y) { return 2.0 * y * std::pow(1.0 - eps, y); }, 1.0, 4.0, 200);
      std::vector<double> s;
      for (std::size_t r = 0; r < 3000; ++r) {
        double t = 0.0;
        for (const Atom& a : sample_pattern(c, w, derive_seed(4, r)).atoms) t += a.u;
        s.push_back(t);
      }
      CHECK(std::abs(oracle::mean(s) - expected) < 4.0 * oracle::mean_se(s));
    }
  }

  TEST_CASE("compensated count examples") {
    const auto c = symmetric_pm1();
    const Window region{{}, {0.0, 1.0}};
    PointPattern empty{{}, region, 1.0, 0};
    CHECK(compensated_count(empty, region, c) == doctest::Approx(-1.0));
    PointPattern three{{{1.0, 0.1}, {-1.0, 0.5}, {1.0, 0.9}}, region, 1.0, 0};
    CHECK(compensated_count(three, region, c) == doctest::Approx(2.0));
    CHECK_THROWS_AS(compensated_count(three, Window{{}, {0.0, 2.0}}, c), std::invalid_argument);
  }

  TEST_CASE("pattern CSV round trip") {
    const auto p = sample_pattern(symmetric_pm1(), Window{{}, {0.0, 5.0}}, 11);
    std::stringstream ss;
    write_pattern_csv(ss, p);
    CHECK(ss.str().rfind("u,x\n", 0) == 0);
    const auto q = read_pattern_csv(ss);
    CHECK(q.atoms == p.atoms);
  }
}
