#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pchaos/hazard.hpp"
#include "pchaos/rng.hpp"

using namespace pchaos;

namespace {

ControlMeasure unit_jumps() { return ControlMeasure::discrete({1.0}, {1.0}); }

PointPattern single(double u, double x) {
  PointPattern p;
  p.atoms = {{u, x}};
  return p;
}

}  // namespace

TEST_SUITE("hazard") {
  TEST_CASE("empty pattern gives zero hazard") {
    const auto m = HazardModel::make(HazardRect{1.0}, unit_jumps(), 10.0);
    PointPattern empty;
    const std::vector<double> t{0.0, 5.0, 10.0};
    for (double h : hazard_path(m, empty, t)) CHECK(h == 0.0);
    CHECK(cumulative_hazard(m, empty, 10.0) == 0.0);
    CHECK(hazard_square_integral(m, empty, 10.0) == 0.0);
  }

  TEST_CASE("single-atom examples") {
    const auto dl = HazardModel::make(HazardDL{}, unit_jumps(), 10.0);
    const std::vector<double> t{0.0, 2.99, 3.0, 7.0};
    const auto h = hazard_path(dl, single(2.0, 3.0), t);
    CHECK(h == std::vector<double>{0.0, 0.0, 2.0, 2.0});
    const auto rect = HazardModel::make(HazardRect{1.0}, unit_jumps(), 10.0);
    CHECK(cumulative_hazard(rect, single(1.0, 0.0), 10.0) == doctest::Approx(1.0));
    CHECK(cumulative_hazard(rect, single(1.0, 0.0), 1.0) == doctest::Approx(1.0));
    CHECK(cumulative_hazard(dl, single(2.0, 3.0), 10.0) == doctest::Approx(14.0));
    const auto ou = HazardModel::make(HazardOU{2.0}, unit_jumps(), 10.0);
    CHECK(cumulative_hazard(ou, single(1.0, 4.0), 10.0) == doctest::Approx(std::sqrt(4.0) * (1.0 - std::exp(-12.0)) / 2.0));
  }

  TEST_CASE("model validation") {
    CHECK_THROWS(HazardModel::make(HazardRect{0.0}, unit_jumps(), 10.0));
    CHECK_THROWS(HazardModel::make(HazardRect{1.0}, ControlMeasure::discrete({1.0, -1.0}, {0.5, 0.5}), 10.0));
    CHECK_THROWS(HazardModel::make(HazardOU{-1.0}, unit_jumps(), 10.0));
  }

  TEST_CASE("Campbell mean of the rectangular hazard") {
    const auto m = HazardModel::make(HazardRect{1.0}, unit_jumps(), 100.0);
    CHECK(hazard_mean(m, 50.0) == doctest::Approx(2.0).epsilon(1e-12));
    const std::vector<double> t{50.0};
    std::vector<double> v;
    for (std::size_t r = 0; r < 20000; ++r) v.push_back(simulate_hazard(m, derive_seed(1, r), t)[0]);
    CHECK(std::abs(oracle::mean(v) - 2.0) < 3.0 * oracle::mean_se(v));
  }

  TEST_CASE("Campbell consistency per control family") {
    struct Case {
      const char* name;
      HazardModel model;
      double t;
    };
    const std::vector<Case> cases{
        {"gg-rect", HazardModel::make(HazardRect{0.5}, ControlMeasure::generalized_gamma(0.5, 1.0, 1e-3, {}), 10.0), 5.0},
        {"eg-rect", HazardModel::make(HazardRect{1.0}, thm7_extended_gamma_control(1e-3), 20.0), 10.0},
        {"beta-rect", HazardModel::make(HazardRect{1.0}, thm7_beta_control(1e-3), 20.0), 0.5},
        {"eg-dl", HazardModel::make(HazardDL{}, thm7_extended_gamma_control(1e-3), 10.0), 6.0},
        {"beta-ou", HazardModel::make(HazardOU{1.5}, thm7_beta_control(1e-3), 10.0), 8.0},
    };
    for (const Case& c : cases) {
      CAPTURE(c.name);
      const std::vector<double> t{c.t};
      std::vector<double> v;
      for (std::size_t r = 0; r < 4000; ++r) v.push_back(simulate_hazard(c.model, derive_seed(2, r), t)[0]);
      CHECK(std::abs(oracle::mean(v) - hazard_mean(c.model, c.t)) < 4.0 * oracle::mean_se(v));
    }
  }

  TEST_CASE("closed-form integrals match fine trapezoid integration") {
    for (const HazardKernel& k : std::vector<HazardKernel>{HazardRect{1.0}, HazardDL{}, HazardOU{0.7}}) {
      CAPTURE(describe(k));
      const auto m = HazardModel::make(k, ControlMeasure::generalized_gamma(0.5, 1.0, 1e-2, {}), 20.0);
      const auto p = sample_hazard_pattern(m, 31);
      const double h = cumulative_hazard(m, p, 20.0);
      const double h2 = hazard_square_integral(m, p, 20.0);
      CHECK(std::abs(cumulative_hazard_trapezoid(m, p, 20.0, 4000000) - h) / h < 1e-6);
      CHECK(std::abs(hazard_square_trapezoid(m, p, 20.0, 4000000) - h2) / h2 < 1e-6);
    }
  }

  TEST_CASE("paths are nonnegative and the cumulative hazard grows") {
    const auto m = HazardModel::make(HazardRect{1.0}, thm7_extended_gamma_control(1e-3), 30.0);
    const auto p = sample_hazard_pattern(m, 4);
    std::vector<double> t;
    for (int i = 0; i <= 300; ++i) t.push_back(0.1 * i);
    for (double h : hazard_path(m, p, t)) CHECK(h >= 0.0);
    double prev = 0.0;
    for (double s : t) {
      const double c = cumulative_hazard(m, p, s);
      CHECK(c >= prev);
      prev = c;
    }
  }

  TEST_CASE("cumulative hazard moments") {
    const auto m = HazardModel::make(HazardRect{1.0}, unit_jumps(), 200.0);
    const HazardMoments hm = cumulative_hazard_moments(m, 200.0);
    CHECK(hm.mean == doctest::Approx(400.0).epsilon(1e-12));
    CHECK(hm.variance == doctest::Approx(4.0 * 200.0 - 8.0 / 3.0).epsilon(1e-12));
    std::vector<double> v;
    for (std::size_t r = 0; r < 5000; ++r) v.push_back(cumulative_hazard(m, derive_seed(3, r), 200.0));
    CHECK(std::abs(oracle::mean(v) - hm.mean) < 3.0 * oracle::mean_se(v));
    CHECK(std::abs(oracle::variance(v) - hm.variance) < 4.0 * oracle::variance_se(v));
  }

  TEST_CASE("Theorem 8 constants by substitution") {
    const auto m = HazardModel::make(HazardRect{1.0}, unit_jumps(), 400.0);
    const Thm8Constants k = thm8_constants(m);
    CHECK(k.centering == doctest::Approx(6.0));
    CHECK(k.c1_printed == doctest::Approx(140.0 / 3.0));
    CHECK(k.c1 == doctest::Approx(332.0 / 3.0));
    CHECK(k.c2 == doctest::Approx(44.0 / 3.0));
    const auto dl = HazardModel::make(HazardDL{}, unit_jumps(), 400.0);
    CHECK_THROWS(thm8_constants(dl));
  }

  TEST_CASE("Theorem 7 case checks") {
    const auto m1 = HazardModel::make(HazardRect{1.0}, unit_jumps(), 200.0);
    const Thm7Spec s1 = thm7_spec(m1, Thm7Case::Interior);
    CHECK(s1.centering == doctest::Approx(400.0));
    CHECK(s1.scale == doctest::Approx(std::sqrt(200.0)));
    CHECK(s1.target_variance == doctest::Approx(4.0));
    CHECK_THROWS(thm7_spec(m1, Thm7Case::ExtendedGamma));
    CHECK_THROWS(thm7_spec(m1, Thm7Case::Beta));
    const auto m2 = HazardModel::make(HazardRect{1.0}, thm7_extended_gamma_control(), 100.0);
    CHECK(thm7_spec(m2, Thm7Case::ExtendedGamma).centering == doctest::Approx(40.0));
    CHECK_THROWS(thm7_spec(HazardModel::make(HazardRect{2.0}, thm7_extended_gamma_control(), 100.0), Thm7Case::ExtendedGamma));
    const auto m3 = HazardModel::make(HazardRect{1.0}, thm7_beta_control(), 100.0);
    CHECK(thm7_spec(m3, Thm7Case::Beta).scale == doctest::Approx(std::pow(100.0, 0.25)));
    CHECK_THROWS(thm7_spec(m3, Thm7Case::ExtendedGamma));
  }

  TEST_CASE("case 2 variance ratio grows with T") {
    double previous = 0.0;
    for (double t : {1e2, 1e3, 1e4}) {
      const auto m = HazardModel::make(HazardRect{1.0}, thm7_extended_gamma_control(), t);
      const double ratio = cumulative_hazard_moments(m, t).variance / std::log(t);
      CHECK(ratio > previous);
      previous = ratio;
    }
  }
}
