#include <doctest.h>

#include <sstream>

#include "pchaos/config.hpp"
#include "pchaos/report.hpp"

using namespace pchaos;

TEST_SUITE("config") {
  TEST_CASE("sections, lists and numbers") {
    const auto cfg = IniConfig::parse_string("seed = 7\n[run]\nT = 200\nreps=5000\n[control]\ntype = discrete\nsizes = 1, -1\nweights = 0.5,0.5\n");
    CHECK(cfg.get_int("", "seed", 0) == 7);
    CHECK(cfg.get_double("run", "T", 0.0) == 200.0);
    CHECK(cfg.get_double("run", "missing", 3.5) == 3.5);
    CHECK(cfg.get_list("control", "sizes") == std::vector<double>{1.0, -1.0});
    CHECK_THROWS_AS(cfg.require_double("run", "tau"), ConfigError);
    CHECK_THROWS_AS(IniConfig::parse_string("[run]\nT = abc\n").get_double("run", "T", 0.0), ConfigError);
    CHECK_THROWS_AS(IniConfig::parse_string("[run\nT = 1\n"), ConfigError);
  }

  TEST_CASE("canonical form and hash ignore layout") {
    const auto a = IniConfig::parse_string("[b]\ny = 2\nx = 1\n[a]\nz = 3\n");
    const auto b = IniConfig::parse_string("[a]\nz=3\n\n[b]\nx=1\ny=2\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash_hex().size() == 16);
    auto c = a;
    c.set("a", "z", "4");
    CHECK(c.hash() != a.hash());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }

  TEST_CASE("controls from config") {
    const auto d = control_from_config(IniConfig::parse_string("[control]\ntype = discrete\nsizes = 1\n"));
    CHECK(d.moment(2) == doctest::Approx(1.0));
    const auto g = control_from_config(IniConfig::parse_string("[control]\ntype = generalized_gamma\nsigma=0.3\ngamma=2\nepsilon=0.01\n"));
    CHECK(std::get<GeneralizedGamma>(g.marginal()).sigma == 0.3);
    const auto e = control_from_config(IniConfig::parse_string("[control]\ntype = extended_gamma\ncoeff=1\npower=0.5\n"));
    CHECK(std::get<ExtendedGamma>(e.marginal()).beta(4.0) == doctest::Approx(3.0));
    const auto b = control_from_config(IniConfig::parse_string("[control]\ntype = beta\noffset=0\ncoeff=1\npower=0.5\nfloor=1\n"));
    CHECK(std::get<BetaJumps>(b.marginal()).concentration(0.25) == doctest::Approx(1.0));
    CHECK_THROWS_AS(control_from_config(IniConfig::parse_string("[control]\ntype = cauchy\n")), ConfigError);
    CHECK_THROWS_AS(control_from_config(IniConfig::parse_string("[other]\ntype = discrete\n")), ConfigError);
  }
}

TEST_SUITE("report") {
  TEST_CASE("summary CSV carries provenance and the fixed columns") {
    std::ostringstream os;
    const std::vector<SummaryRow> rows{{200.0, 0.01, 4.02, 0.08, 0.1, 48.0, 0.01, 4.0, true}};
    write_summary_csv(os, rows, Provenance{"00ff", 7, 5000});
    const std::string s = os.str();
    CHECK(s.find("# config_hash = 00ff\n") != std::string::npos);
    CHECK(s.find("# master_seed = 7\n") != std::string::npos);
    CHECK(s.find("T,mean,var,var_se,m3,m4,ks,target,verdict\n200,0.01") != std::string::npos);
    CHECK(s.find(",PASS\n") != std::string::npos);
  }

  TEST_CASE("JSON stamp") {
    const auto j = stamp(nlohmann::json{{"value", 3}}, Provenance{"abc", 9, 100});
    CHECK(j.at("version") == version());
    CHECK(j.at("config_hash") == "abc");
    CHECK(j.at("master_seed") == 9);
    CHECK(j.at("value") == 3);
  }
}
