#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pchaos/chaos.hpp"
#include "pchaos/hazard.hpp"
#include "pchaos/mc_harness.hpp"
#include "pchaos/ou_levy.hpp"

namespace pchaos {

struct RunOptions {
  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// A group of Monte Carlo reports for one parameter point, plus exact side values.
struct ExperimentSuite {
  std::string name;
  double T = 0.0;
  std::vector<ExperimentReport> reports;
  std::vector<TargetResult> extra_checks;  // checks that are not single-report targets
  nlohmann::json info = nlohmann::json::object();

  bool pass() const;
  const ExperimentReport& primary() const { return reports.front(); }
};

nlohmann::json to_json(const ExperimentSuite& s, bool include_wall_time = true);

// I2 of BlockKernel(n): fourth moment 3 + 37/n (+-0.15) and KS < 0.02 as stated.
ExperimentSuite run_block_experiment(int n, const RunOptions& opt);

enum class OUTheorem { Linear = 4, Quadratic = 5, SampleVariance = 6 };
ExperimentSuite run_ou_experiment(OUTheorem which, double lambda, double horizon, const ControlMeasure& control,
                                  const RunOptions& opt);

ExperimentSuite run_thm7_experiment(Thm7Case which, double tau, double horizon, const ControlMeasure& control,
                                    const RunOptions& opt);
ExperimentSuite run_thm8_experiment(Thm8Variant variant, double tau, double horizon, const ControlMeasure& control,
                                    const RunOptions& opt);

// Named kernel sequences for the CLT criteria.
struct CriterionFamily {
  std::string name;
  bool single = false;  // first-chaos family
  ControlMeasure control;
  std::function<Kernel(double)> element;
  std::vector<double> default_indices;
};

std::vector<std::string> criterion_family_names();
CriterionFamily criterion_family(const std::string& name, double lambda = 1.0);

struct CriterionOutcome {
  Verdict verdict = Verdict::Undecided;
  nlohmann::json report;
};
CriterionOutcome run_criterion(const CriterionFamily& family, const std::vector<double>& indices);

}  // namespace pchaos
