#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pchaos {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 95% confidence half-width of the slope
  std::size_t points = 0;
};

// Least-squares slope of log y against log x.
SlopeFit slope_fit(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);

// Sup-distance between the empirical CDF of `samples` and N(0, reference_variance).
double ks_statistic(std::span<const double> samples, double reference_variance);

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;  // jackknife
  double skewness = 0.0;
  double kurtosis = 0.0;
  double m3 = 0.0;  // central
  double m4 = 0.0;  // central
  double raw4 = 0.0;
  double raw4_se = 0.0;
};

Moments summarize_moments(std::span<const double> values);

struct Covariance {
  double covariance = 0.0;
  double se = 0.0;
  double correlation = 0.0;
};

Covariance covariance(std::span<const double> x, std::span<const double> y);

enum class TargetKind { Mean, Variance, RawFourthMoment, KsBelow };

struct Target {
  std::string label;
  TargetKind kind = TargetKind::Variance;
  double value = 0.0;
  double tolerance = 0.0;
};

struct TargetResult {
  Target target;
  double estimate = 0.0;
  double se = 0.0;
  bool within_tolerance = false;
  bool within_3se = false;
  bool pass = false;
};

TargetResult judge(const Target& t, const Moments& m, double ks);

struct ExperimentReport {
  std::string name;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  Moments moments;
  double ks = 0.0;
  double ks_reference_variance = 1.0;
  std::vector<TargetResult> targets;
  std::map<std::string, double> info;
  double wall_seconds = 0.0;
  std::vector<double> values;

  bool pass() const;
};

struct ReplicationContext {
  std::size_t index = 0;
  std::uint64_t seed = 0;
};

class ReplicationError : public std::runtime_error {
 public:
  ReplicationError(std::size_t index, std::uint64_t seed, const std::string& what);
  std::size_t index() const { return index_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t index_;
  std::uint64_t seed_;
};

using Statistic = std::function<double(const ReplicationContext&)>;
using VectorStatistic = std::function<std::vector<double>(const ReplicationContext&)>;

// Runs `stat` for replications 0..R-1 and returns one column per output
// component, in replication order. Each replication sees the seed
// derive_seed(master_seed, index), whatever worker runs it.
std::vector<std::vector<double>> run_replications(const VectorStatistic& stat, std::size_t width, std::size_t R,
                                                  std::uint64_t master_seed, unsigned workers);

ExperimentReport summarize(const std::string& name, std::vector<double> values, std::uint64_t master_seed,
                           unsigned workers, const std::vector<Target>& targets, double ks_reference_variance);

ExperimentReport run_experiment(const std::string& name, const Statistic& stat, std::size_t R,
                                std::uint64_t master_seed, const std::vector<Target>& targets,
                                unsigned workers = 1, double ks_reference_variance = 0.0);

nlohmann::json to_json(const ExperimentReport& r, bool include_wall_time = true);
void write_replications_csv(std::ostream& out, std::span<const double> values);

}  // namespace pchaos
