#include "pchaos/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "pchaos/rng.hpp"

namespace pchaos {

SlopeFit slope_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("slope_fit needs equally many x and y values");
  if (x.size() < 3) throw std::invalid_argument("slope_fit needs at least three points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("slope_fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("slope_fit needs distinct x values");
  SlopeFit out;
  out.points = n;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - out.intercept - out.slope * lx[i];
    ssr += r * r;
  }
  const double se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t t(static_cast<double>(n - 2));
  out.half_width = boost::math::quantile(t, 0.975) * se;
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::span<const double> samples, double reference_variance) {
  if (samples.size() < 2) throw std::invalid_argument("KS distance needs at least two samples");
  if (!(reference_variance > 0.0)) throw std::invalid_argument("reference variance must be positive");
  std::vector<double> s(samples.begin(), samples.end());
  for (double v : s)
    if (!std::isfinite(v)) throw std::invalid_argument("KS distance needs finite samples");
  std::sort(s.begin(), s.end());
  const double sd = std::sqrt(reference_variance);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i] / sd);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

Moments summarize_moments(std::span<const double> v) {
  Moments m;
  m.n = v.size();
  if (m.n < 2) throw std::invalid_argument("moments need at least two values");
  const double n = static_cast<double>(m.n);
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / n;
  double s2 = 0.0, s3 = 0.0, s4 = 0.0, r4 = 0.0;
  for (double x : v) {
    const double d = x - m.mean;
    s2 += d * d;
    s3 += d * d * d;
    s4 += d * d * d * d;
    r4 += x * x * x * x;
  }
  m.variance = s2 / (n - 1.0);
  m.mean_se = std::sqrt(m.variance / n);
  m.m3 = s3 / n;
  m.m4 = s4 / n;
  const double pop_var = s2 / n;
  m.skewness = pop_var > 0.0 ? m.m3 / std::pow(pop_var, 1.5) : 0.0;
  m.kurtosis = pop_var > 0.0 ? m.m4 / (pop_var * pop_var) : 0.0;
  m.raw4 = r4 / n;
  double q = 0.0;
  for (double x : v) {
    const double d = x * x * x * x - m.raw4;
    q += d * d;
  }
  m.raw4_se = std::sqrt(q / (n - 1.0) / n);
  if (m.n >= 3) {
    // Leave-one-out variances from the full-sample sums.
    double jsum = 0.0, jsq = 0.0;
    std::vector<double> loo(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
      const double d = v[i] - m.mean;
      loo[i] = (s2 - d * d * n / (n - 1.0)) / (n - 2.0);
      jsum += loo[i];
    }
    const double jmean = jsum / n;
    for (double x : loo) jsq += (x - jmean) * (x - jmean);
    m.variance_se = std::sqrt((n - 1.0) / n * jsq);
  }
  return m;
}

Covariance covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("covariance needs matched samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  Covariance c;
  c.covariance = sxy / (n - 1.0);
  double q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = (x[i] - mx) * (y[i] - my) - sxy / n;
    q += d * d;
  }
  c.se = std::sqrt(q / (n - 1.0) / n);
  c.correlation = sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return c;
}

TargetResult judge(const Target& t, const Moments& m, double ks) {
  TargetResult r{t, 0.0, 0.0, false, false, false};
  switch (t.kind) {
    case TargetKind::Mean:
      r.estimate = m.mean;
      r.se = m.mean_se;
      break;
    case TargetKind::Variance:
      r.estimate = m.variance;
      r.se = m.variance_se;
      break;
    case TargetKind::RawFourthMoment:
      r.estimate = m.raw4;
      r.se = m.raw4_se;
      break;
    case TargetKind::KsBelow:
      r.estimate = ks;
      r.within_tolerance = ks < t.value;
      r.within_3se = true;
      r.pass = r.within_tolerance;
      return r;
  }
  const double gap = std::abs(r.estimate - t.value);
  r.within_tolerance = gap <= t.tolerance;
  r.within_3se = gap <= 3.0 * r.se;
  r.pass = r.within_tolerance && r.within_3se;
  return r;
}

bool ExperimentReport::pass() const {
  return std::all_of(targets.begin(), targets.end(), [](const TargetResult& t) { return t.pass; });
}

ReplicationError::ReplicationError(std::size_t index, std::uint64_t seed, const std::string& what)
    : std::runtime_error("replication " + std::to_string(index) + " (seed " + std::to_string(seed) + ") failed: " + what),
      index_(index),
      seed_(seed) {}

std::vector<std::vector<double>> run_replications(const VectorStatistic& stat, std::size_t width, std::size_t R,
                                                  std::uint64_t master_seed, unsigned workers) {
  std::vector<std::vector<double>> cols(width, std::vector<double>(R, 0.0));
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(R, 1))));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<std::size_t> err_index;
  std::string err_what;
  constexpr std::size_t kChunk = 16;

  auto work = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(kChunk);
      if (start >= R) return;
      for (std::size_t i = start; i < std::min(R, start + kChunk); ++i) {
        const ReplicationContext ctx{i, derive_seed(master_seed, i)};
        try {
          const std::vector<double> v = stat(ctx);
          if (v.size() != width) throw std::logic_error("statistic returned the wrong number of components");
          for (std::size_t c = 0; c < width; ++c) cols[c][i] = v[c];
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mu);
          if (!err_index || i < *err_index) {
            err_index = i;
            err_what = e.what();
          }
          return;
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err_index) throw ReplicationError(*err_index, derive_seed(master_seed, *err_index), err_what);
  return cols;
}

ExperimentReport summarize(const std::string& name, std::vector<double> values, std::uint64_t master_seed,
                           unsigned workers, const std::vector<Target>& targets, double ks_reference_variance) {
  ExperimentReport r;
  r.name = name;
  r.replications = values.size();
  r.master_seed = master_seed;
  r.workers = workers;
  r.moments = summarize_moments(values);
  if (!(ks_reference_variance > 0.0)) {
    ks_reference_variance = 1.0;
    for (const Target& t : targets)
      if (t.kind == TargetKind::Variance) {
        ks_reference_variance = t.value;
        break;
      }
  }
  r.ks_reference_variance = ks_reference_variance;
  r.ks = ks_statistic(values, ks_reference_variance);
  for (const Target& t : targets) r.targets.push_back(judge(t, r.moments, r.ks));
  r.values = std::move(values);
  return r;
}

ExperimentReport run_experiment(const std::string& name, const Statistic& stat, std::size_t R,
                                std::uint64_t master_seed, const std::vector<Target>& targets, unsigned workers,
                                double ks_reference_variance) {
  if (R < 100) throw std::invalid_argument("an experiment needs at least 100 replications");
  const auto t0 = std::chrono::steady_clock::now();
  auto cols = run_replications([&](const ReplicationContext& c) { return std::vector<double>{stat(c)}; }, 1, R,
                               master_seed, workers);
  ExperimentReport r = summarize(name, std::move(cols[0]), master_seed, workers, targets, ks_reference_variance);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

const char* kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::Mean: return "mean";
    case TargetKind::Variance: return "variance";
    case TargetKind::RawFourthMoment: return "fourth_moment";
    case TargetKind::KsBelow: return "ks_below";
  }
  return "?";
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& r, bool include_wall_time) {
  nlohmann::json j;
  j["statistic"] = r.name;
  j["replications"] = r.replications;
  j["master_seed"] = r.master_seed;
  const Moments& m = r.moments;
  j["mean"] = m.mean;
  j["mean_se"] = m.mean_se;
  j["variance"] = m.variance;
  j["variance_se"] = m.variance_se;
  j["skewness"] = m.skewness;
  j["kurtosis"] = m.kurtosis;
  j["m3"] = m.m3;
  j["m4"] = m.m4;
  j["fourth_moment"] = m.raw4;
  j["fourth_moment_se"] = m.raw4_se;
  j["ks"] = r.ks;
  j["ks_reference_variance"] = r.ks_reference_variance;
  auto& targets = j["targets"] = nlohmann::json::array();
  for (const TargetResult& t : r.targets)
    targets.push_back({{"label", t.target.label},
                       {"kind", kind_name(t.target.kind)},
                       {"target", t.target.value},
                       {"tolerance", t.target.tolerance},
                       {"estimate", t.estimate},
                       {"se", t.se},
                       {"within_tolerance", t.within_tolerance},
                       {"within_3se", t.within_3se},
                       {"verdict", t.pass ? "PASS" : "FAIL"}});
  j["info"] = r.info;
  j["verdict"] = r.pass() ? "PASS" : "FAIL";
  if (include_wall_time) j["wall_seconds"] = r.wall_seconds;
  return j;
}

void write_replications_csv(std::ostream& out, std::span<const double> values) {
  out << "replication_index,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
}

}  // namespace pchaos
