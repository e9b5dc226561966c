#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pchaos/contractions.hpp"
#include "pchaos/kernels.hpp"
#include "pchaos/point_process.hpp"

namespace pchaos {

// Z = c + I1(g) + I2(f).
struct ChaosValue {
  double c = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double total = 0.0;

  static ChaosValue make(double c, double i1, double i2) { return {c, i1, i2, c + i1 + i2}; }
};

class SupportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// sum_i g(z_i) - int g dmu.
double eval_I1(const Kernel& g, const PointPattern& pattern, const ControlMeasure& control);

// sum_{i != j} f(z_i, z_j) - sum_i int (f(z_i, .) + f(., z_i)) dmu + int int f dmu^2.
double eval_I2(const Kernel& f, const PointPattern& pattern, const ControlMeasure& control);

// n^{-1/2} sum_j 2^{-1/2} (N(B_j)^2 - N(B_j) - 1) from compensated block counts.
double charlier_block_oracle(const PointPattern& pattern, const std::vector<Window>& blocks,
                             const ControlMeasure& control);

struct FourthMoment {
  double norm2_doubled = 0.0;  // 2 ||f||^2
  double n11 = 0.0;
  double n21 = 0.0;
  double n10 = 0.0;
  double value = 0.0;             // 3 a^2 + 48 n11 + 96 n10 + 16 n21
  double value_from_orders = 0.0; // sum of the chaos-order contributions
  // Contributions of I4, I3, I2, I1 and the constant to E[(F^2 - 2 I2(f^2))^2].
  double order4 = 0.0, order3 = 0.0, order2 = 0.0, order1 = 0.0, order0 = 0.0;
  double discrepancy = 0.0;
};

FourthMoment fourth_moment_breakdown(const Kernel& f, const ControlMeasure& control);
double fourth_moment_chaos(const Kernel& f, const ControlMeasure& control);

enum class Verdict { Pass, Fail, Undecided };
std::string to_string(Verdict v);

struct CriterionReport {
  double index = 0.0;
  double norm2_doubled = 0.0;
  double l4 = 0.0;
  double n11 = 0.0;
  double n21 = 0.0;
  double n10 = 0.0;
  double fourth_moment_chaos = 0.0;
  double integrability = 0.0;  // int (int f(z, .)^4 dmu)^{1/2} dmu(z), NaN when unavailable
  bool integrable = true;
  std::string note;
};

// Audit of one sequence quantity against its limit.
struct LimitCheck {
  std::string name;
  double limit = 0.0;
  bool to_zero = false;
  double initial = 0.0;
  double last = 0.0;
  std::optional<double> slope;
  double slope_half_width = 0.0;
  bool pass = false;
};

struct CriterionSequence {
  std::vector<CriterionReport> elements;
  std::vector<LimitCheck> checks;
  Verdict verdict = Verdict::Undecided;
};

CriterionReport criterion_report(const Kernel& f, double index, const ControlMeasure& control);

// Sequence verdict for (N-ii) 2||f||^2 -> 1, (N-iii) int f^4 -> 0 and the
// contraction conditions n11 -> 0, n21 -> 0.
CriterionSequence clt_criterion(const std::vector<Kernel>& seq, const std::vector<double>& indices,
                                const ControlMeasure& control);

struct SingleCltReport {
  std::vector<double> indices;
  std::vector<double> norm2;
  std::vector<double> cube;
  std::vector<LimitCheck> checks;
  Verdict verdict = Verdict::Undecided;
};

// ||g||^2 -> 1 and int |g|^3 -> 0.
SingleCltReport single_clt_check(const std::vector<Kernel>& seq, const std::vector<double>& indices,
                                 const ControlMeasure& control);

// "-> c": last within 5% of c and the fitted slope of |v - c| negative.
LimitCheck limit_to_constant(const std::string& name, const std::vector<double>& index,
                             const std::vector<double>& values, double c);
// "-> 0": last < ratio * initial and fitted slope below max_slope.
LimitCheck limit_to_zero(const std::string& name, const std::vector<double>& index, const std::vector<double>& values,
                         double ratio = 0.05, double max_slope = -0.5);

// exp(int (e^{i theta g} - 1 - i theta g) dmu).
std::complex<double> levy_khinchine_cf(const Kernel& g, double theta, const ControlMeasure& control);

struct TailPoint {
  double threshold = 0.0;
  double value = 0.0;  // E[F^4 1(F^4 > threshold)]
};

struct UiTail {
  std::vector<TailPoint> points;
  double fourth_moment = 0.0;
  bool heavy_tail = false;
};

UiTail ui_tail(const std::vector<double>& samples, const std::vector<double>& thresholds);

nlohmann::json to_json(const CriterionReport& r);
nlohmann::json to_json(const LimitCheck& c);
nlohmann::json to_json(const CriterionSequence& s);
nlohmann::json to_json(const SingleCltReport& s);

}  // namespace pchaos
