#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "pchaos/chaos.hpp"
#include "pchaos/contractions.hpp"
#include "pchaos/experiments.hpp"
#include "pchaos/hazard.hpp"
#include "pchaos/ou_levy.hpp"
#include "pchaos/report.hpp"
#include "pchaos/rng.hpp"

namespace py = pybind11;
using namespace pchaos;

namespace {

ControlMeasure discrete(const std::vector<double>& sizes, const std::vector<double>& weights) {
  return ControlMeasure::discrete(sizes, weights.empty() ? std::vector<double>(sizes.size(), 1.0 / sizes.size()) : weights);
}

RunOptions options(std::size_t reps, std::uint64_t seed, unsigned workers) { return RunOptions{reps, seed, workers}; }

std::string dump(const ExperimentSuite& s) { return to_json(s, false).dump(); }

PointPattern to_pattern(const std::vector<double>& u, const std::vector<double>& x, double t_lo, double t_hi) {
  if (u.size() != x.size()) throw std::invalid_argument("u and x must have the same length");
  PointPattern p;
  p.window = Window{{}, {t_lo, t_hi}};
  for (std::size_t i = 0; i < u.size(); ++i) p.atoms.push_back(Atom{u[i], x[i]});
  return p;
}

}  // namespace

PYBIND11_MODULE(_pchaos, m) {
  m.doc() = "Poisson chaos numerics: multiple integrals, contraction norms and CLT Monte Carlo checks";

  py::register_exception<SupportError>(m, "SupportError", PyExc_ValueError);
  py::register_exception<NormalizationError>(m, "NormalizationError", PyExc_ValueError);

  m.def("version", [] { return std::string(version()); });
  m.def("derive_seed", &derive_seed, py::arg("master_seed"), py::arg("index"));

  m.def(
      "sample_pattern",
      [](const std::vector<double>& sizes, const std::vector<double>& weights, double t_lo, double t_hi,
         std::uint64_t seed) {
        const PointPattern p = sample_pattern(discrete(sizes, weights), Window{{}, {t_lo, t_hi}}, seed);
        std::vector<double> u, x;
        for (const Atom& a : p.atoms) {
          u.push_back(a.u);
          x.push_back(a.x);
        }
        return std::make_pair(u, x);
      },
      py::arg("sizes"), py::arg("weights") = std::vector<double>{}, py::arg("t_lo") = 0.0, py::arg("t_hi") = 1.0,
      py::arg("seed") = 1, "Sample a pattern with a discrete jump law on [t_lo, t_hi); returns (u, x) lists.");

  m.def(
      "block_I2",
      [](int n, const std::vector<double>& u, const std::vector<double>& x) {
        const auto c = ControlMeasure::discrete({1.0}, {1.0});
        return eval_I2(block_kernel(n), to_pattern(u, x, 0.0, n), c);
      },
      py::arg("n"), py::arg("u"), py::arg("x"), "Double integral of BlockKernel(n) over a unit-rate pattern.");

  m.def(
      "block_norms",
      [](int n) {
        const auto c = ControlMeasure::discrete({1.0}, {1.0});
        const Kernel f = block_kernel(n);
        const FourthMoment fm = fourth_moment_breakdown(f, c);
        py::dict d;
        d["norm2_doubled"] = fm.norm2_doubled;
        d["n11"] = fm.n11;
        d["n21"] = fm.n21;
        d["n10"] = fm.n10;
        d["fourth_moment_identity"] = fm.value;
        d["fourth_moment_identity_from_orders"] = fm.value_from_orders;
        return d;
      },
      py::arg("n"));

  m.def("ou_linear_variance", &linear_stat_variance, py::arg("lam"), py::arg("T"), py::arg("depth") = kInf,
        "Closed-form variance of T^{-1/2} int_0^T Y dt.");

  m.def(
      "thm8_constants",
      [](double tau, const std::vector<double>& sizes, const std::vector<double>& weights) {
        const auto model = HazardModel::make(HazardRect{tau}, discrete(sizes, weights), 10.0 * tau);
        const Thm8Constants k = thm8_constants(model);
        py::dict d;
        d["centering"] = k.centering;
        d["c1"] = k.c1;
        d["c1_stated"] = k.c1_printed;
        d["c2"] = k.c2;
        return d;
      },
      py::arg("tau") = 1.0, py::arg("sizes") = std::vector<double>{1.0}, py::arg("weights") = std::vector<double>{});

  m.def("criterion_families", &criterion_family_names);
  m.def(
      "criterion",
      [](const std::string& family, const std::vector<double>& indices, double lam) {
        const CriterionFamily f = criterion_family(family, lam);
        const CriterionOutcome out = run_criterion(f, indices.empty() ? f.default_indices : indices);
        return std::make_pair(to_string(out.verdict), out.report.dump());
      },
      py::arg("family"), py::arg("indices") = std::vector<double>{}, py::arg("lam") = 1.0,
      "Run a CLT criterion family; returns (verdict, report JSON).");

  m.def(
      "run_block",
      [](int n, std::size_t reps, std::uint64_t seed, unsigned workers) {
        py::gil_scoped_release release;
        return dump(run_block_experiment(n, options(reps, seed, workers)));
      },
      py::arg("n"), py::arg("reps"), py::arg("seed") = 1, py::arg("workers") = 1);

  m.def(
      "run_ou",
      [](int theorem, double lam, double T, std::size_t reps, std::uint64_t seed, unsigned workers) {
        if (theorem < 4 || theorem > 6) throw std::invalid_argument("theorem must be 4, 5 or 6");
        py::gil_scoped_release release;
        const auto c = ControlMeasure::discrete({1.0, -1.0}, {0.5, 0.5});
        return dump(run_ou_experiment(static_cast<OUTheorem>(theorem), lam, T, c, options(reps, seed, workers)));
      },
      py::arg("theorem"), py::arg("lam"), py::arg("T"), py::arg("reps"), py::arg("seed") = 1, py::arg("workers") = 1);

  m.def(
      "run_hazard",
      [](int theorem, int which, const std::string& variant, double tau, double T, std::size_t reps,
         std::uint64_t seed, unsigned workers) {
        py::gil_scoped_release release;
        const auto unit = ControlMeasure::discrete({1.0}, {1.0});
        const RunOptions opt = options(reps, seed, workers);
        if (theorem == 7) {
          if (which < 1 || which > 3) throw std::invalid_argument("case must be 1, 2 or 3");
          const ControlMeasure c = which == 1 ? unit : which == 2 ? thm7_extended_gamma_control() : thm7_beta_control();
          return dump(run_thm7_experiment(static_cast<Thm7Case>(which), tau, T, c, opt));
        }
        if (theorem == 8) {
          if (variant != "raw" && variant != "centered") throw std::invalid_argument("variant must be raw or centered");
          return dump(run_thm8_experiment(variant == "raw" ? Thm8Variant::Raw : Thm8Variant::Centered, tau, T, unit, opt));
        }
        throw std::invalid_argument("theorem must be 7 or 8");
      },
      py::arg("theorem"), py::arg("case") = 1, py::arg("variant") = "centered", py::arg("tau") = 1.0, py::arg("T"),
      py::arg("reps"), py::arg("seed") = 1, py::arg("workers") = 1);
}
