#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "pchaos/config.hpp"
#include "pchaos/experiments.hpp"
#include "pchaos/report.hpp"

using namespace pchaos;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A flag that, when given, overrides `section.key` of the config file.
struct Override {
  std::string section;
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct Context {
  IniConfig cfg;
  RunOptions run;
  std::string out = "pchaos_out";
  std::string format = "json";
  Provenance provenance;
  std::string canonical;  // config without run-local keys (workers, out, format)
};

std::vector<double> parse_list(const std::string& text) {
  IniConfig tmp;
  tmp.set("x", "v", text);
  return tmp.get_list("x", "v");
}

Context prepare(const std::string& config_path, std::vector<Override>& overrides) {
  Context ctx;
  if (!config_path.empty()) ctx.cfg = IniConfig::load(config_path);
  for (const Override& o : overrides)
    if (o.option && o.option->count() > 0) ctx.cfg.set(o.section, o.key, o.value);
  const long long reps = ctx.cfg.get_int("run", "reps", 1000);
  const long long seed = ctx.cfg.get_int("run", "seed", 12345);
  const long long workers = ctx.cfg.get_int("run", "workers", std::max(1u, std::thread::hardware_concurrency()));
  if (reps < 1 || seed < 0 || workers < 1) throw UsageError("reps, seed and workers must be positive");
  ctx.run = RunOptions{static_cast<std::size_t>(reps), static_cast<std::uint64_t>(seed), static_cast<unsigned>(workers)};
  ctx.out = ctx.cfg.get_string("run", "out", "pchaos_out");
  ctx.format = ctx.cfg.get_string("run", "format", "json");
  if (ctx.format != "json" && ctx.format != "csv") throw UsageError("format must be json or csv");
  IniConfig hashed = ctx.cfg;
  for (const char* k : {"workers", "out", "format"}) hashed.erase("run", k);
  ctx.provenance = Provenance{hashed.hash_hex(), ctx.run.seed, ctx.run.replications};
  ctx.canonical = hashed.canonical();
  return ctx;
}

std::string output_path(const Context& ctx, const std::string& file) {
  std::filesystem::create_directories(ctx.out);
  return (std::filesystem::path(ctx.out) / file).string();
}

void emit_suites(const Context& ctx, const std::string& name, const std::vector<ExperimentSuite>& suites) {
  if (ctx.format == "json") {
    nlohmann::json body;
    body["experiment"] = name;
    body["config"] = ctx.canonical;
    body["suites"] = nlohmann::json::array();
    for (const auto& s : suites) body["suites"].push_back(to_json(s, false));
    write_text_file(output_path(ctx, name + ".json"), stamp(body, ctx.provenance).dump(2) + "\n");
    return;
  }
  std::map<std::string, std::vector<SummaryRow>> rows;
  for (const auto& s : suites)
    for (const auto& r : s.reports) {
      double target = r.targets.empty() ? 0.0 : r.targets.front().target.value;
      rows[r.name].push_back(summary_row(s.T, r, target));
      std::ostringstream reps;
      write_stamped_replications_csv(reps, r.values, ctx.provenance);
      std::ostringstream tag;
      tag << r.name << "_T" << s.T << "_replications.csv";
      write_text_file(output_path(ctx, tag.str()), reps.str());
    }
  for (const auto& [stat, list] : rows) {
    std::ostringstream os;
    write_summary_csv(os, list, ctx.provenance);
    write_text_file(output_path(ctx, stat + "_summary.csv"), os.str());
  }
}

int finish(const std::vector<ExperimentSuite>& suites) {
  bool all = true;
  for (const auto& s : suites) {
    for (const auto& r : s.reports)
      for (const auto& t : r.targets)
        std::cout << (t.pass ? "PASS " : "FAIL ") << r.name << " T=" << s.T << " " << t.target.label
                  << " estimate=" << t.estimate << " target=" << t.target.value << " se=" << t.se << "\n";
    for (const auto& c : s.extra_checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << s.name << " T=" << s.T << " " << c.target.label
                << " estimate=" << c.estimate << " se=" << c.se << "\n";
    all = all && s.pass();
  }
  return all ? kPass : kFail;
}

std::vector<double> horizons(const IniConfig& cfg, const std::string& section) {
  std::vector<double> t = cfg.get_list(section, "T");
  if (t.empty()) throw UsageError("missing T for [" + section + "]");
  return t;
}

int cmd_criterion(Context& ctx) {
  const std::string fam = ctx.cfg.get_string("criterion", "family", "");
  if (fam.empty()) throw UsageError("criterion needs a family");
  std::optional<CriterionFamily> family;
  try {
    family = criterion_family(fam, ctx.cfg.get_double("criterion", "lambda", 1.0));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<double> idx = ctx.cfg.get_list("criterion", "indices");
  if (idx.empty()) idx = family->default_indices;
  const CriterionOutcome out = run_criterion(*family, idx);
  write_text_file(output_path(ctx, "criterion_" + fam + ".json"), stamp(out.report, ctx.provenance).dump(2) + "\n");
  std::cout << to_string(out.verdict) << " criterion " << fam << "\n";
  return out.verdict == Verdict::Pass ? kPass : kFail;
}

int cmd_block(Context& ctx) {
  std::vector<ExperimentSuite> suites;
  for (double n : ctx.cfg.get_list("block", "n").empty() ? std::vector<double>{50} : ctx.cfg.get_list("block", "n"))
    suites.push_back(run_block_experiment(static_cast<int>(n), ctx.run));
  emit_suites(ctx, "block", suites);
  return finish(suites);
}

ControlMeasure control_or(const IniConfig& cfg, ControlMeasure fallback) {
  return cfg.has_section("control") ? control_from_config(cfg) : std::move(fallback);
}

int cmd_ou(Context& ctx) {
  const long long th = ctx.cfg.get_int("ou", "theorem", 4);
  if (th < 4 || th > 6) throw UsageError("ou theorem must be 4, 5 or 6");
  const double lambda = ctx.cfg.get_double("ou", "lambda", 1.0);
  const ControlMeasure control = control_or(ctx.cfg, ControlMeasure::discrete({1.0, -1.0}, {0.5, 0.5}));
  std::vector<ExperimentSuite> suites;
  for (double t : horizons(ctx.cfg, "ou"))
    suites.push_back(run_ou_experiment(static_cast<OUTheorem>(th), lambda, t, control, ctx.run));
  emit_suites(ctx, "ou_theorem" + std::to_string(th), suites);
  return finish(suites);
}

int cmd_hazard(Context& ctx) {
  const long long th = ctx.cfg.get_int("hazard", "theorem", 7);
  const double tau = ctx.cfg.get_double("hazard", "tau", 1.0);
  const double eps = ctx.cfg.get_double("hazard", "epsilon", 1e-4);
  std::vector<ExperimentSuite> suites;
  std::string name;
  if (th == 7) {
    const long long k = ctx.cfg.get_int("hazard", "case", 1);
    if (k < 1 || k > 3) throw UsageError("hazard case must be 1, 2 or 3");
    const ControlMeasure control = k == 1   ? control_or(ctx.cfg, ControlMeasure::discrete({1.0}, {1.0}))
                                   : k == 2 ? thm7_extended_gamma_control(eps)
                                            : thm7_beta_control(eps);
    for (double t : horizons(ctx.cfg, "hazard"))
      suites.push_back(run_thm7_experiment(static_cast<Thm7Case>(k), tau, t, control, ctx.run));
    name = "hazard_theorem7_case" + std::to_string(k);
  } else if (th == 8) {
    const std::string v = ctx.cfg.get_string("hazard", "variant", "raw");
    if (v != "raw" && v != "centered") throw UsageError("hazard variant must be raw or centered");
    const ControlMeasure control = control_or(ctx.cfg, ControlMeasure::discrete({1.0}, {1.0}));
    for (double t : horizons(ctx.cfg, "hazard"))
      suites.push_back(run_thm8_experiment(v == "raw" ? Thm8Variant::Raw : Thm8Variant::Centered, tau, t, control, ctx.run));
    name = "hazard_theorem8_" + v;
  } else {
    throw UsageError("hazard theorem must be 7 or 8");
  }
  emit_suites(ctx, name, suites);
  return finish(suites);
}

int cmd_sample(Context& ctx) {
  const ControlMeasure control = control_or(ctx.cfg, ControlMeasure::discrete({1.0, -1.0}, {0.5, 0.5}));
  const Window w{{}, {ctx.cfg.get_double("sample", "t_lo", 0.0), ctx.cfg.get_double("sample", "t_hi", 10.0)}};
  const PointPattern p = sample_pattern(control, w, ctx.run.seed);
  std::ostringstream os;
  os << "# tool = pchaos\n# version = " << version() << "\n# config_hash = " << ctx.provenance.config_hash
     << "\n# master_seed = " << ctx.run.seed << "\n# control = " << control.describe()
     << "\n# neglected_second_moment = " << std::setprecision(17) << control.neglected_moment(w.time.lo, 2) << "\n";
  write_pattern_csv(os, p);
  if (ctx.out == "-") {
    std::cout << os.str();
  } else {
    write_text_file(output_path(ctx, "pattern.csv"), os.str());
    std::cout << "wrote " << p.atoms.size() << " atoms\n";
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson chaos numerics: CLT criteria and Monte Carlo checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(version()));

  std::string config_path;
  std::vector<Override> ov;
  ov.reserve(32);
  auto flag = [&](CLI::App* where, const std::string& names, const std::string& section, const std::string& key,
                  const std::string& help) {
    ov.push_back(Override{section, key, "", nullptr});
    Override& o = ov.back();
    o.option = where->add_option(names, o.value, help);
    return o.option;
  };

  app.add_option("--config", config_path, "INI config file (flags override its values)")->check(CLI::ExistingFile);
  flag(&app, "--seed", "run", "seed", "master seed");
  flag(&app, "--reps,--R", "run", "reps", "Monte Carlo replications");
  flag(&app, "--out", "run", "out", "output directory ('-' for stdout with sample)");
  flag(&app, "--format", "run", "format", "json or csv")->check(CLI::IsMember({"json", "csv"}));
  flag(&app, "--workers", "run", "workers", "worker threads");

  auto* crit = app.add_subcommand("criterion", "fourth-moment CLT criterion on a kernel family");
  flag(crit, "--family", "criterion", "family", "kernel family")->check(CLI::IsMember(criterion_family_names()));
  flag(crit, "--indices", "criterion", "indices", "comma-separated sequence indices");
  flag(crit, "--lambda", "criterion", "lambda", "OU rate for OU families");

  auto* block = app.add_subcommand("block", "double integral of the block kernel");
  flag(block, "--n", "block", "n", "number of blocks (comma list allowed)");

  auto* ou = app.add_subcommand("ou", "Ornstein-Uhlenbeck Levy functionals");
  flag(ou, "--theorem", "ou", "theorem", "4 (linear), 5 (quadratic), 6 (sample variance)");
  flag(ou, "--lambda", "ou", "lambda", "mean-reversion rate");
  flag(ou, "--T", "ou", "T", "horizon (comma list allowed)");

  auto* hz = app.add_subcommand("hazard", "random hazard rates");
  flag(hz, "--theorem", "hazard", "theorem", "7 (cumulative hazard) or 8 (quadratic)");
  flag(hz, "--case", "hazard", "case", "theorem 7 case 1, 2 or 3");
  flag(hz, "--variant", "hazard", "variant", "theorem 8 variant raw or centered");
  flag(hz, "--tau", "hazard", "tau", "rectangular kernel half-width");
  flag(hz, "--T", "hazard", "T", "horizon (comma list allowed)");
  flag(hz, "--epsilon", "hazard", "epsilon", "jump truncation for cases 2 and 3");

  auto* smp = app.add_subcommand("sample", "dump one sampled point pattern as CSV");
  flag(smp, "--t-lo", "sample", "t_lo", "window start");
  flag(smp, "--t-hi", "sample", "t_hi", "window end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    Context ctx = prepare(config_path, ov);
    std::cout << std::setprecision(6);
    if (crit->parsed()) return cmd_criterion(ctx);
    if (block->parsed()) return cmd_block(ctx);
    if (ou->parsed()) return cmd_ou(ctx);
    if (hz->parsed()) return cmd_hazard(ctx);
    if (smp->parsed()) return cmd_sample(ctx);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
