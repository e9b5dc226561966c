#include "pchaos/report.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#ifndef PCHAOS_VERSION
#define PCHAOS_VERSION "0.0.0"
#endif

namespace pchaos {

const char* version() { return PCHAOS_VERSION; }

SummaryRow summary_row(double T, const ExperimentReport& r, double target) {
  return {T, r.moments.mean, r.moments.variance, r.moments.variance_se, r.moments.m3, r.moments.m4, r.ks, target,
          r.pass()};
}

nlohmann::json provenance_json(const Provenance& p) {
  return {{"tool", "pchaos"},
          {"version", version()},
          {"config_hash", p.config_hash},
          {"master_seed", p.master_seed},
          {"replications", p.replications}};
}

nlohmann::json stamp(nlohmann::json body, const Provenance& p) {
  nlohmann::json out = provenance_json(p);
  if (body.is_object()) {
    for (auto& [k, v] : body.items()) out[k] = std::move(v);
  } else {
    out["result"] = std::move(body);
  }
  return out;
}

namespace {

void write_header(std::ostream& out, const Provenance& p) {
  out << "# tool = pchaos\n# version = " << version() << "\n# config_hash = " << p.config_hash
      << "\n# master_seed = " << p.master_seed << "\n# replications = " << p.replications << '\n';
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, const Provenance& p) {
  write_header(out, p);
  out << "T,mean,var,var_se,m3,m4,ks,target,verdict\n" << std::setprecision(17);
  for (const SummaryRow& r : rows)
    out << r.T << ',' << r.mean << ',' << r.var << ',' << r.var_se << ',' << r.m3 << ',' << r.m4 << ',' << r.ks << ','
        << r.target << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
}

void write_stamped_replications_csv(std::ostream& out, std::span<const double> values, const Provenance& p) {
  write_header(out, p);
  write_replications_csv(out, values);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace pchaos
