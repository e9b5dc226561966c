#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pchaos/mc_harness.hpp"

namespace pchaos {

const char* version();

// Identifies the run that produced an output file.
struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::size_t replications = 0;
};

// One line of the per-T summary table.
struct SummaryRow {
  double T = 0.0;
  double mean = 0.0;
  double var = 0.0;
  double var_se = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double ks = 0.0;
  double target = 0.0;
  bool pass = false;
};

SummaryRow summary_row(double T, const ExperimentReport& r, double target);

nlohmann::json provenance_json(const Provenance& p);
// Wraps `body` as {"tool": ..., "version": ..., "config_hash": ..., "master_seed": ..., ...body}.
nlohmann::json stamp(nlohmann::json body, const Provenance& p);

// Leading `# key = value` lines followed by the table.
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, const Provenance& p);
void write_stamped_replications_csv(std::ostream& out, std::span<const double> values, const Provenance& p);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace pchaos
