#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarceval/datamodel.hpp"
#include "sarceval/metrics/bootstrap.hpp"

namespace sarceval {

/// Reads report.json, or <dir>/report.json when given a run directory.
RunReport load_report(const std::filesystem::path& path);

std::string report_json(const RunReport& report);
std::string report_table_text(const RunReport& report);
std::string report_table_csv(const RunReport& report);

/// 100 * (after - before) / before; nullopt when before == 0.
std::optional<double> relative_delta(double before, double after);

struct ComparisonRow {
  std::string metric;
  double value_a = 0;
  double value_b = 0;
  double absolute_delta = 0;
  std::optional<double> relative_delta;
  double p_value = 1.0;
  bool significant = false;
};

struct Comparison {
  Task task = Task::MSD;
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;
};

/// Side-by-side metrics of B against A with paired-bootstrap p-values on the
/// per-sample score streams. Throws MismatchedRuns unless both reports share
/// task, dataset fingerprint and sample id set.
Comparison compare(const RunReport& a, const RunReport& b, std::size_t resamples = metrics::kDefaultResamples,
                   std::uint64_t seed = metrics::kDefaultSeed);

/// Side-by-side table: B values carry "*" when p < 0.01 and "(+x.x%)".
std::string comparison_table(const Comparison& comparison);
nlohmann::json comparison_json(const Comparison& comparison);

}  // namespace sarceval
