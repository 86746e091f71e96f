#include "sarceval/report.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "sarceval/error.hpp"
#include "sarceval/serialization.hpp"

namespace sarceval {

using nlohmann::json;

RunReport load_report(const std::filesystem::path& path) {
  auto file = std::filesystem::is_directory(path) ? path / "report.json" : path;
  try {
    return json::parse(read_file(file)).get<RunReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, file.string() + ": " + e.what());
  }
}

std::string report_json(const RunReport& report) { return json(report).dump(2) + "\n"; }

namespace {

struct Column {
  std::string metric;
  std::string header;
};

std::vector<Column> table_columns(Task task) {
  if (task == Task::MSD) return {{"accuracy", "Acc"}, {"f1", "F1"}};
  // Same column order as the published MSE tables: BLEU, ROUGE-L/1/2, METEOR.
  return {{"bleu1", "B1"},  {"bleu2", "B2"},  {"bleu3", "B3"}, {"bleu4", "B4"},
          {"rougeL", "RL"}, {"rouge1", "R1"}, {"rouge2", "R2"}, {"meteor", "METEOR"}};
}

double metric_or_zero(const RunReport& r, const std::string& name) {
  auto it = r.metrics.find(name);
  return it == r.metrics.end() ? 0.0 : it->second;
}

std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (widths.size() <= c) widths.push_back(0);
      widths[c] = std::max(widths[c], row[c].size());
    }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) line += " | ";
      line += c == 0 ? fmt::format("{:<{}}", rows[r][c], widths[c]) : fmt::format("{:>{}}", rows[r][c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < widths.size(); ++c) rule += (c > 0 ? "-+-" : "") + std::string(widths[c], '-');
      out += rule + "\n";
    }
  }
  return out;
}

}  // namespace

std::string report_table_text(const RunReport& report) {
  std::vector<std::string> header{"Backend", "Method"};
  std::vector<std::string> row{report.backend_id, std::string(to_string(report.method))};
  for (const auto& col : table_columns(report.task)) {
    header.push_back(col.header);
    row.push_back(fmt::format("{:.1f}", metric_or_zero(report, col.metric)));
  }
  auto out = render_grid({header, row});
  if (auto it = report.provenance.find("unparsed_rate"); it != report.provenance.end())
    out += fmt::format("unparsed rate: {:.2f}%\n", std::stod(it->second));
  return out;
}

std::string report_table_csv(const RunReport& report) {
  std::string head = "backend,method";
  std::string row = report.backend_id + "," + std::string(to_string(report.method));
  for (const auto& col : table_columns(report.task)) {
    head += "," + col.metric;
    row += fmt::format(",{:.4f}", metric_or_zero(report, col.metric));
  }
  return head + "\n" + row + "\n";
}

std::optional<double> relative_delta(double before, double after) {
  if (before == 0.0) return std::nullopt;
  return 100.0 * (after - before) / before;
}

Comparison compare(const RunReport& a, const RunReport& b, std::size_t resamples, std::uint64_t seed) {
  if (a.task != b.task) throw Error(ErrorKind::MismatchedRuns, "reports are for different tasks");
  if (a.dataset_fingerprint != b.dataset_fingerprint)
    throw Error(ErrorKind::MismatchedRuns, "reports were produced from different dataset files");

  std::map<std::string, const Prediction*> by_id_b;
  for (const auto& p : b.per_sample) by_id_b[p.sample_id] = &p;
  std::set<std::string> ids_a;
  for (const auto& p : a.per_sample) ids_a.insert(p.sample_id);
  if (ids_a.size() != by_id_b.size() || ids_a.size() != a.per_sample.size() ||
      !std::all_of(ids_a.begin(), ids_a.end(), [&](const std::string& id) { return by_id_b.contains(id); }))
    throw Error(ErrorKind::MismatchedRuns, "reports cover different sample id sets");

  Comparison out;
  out.task = a.task;
  out.label_a = a.backend_id + "/" + std::string(to_string(a.method));
  out.label_b = b.backend_id + "/" + std::string(to_string(b.method));
  for (const auto& metric : metric_names(a.task)) {
    ComparisonRow row;
    row.metric = metric;
    row.value_a = metric_or_zero(a, metric);
    row.value_b = metric_or_zero(b, metric);
    row.absolute_delta = row.value_b - row.value_a;
    row.relative_delta = relative_delta(row.value_a, row.value_b);

    std::vector<double> stream_a;
    std::vector<double> stream_b;
    for (const auto& pa : a.per_sample) {
      const auto& pb = *by_id_b.at(pa.sample_id);
      auto ia = pa.scores.find(metric);
      auto ib = pb.scores.find(metric);
      if (ia == pa.scores.end() || ib == pb.scores.end())
        throw Error(ErrorKind::MismatchedRuns, "sample " + pa.sample_id + " lacks a per-sample '" + metric + "' score");
      stream_a.push_back(ia->second);
      stream_b.push_back(ib->second);
    }
    if (stream_a.size() >= 2) row.p_value = metrics::paired_bootstrap(stream_b, stream_a, resamples, seed);
    row.significant = row.p_value < metrics::kSignificanceThreshold;
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string comparison_table(const Comparison& comparison) {
  std::vector<std::vector<std::string>> rows{{"Metric", comparison.label_a, comparison.label_b, "Delta", "p-value"}};
  for (const auto& row : comparison.rows) {
    auto b = fmt::format("{:.1f}{}", row.value_b, row.significant ? "*" : "");
    if (row.relative_delta) b += fmt::format(" ({:+.1f}%)", *row.relative_delta);
    rows.push_back({row.metric, fmt::format("{:.1f}", row.value_a), b, fmt::format("{:+.2f}", row.absolute_delta),
                    fmt::format("{:.4f}", row.p_value)});
  }
  return render_grid(rows) + "* p < 0.01 (paired bootstrap on per-sample scores)\n";
}

json comparison_json(const Comparison& comparison) {
  json rows = json::array();
  for (const auto& row : comparison.rows)
    rows.push_back({{"metric", row.metric},
                    {"a", row.value_a},
                    {"b", row.value_b},
                    {"absolute_delta", row.absolute_delta},
                    {"relative_delta_percent", row.relative_delta ? json(*row.relative_delta) : json(nullptr)},
                    {"p_value", row.p_value},
                    {"significant", row.significant}});
  return {{"task", to_string(comparison.task)}, {"a", comparison.label_a}, {"b", comparison.label_b}, {"rows", rows}};
}

}  // namespace sarceval
