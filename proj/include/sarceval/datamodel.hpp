#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sarceval {

enum class Task { MSD, MSE };
enum class Method { Baseline, Enhanced };
enum class Label { Sarcastic, NotSarcastic };

std::string_view to_string(Task task);
std::string_view to_string(Method method);
std::string_view to_string(Label label);

std::optional<Task> parse_task(std::string_view s);
std::optional<Method> parse_method(std::string_view s);
/// Accepts the canonical "sarcastic" / "not_sarcastic" plus the alias "unsarcastic".
std::optional<Label> parse_label_name(std::string_view s);

struct Explanation {
  std::string text;
  bool operator==(const Explanation&) const = default;
};

struct Unparsed {
  bool operator==(const Unparsed&) const = default;
};

using GoldAnnotation = std::variant<Label, Explanation>;
using ParsedOutput = std::variant<Label, Explanation, Unparsed>;

struct Sample {
  std::string id;
  std::string text;
  std::string image_ref;
  GoldAnnotation gold;

  Task task() const { return std::holds_alternative<Label>(gold) ? Task::MSD : Task::MSE; }
  bool operator==(const Sample&) const = default;
};

struct BoundingBox {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;
  bool operator==(const BoundingBox&) const = default;
};

struct Detection {
  std::string label;
  std::vector<std::string> attributes;
  double confidence = 0;
  BoundingBox bbox;
  bool operator==(const Detection&) const = default;
};

struct ConceptEdge {
  std::string source;
  std::string relation;
  std::string target;
  double weight = 0;
  bool operator==(const ConceptEdge&) const = default;
};

/// Ranking used for concept lists everywhere: weight descending, then target ascending.
bool concept_rank_less(const ConceptEdge& a, const ConceptEdge& b);

struct EnrichedContext {
  std::vector<Detection> detections;
  std::vector<ConceptEdge> concepts;
  std::vector<std::string> source_terms;
  bool operator==(const EnrichedContext&) const = default;
};

struct Prediction {
  std::string sample_id;
  std::string raw_output;
  ParsedOutput parsed = Unparsed{};
  std::string backend_id;
  std::string prompt_fingerprint;
  std::optional<std::string> error;
  // Per-sample metric stream consumed by significance testing.
  std::map<std::string, double> scores;
  bool operator==(const Prediction&) const = default;
};

struct RunReport {
  Task task = Task::MSD;
  Method method = Method::Baseline;
  std::string backend_id;
  std::map<std::string, double> metrics;  // percent scale
  std::vector<Prediction> per_sample;
  std::string config_fingerprint;
  std::string dataset_fingerprint;
  std::string timestamp;  // not serialized into report.json; see run_meta.json
  std::map<std::string, std::string> provenance;
  bool operator==(const RunReport&) const = default;
};

/// Metric names a report must carry, in table order.
const std::vector<std::string>& metric_names(Task task);

/// Lowercase hex SHA-256 of the bytes.
std::string fingerprint(std::string_view bytes);

/// Fingerprint of several fields, length-prefixed so ("ab","c") != ("a","bc").
std::string fingerprint_fields(std::initializer_list<std::string_view> fields);

}  // namespace sarceval
