#include "sarceval/ingest.hpp"

#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sarceval/error.hpp"
#include "sarceval/serialization.hpp"
#include "sarceval/text.hpp"

namespace sarceval {

using nlohmann::json;

namespace {

std::string required_string(const json& record, const char* field) {
  if (!record.contains(field)) throw std::invalid_argument(std::string("missing field '") + field + "'");
  const auto& v = record.at(field);
  if (!v.is_string()) throw std::invalid_argument(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

Sample parse_record(const json& record, Task task) {
  if (!record.is_object()) throw std::invalid_argument("record is not a JSON object");
  Sample s;
  s.id = required_string(record, "id");
  if (s.id.empty()) throw std::invalid_argument("empty id");
  s.text = required_string(record, "text");
  if (text::trim(s.text).empty()) throw std::invalid_argument("empty text");
  s.image_ref = required_string(record, "image");
  if (task == Task::MSD) {
    if (record.contains("explanation") && !record.contains("label"))
      throw std::invalid_argument("MSE record in an MSD dataset");
    auto raw = required_string(record, "label");
    auto label = parse_label_name(text::to_lower(text::trim(raw)));
    if (!label) throw std::invalid_argument("invalid label '" + raw + "'");
    s.gold = *label;
  } else {
    if (record.contains("label") && !record.contains("explanation"))
      throw std::invalid_argument("MSD record in an MSE dataset");
    auto expl = required_string(record, "explanation");
    if (text::trim(expl).empty()) throw std::invalid_argument("empty explanation");
    s.gold = Explanation{std::move(expl)};
  }
  return s;
}

}  // namespace

DatasetManifest parse_dataset(std::string_view contents, Task task, std::string source_name) {
  DatasetManifest manifest{task, {}, std::move(source_name)};
  std::vector<LineViolation> violations;
  std::unordered_set<std::string> seen;
  std::optional<std::string> duplicate;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    auto line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (text::trim(line).empty()) {
      if (end == contents.size()) break;
      continue;
    }
    try {
      auto sample = parse_record(json::parse(line), task);
      if (!seen.insert(sample.id).second && !duplicate) duplicate = sample.id;
      manifest.samples.push_back(std::move(sample));
    } catch (const json::exception& e) {
      violations.push_back({line_no, e.what()});
    } catch (const std::invalid_argument& e) {
      violations.push_back({line_no, e.what()});
    }
    if (end == contents.size()) break;
  }

  if (!violations.empty()) throw SchemaViolation(std::move(violations));
  if (duplicate) throw Error(ErrorKind::DuplicateId, *duplicate);
  if (manifest.samples.empty()) throw Error(ErrorKind::EmptyDataset, manifest.source_name);
  return manifest;
}

DatasetManifest load_dataset(const std::filesystem::path& path, Task task) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::MissingFile, path.string());
  return parse_dataset(read_file(path), task, path.filename().string());
}

Task detect_task(const std::filesystem::path& path) {
  auto contents = read_file(path);
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    auto line = std::string_view(contents).substr(pos, end - pos);
    pos = end + 1;
    if (text::trim(line).empty()) continue;
    try {
      auto record = json::parse(line);
      if (record.contains("label")) return Task::MSD;
      if (record.contains("explanation")) return Task::MSE;
    } catch (const json::exception&) {
    }
    break;
  }
  throw Error(ErrorKind::SchemaViolation, "cannot infer task from " + path.string());
}

StatsSummary dataset_stats(const DatasetManifest& manifest) {
  StatsSummary stats;
  stats.total = manifest.samples.size();
  if (stats.total == 0) return stats;
  double text_tokens = 0;
  double expl_tokens = 0;
  for (const auto& s : manifest.samples) {
    text_tokens += static_cast<double>(text::split_whitespace(s.text).size());
    if (const auto* label = std::get_if<Label>(&s.gold)) {
      (*label == Label::Sarcastic ? stats.sarcastic : stats.not_sarcastic) += 1;
    } else {
      expl_tokens += static_cast<double>(text::split_whitespace(std::get<Explanation>(s.gold).text).size());
    }
  }
  const auto n = static_cast<double>(stats.total);
  stats.mean_text_tokens = text_tokens / n;
  if (manifest.task == Task::MSE) stats.mean_explanation_tokens = expl_tokens / n;
  return stats;
}

}  // namespace sarceval
