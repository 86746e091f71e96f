#include "sarceval/serialization.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "sarceval/error.hpp"

namespace sarceval {

using nlohmann::json;

namespace {

template <typename E, typename Parser>
E enum_from(const json& j, const char* what, Parser parser) {
  auto s = j.get<std::string>();
  auto v = parser(s);
  if (!v) throw json::other_error::create(501, std::string("unknown ") + what + " '" + s + "'", &j);
  return *v;
}

}  // namespace

void to_json(json& j, const Sample& s) {
  j = json{{"id", s.id}, {"text", s.text}, {"image", s.image_ref}};
  if (auto* label = std::get_if<Label>(&s.gold))
    j["label"] = to_string(*label);
  else
    j["explanation"] = std::get<Explanation>(s.gold).text;
}

void from_json(const json& j, Sample& s) {
  j.at("id").get_to(s.id);
  j.at("text").get_to(s.text);
  j.at("image").get_to(s.image_ref);
  if (j.contains("label"))
    s.gold = enum_from<Label>(j.at("label"), "label", parse_label_name);
  else
    s.gold = Explanation{j.at("explanation").get<std::string>()};
}

void to_json(json& j, const BoundingBox& b) { j = json::array({b.x, b.y, b.width, b.height}); }

void from_json(const json& j, BoundingBox& b) {
  if (!j.is_array() || j.size() != 4) throw json::other_error::create(501, "bbox must be [x,y,w,h]", &j);
  b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(json& j, const Detection& d) {
  j = json{{"label", d.label}, {"attributes", d.attributes}, {"confidence", d.confidence}, {"bbox", d.bbox}};
}

void from_json(const json& j, Detection& d) {
  j.at("label").get_to(d.label);
  d.attributes = j.value("attributes", std::vector<std::string>{});
  j.at("confidence").get_to(d.confidence);
  j.at("bbox").get_to(d.bbox);
}

void to_json(json& j, const ConceptEdge& e) {
  j = json{{"term", e.source}, {"relation", e.relation}, {"target", e.target}, {"weight", e.weight}};
}

void from_json(const json& j, ConceptEdge& e) {
  j.at("term").get_to(e.source);
  j.at("relation").get_to(e.relation);
  j.at("target").get_to(e.target);
  j.at("weight").get_to(e.weight);
}

void to_json(json& j, const EnrichedContext& c) {
  j = json{{"detections", c.detections}, {"concepts", c.concepts}, {"source_terms", c.source_terms}};
}

void from_json(const json& j, EnrichedContext& c) {
  j.at("detections").get_to(c.detections);
  j.at("concepts").get_to(c.concepts);
  j.at("source_terms").get_to(c.source_terms);
}

void to_json(json& j, const Prediction& p) {
  j = json{{"sample_id", p.sample_id},
           {"raw_output", p.raw_output},
           {"backend_id", p.backend_id},
           {"prompt_fingerprint", p.prompt_fingerprint}};
  if (auto* label = std::get_if<Label>(&p.parsed)) {
    j["parsed"] = {{"kind", "label"}, {"value", to_string(*label)}};
  } else if (auto* expl = std::get_if<Explanation>(&p.parsed)) {
    j["parsed"] = {{"kind", "explanation"}, {"value", expl->text}};
  } else {
    j["parsed"] = {{"kind", "unparsed"}};
  }
  j["error"] = p.error ? json(*p.error) : json(nullptr);
  j["scores"] = p.scores;
}

void from_json(const json& j, Prediction& p) {
  j.at("sample_id").get_to(p.sample_id);
  j.at("raw_output").get_to(p.raw_output);
  j.at("backend_id").get_to(p.backend_id);
  j.at("prompt_fingerprint").get_to(p.prompt_fingerprint);
  const auto& parsed = j.at("parsed");
  auto kind = parsed.at("kind").get<std::string>();
  if (kind == "label")
    p.parsed = enum_from<Label>(parsed.at("value"), "label", parse_label_name);
  else if (kind == "explanation")
    p.parsed = Explanation{parsed.at("value").get<std::string>()};
  else if (kind == "unparsed")
    p.parsed = Unparsed{};
  else
    throw json::other_error::create(501, "unknown parsed kind '" + kind + "'", &parsed);
  if (j.contains("error") && !j["error"].is_null())
    p.error = j["error"].get<std::string>();
  else
    p.error.reset();
  p.scores = j.value("scores", std::map<std::string, double>{});
}

void to_json(json& j, const RunReport& r) {
  j = json{{"task", to_string(r.task)},
           {"method", to_string(r.method)},
           {"backend_id", r.backend_id},
           {"metrics", r.metrics},
           {"config_fingerprint", r.config_fingerprint},
           {"dataset_fingerprint", r.dataset_fingerprint},
           {"provenance", r.provenance},
           {"per_sample", r.per_sample}};
}

void from_json(const json& j, RunReport& r) {
  r.task = enum_from<Task>(j.at("task"), "task", parse_task);
  r.method = enum_from<Method>(j.at("method"), "method", parse_method);
  j.at("backend_id").get_to(r.backend_id);
  j.at("metrics").get_to(r.metrics);
  j.at("config_fingerprint").get_to(r.config_fingerprint);
  j.at("dataset_fingerprint").get_to(r.dataset_fingerprint);
  r.provenance = j.value("provenance", std::map<std::string, std::string>{});
  j.at("per_sample").get_to(r.per_sample);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace sarceval
