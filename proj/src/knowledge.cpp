#include "sarceval/knowledge.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sarceval/error.hpp"
#include "sarceval/serialization.hpp"
#include "sarceval/text.hpp"

namespace sarceval {

using nlohmann::json;

const RelationWhitelist& default_relations() {
  static const RelationWhitelist relations{"RelatedTo", "IsA",       "UsedFor",        "Causes",
                                           "HasProperty", "SymbolOf", "MotivatedByGoal"};
  return relations;
}

std::string normalize_term(std::string_view term) {
  std::string s = text::to_lower(term);
  std::replace(s.begin(), s.end(), '_', ' ');
  return text::collapse_whitespace(text::strip_punctuation(s));
}

std::vector<std::string> extract_terms(std::string_view text, std::span<const std::string> object_terms) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto push = [&](std::string term) {
    if (term.empty()) return;
    if (seen.insert(term).second) out.push_back(std::move(term));
  };
  for (auto& word : text::tokenize(text))
    if (!text::is_stopword(word)) push(std::move(word));
  for (const auto& term : object_terms) push(normalize_term(term));
  return out;
}

// --- snapshot ---------------------------------------------------------------

KnowledgeSnapshot::KnowledgeSnapshot(std::span<const ConceptEdge> edges, RelationWhitelist whitelist,
                                     std::string source, std::string date)
    : whitelist_(std::move(whitelist)), source_(std::move(source)), date_(std::move(date)) {
  for (const auto& e : edges) add(e);
  finalize();
}

void KnowledgeSnapshot::add(ConceptEdge edge) {
  edge.source = normalize_term(edge.source);
  edge.target = normalize_term(edge.target);
  if (!whitelist_.contains(edge.relation) || edge.source.empty() || edge.target.empty() ||
      edge.source == edge.target || !(edge.weight >= 0.0)) {
    ++skipped_;
    return;
  }
  auto& list = edges_[edge.source];
  auto same = std::find_if(list.begin(), list.end(), [&](const ConceptEdge& e) {
    return e.relation == edge.relation && e.target == edge.target;
  });
  if (same == list.end())
    list.push_back(std::move(edge));
  else
    same->weight = std::max(same->weight, edge.weight);
}

void KnowledgeSnapshot::finalize() {
  for (auto& [term, list] : edges_) std::sort(list.begin(), list.end(), concept_rank_less);
}

KnowledgeSnapshot KnowledgeSnapshot::load(const std::filesystem::path& path, RelationWhitelist whitelist) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::MissingFile, path.string());
  auto contents = read_file(path);
  KnowledgeSnapshot snapshot({}, std::move(whitelist), path.filename().string(), "unknown");
  std::vector<LineViolation> violations;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    auto line = std::string_view(contents).substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto record = json::parse(line);
      if (record.contains("provenance")) {
        const auto& p = record["provenance"];
        snapshot.source_ = p.value("source", snapshot.source_);
        snapshot.date_ = p.value("date", snapshot.date_);
        continue;
      }
      snapshot.add(record.get<ConceptEdge>());
    } catch (const json::exception& e) {
      violations.push_back({line_no, e.what()});
    }
  }
  if (!violations.empty()) throw SchemaViolation(std::move(violations));
  snapshot.finalize();
  return snapshot;
}

std::vector<ConceptEdge> KnowledgeSnapshot::lookup(const std::string& term, std::size_t k) {
  auto it = edges_.find(normalize_term(term));
  if (it == edges_.end()) return {};
  const auto& list = it->second;
  return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size()))};
}

std::size_t KnowledgeSnapshot::edge_count() const {
  std::size_t n = 0;
  for (const auto& [term, list] : edges_) n += list.size();
  return n;
}

// --- live ConceptNet --------------------------------------------------------

namespace {

// "/c/en/traffic_light/n" -> "traffic light"; empty for non-English nodes.
std::string english_concept(const json& node) {
  auto id = node.value("@id", std::string{});
  constexpr std::string_view prefix = "/c/en/";
  if (id.rfind(prefix, 0) != 0) return {};
  auto rest = id.substr(prefix.size());
  if (auto slash = rest.find('/'); slash != std::string::npos) rest.resize(slash);
  return normalize_term(rest);
}

std::string url_encode_term(const std::string& term) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : term) {
    if (c == ' ') {
      out.push_back('_');
    } else if (std::isalnum(c) || c == '_' || c == '-' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

}  // namespace

std::vector<ConceptEdge> parse_conceptnet_edges(std::string_view body, const std::string& term,
                                                const RelationWhitelist& whitelist) {
  const auto norm = normalize_term(term);
  std::vector<ConceptEdge> out;
  try {
    auto j = json::parse(body);
    for (const auto& edge : j.value("edges", json::array())) {
      auto relation = edge.at("rel").value("label", std::string{});
      if (!whitelist.contains(relation)) continue;
      auto start = english_concept(edge.at("start"));
      auto end = english_concept(edge.at("end"));
      std::string target;
      if (start == norm)
        target = end;
      else if (end == norm && relation == "RelatedTo")
        target = start;
      if (target.empty() || target == norm) continue;
      double weight = edge.value("weight", 0.0);
      if (!(weight >= 0.0)) continue;
      out.push_back({norm, relation, target, weight});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BackendUnreachable, std::string("malformed ConceptNet response: ") + e.what());
  }
  // Same snapshot semantics: one edge per (relation, target), max weight.
  std::sort(out.begin(), out.end(), concept_rank_less);
  std::vector<ConceptEdge> unique;
  for (auto& e : out) {
    bool dup = std::any_of(unique.begin(), unique.end(), [&](const ConceptEdge& u) {
      return u.relation == e.relation && u.target == e.target;
    });
    if (!dup) unique.push_back(std::move(e));
  }
  return unique;
}

ConceptNetClient::ConceptNetClient(Options options, HttpClientFactory http, std::optional<DiskCache> cache,
                                   RelationWhitelist whitelist, Sleeper sleeper)
    : options_(std::move(options)),
      http_(std::move(http)),
      cache_(std::move(cache)),
      whitelist_(std::move(whitelist)),
      limiter_(options_.min_interval, std::move(sleeper)) {}

std::string ConceptNetClient::fetch(const std::string& term) {
  if (cache_) {
    if (auto hit = cache_->get(term)) return *hit;
  }
  auto [base, prefix] = split_url(options_.endpoint);
  limiter_.acquire();
  HttpResponse response;
  try {
    auto client = http_(base);
    ++requests_;
    response = client->get(prefix + "/c/en/" + url_encode_term(term) + "?limit=" +
                               std::to_string(options_.edge_limit),
                           {{"Accept", "application/json"}});
  } catch (const Error& e) {
    throw Error(ErrorKind::BackendUnreachable, e.what());
  }
  if (response.status == 404) response.body = R"({"edges": []})";
  else if (response.status != 200)
    throw Error(ErrorKind::BackendUnreachable, "ConceptNet status " + std::to_string(response.status));
  if (cache_) cache_->put(term, response.body);
  return response.body;
}

std::vector<ConceptEdge> ConceptNetClient::lookup(const std::string& term, std::size_t k) {
  const auto norm = normalize_term(term);
  if (norm.empty()) return {};
  std::vector<ConceptEdge> edges;
  bool memoized = false;
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find(norm); it != memo_.end()) {
      edges = it->second;
      memoized = true;
    }
  }
  if (!memoized) {
    edges = parse_conceptnet_edges(fetch(norm), norm, whitelist_);
    std::lock_guard lock(memo_mutex_);
    memo_.emplace(norm, edges);
  }
  if (edges.size() > k) edges.resize(k);
  return edges;
}

// --- enrichment -------------------------------------------------------------

EnrichedContext enrich(const Sample& sample, std::span<const Detection> detections, KnowledgeSource& knowledge,
                       std::size_t k_per_term, std::size_t max_concepts) {
  EnrichedContext ctx;
  ctx.detections.assign(detections.begin(), detections.end());

  std::vector<std::string> object_terms;
  for (const auto& d : detections) {
    object_terms.push_back(d.label);
    object_terms.insert(object_terms.end(), d.attributes.begin(), d.attributes.end());
  }
  ctx.source_terms = extract_terms(sample.text, object_terms);

  std::map<std::pair<std::string, std::string>, ConceptEdge> merged;
  for (const auto& term : ctx.source_terms) {
    for (auto& edge : knowledge.lookup(term, k_per_term)) {
      auto key = std::make_pair(edge.relation, edge.target);
      auto it = merged.find(key);
      if (it == merged.end())
        merged.emplace(std::move(key), std::move(edge));
      else if (edge.weight > it->second.weight)
        it->second = std::move(edge);
    }
  }
  for (auto& [key, edge] : merged) ctx.concepts.push_back(std::move(edge));
  std::sort(ctx.concepts.begin(), ctx.concepts.end(), concept_rank_less);
  if (ctx.concepts.size() > max_concepts) ctx.concepts.resize(max_concepts);
  return ctx;
}

}  // namespace sarceval
