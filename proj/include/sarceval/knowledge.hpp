#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sarceval/cache.hpp"
#include "sarceval/datamodel.hpp"
#include "sarceval/http.hpp"

namespace sarceval {

using RelationWhitelist = std::set<std::string>;

/// RelatedTo, IsA, UsedFor, Causes, HasProperty, SymbolOf, MotivatedByGoal.
const RelationWhitelist& default_relations();

/// Lowercase, underscores to spaces, ASCII punctuation removed, whitespace collapsed.
std::string normalize_term(std::string_view term);

/// Content words of `text` (stopwords removed) followed by the normalized
/// object terms, deduplicated keeping first occurrence.
std::vector<std::string> extract_terms(std::string_view text, std::span<const std::string> object_terms);

class KnowledgeSource {
 public:
  virtual ~KnowledgeSource() = default;
  /// Top-k whitelisted edges for a term, sorted by (weight desc, target asc).
  /// Unknown terms yield an empty list.
  virtual std::vector<ConceptEdge> lookup(const std::string& term, std::size_t k) = 0;
  virtual std::string provenance() const = 0;
};

/// Offline edge table loaded from a JSON-lines snapshot.
class KnowledgeSnapshot final : public KnowledgeSource {
 public:
  KnowledgeSnapshot(std::span<const ConceptEdge> edges, RelationWhitelist whitelist = default_relations(),
                    std::string source = "inline", std::string date = "unknown");

  /// Lines are {term, relation, target, weight}; an optional
  /// {"provenance": {"source": ..., "date": ...}} line may appear anywhere.
  /// Edges outside the whitelist or with source == target are skipped.
  static KnowledgeSnapshot load(const std::filesystem::path& path,
                                RelationWhitelist whitelist = default_relations());

  std::vector<ConceptEdge> lookup(const std::string& term, std::size_t k) override;
  std::string provenance() const override { return source_ + "@" + date_; }

  std::size_t edge_count() const;
  std::size_t skipped() const { return skipped_; }

 private:
  void add(ConceptEdge edge);
  void finalize();

  RelationWhitelist whitelist_;
  std::unordered_map<std::string, std::vector<ConceptEdge>> edges_;
  std::string source_;
  std::string date_;
  std::size_t skipped_ = 0;
};

/// Parses a ConceptNet JSON-LD node response into edges leaving `term`.
std::vector<ConceptEdge> parse_conceptnet_edges(std::string_view body, const std::string& term,
                                                const RelationWhitelist& whitelist);

/// Live ConceptNet client: GET <endpoint>/c/en/<term>, rate limited, with a
/// persistent cache of raw responses keyed by term.
class ConceptNetClient final : public KnowledgeSource {
 public:
  struct Options {
    std::string endpoint = "https://api.conceptnet.io";
    std::size_t edge_limit = 1000;
    std::chrono::milliseconds min_interval{1200};
  };

  ConceptNetClient(Options options, HttpClientFactory http, std::optional<DiskCache> cache,
                   RelationWhitelist whitelist = default_relations(), Sleeper sleeper = real_sleeper());

  /// Throws Error(BackendUnreachable) on transport failure or an unexpected status.
  std::vector<ConceptEdge> lookup(const std::string& term, std::size_t k) override;
  std::string provenance() const override { return options_.endpoint; }

  std::size_t request_count() const { return requests_.load(); }

 private:
  std::string fetch(const std::string& term);

  Options options_;
  HttpClientFactory http_;
  std::optional<DiskCache> cache_;
  RelationWhitelist whitelist_;
  RateLimiter limiter_;
  std::mutex memo_mutex_;
  std::unordered_map<std::string, std::vector<ConceptEdge>> memo_;
  std::atomic<std::size_t> requests_{0};
};

struct EnrichmentPolicy {
  std::size_t k_per_term = 3;
  std::size_t max_concepts = 10;
};

/// Looks up every extracted term, merges the results (one edge per
/// (relation, target), max weight wins), re-ranks and truncates.
/// `detections` are expected to have gone through select_objects already.
EnrichedContext enrich(const Sample& sample, std::span<const Detection> detections, KnowledgeSource& knowledge,
                       std::size_t k_per_term, std::size_t max_concepts);

inline EnrichedContext enrich(const Sample& sample, std::span<const Detection> detections,
                              KnowledgeSource& knowledge, const EnrichmentPolicy& policy) {
  return enrich(sample, detections, knowledge, policy.k_per_term, policy.max_concepts);
}

}  // namespace sarceval
