#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sarceval/backend.hpp"
#include "sarceval/datamodel.hpp"
#include "sarceval/http.hpp"
#include "sarceval/knowledge.hpp"
#include "sarceval/metrics/bootstrap.hpp"
#include "sarceval/metrics/generation.hpp"
#include "sarceval/parse.hpp"
#include "sarceval/vision.hpp"

namespace sarceval {

struct DetectionSourceConfig {
  std::filesystem::path file;  // takes precedence over the sidecar
  std::string sidecar_url;
  bool configured() const { return !file.empty() || !sidecar_url.empty(); }
};

struct KnowledgeSourceConfig {
  std::filesystem::path snapshot;
  bool live = false;
  std::string live_endpoint = "https://api.conceptnet.io";
  bool configured() const { return !snapshot.empty() || live; }
};

struct MetricOptions {
  UnparsedPolicy unparsed_policy = UnparsedPolicy::AsNegative;
  double rouge_beta = 1.0;
  bool sentence_bleu = false;  // ablation only; reports use corpus BLEU by default
  metrics::MeteorParams meteor;
  std::size_t bootstrap_resamples = metrics::kDefaultResamples;
};

struct RunConfig {
  Task task = Task::MSD;
  Method method = Method::Baseline;
  std::filesystem::path dataset_path;
  DetectionSourceConfig detections;
  KnowledgeSourceConfig knowledge;
  std::string template_version{kDefaultTemplateVersion};
  std::filesystem::path template_dir;  // empty: built-in templates
  BackendConfig backend;
  MetricOptions metric_options;
  SelectionPolicy selection;
  EnrichmentPolicy enrichment;
  RelationWhitelist relations = default_relations();
  std::filesystem::path output_dir = "runs/out";
  std::filesystem::path cache_dir = ".sarceval_cache";
  std::uint64_t seed = metrics::kDefaultSeed;

  /// Throws Error(ConfigError).
  void validate() const;

  nlohmann::json to_json() const;
  /// Relative paths are resolved against base_dir.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

  /// SHA-256 of the canonical JSON form; changes with any field.
  std::string fingerprint() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Injection points for tests; defaults talk to the real network and clock.
struct RunEnvironment {
  HttpClientFactory http = default_http_client_factory();
  Sleeper sleeper = real_sleeper();
  std::shared_ptr<ModelBackend> backend;  // overrides make_backend when set
  std::function<std::string()> now_iso8601;
};

struct SampleError {
  std::string sample_id;
  std::string stage;
  std::string message;
};

struct RunOutcome {
  RunReport report;
  std::vector<SampleError> errors;
  std::size_t backend_attempts = 0;
  std::string report_fingerprint;  // SHA-256 of report.json bytes
};

/// Executes the whole pipeline and writes report.json, predictions.jsonl,
/// table.txt, table.csv, errors.json and run_meta.json into output_dir.
RunOutcome run(const RunConfig& config, const RunEnvironment& env = {});

/// Scores predictions against gold and fills metrics, per-sample scores and
/// the unparsed counters in provenance.
void score_report(RunReport& report, const std::vector<Sample>& samples, const MetricOptions& options);

}  // namespace sarceval
