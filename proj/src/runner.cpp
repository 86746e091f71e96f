#include "sarceval/runner.hpp"

#include <chrono>
#include <ctime>
#include <set>

#include <fmt/format.h>

#include "sarceval/error.hpp"
#include "sarceval/ingest.hpp"
#include "sarceval/metrics/classification.hpp"
#include "sarceval/promptgen.hpp"
#include "sarceval/report.hpp"
#include "sarceval/serialization.hpp"
#include "sarceval/text.hpp"

namespace sarceval {

using nlohmann::json;
namespace fs = std::filesystem;

// --- config -----------------------------------------------------------------

void RunConfig::validate() const {
  if (dataset_path.empty()) throw Error(ErrorKind::ConfigError, "dataset path is empty");
  if (method == Method::Enhanced && (!detections.configured() || !knowledge.configured()))
    throw Error(ErrorKind::ConfigError, "enhanced runs need both a detections source and a knowledge source");
  if (method == Method::Baseline && (detections.configured() || knowledge.configured()))
    throw Error(ErrorKind::ConfigError, "baseline runs must not configure detections or knowledge");
  if (!knowledge.snapshot.empty() && knowledge.live)
    throw Error(ErrorKind::ConfigError, "choose either a knowledge snapshot or live ConceptNet, not both");
  if (!(selection.min_conf >= 0.0 && selection.min_conf <= 1.0))
    throw Error(ErrorKind::ConfigError, "selection.min_conf must be in [0,1]");
  if (relations.empty()) throw Error(ErrorKind::ConfigError, "relation whitelist is empty");
  if (!(metric_options.rouge_beta > 0.0)) throw Error(ErrorKind::ConfigError, "rouge_beta must be > 0");
  if (metric_options.bootstrap_resamples == 0) throw Error(ErrorKind::ConfigError, "bootstrap_resamples must be > 0");
  if (template_version.empty()) throw Error(ErrorKind::ConfigError, "template version is empty");
  if (template_dir.empty() && template_version != kDefaultTemplateVersion)
    throw Error(ErrorKind::ConfigError, "template version '" + template_version +
                                            "' requires a template dir (built-in is " +
                                            std::string(kDefaultTemplateVersion) + ")");
  if (output_dir.empty()) throw Error(ErrorKind::ConfigError, "output_dir is empty");
  backend.validate();
}

json RunConfig::to_json() const {
  json j;
  j["task"] = to_string(task);
  j["method"] = to_string(method);
  j["dataset"] = dataset_path.string();
  j["detections"] = {{"file", detections.file.string()}, {"sidecar_url", detections.sidecar_url}};
  j["knowledge"] = {
      {"snapshot", knowledge.snapshot.string()}, {"live", knowledge.live}, {"live_endpoint", knowledge.live_endpoint}};
  j["template"] = {{"version", template_version}, {"dir", template_dir.string()}};
  j["backend"] = {{"id", backend.backend_id},
                  {"kind", backend.kind},
                  {"endpoint_url", backend.endpoint_url},
                  {"model", backend.model_name},
                  {"api_key_env", backend.api_key_env},
                  {"temperature", backend.temperature},
                  {"max_tokens", backend.max_tokens},
                  {"max_retries", backend.max_retries},
                  {"parallelism", backend.parallelism},
                  {"supports_images", backend.supports_images},
                  {"initial_backoff_ms", backend.initial_backoff.count()},
                  {"mock_script", backend.mock_script.string()}};
  j["metrics"] = {{"unparsed_policy", to_string(metric_options.unparsed_policy)},
                  {"rouge_beta", metric_options.rouge_beta},
                  {"sentence_bleu", metric_options.sentence_bleu},
                  {"meteor",
                   {{"alpha", metric_options.meteor.alpha},
                    {"beta", metric_options.meteor.beta},
                    {"gamma", metric_options.meteor.gamma}}},
                  {"bootstrap_resamples", metric_options.bootstrap_resamples}};
  j["selection"] = {{"min_conf", selection.min_conf}, {"max_objects", selection.max_objects}};
  j["enrichment"] = {{"k_per_term", enrichment.k_per_term},
                     {"max_concepts", enrichment.max_concepts},
                     {"relations", relations}};
  j["output_dir"] = output_dir.string();
  j["cache_dir"] = cache_dir.string();
  j["seed"] = seed;
  return j;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  if (path.is_absolute() || base.empty()) return path.lexically_normal();
  return (base / path).lexically_normal();
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorKind::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  try {
    reject_unknown(j,
                   {"task", "method", "dataset", "detections", "knowledge", "template", "backend", "metrics",
                    "selection", "enrichment", "output_dir", "cache_dir", "seed"},
                   "config");
    RunConfig c;
    auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw Error(ErrorKind::ConfigError, "task must be msd or mse");
    c.task = *task;
    auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw Error(ErrorKind::ConfigError, "method must be baseline or enhanced");
    c.method = *method;
    c.dataset_path = resolve(base_dir, j.at("dataset").get<std::string>());

    if (j.contains("detections") && !j["detections"].is_null()) {
      const auto& d = j["detections"];
      reject_unknown(d, {"file", "sidecar_url"}, "detections");
      c.detections.file = resolve(base_dir, d.value("file", ""));
      c.detections.sidecar_url = d.value("sidecar_url", "");
    }
    if (j.contains("knowledge") && !j["knowledge"].is_null()) {
      const auto& k = j["knowledge"];
      reject_unknown(k, {"snapshot", "live", "live_endpoint"}, "knowledge");
      c.knowledge.snapshot = resolve(base_dir, k.value("snapshot", ""));
      c.knowledge.live = k.value("live", false);
      c.knowledge.live_endpoint = k.value("live_endpoint", c.knowledge.live_endpoint);
    }
    if (j.contains("template")) {
      const auto& t = j["template"];
      reject_unknown(t, {"version", "dir"}, "template");
      c.template_version = t.value("version", c.template_version);
      c.template_dir = resolve(base_dir, t.value("dir", ""));
    }
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      reject_unknown(b,
                     {"id", "kind", "endpoint_url", "model", "api_key_env", "temperature", "max_tokens",
                      "max_retries", "parallelism", "supports_images", "initial_backoff_ms", "mock_script"},
                     "backend");
      auto& cfg = c.backend;
      cfg.backend_id = b.value("id", cfg.backend_id);
      cfg.kind = b.value("kind", cfg.kind);
      cfg.endpoint_url = b.value("endpoint_url", cfg.endpoint_url);
      cfg.model_name = b.value("model", cfg.model_name);
      cfg.api_key_env = b.value("api_key_env", cfg.api_key_env);
      cfg.temperature = b.value("temperature", cfg.temperature);
      cfg.max_tokens = b.value("max_tokens", cfg.max_tokens);
      cfg.max_retries = b.value("max_retries", cfg.max_retries);
      cfg.parallelism = b.value("parallelism", cfg.parallelism);
      cfg.supports_images = b.value("supports_images", cfg.supports_images);
      cfg.initial_backoff = std::chrono::milliseconds(b.value("initial_backoff_ms", cfg.initial_backoff.count()));
      cfg.mock_script = resolve(base_dir, b.value("mock_script", ""));
    }
    if (j.contains("metrics")) {
      const auto& m = j["metrics"];
      reject_unknown(m, {"unparsed_policy", "rouge_beta", "sentence_bleu", "meteor", "bootstrap_resamples"},
                     "metrics");
      auto& o = c.metric_options;
      auto policy = parse_unparsed_policy(m.value("unparsed_policy", std::string(to_string(o.unparsed_policy))));
      if (!policy) throw Error(ErrorKind::ConfigError, "unparsed_policy must be as_negative, as_positive or exclude");
      o.unparsed_policy = *policy;
      o.rouge_beta = m.value("rouge_beta", o.rouge_beta);
      o.sentence_bleu = m.value("sentence_bleu", o.sentence_bleu);
      if (m.contains("meteor")) {
        o.meteor.alpha = m["meteor"].value("alpha", o.meteor.alpha);
        o.meteor.beta = m["meteor"].value("beta", o.meteor.beta);
        o.meteor.gamma = m["meteor"].value("gamma", o.meteor.gamma);
      }
      o.bootstrap_resamples = m.value("bootstrap_resamples", o.bootstrap_resamples);
    }
    if (j.contains("selection")) {
      const auto& s = j["selection"];
      reject_unknown(s, {"min_conf", "max_objects"}, "selection");
      c.selection.min_conf = s.value("min_conf", c.selection.min_conf);
      c.selection.max_objects = s.value("max_objects", c.selection.max_objects);
    }
    if (j.contains("enrichment")) {
      const auto& e = j["enrichment"];
      reject_unknown(e, {"k_per_term", "max_concepts", "relations"}, "enrichment");
      c.enrichment.k_per_term = e.value("k_per_term", c.enrichment.k_per_term);
      c.enrichment.max_concepts = e.value("max_concepts", c.enrichment.max_concepts);
      if (e.contains("relations")) c.relations = e["relations"].get<RelationWhitelist>();
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    if (j.contains("cache_dir")) c.cache_dir = resolve(base_dir, j["cache_dir"].get<std::string>());
    c.seed = j.value("seed", c.seed);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

std::string RunConfig::fingerprint() const { return sarceval::fingerprint(to_json().dump()); }

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j, fs::absolute(path).parent_path());
}

// --- scoring ----------------------------------------------------------------

namespace {

std::string percent(double v) { return fmt::format("{:.6f}", v); }

void score_msd(RunReport& report, const std::vector<Sample>& samples, const MetricOptions& options) {
  std::vector<metrics::LabelPair> pairs;
  std::size_t unparsed = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& p = report.per_sample[i];
    const auto gold = std::get<Label>(samples[i].gold);
    std::optional<Label> used;
    if (const auto* label = std::get_if<Label>(&p.parsed)) {
      used = *label;
    } else {
      ++unparsed;
      if (options.unparsed_policy == UnparsedPolicy::AsNegative) used = Label::NotSarcastic;
      if (options.unparsed_policy == UnparsedPolicy::AsPositive) used = Label::Sarcastic;
    }
    // Excluded samples count as incorrect in the significance stream.
    const double correct = used && *used == gold ? 100.0 : 0.0;
    p.scores = {{"accuracy", correct}, {"f1", correct}};
    if (used) pairs.push_back({*used, gold});
  }
  report.metrics["accuracy"] = pairs.empty() ? 0.0 : metrics::accuracy(pairs);
  report.metrics["f1"] = pairs.empty() ? 0.0 : metrics::f1_binary(pairs);
  const auto cm = metrics::confusion(pairs);
  report.provenance["confusion"] = fmt::format("tp={} fp={} tn={} fn={}", cm.tp, cm.fp, cm.tn, cm.fn);
  report.provenance["unparsed_count"] = std::to_string(unparsed);
  report.provenance["unparsed_rate"] =
      percent(samples.empty() ? 0.0 : 100.0 * static_cast<double>(unparsed) / static_cast<double>(samples.size()));
}

void score_mse(RunReport& report, const std::vector<Sample>& samples, const MetricOptions& options) {
  std::vector<metrics::Tokens> hyps;
  std::vector<metrics::Tokens> refs;
  std::size_t unparsed = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = report.per_sample[i];
    std::string hyp;
    if (const auto* e = std::get_if<Explanation>(&p.parsed))
      hyp = e->text;
    else
      ++unparsed;
    hyps.push_back(text::tokenize(hyp));
    refs.push_back(text::tokenize(std::get<Explanation>(samples[i].gold).text));
  }

  std::vector<double> bleu_scores(4, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& p = report.per_sample[i];
    auto sb = metrics::sentence_bleu_smoothed(hyps[i], refs[i]);
    auto r = metrics::rouge_pair(hyps[i], refs[i], options.rouge_beta);
    p.scores = {{"bleu1", sb[0]},     {"bleu2", sb[1]},     {"bleu3", sb[2]},     {"bleu4", sb[3]},
                {"rouge1", r.rouge1}, {"rouge2", r.rouge2}, {"rougeL", r.rougeL},
                {"meteor", metrics::meteor_pair(hyps[i], refs[i], options.meteor)}};
    if (options.sentence_bleu)
      for (std::size_t n = 0; n < 4; ++n) bleu_scores[n] += sb[n] / static_cast<double>(samples.size());
  }
  if (!options.sentence_bleu) bleu_scores = metrics::bleu(hyps, refs, 4);
  auto rouge = metrics::rouge(hyps, refs, options.rouge_beta);
  for (std::size_t n = 0; n < 4; ++n) report.metrics["bleu" + std::to_string(n + 1)] = bleu_scores[n];
  report.metrics["rouge1"] = rouge.rouge1;
  report.metrics["rouge2"] = rouge.rouge2;
  report.metrics["rougeL"] = rouge.rougeL;
  report.metrics["meteor"] = metrics::meteor(hyps, refs, options.meteor);
  report.provenance["unparsed_count"] = std::to_string(unparsed);
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const RelationWhitelist& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

void score_report(RunReport& report, const std::vector<Sample>& samples, const MetricOptions& options) {
  if (report.per_sample.size() != samples.size())
    throw Error(ErrorKind::LengthMismatch, "predictions and samples differ in length");
  report.metrics.clear();
  if (report.task == Task::MSD)
    score_msd(report, samples, options);
  else
    score_mse(report, samples, options);
}

// --- run --------------------------------------------------------------------

RunOutcome run(const RunConfig& config, const RunEnvironment& env) {
  config.validate();
  fs::create_directories(config.output_dir);

  auto write_errors = [&](const std::vector<SampleError>& errors, const std::vector<LineViolation>& lines) {
    json j = json::array();
    for (const auto& v : lines) j.push_back({{"line", v.line}, {"stage", "ingest"}, {"message", v.reason}});
    for (const auto& e : errors) j.push_back({{"sample_id", e.sample_id}, {"stage", e.stage}, {"message", e.message}});
    write_file_atomic(config.output_dir / "errors.json", j.dump(2) + "\n");
  };

  DatasetManifest manifest;
  try {
    manifest = load_dataset(config.dataset_path, config.task);
  } catch (const SchemaViolation& e) {
    write_errors({}, e.violations());
    throw;
  }
  const auto dataset_fp = fingerprint(read_file(config.dataset_path));
  const auto image_root = config.dataset_path.parent_path();

  const auto tmpl = config.template_dir.empty() ? default_template(config.task, config.method)
                                                : load_template(config.template_dir, config.task, config.method);
  if (tmpl.version() != config.template_version)
    throw Error(ErrorKind::ConfigError,
                "template dir holds version '" + tmpl.version() + "', config says '" + config.template_version + "'");

  RunReport report;
  report.task = config.task;
  report.method = config.method;
  report.backend_id = config.backend.backend_id;
  report.config_fingerprint = config.fingerprint();
  report.dataset_fingerprint = dataset_fp;

  // Enrichment sources.
  std::optional<DetectionMap> detection_file;
  std::unique_ptr<DetectionSidecar> sidecar;
  std::unique_ptr<KnowledgeSource> knowledge;
  if (config.method == Method::Enhanced) {
    if (!config.detections.file.empty()) {
      detection_file = load_detections(config.detections.file);
      report.provenance["detections"] = "file:" + config.detections.file.filename().string();
    } else {
      sidecar = std::make_unique<DetectionSidecar>(config.detections.sidecar_url, env.http,
                                                   DiskCache(config.cache_dir, "detections"), image_root);
      report.provenance["detections"] = "sidecar:" + config.detections.sidecar_url;
    }
    if (!config.knowledge.snapshot.empty()) {
      knowledge = std::make_unique<KnowledgeSnapshot>(KnowledgeSnapshot::load(config.knowledge.snapshot, config.relations));
    } else {
      ConceptNetClient::Options options;
      options.endpoint = config.knowledge.live_endpoint;
      knowledge = std::make_unique<ConceptNetClient>(options, env.http, DiskCache(config.cache_dir, "conceptnet"),
                                                     config.relations, env.sleeper);
    }
    report.provenance["knowledge"] = knowledge->provenance();
    report.provenance["min_conf"] = fmt::format("{}", config.selection.min_conf);
    report.provenance["max_objects"] = std::to_string(config.selection.max_objects);
    report.provenance["k_per_term"] = std::to_string(config.enrichment.k_per_term);
    report.provenance["max_concepts"] = std::to_string(config.enrichment.max_concepts);
    report.provenance["relations"] = join(config.relations);
  }

  // Prompts.
  std::vector<SampleError> errors;
  std::vector<BatchJob> jobs;
  std::vector<std::size_t> job_index;
  std::vector<std::optional<std::string>> early_error(manifest.samples.size());
  std::vector<std::string> prompt_fps(manifest.samples.size());
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const auto& sample = manifest.samples[i];
    std::string stage = "prompt";
    try {
      RenderedPrompt prompt;
      if (config.method == Method::Enhanced) {
        stage = "detections";
        std::vector<Detection> raw;
        if (detection_file) {
          if (auto it = detection_file->find(sample.id); it != detection_file->end()) raw = it->second;
        } else {
          raw = sidecar->fetch(sample.image_ref);
        }
        auto selected = select_objects(raw, config.selection);
        stage = "knowledge";
        auto ctx = enrich(sample, selected, *knowledge, config.enrichment);
        stage = "prompt";
        prompt = render(tmpl, sample, ctx);
      } else {
        prompt = render(tmpl, sample);
      }
      prompt_fps[i] = prompt.fingerprint;
      jobs.push_back({sample.id, sample.image_ref, std::move(prompt)});
      job_index.push_back(i);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InvalidTemplate) throw;
      early_error[i] = e.what();
      errors.push_back({sample.id, stage, e.what()});
    }
  }

  // Backend.
  auto backend = env.backend ? env.backend : make_backend(config.backend, env.http);
  CompletionClient client(config.backend, backend, DiskCache(config.cache_dir, "responses"), env.sleeper, image_root);
  auto batch = run_batch(client, jobs);

  report.per_sample.resize(manifest.samples.size());
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    auto& p = report.per_sample[i];
    p.sample_id = manifest.samples[i].id;
    p.backend_id = config.backend.backend_id;
    p.prompt_fingerprint = prompt_fps[i];
    p.error = early_error[i];
  }
  for (std::size_t k = 0; k < batch.size(); ++k) {
    auto& p = report.per_sample[job_index[k]];
    p = std::move(batch[k]);
    if (p.error)
      errors.push_back({p.sample_id, "backend", *p.error});
    else
      p.parsed = parse_output(config.task, p.raw_output);
  }

  score_report(report, manifest.samples, config.metric_options);

  auto& prov = report.provenance;
  prov["template_version"] = tmpl.version();
  prov["dataset"] = manifest.source_name;
  prov["dataset_size"] = std::to_string(manifest.samples.size());
  prov["backend_kind"] = config.backend.kind;
  prov["model"] = config.backend.model_name;
  prov["temperature"] = fmt::format("{}", config.backend.temperature);
  prov["max_tokens"] = std::to_string(config.backend.max_tokens);
  prov["tokenizer"] = "lowercase+strip-ascii-punct+whitespace/v1";
  prov["unparsed_policy"] = std::string(to_string(config.metric_options.unparsed_policy));
  prov["error_count"] = std::to_string(errors.size());
  if (config.task == Task::MSE) {
    prov["bleu"] = config.metric_options.sentence_bleu ? "sentence-add1-smoothed (ablation)" : "corpus-unsmoothed";
    prov["meteor"] = std::string(metrics::kMeteorVersion);
    prov["rouge_beta"] = fmt::format("{}", config.metric_options.rouge_beta);
    prov["per_sample_bleu"] = "sentence-add1-smoothed";
  }
  prov["seed"] = std::to_string(config.seed);

  RunOutcome outcome;
  outcome.report = std::move(report);
  outcome.report.timestamp = env.now_iso8601 ? env.now_iso8601() : utc_now();
  outcome.errors = std::move(errors);
  outcome.backend_attempts = client.backend_attempts();

  const auto report_bytes = report_json(outcome.report);
  outcome.report_fingerprint = fingerprint(report_bytes);
  write_file_atomic(config.output_dir / "report.json", report_bytes);
  std::string predictions;
  for (const auto& p : outcome.report.per_sample) predictions += json(p).dump() + "\n";
  write_file_atomic(config.output_dir / "predictions.jsonl", predictions);
  write_file_atomic(config.output_dir / "table.txt", report_table_text(outcome.report));
  write_file_atomic(config.output_dir / "table.csv", report_table_csv(outcome.report));
  write_errors(outcome.errors, {});
  json meta{{"timestamp", outcome.report.timestamp},
            {"backend_attempts", outcome.backend_attempts},
            {"report_fingerprint", outcome.report_fingerprint}};
  write_file_atomic(config.output_dir / "run_meta.json", meta.dump(2) + "\n");
  return outcome;
}

}  // namespace sarceval
