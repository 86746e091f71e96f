#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarceval/cache.hpp"
#include "sarceval/datamodel.hpp"
#include "sarceval/http.hpp"
#include "sarceval/promptgen.hpp"

namespace sarceval {

struct BackendConfig {
  std::string backend_id = "mock";
  std::string kind = "mock";  // "openai" or "mock"
  std::string endpoint_url = "https://api.openai.com/v1";
  std::string model_name = "mock";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_tokens = 512;
  int max_retries = 3;
  int parallelism = 1;
  bool supports_images = true;
  std::chrono::milliseconds initial_backoff{1000};
  std::filesystem::path mock_script;  // kind == "mock"

  /// Throws Error(ConfigError).
  void validate() const;
};

struct Usage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ImagePayload {
  std::string ref;
  std::optional<std::string> bytes;  // absent when the reference is not a readable file
  std::string mime_type;
};

/// Reads the image if it exists locally; the MIME type follows the extension.
ImagePayload load_image(const std::string& image_ref, const std::filesystem::path& root);

struct RawCompletion {
  std::string text;
  Usage usage;
};

/// A single request to a model. Retries and caching live in CompletionClient.
/// Implementations signal failures with Error of kind AuthError, RateLimited,
/// TransportError or MalformedResponse, and must be safe to call concurrently.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual RawCompletion attempt(const std::string& prompt, const ImagePayload& image) = 0;
};

/// Maps an HTTP status from a model endpoint onto the error taxonomy.
[[noreturn]] void throw_for_status(int status, const std::string& body);

/// OpenAI-compatible POST <endpoint>/chat/completions with the image attached
/// as a base64 data URL content part.
class OpenAIChatBackend final : public ModelBackend {
 public:
  /// Resolves the API key from config.api_key_env; throws AuthError if unset.
  OpenAIChatBackend(BackendConfig config, HttpClientFactory http);

  RawCompletion attempt(const std::string& prompt, const ImagePayload& image) override;

  std::string request_body(const std::string& prompt, const ImagePayload& image) const;

 private:
  BackendConfig config_;
  HttpClientFactory http_;
  std::string api_key_;
  std::string base_url_;
  std::string path_prefix_;
};

/// Scripted backend for tests and offline runs. Script file (JSON):
///   {"responses": {"<prompt fingerprint>": "text"},
///    "by_image":  {"<image ref>": "text"},
///    "default":   "text",
///    "faults":    {"<prompt fingerprint>": [429, 500]},
///    "latency_ms": 0}
/// Faults are HTTP statuses consumed one per attempt before the scripted
/// response is returned. A prompt with no response and no default fails with
/// MalformedResponse.
class MockBackend final : public ModelBackend {
 public:
  struct Script {
    std::map<std::string, std::string> responses;
    std::map<std::string, std::string> by_image;
    std::optional<std::string> default_response;
    std::map<std::string, std::vector<int>> faults;
    std::chrono::milliseconds latency{0};
  };

  explicit MockBackend(Script script);
  static Script load_script(const std::filesystem::path& path);

  RawCompletion attempt(const std::string& prompt, const ImagePayload& image) override;

  std::size_t calls() const { return calls_.load(); }
  std::size_t peak_in_flight() const { return peak_.load(); }

 private:
  Script script_;
  std::mutex fault_mutex_;
  std::map<std::string, std::deque<int>> pending_faults_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> peak_{0};
};

std::shared_ptr<ModelBackend> make_backend(const BackendConfig& config, HttpClientFactory http);

struct Completion {
  std::string text;
  Usage usage;
  std::size_t attempts = 0;  // 0 on a cache hit
  bool from_cache = false;
};

/// Retry, backoff and response caching around a ModelBackend.
class CompletionClient {
 public:
  CompletionClient(BackendConfig config, std::shared_ptr<ModelBackend> backend, std::optional<DiskCache> cache,
                   Sleeper sleeper = real_sleeper(), std::filesystem::path image_root = {});

  /// RateLimited and TransportError are retried with exponential backoff up
  /// to max_retries times; other errors surface immediately.
  Completion complete(const std::string& prompt, const std::string& image_ref);

  std::string cache_key(const std::string& prompt, const ImagePayload& image) const;

  const BackendConfig& config() const { return config_; }
  std::size_t backend_attempts() const { return attempts_.load(); }

 private:
  BackendConfig config_;
  std::shared_ptr<ModelBackend> backend_;
  std::optional<DiskCache> cache_;
  Sleeper sleeper_;
  std::filesystem::path image_root_;
  std::atomic<std::size_t> attempts_{0};
};

/// One-shot call without a cache.
Completion complete(const BackendConfig& config, const std::string& prompt, const std::string& image_ref,
                    HttpClientFactory http = default_http_client_factory());

struct BatchJob {
  std::string sample_id;
  std::string image_ref;
  RenderedPrompt prompt;
};

/// Runs jobs with at most config.parallelism requests in flight. Output is in
/// job order; a failed job yields a Prediction with `error` set and empty output.
std::vector<Prediction> run_batch(CompletionClient& client, std::span<const BatchJob> jobs);

}  // namespace sarceval
