#include "sarceval/backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sarceval/error.hpp"
#include "sarceval/serialization.hpp"
#include "sarceval/text.hpp"
#include "sarceval/vision.hpp"

namespace sarceval {

using nlohmann::json;

void BackendConfig::validate() const {
  if (backend_id.empty()) throw Error(ErrorKind::ConfigError, "backend_id is empty");
  if (!(temperature >= 0.0)) throw Error(ErrorKind::ConfigError, "temperature must be >= 0");
  if (parallelism < 1) throw Error(ErrorKind::ConfigError, "parallelism must be >= 1");
  if (max_retries < 0) throw Error(ErrorKind::ConfigError, "max_retries must be >= 0");
  if (max_tokens < 1) throw Error(ErrorKind::ConfigError, "max_tokens must be >= 1");
  if (!supports_images) throw Error(ErrorKind::ConfigError, "backend '" + backend_id + "' cannot accept images");
  if (kind == "openai") {
    if (endpoint_url.empty() || model_name.empty())
      throw Error(ErrorKind::ConfigError, "openai backend needs endpoint_url and model_name");
  } else if (kind == "mock") {
    if (mock_script.empty()) throw Error(ErrorKind::ConfigError, "mock backend needs mock_script");
  } else {
    throw Error(ErrorKind::ConfigError, "unknown backend kind '" + kind + "'");
  }
}

ImagePayload load_image(const std::string& image_ref, const std::filesystem::path& root) {
  ImagePayload image{image_ref, std::nullopt, "image/jpeg"};
  auto path = resolve_image_path(image_ref, root);
  auto ext = text::to_lower(path.extension().string());
  if (ext == ".png") image.mime_type = "image/png";
  else if (ext == ".gif") image.mime_type = "image/gif";
  else if (ext == ".webp") image.mime_type = "image/webp";
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) image.bytes = read_file(path);
  return image;
}

void throw_for_status(int status, const std::string& body) {
  auto message = "status " + std::to_string(status) + ": " + body.substr(0, 500);
  if (status == 401 || status == 403) throw Error(ErrorKind::AuthError, message);
  if (status == 429) throw Error(ErrorKind::RateLimited, message);
  if (status >= 500) throw Error(ErrorKind::TransportError, message);
  throw Error(ErrorKind::MalformedResponse, message);
}

// --- OpenAI-compatible ------------------------------------------------------

OpenAIChatBackend::OpenAIChatBackend(BackendConfig config, HttpClientFactory http)
    : config_(std::move(config)), http_(std::move(http)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw Error(ErrorKind::AuthError, "environment variable " + config_.api_key_env + " is not set");
  api_key_ = key;
  std::tie(base_url_, path_prefix_) = split_url(config_.endpoint_url);
}

std::string OpenAIChatBackend::request_body(const std::string& prompt, const ImagePayload& image) const {
  if (!image.bytes) throw Error(ErrorKind::IoError, "image not readable: " + image.ref);
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", prompt}});
  content.push_back({{"type", "image_url"},
                     {"image_url", {{"url", "data:" + image.mime_type + ";base64," + base64_encode(*image.bytes)}}}});
  json body{{"model", config_.model_name},
            {"temperature", config_.temperature},
            {"max_tokens", config_.max_tokens},
            {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  return body.dump();
}

RawCompletion OpenAIChatBackend::attempt(const std::string& prompt, const ImagePayload& image) {
  auto body = request_body(prompt, image);
  auto client = http_(base_url_);
  auto response = client->post(path_prefix_ + "/chat/completions", {{"Authorization", "Bearer " + api_key_}}, body,
                               "application/json");
  if (response.status != 200) throw_for_status(response.status, response.body);
  try {
    auto j = json::parse(response.body);
    const auto& message = j.at("choices").at(0).at("message");
    RawCompletion out;
    const auto& content = message.at("content");
    if (content.is_string()) {
      out.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content)
        if (part.value("type", "") == "text") out.text += part.value("text", "");
    } else {
      throw Error(ErrorKind::MalformedResponse, "message content is neither string nor parts");
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      out.usage.completion_tokens = j["usage"].value("completion_tokens", 0L);
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, e.what());
  }
}

// --- mock -------------------------------------------------------------------

MockBackend::MockBackend(Script script) : script_(std::move(script)) {
  for (const auto& [fp, statuses] : script_.faults) pending_faults_[fp] = {statuses.begin(), statuses.end()};
}

MockBackend::Script MockBackend::load_script(const std::filesystem::path& path) {
  try {
    auto j = json::parse(read_file(path));
    Script s;
    s.responses = j.value("responses", std::map<std::string, std::string>{});
    s.by_image = j.value("by_image", std::map<std::string, std::string>{});
    if (j.contains("default") && j["default"].is_string()) s.default_response = j["default"].get<std::string>();
    s.faults = j.value("faults", std::map<std::string, std::vector<int>>{});
    s.latency = std::chrono::milliseconds(j.value("latency_ms", 0));
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, "mock script " + path.string() + ": " + e.what());
  }
}

RawCompletion MockBackend::attempt(const std::string& prompt, const ImagePayload& image) {
  ++calls_;
  auto now = ++in_flight_;
  auto peak = peak_.load();
  while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
  }
  struct Leave {
    std::atomic<std::size_t>& counter;
    ~Leave() { --counter; }
  } leave{in_flight_};

  if (script_.latency.count() > 0) std::this_thread::sleep_for(script_.latency);

  const auto fp = fingerprint(prompt);
  {
    std::lock_guard lock(fault_mutex_);
    if (auto it = pending_faults_.find(fp); it != pending_faults_.end() && !it->second.empty()) {
      int status = it->second.front();
      it->second.pop_front();
      throw_for_status(status, R"({"error":"scripted fault"})");
    }
  }
  if (auto it = script_.responses.find(fp); it != script_.responses.end()) return {it->second, {}};
  if (auto it = script_.by_image.find(image.ref); it != script_.by_image.end()) return {it->second, {}};
  if (script_.default_response) return {*script_.default_response, {}};
  throw Error(ErrorKind::MalformedResponse, "no scripted response for prompt " + fp);
}

std::shared_ptr<ModelBackend> make_backend(const BackendConfig& config, HttpClientFactory http) {
  config.validate();
  if (config.kind == "mock") return std::make_shared<MockBackend>(MockBackend::load_script(config.mock_script));
  return std::make_shared<OpenAIChatBackend>(config, std::move(http));
}

// --- client -----------------------------------------------------------------

CompletionClient::CompletionClient(BackendConfig config, std::shared_ptr<ModelBackend> backend,
                                   std::optional<DiskCache> cache, Sleeper sleeper, std::filesystem::path image_root)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      sleeper_(std::move(sleeper)),
      image_root_(std::move(image_root)) {}

std::string CompletionClient::cache_key(const std::string& prompt, const ImagePayload& image) const {
  const std::string& image_identity = image.bytes ? *image.bytes : image.ref;
  return fingerprint_fields({config_.backend_id, config_.model_name, prompt, image_identity,
                             fmt::format("{}", config_.temperature)});
}

Completion CompletionClient::complete(const std::string& prompt, const std::string& image_ref) {
  const auto image = load_image(image_ref, image_root_);
  const auto key = cache_key(prompt, image);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      try {
        auto j = json::parse(*hit);
        Completion c;
        c.text = j.at("text").get<std::string>();
        c.usage = {j.value("prompt_tokens", 0L), j.value("completion_tokens", 0L)};
        c.from_cache = true;
        return c;
      } catch (const json::exception&) {
        // Unreadable entry: fall through and overwrite it.
      }
    }
  }

  Completion result;
  for (int attempt = 0;; ++attempt) {
    ++attempts_;
    result.attempts = static_cast<std::size_t>(attempt) + 1;
    try {
      auto raw = backend_->attempt(prompt, image);
      result.text = std::move(raw.text);
      result.usage = raw.usage;
      break;
    } catch (const Error& e) {
      const bool retryable = e.kind() == ErrorKind::RateLimited || e.kind() == ErrorKind::TransportError;
      if (!retryable || attempt >= config_.max_retries) throw;
      sleeper_(config_.initial_backoff * (1LL << std::min(attempt, 16)));
    }
  }

  if (cache_) {
    json entry{{"text", result.text},
               {"prompt_tokens", result.usage.prompt_tokens},
               {"completion_tokens", result.usage.completion_tokens}};
    cache_->put(key, entry.dump());
  }
  return result;
}

Completion complete(const BackendConfig& config, const std::string& prompt, const std::string& image_ref,
                    HttpClientFactory http) {
  CompletionClient client(config, make_backend(config, std::move(http)), std::nullopt);
  return client.complete(prompt, image_ref);
}

std::vector<Prediction> run_batch(CompletionClient& client, std::span<const BatchJob> jobs) {
  std::vector<Prediction> out(jobs.size());
  const auto& config = client.config();
  auto work = [&](std::size_t i) {
    auto& p = out[i];
    p.sample_id = jobs[i].sample_id;
    p.backend_id = config.backend_id;
    p.prompt_fingerprint = jobs[i].prompt.fingerprint;
    p.parsed = Unparsed{};
    try {
      p.raw_output = client.complete(jobs[i].prompt.text, jobs[i].image_ref).text;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.parallelism, 1)), jobs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
      });
  }
  return out;
}

}  // namespace sarceval
