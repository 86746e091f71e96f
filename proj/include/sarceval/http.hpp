#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sarceval {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Minimal blocking HTTP client. Implementations throw
/// Error(TransportError) when no response could be obtained at all.
class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse get(const std::string& path, const HttpHeaders& headers) = 0;
  virtual HttpResponse post(const std::string& path, const HttpHeaders& headers, const std::string& body,
                            const std::string& content_type) = 0;
};

/// Builds a client for a base URL such as "http://127.0.0.1:8080" or "https://api.openai.com".
using HttpClientFactory = std::function<std::unique_ptr<HttpClient>(const std::string& base_url)>;

HttpClientFactory default_http_client_factory(std::chrono::seconds timeout = std::chrono::seconds(120));

/// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> split_url(const std::string& url);

/// Sleep hook so retry and rate-limit code can be tested without wall-clock waits.
using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

/// Spaces calls at least `interval` apart. Thread-safe; callers queue.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit RateLimiter(std::chrono::milliseconds interval, Sleeper sleeper = real_sleeper(),
                       Clock clock = [] { return std::chrono::steady_clock::now(); });

  void acquire();

 private:
  std::chrono::milliseconds interval_;
  Sleeper sleeper_;
  Clock clock_;
  std::mutex mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

}  // namespace sarceval
