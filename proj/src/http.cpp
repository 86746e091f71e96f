#include "sarceval/http.hpp"

#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "sarceval/error.hpp"

namespace sarceval {

namespace {

class HttplibClient final : public HttpClient {
 public:
  HttplibClient(const std::string& base_url, std::chrono::seconds timeout) : client_(base_url) {
    if (!client_.is_valid()) throw Error(ErrorKind::ConfigError, "invalid URL " + base_url);
    client_.set_connection_timeout(std::chrono::seconds(10));
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
    client_.set_follow_location(true);
  }

  HttpResponse get(const std::string& path, const HttpHeaders& headers) override {
    return convert(client_.Get(path, to_headers(headers)));
  }

  HttpResponse post(const std::string& path, const HttpHeaders& headers, const std::string& body,
                    const std::string& content_type) override {
    return convert(client_.Post(path, to_headers(headers), body, content_type));
  }

 private:
  static httplib::Headers to_headers(const HttpHeaders& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
  }

  static HttpResponse convert(const httplib::Result& result) {
    if (!result) throw Error(ErrorKind::TransportError, httplib::to_string(result.error()));
    return {result->status, result->body};
  }

  httplib::Client client_;
};

}  // namespace

HttpClientFactory default_http_client_factory(std::chrono::seconds timeout) {
  return [timeout](const std::string& base_url) -> std::unique_ptr<HttpClient> {
    return std::make_unique<HttplibClient>(base_url, timeout);
  };
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  auto prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

RateLimiter::RateLimiter(std::chrono::milliseconds interval, Sleeper sleeper, Clock clock)
    : interval_(interval), sleeper_(std::move(sleeper)), clock_(std::move(clock)) {}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  auto now = clock_();
  if (last_) {
    auto ready = *last_ + interval_;
    if (now < ready) {
      sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(ready - now));
      now = clock_();
      if (now < ready) now = ready;
    }
  }
  last_ = now;
}

}  // namespace sarceval
