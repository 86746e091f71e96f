#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarceval/cache.hpp"
#include "sarceval/datamodel.hpp"
#include "sarceval/http.hpp"

namespace sarceval {

using DetectionMap = std::map<std::string, std::vector<Detection>>;

struct SelectionPolicy {
  double min_conf = 0.5;
  std::size_t max_objects = 10;
};

/// Lowercases label/attributes and checks the Detection invariants.
/// Throws std::invalid_argument with a reason on violation.
Detection normalize_detection(Detection d);

/// Reads a detections JSON-lines file. Records sharing an id are grouped in
/// file order. Throws MissingFile or SchemaViolation.
DetectionMap load_detections(const std::filesystem::path& path);

/// Filters by confidence >= min_conf, sorts by (confidence desc, label asc)
/// and keeps the first max_objects.
std::vector<Detection> select_objects(std::span<const Detection> dets, double min_conf, std::size_t max_objects);

inline std::vector<Detection> select_objects(std::span<const Detection> dets, const SelectionPolicy& policy) {
  return select_objects(dets, policy.min_conf, policy.max_objects);
}

/// Parses a sidecar /detect response body. Throws Error(InvalidResponse).
std::vector<Detection> parse_sidecar_response(std::string_view body);

/// Client for the detector sidecar's POST /detect endpoint with a disk cache
/// keyed by the image reference.
class DetectionSidecar {
 public:
  DetectionSidecar(std::string sidecar_url, HttpClientFactory http, std::optional<DiskCache> cache,
                   std::filesystem::path image_root = {});

  /// Throws SidecarUnreachable, SidecarError or InvalidResponse.
  std::vector<Detection> fetch(const std::string& image_ref);

  /// The validated response body, byte-for-byte as the sidecar sent it.
  std::string fetch_payload(const std::string& image_ref);

  std::size_t request_count() const { return requests_.load(); }

 private:
  std::string request_body(const std::string& image_ref) const;

  std::string base_url_;
  std::string path_prefix_;
  HttpClientFactory http_;
  std::optional<DiskCache> cache_;
  std::filesystem::path image_root_;
  std::atomic<std::size_t> requests_{0};
};

/// Convenience wrapper matching the one-shot use: no cache.
std::vector<Detection> fetch_detections(const std::string& image_ref, const std::string& sidecar_url,
                                        HttpClientFactory http = default_http_client_factory());

/// Standard base64 (RFC 4648) with padding.
std::string base64_encode(std::string_view bytes);

/// Resolves an image reference against a root directory when relative.
std::filesystem::path resolve_image_path(const std::string& image_ref, const std::filesystem::path& root);

}  // namespace sarceval
