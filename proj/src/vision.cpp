#include "sarceval/vision.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sarceval/error.hpp"
#include "sarceval/serialization.hpp"
#include "sarceval/text.hpp"

namespace sarceval {

using nlohmann::json;

Detection normalize_detection(Detection d) {
  d.label = std::string(text::trim(text::to_lower(d.label)));
  if (d.label.empty()) throw std::invalid_argument("empty label");
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
    throw std::invalid_argument("confidence " + std::to_string(d.confidence) + " outside [0,1]");
  if (!(d.bbox.width > 0.0) || !(d.bbox.height > 0.0)) throw std::invalid_argument("bbox width/height must be > 0");
  std::vector<std::string> attributes;
  for (auto& a : d.attributes) {
    auto norm = std::string(text::trim(text::to_lower(a)));
    if (!norm.empty()) attributes.push_back(std::move(norm));
  }
  d.attributes = std::move(attributes);
  return d;
}

DetectionMap load_detections(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::MissingFile, path.string());
  auto contents = read_file(path);
  DetectionMap out;
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
      auto id = record.at("id").get<std::string>();
      if (id.empty()) throw std::invalid_argument("empty id");
      out[id].push_back(normalize_detection(record.get<Detection>()));
    } catch (const json::exception& e) {
      violations.push_back({line_no, e.what()});
    } catch (const std::invalid_argument& e) {
      violations.push_back({line_no, e.what()});
    }
  }
  if (!violations.empty()) throw SchemaViolation(std::move(violations));
  return out;
}

std::vector<Detection> select_objects(std::span<const Detection> dets, double min_conf, std::size_t max_objects) {
  std::vector<Detection> out;
  for (const auto& d : dets)
    if (d.confidence >= min_conf) out.push_back(d);
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.label < b.label;
  });
  if (out.size() > max_objects) out.resize(max_objects);
  return out;
}

std::vector<Detection> parse_sidecar_response(std::string_view body) {
  try {
    auto j = json::parse(body);
    std::vector<Detection> out;
    for (const auto& item : j.at("detections")) out.push_back(normalize_detection(item.get<Detection>()));
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidResponse, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::InvalidResponse, e.what());
  }
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    auto n = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
             static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back(kAlphabet[n & 63]);
  }
  if (auto rest = bytes.size() - i; rest > 0) {
    unsigned n = static_cast<unsigned char>(bytes[i]) << 16;
    if (rest == 2) n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(rest == 2 ? kAlphabet[(n >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::filesystem::path resolve_image_path(const std::string& image_ref, const std::filesystem::path& root) {
  std::filesystem::path p(image_ref);
  if (p.is_absolute() || root.empty()) return p;
  return root / p;
}

DetectionSidecar::DetectionSidecar(std::string sidecar_url, HttpClientFactory http, std::optional<DiskCache> cache,
                                   std::filesystem::path image_root)
    : http_(std::move(http)), cache_(std::move(cache)), image_root_(std::move(image_root)) {
  std::tie(base_url_, path_prefix_) = split_url(sidecar_url);
}

std::string DetectionSidecar::request_body(const std::string& image_ref) const {
  // Send pixels when the image is local, otherwise let the sidecar resolve the path.
  auto path = resolve_image_path(image_ref, image_root_);
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) return json{{"image", base64_encode(read_file(path))}}.dump();
  return json{{"image", image_ref}}.dump();
}

std::vector<Detection> DetectionSidecar::fetch(const std::string& image_ref) {
  return parse_sidecar_response(fetch_payload(image_ref));
}

std::string DetectionSidecar::fetch_payload(const std::string& image_ref) {
  const auto key = fingerprint(image_ref);
  if (cache_) {
    if (auto hit = cache_->get(key)) return *hit;
  }

  HttpResponse response;
  try {
    auto client = http_(base_url_);
    ++requests_;
    response = client->post(path_prefix_ + "/detect", {}, request_body(image_ref), "application/json");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::TransportError || e.kind() == ErrorKind::ConfigError)
      throw Error(ErrorKind::SidecarUnreachable, e.what());
    throw;
  }
  if (response.status != 200) {
    std::string message = response.body;
    try {
      auto j = json::parse(response.body);
      if (j.contains("error") && j["error"].is_string()) message = j["error"].get<std::string>();
    } catch (const json::exception&) {
    }
    throw SidecarError(response.status, message);
  }
  parse_sidecar_response(response.body);
  if (cache_) cache_->put(key, response.body);
  return response.body;
}

std::vector<Detection> fetch_detections(const std::string& image_ref, const std::string& sidecar_url,
                                        HttpClientFactory http) {
  DetectionSidecar sidecar(sidecar_url, std::move(http), std::nullopt);
  return sidecar.fetch(image_ref);
}

}  // namespace sarceval
