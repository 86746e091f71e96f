#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace sarceval {

/// Content cache on disk, one file per key under <root>/<namespace>/.
/// Reads are lock-free; writes to the same key are serialized and land
/// atomically (temp file + rename), so readers never see partial payloads.
class DiskCache {
 public:
  DiskCache(std::filesystem::path root, std::string name_space);

  /// Keys are hashed, so any string is acceptable.
  std::optional<std::string> get(std::string_view key) const;
  void put(std::string_view key, std::string_view payload);

  const std::filesystem::path& directory() const { return dir_; }

  /// Removes every namespace under root. Returns the number of files deleted.
  static std::size_t clear(const std::filesystem::path& root);

 private:
  std::filesystem::path path_for(std::string_view key) const;

  std::filesystem::path dir_;
};

}  // namespace sarceval
