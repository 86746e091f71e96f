#include "sarceval/cache.hpp"

#include <array>
#include <fstream>
#include <mutex>
#include <sstream>

#include "sarceval/datamodel.hpp"
#include "sarceval/serialization.hpp"

namespace sarceval {

namespace {

// Writers to the same key serialize on one of these stripes.
std::mutex& write_stripe(const std::filesystem::path& path) {
  static std::array<std::mutex, 64> stripes;
  return stripes[std::hash<std::string>{}(path.string()) % stripes.size()];
}

}  // namespace

DiskCache::DiskCache(std::filesystem::path root, std::string name_space)
    : dir_(std::move(root) / std::move(name_space)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path DiskCache::path_for(std::string_view key) const { return dir_ / (fingerprint(key) + ".bin"); }

std::optional<std::string> DiskCache::get(std::string_view key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void DiskCache::put(std::string_view key, std::string_view payload) {
  auto path = path_for(key);
  std::lock_guard lock(write_stripe(path));
  write_file_atomic(path, payload);
}

std::size_t DiskCache::clear(const std::filesystem::path& root) {
  if (!std::filesystem::exists(root)) return 0;
  std::size_t removed = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file()) ++removed;
  std::filesystem::remove_all(root);
  return removed;
}

}  // namespace sarceval
