#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sarceval/datamodel.hpp"

namespace sarceval {

struct DatasetManifest {
  Task task = Task::MSD;
  std::vector<Sample> samples;
  std::string source_name;
};

/// Loads a JSON-lines dataset. Every malformed line is collected; if there is
/// at least one, a SchemaViolation listing all of them is thrown. Also throws
/// MissingFile, DuplicateId and EmptyDataset.
DatasetManifest load_dataset(const std::filesystem::path& path, Task task);

/// Same as above but parses bytes already in memory.
DatasetManifest parse_dataset(std::string_view contents, Task task, std::string source_name);

/// Infers the task of a dataset file from its first non-blank record.
Task detect_task(const std::filesystem::path& path);

struct StatsSummary {
  std::size_t total = 0;
  std::size_t sarcastic = 0;
  std::size_t not_sarcastic = 0;
  double mean_text_tokens = 0;
  double mean_explanation_tokens = 0;  // MSE only, 0 otherwise
};

/// Counts per label plus mean whitespace-token lengths. Precondition: non-empty manifest.
StatsSummary dataset_stats(const DatasetManifest& manifest);

}  // namespace sarceval
