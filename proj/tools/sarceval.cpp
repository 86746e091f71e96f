// Command-line entry point: run, compare, stats, cache.

#include <cstdlib>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sarceval/cache.hpp"
#include "sarceval/error.hpp"
#include "sarceval/ingest.hpp"
#include "sarceval/report.hpp"
#include "sarceval/runner.hpp"
#include "sarceval/serialization.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  auto config = sarceval::load_run_config(config_path);
  auto outcome = sarceval::run(config);
  std::cout << sarceval::report_table_text(outcome.report);
  std::cout << fmt::format("samples: {}  errors: {}  backend attempts: {}\n", outcome.report.per_sample.size(),
                           outcome.errors.size(), outcome.backend_attempts);
  std::cout << "report: " << (config.output_dir / "report.json").string() << "\n";
  std::cout << "report fingerprint: " << outcome.report_fingerprint << "\n";
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, std::size_t resamples, std::uint64_t seed,
                const std::string& json_out) {
  auto comparison = sarceval::compare(sarceval::load_report(a), sarceval::load_report(b), resamples, seed);
  std::cout << sarceval::comparison_table(comparison);
  if (!json_out.empty()) sarceval::write_file_atomic(json_out, sarceval::comparison_json(comparison).dump(2) + "\n");
  return 0;
}

int cmd_stats(const std::string& dataset, const std::string& task_name) {
  auto task = task_name.empty() ? sarceval::detect_task(dataset) : sarceval::parse_task(task_name).value();
  auto manifest = sarceval::load_dataset(dataset, task);
  auto stats = sarceval::dataset_stats(manifest);
  std::cout << fmt::format("dataset: {} ({})\n", manifest.source_name, sarceval::to_string(task));
  std::cout << fmt::format("total: {}\n", stats.total);
  if (task == sarceval::Task::MSD) {
    std::cout << fmt::format("sarcastic: {}\n", stats.sarcastic);
    std::cout << fmt::format("not_sarcastic: {}\n", stats.not_sarcastic);
  }
  std::cout << fmt::format("caption avg length: {:.2f}\n", stats.mean_text_tokens);
  if (task == sarceval::Task::MSE)
    std::cout << fmt::format("explanation avg length: {:.2f}\n", stats.mean_explanation_tokens);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal sarcasm detection/explanation evaluation harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute a configured run");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);

  std::string report_a;
  std::string report_b;
  std::size_t resamples = sarceval::metrics::kDefaultResamples;
  std::uint64_t seed = sarceval::metrics::kDefaultSeed;
  std::string json_out;
  auto* compare = app.add_subcommand("compare", "Compare two run reports (B against A)");
  compare->add_option("A", report_a, "Baseline report.json or run directory")->required();
  compare->add_option("B", report_b, "Candidate report.json or run directory")->required();
  compare->add_option("--resamples", resamples, "Bootstrap resamples");
  compare->add_option("--seed", seed, "Bootstrap seed");
  compare->add_option("--json", json_out, "Also write the comparison as JSON");

  std::string dataset;
  std::string task;
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--dataset", dataset, "Dataset JSON-lines file")->required();
  stats->add_option("--task", task, "msd or mse (inferred when omitted)")->check(CLI::IsMember({"msd", "mse"}));

  bool clear = false;
  std::string cache_dir = ".sarceval_cache";
  auto* cache = app.add_subcommand("cache", "Manage the response/detection/knowledge cache");
  cache->add_flag("--clear", clear, "Delete every cached entry");
  cache->add_option("--cache-dir", cache_dir, "Cache root");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*compare) return cmd_compare(report_a, report_b, resamples, seed, json_out);
    if (*stats) return cmd_stats(dataset, task);
    if (*cache) {
      if (!clear) {
        std::cerr << "nothing to do (pass --clear)\n";
        return 2;
      }
      std::cout << fmt::format("removed {} cached entries from {}\n", sarceval::DiskCache::clear(cache_dir), cache_dir);
      return 0;
    }
  } catch (const sarceval::SchemaViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  line " << v.line << ": " << v.reason << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
