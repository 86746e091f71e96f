#include "sarceval/metrics/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sarceval/error.hpp"

namespace sarceval::metrics {

namespace {

// Uniform index in [0, n). std::uniform_int_distribution is implementation
// defined, so rejection sampling keeps p-values identical across toolchains.
std::size_t draw_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

}  // namespace

BootstrapResult paired_bootstrap_test(std::span<const double> scores_a, std::span<const double> scores_b,
                                      std::size_t resamples, std::uint64_t seed) {
  if (scores_a.size() != scores_b.size())
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(scores_a.size()) + " vs " + std::to_string(scores_b.size()) + " scores");
  const std::size_t n = scores_a.size();
  if (n < 2) throw Error(ErrorKind::TooFewSamples, "paired bootstrap needs at least 2 samples");
  if (resamples == 0) throw Error(ErrorKind::ConfigError, "resamples must be positive");

  std::vector<double> diff(n);
  double observed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = scores_a[i] - scores_b[i];
    observed += diff[i];
  }
  observed /= static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += diff[draw_index(rng, n)];
    const double mean = sum / static_cast<double>(n);
    if (std::abs(mean - observed) >= std::abs(observed)) ++extreme;
  }
  return {static_cast<double>(extreme) / static_cast<double>(resamples), observed};
}

}  // namespace sarceval::metrics
