#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace sarceval::metrics {

inline constexpr std::size_t kDefaultResamples = 10000;
inline constexpr std::uint64_t kDefaultSeed = 12345;
inline constexpr double kSignificanceThreshold = 0.01;

struct BootstrapResult {
  double p_value = 1.0;
  double mean_difference = 0.0;  // mean(a - b) on the original sample
};

/// Two-sided paired bootstrap on the mean per-sample difference. Each
/// resample draws n indices with replacement; the p-value is the fraction of
/// resamples whose mean difference deviates from the observed one by at
/// least |observed| (the null-centered bootstrap distribution).
/// Deterministic for a given seed. Throws LengthMismatch or TooFewSamples.
BootstrapResult paired_bootstrap_test(std::span<const double> scores_a, std::span<const double> scores_b,
                                      std::size_t resamples = kDefaultResamples, std::uint64_t seed = kDefaultSeed);

inline double paired_bootstrap(std::span<const double> scores_a, std::span<const double> scores_b,
                               std::size_t resamples = kDefaultResamples, std::uint64_t seed = kDefaultSeed) {
  return paired_bootstrap_test(scores_a, scores_b, resamples, seed).p_value;
}

}  // namespace sarceval::metrics
