#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sarceval::metrics {

using Tokens = std::vector<std::string>;

struct TokenizedPair {
  Tokens hypothesis;
  Tokens reference;
};

/// Runs the shared tokenizer over raw hypothesis/reference strings.
TokenizedPair tokenize_pair(std::string_view hypothesis, std::string_view reference);

// ---- BLEU -------------------------------------------------------------------

/// Corpus BLEU-1..max_n in percent: clipped n-gram precision pooled over the
/// corpus, geometric mean, brevity penalty min(1, exp(1 - r/c)). No smoothing:
/// a zero precision at any order up to n makes BLEU-n zero.
/// Throws LengthMismatch or EmptyReference.
std::vector<double> bleu(std::span<const Tokens> hyps, std::span<const Tokens> refs, std::size_t max_n = 4);

/// Sentence BLEU-1..max_n with add-one smoothing on orders >= 2. Used only
/// for per-sample significance streams and the sentence-level ablation.
std::vector<double> sentence_bleu_smoothed(const Tokens& hyp, const Tokens& ref, std::size_t max_n = 4);

// ---- ROUGE ------------------------------------------------------------------

struct RougeScores {
  double rouge1 = 0;
  double rouge2 = 0;
  double rougeL = 0;
};

std::size_t lcs_length(const Tokens& a, const Tokens& b);

/// Pair-level ROUGE-1/2/L F-scores in percent.
RougeScores rouge_pair(const Tokens& hyp, const Tokens& ref, double beta = 1.0);

/// Mean of rouge_pair over the corpus. Throws LengthMismatch.
RougeScores rouge(std::span<const Tokens> hyps, std::span<const Tokens> refs, double beta = 1.0);

// ---- METEOR -----------------------------------------------------------------

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

struct Alignment {
  std::size_t hyp_index;
  std::size_t ref_index;
};

/// One-to-one alignment: exact matches first, then Porter-stem matches on
/// the remaining tokens. Sorted by hyp_index.
std::vector<Alignment> meteor_align(const Tokens& hyp, const Tokens& ref);

/// Runs of alignments contiguous and in-order on both sides.
std::size_t count_chunks(std::span<const Alignment> alignment);

/// Pair-level METEOR in percent.
double meteor_pair(const Tokens& hyp, const Tokens& ref, const MeteorParams& params = {});

/// Mean of meteor_pair in percent. Throws LengthMismatch.
double meteor(std::span<const Tokens> hyps, std::span<const Tokens> refs, const MeteorParams& params = {});

inline constexpr std::string_view kMeteorVersion = "exact+porter-stem/alpha0.9-beta3-gamma0.5/v1";

}  // namespace sarceval::metrics
