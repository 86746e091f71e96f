#include "sarceval/metrics/generation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "sarceval/error.hpp"
#include "sarceval/metrics/porter_stemmer.hpp"
#include "sarceval/text.hpp"

namespace sarceval::metrics {

namespace {

using NgramCounts = std::map<std::span<const std::string>, std::size_t,
                             decltype([](std::span<const std::string> a, std::span<const std::string> b) {
                               return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                             })>;

NgramCounts ngram_counts(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[std::span<const std::string>(tokens).subspan(i, n)];
  return counts;
}

// Clipped overlap and hypothesis n-gram total for one pair.
std::pair<std::size_t, std::size_t> clipped_overlap(const Tokens& hyp, const Tokens& ref, std::size_t n) {
  auto h = ngram_counts(hyp, n);
  auto r = ngram_counts(ref, n);
  std::size_t match = 0;
  for (const auto& [gram, count] : h)
    if (auto it = r.find(gram); it != r.end()) match += std::min(count, it->second);
  return {match, hyp.size() >= n ? hyp.size() - n + 1 : 0};
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::LengthMismatch, std::to_string(a) + " hypotheses vs " + std::to_string(b) + " references");
}

double brevity_penalty(double ref_len, double hyp_len) {
  if (hyp_len <= 0) return 0.0;
  return std::min(1.0, std::exp(1.0 - ref_len / hyp_len));
}

}  // namespace

TokenizedPair tokenize_pair(std::string_view hypothesis, std::string_view reference) {
  return {text::tokenize(hypothesis), text::tokenize(reference)};
}

std::vector<double> bleu(std::span<const Tokens> hyps, std::span<const Tokens> refs, std::size_t max_n) {
  check_lengths(hyps.size(), refs.size());
  std::vector<std::size_t> matches(max_n, 0);
  std::vector<std::size_t> totals(max_n, 0);
  double hyp_len = 0;
  double ref_len = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (refs[i].empty()) throw Error(ErrorKind::EmptyReference, "reference " + std::to_string(i) + " is empty");
    hyp_len += static_cast<double>(hyps[i].size());
    ref_len += static_cast<double>(refs[i].size());
    for (std::size_t n = 1; n <= max_n; ++n) {
      auto [m, t] = clipped_overlap(hyps[i], refs[i], n);
      matches[n - 1] += m;
      totals[n - 1] += t;
    }
  }

  const double bp = brevity_penalty(ref_len, hyp_len);
  std::vector<double> scores(max_n, 0.0);
  double log_sum = 0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (matches[n - 1] == 0 || totals[n - 1] == 0) zero = true;
    if (!zero) log_sum += std::log(static_cast<double>(matches[n - 1]) / static_cast<double>(totals[n - 1]));
    scores[n - 1] = zero ? 0.0 : 100.0 * bp * std::exp(log_sum / static_cast<double>(n));
  }
  return scores;
}

std::vector<double> sentence_bleu_smoothed(const Tokens& hyp, const Tokens& ref, std::size_t max_n) {
  std::vector<double> scores(max_n, 0.0);
  if (hyp.empty() || ref.empty()) return scores;
  const double bp = brevity_penalty(static_cast<double>(ref.size()), static_cast<double>(hyp.size()));
  double log_sum = 0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    auto [m, t] = clipped_overlap(hyp, ref, n);
    double num = static_cast<double>(m);
    double den = static_cast<double>(t);
    if (n >= 2) {
      num += 1.0;
      den += 1.0;
    }
    if (num == 0 || den == 0) zero = true;
    if (!zero) log_sum += std::log(num / den);
    scores[n - 1] = zero ? 0.0 : 100.0 * bp * std::exp(log_sum / static_cast<double>(n));
  }
  return scores;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

double f_score(double overlap, double hyp_total, double ref_total, double beta) {
  if (overlap <= 0 || hyp_total <= 0 || ref_total <= 0) return 0.0;
  const double p = overlap / hyp_total;
  const double r = overlap / ref_total;
  const double b2 = beta * beta;
  return 100.0 * (1.0 + b2) * p * r / (r + b2 * p);
}

double rouge_n(const Tokens& hyp, const Tokens& ref, std::size_t n, double beta) {
  auto [overlap, hyp_total] = clipped_overlap(hyp, ref, n);
  const double ref_total = ref.size() >= n ? static_cast<double>(ref.size() - n + 1) : 0.0;
  return f_score(static_cast<double>(overlap), static_cast<double>(hyp_total), ref_total, beta);
}

}  // namespace

RougeScores rouge_pair(const Tokens& hyp, const Tokens& ref, double beta) {
  return {rouge_n(hyp, ref, 1, beta), rouge_n(hyp, ref, 2, beta),
          f_score(static_cast<double>(lcs_length(hyp, ref)), static_cast<double>(hyp.size()),
                  static_cast<double>(ref.size()), beta)};
}

RougeScores rouge(std::span<const Tokens> hyps, std::span<const Tokens> refs, double beta) {
  check_lengths(hyps.size(), refs.size());
  RougeScores mean;
  if (hyps.empty()) return mean;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    auto s = rouge_pair(hyps[i], refs[i], beta);
    mean.rouge1 += s.rouge1;
    mean.rouge2 += s.rouge2;
    mean.rougeL += s.rougeL;
  }
  const auto n = static_cast<double>(hyps.size());
  return {mean.rouge1 / n, mean.rouge2 / n, mean.rougeL / n};
}

namespace {

// Aligns hyp tokens to ref tokens whose keys are equal, among positions not
// yet used. Preference order per hyp token: continue the previous pair,
// then the candidate that opens the longest run of key-equal pairs, then the
// leftmost candidate.
void align_stage(const std::vector<std::string>& hyp_keys, const std::vector<std::string>& ref_keys,
                 std::vector<std::optional<std::size_t>>& hyp_to_ref, std::vector<bool>& ref_used) {
  auto free_match = [&](std::size_t i, std::size_t j) {
    return !hyp_to_ref[i] && !ref_used[j] && hyp_keys[i] == ref_keys[j];
  };
  auto run_length = [&](std::size_t i, std::size_t j) {
    std::size_t len = 0;
    while (i + len < hyp_keys.size() && j + len < ref_keys.size() && free_match(i + len, j + len)) ++len;
    return len;
  };

  for (std::size_t i = 0; i < hyp_keys.size(); ++i) {
    if (hyp_to_ref[i]) continue;
    std::optional<std::size_t> best;
    if (i > 0 && hyp_to_ref[i - 1]) {
      auto next = *hyp_to_ref[i - 1] + 1;
      if (next < ref_keys.size() && free_match(i, next)) best = next;
    }
    if (!best) {
      std::size_t best_run = 0;
      for (std::size_t j = 0; j < ref_keys.size(); ++j) {
        if (!free_match(i, j)) continue;
        auto run = run_length(i, j);
        if (run > best_run) {
          best_run = run;
          best = j;
        }
      }
    }
    if (best) {
      hyp_to_ref[i] = *best;
      ref_used[*best] = true;
    }
  }
}

}  // namespace

std::vector<Alignment> meteor_align(const Tokens& hyp, const Tokens& ref) {
  std::vector<std::optional<std::size_t>> hyp_to_ref(hyp.size());
  std::vector<bool> ref_used(ref.size(), false);

  align_stage(hyp, ref, hyp_to_ref, ref_used);

  std::vector<std::string> hyp_stems;
  std::vector<std::string> ref_stems;
  for (const auto& t : hyp) hyp_stems.push_back(porter_stem(t));
  for (const auto& t : ref) ref_stems.push_back(porter_stem(t));
  align_stage(hyp_stems, ref_stems, hyp_to_ref, ref_used);

  std::vector<Alignment> out;
  for (std::size_t i = 0; i < hyp.size(); ++i)
    if (hyp_to_ref[i]) out.push_back({i, *hyp_to_ref[i]});
  return out;
}

std::size_t count_chunks(std::span<const Alignment> alignment) {
  std::size_t chunks = 0;
  for (std::size_t k = 0; k < alignment.size(); ++k) {
    const bool continues = k > 0 && alignment[k].hyp_index == alignment[k - 1].hyp_index + 1 &&
                           alignment[k].ref_index == alignment[k - 1].ref_index + 1;
    if (!continues) ++chunks;
  }
  return chunks;
}

double meteor_pair(const Tokens& hyp, const Tokens& ref, const MeteorParams& params) {
  if (hyp.empty() || ref.empty()) return 0.0;
  auto alignment = meteor_align(hyp, ref);
  if (alignment.empty()) return 0.0;
  const auto matches = static_cast<double>(alignment.size());
  const double precision = matches / static_cast<double>(hyp.size());
  const double recall = matches / static_cast<double>(ref.size());
  const double fmean = precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double frag = static_cast<double>(count_chunks(alignment)) / matches;
  const double penalty = params.gamma * std::pow(frag, params.beta);
  return 100.0 * fmean * (1.0 - penalty);
}

double meteor(std::span<const Tokens> hyps, std::span<const Tokens> refs, const MeteorParams& params) {
  check_lengths(hyps.size(), refs.size());
  if (hyps.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) sum += meteor_pair(hyps[i], refs[i], params);
  return sum / static_cast<double>(hyps.size());
}

}  // namespace sarceval::metrics
