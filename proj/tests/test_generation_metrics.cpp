#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "sarceval/error.hpp"
#include "sarceval/metrics/generation.hpp"
#include "sarceval/metrics/porter_stemmer.hpp"
#include "sarceval/text.hpp"

using namespace sarceval;
using namespace sarceval::metrics;

// Expected values in this file come from tests/oracles/metric_oracle.py
// (exact fractions, Counter overlap, exhaustive LCS and alignment search).

namespace {

constexpr double kTol = 1e-6;

struct Corpus {
  std::vector<Tokens> hyps;
  std::vector<Tokens> refs;
};

Corpus corpus(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  Corpus c;
  for (auto [h, r] : pairs) {
    auto tp = tokenize_pair(h, r);
    c.hyps.push_back(tp.hypothesis);
    c.refs.push_back(tp.reference);
  }
  return c;
}

void check_values(const std::vector<double>& got, const std::vector<double>& expected) {
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    INFO("order " << i + 1);
    CHECK(std::abs(got[i] - expected[i]) <= kTol);
  }
}

std::vector<double> bleu_of(const Corpus& c) { return bleu(c.hyps, c.refs); }

// ---- independent oracles ---------------------------------------------------

std::size_t lcs_brute(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::size_t k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = k;
  }
  return best;
}

std::map<Tokens, int> ngram_bag(const Tokens& t, std::size_t n) {
  std::map<Tokens, int> bag;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++bag[Tokens(t.begin() + i, t.begin() + i + n)];
  return bag;
}

double f1_percent(std::size_t overlap, std::size_t nh, std::size_t nr) {
  if (overlap == 0 || nh == 0 || nr == 0) return 0;
  double p = double(overlap) / double(nh), r = double(overlap) / double(nr);
  return 100 * 2 * p * r / (p + r);
}

double rouge_n_oracle(const Tokens& h, const Tokens& r, std::size_t n) {
  auto bh = ngram_bag(h, n), br = ngram_bag(r, n);
  std::size_t overlap = 0, nh = 0, nr = 0;
  for (auto& [g, c] : bh) {
    nh += c;
    if (auto it = br.find(g); it != br.end()) overlap += std::min(c, it->second);
  }
  for (auto& [g, c] : br) nr += c;
  return f1_percent(overlap, nh, nr);
}

Tokens random_tokens(std::mt19937& rng, std::size_t max_len, int vocab) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  Tokens t(len(rng));
  for (auto& w : t) w = std::string(1, static_cast<char>('a' + word(rng)));
  return t;
}

}  // namespace

TEST_CASE("tokenizer") {
  auto tp = tokenize_pair("The cat, sat!", "the CAT sat.");
  CHECK(tp.hypothesis == Tokens{"the", "cat", "sat"});
  CHECK(tp.reference == tp.hypothesis);
  CHECK(text::tokenize("don't  stop-now") == Tokens{"dont", "stopnow"});
  CHECK(text::tokenize(" ... ").empty());
}

TEST_CASE("BLEU fixtures") {
  check_values(bleu_of(corpus({{"the cat", "the cat sat"}})), {60.653065971263345, 60.653065971263345, 0, 0});
  check_values(bleu_of(corpus({{"the cat sat on the mat", "the cat is on the mat"}})),
               {83.33333333333334, 70.71067811865476, 50.0, 0.0});
  check_values(bleu_of(corpus({{"the the the the", "the cat"}})), {25, 0, 0, 0});
  check_values(bleu_of(corpus({{"a b c d", "a b c d e"}, {"x y z", "x y w z"}})),
               {75.14772930752859, 67.21417243455485, 60.94182255427468, 64.21929658657687});
  check_values(bleu_of(corpus({{"a b c d e f", "a b c d"}})),
               {66.66666666666666, 63.245553203367585, 58.48035476425733, 50.813274815461476});
  check_values(bleu_of(corpus({{"The cat, sat!", "the CAT sat."}})), {100, 100, 100, 0});
  check_values(bleu_of(corpus({{"a b c d e", "a b c d e"}, {"f g h i", "f g h i"}})), {100, 100, 100, 100});
  check_values(bleu_of(corpus({{"c b a", "a b c"}})), {100, 0, 0, 0});
  CHECK(bleu_of(corpus({{"the cat", "the cat"}})).size() == 4);
  check_values(bleu(std::vector<Tokens>{{"x", "y"}}, std::vector<Tokens>{{"x", "y"}}, 2), {100, 100});
}

TEST_CASE("BLEU errors") {
  std::vector<Tokens> one{{"a"}}, two{{"a"}, {"b"}}, empty_ref{{}};
  try {
    bleu(one, two);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
  try {
    bleu(one, empty_ref);
    FAIL("expected EmptyReference");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyReference);
  }
  std::vector<Tokens> empty_hyp{{}};
  check_values(bleu(empty_hyp, one), {0, 0, 0, 0});
}

TEST_CASE("smoothed sentence BLEU") {
  auto tp = tokenize_pair("the cat sat on the mat", "the cat is on the mat");
  check_values(sentence_bleu_smoothed(tp.hypothesis, tp.reference),
               {83.33333333333334, 74.53559924999298, 60.57068642773798, 48.54917717073234});
  auto short_pair = tokenize_pair("the cat", "the cat sat");
  check_values(sentence_bleu_smoothed(short_pair.hypothesis, short_pair.reference),
               {60.653065971263345, 60.653065971263345, 60.653065971263345, 60.653065971263345});
}

TEST_CASE("ROUGE fixtures") {
  auto check_rouge = [](const char* h, const char* r, double r1, double r2, double rl, double beta = 1.0) {
    auto tp = tokenize_pair(h, r);
    auto s = rouge_pair(tp.hypothesis, tp.reference, beta);
    CHECK(std::abs(s.rouge1 - r1) <= kTol);
    CHECK(std::abs(s.rouge2 - r2) <= kTol);
    CHECK(std::abs(s.rougeL - rl) <= kTol);
  };
  check_rouge("a b c d", "a c b d", 100, 0, 75);
  check_rouge("the cat sat on the mat", "the cat is on the mat", 83.33333333333333, 60.0, 83.33333333333333);
  check_rouge("a a a", "a a", 80, 66.66666666666667, 80);
  check_rouge("police killed the gunman", "the gunman killed police", 100, 33.333333333333336, 50);
  check_rouge("the cat", "the cat sat", 80, 66.66666666666667, 80);
  check_rouge("the cat", "the cat sat", 77.21518987341773, 62.88659793814433, 77.21518987341773, 1.2);
  check_rouge("x y", "x y", 100, 100, 100);
  check_rouge("x y", "z w", 0, 0, 0);

  auto c = corpus({{"a b c d", "a c b d"}, {"the cat sat on the mat", "the cat is on the mat"},
                   {"police killed the gunman", "the gunman killed police"}});
  auto mean = rouge(c.hyps, c.refs);
  CHECK(std::abs(mean.rouge1 - 94.44444444444444) <= kTol);
  CHECK(std::abs(mean.rouge2 - 31.111111111111114) <= kTol);
  CHECK(std::abs(mean.rougeL - 69.44444444444444) <= kTol);
  CHECK_THROWS_AS(rouge(c.hyps, std::vector<Tokens>{{"a"}}), Error);
}

TEST_CASE("LCS and ROUGE-1/2 against brute-force oracles") {
  std::mt19937 rng(2024);
  for (int iter = 0; iter < 3000; ++iter) {
    auto h = random_tokens(rng, 8, 4), r = random_tokens(rng, 8, 4);
    REQUIRE(lcs_length(h, r) == lcs_brute(h, r));
    auto s = rouge_pair(h, r);
    CHECK(std::abs(s.rouge1 - rouge_n_oracle(h, r, 1)) <= 1e-9);
    CHECK(std::abs(s.rouge2 - rouge_n_oracle(h, r, 2)) <= 1e-9);
    CHECK(std::abs(s.rougeL - f1_percent(lcs_brute(h, r), h.size(), r.size())) <= 1e-9);
  }
}

TEST_CASE("METEOR fixtures") {
  auto check_meteor = [](const char* h, const char* r, double expected, std::size_t matches, std::size_t chunks) {
    auto tp = tokenize_pair(h, r);
    auto al = meteor_align(tp.hypothesis, tp.reference);
    INFO(h << " / " << r);
    CHECK(al.size() == matches);
    CHECK(count_chunks(al) == chunks);
    CHECK(std::abs(meteor_pair(tp.hypothesis, tp.reference) - expected) <= kTol);
  };
  check_meteor("a b c d", "a b c d", 99.21875, 4, 1);
  check_meteor("cats", "cat", 50.0, 1, 1);
  check_meteor("the cat sat on the mat", "on the mat sat the cat", 93.75, 6, 3);
  check_meteor("the dogs were running quickly", "the dog runs quick", 62.330623306233065, 3, 2);
  check_meteor("he loves sunny mondays", "he hates mondays", 32.25806451612903, 2, 2);
  check_meteor("hospitals are great places", "the hospital is a great place", 44.06130268199234, 3, 2);
  check_meteor("x y", "z w", 0, 0, 0);

  auto c = corpus({{"a b c d", "a b c d"}, {"cats", "cat"}});
  CHECK(std::abs(meteor(c.hyps, c.refs) - (99.21875 + 50.0) / 2) <= kTol);
  CHECK(std::abs(meteor(c.hyps, c.refs, MeteorParams{0.5, 3.0, 0.0}) - 100.0) <= kTol);
}

TEST_CASE("METEOR alignment is one-to-one and maximal") {
  std::mt19937 rng(99);
  const Tokens words{"cat", "cats", "run", "running", "runs", "the", "a"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(1, 7);
  for (int iter = 0; iter < 2000; ++iter) {
    Tokens h(len(rng)), r(len(rng));
    for (auto& w : h) w = words[pick(rng)];
    for (auto& w : r) w = words[pick(rng)];
    auto al = meteor_align(h, r);
    std::vector<bool> hu(h.size()), ru(r.size());
    for (std::size_t k = 0; k < al.size(); ++k) {
      CHECK_FALSE(hu[al[k].hyp_index]);
      CHECK_FALSE(ru[al[k].ref_index]);
      hu[al[k].hyp_index] = ru[al[k].ref_index] = true;
      CHECK(porter_stem(h[al[k].hyp_index]) == porter_stem(r[al[k].ref_index]));
      if (k > 0) CHECK(al[k - 1].hyp_index < al[k].hyp_index);
    }
    // Every stem class is matched as far as its multiplicity allows.
    std::map<std::string, int> hc, rc;
    for (auto& w : h) ++hc[porter_stem(w)];
    for (auto& w : r) ++rc[porter_stem(w)];
    std::size_t bound = 0;
    for (auto& [s, n] : hc) bound += static_cast<std::size_t>(std::min(n, rc[s]));
    CHECK(al.size() == bound);
    double m = meteor_pair(h, r);
    CHECK(m >= 0);
    CHECK(m <= 100);
  }
}

TEST_CASE("metrics are permutation invariant and within [0,100]") {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    Corpus c;
    for (int i = 0; i < 6; ++i) {
      c.hyps.push_back(random_tokens(rng, 7, 5));
      c.refs.push_back(random_tokens(rng, 7, 5));
    }
    std::vector<std::size_t> order(c.hyps.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Corpus s;
    for (auto i : order) {
      s.hyps.push_back(c.hyps[i]);
      s.refs.push_back(c.refs[i]);
    }
    auto b1 = bleu_of(c), b2 = bleu_of(s);
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(std::abs(b1[n] - b2[n]) <= 1e-9);
      CHECK(b1[n] >= 0);
      CHECK(b1[n] <= 100 + 1e-9);
    }
    auto r1 = rouge(c.hyps, c.refs), r2 = rouge(s.hyps, s.refs);
    CHECK(std::abs(r1.rouge1 - r2.rouge1) <= 1e-9);
    CHECK(std::abs(r1.rouge2 - r2.rouge2) <= 1e-9);
    CHECK(std::abs(r1.rougeL - r2.rougeL) <= 1e-9);
    for (double v : {r1.rouge1, r1.rouge2, r1.rougeL}) CHECK((v >= 0 && v <= 100 + 1e-9));
    double m1 = meteor(c.hyps, c.refs), m2 = meteor(s.hyps, s.refs);
    CHECK(std::abs(m1 - m2) <= 1e-9);
    CHECK((m1 >= 0 && m1 <= 100));
  }
}

TEST_CASE("BLEU-n ordering") {
  // BLEU-(n+1) <= BLEU-n exactly when p_(n+1) does not exceed the geometric
  // mean of p_1..p_n. That holds for the single-pair fixtures below; the
  // two-pair corpus is a counterexample to unconditional monotonicity.
  for (auto c : {corpus({{"the cat", "the cat sat"}}), corpus({{"the cat sat on the mat", "the cat is on the mat"}}),
                 corpus({{"a b c d e f", "a b c d"}}), corpus({{"the the the the", "the cat"}}),
                 corpus({{"a b c d", "a b c d"}})}) {
    auto b = bleu_of(c);
    for (std::size_t n = 1; n < b.size(); ++n) CHECK(b[n] <= b[n - 1] + 1e-9);
  }
  auto counter = bleu_of(corpus({{"a b c d", "a b c d e"}, {"x y z", "x y w z"}}));
  CHECK(counter[3] > counter[2]);

  std::mt19937 rng(31);
  for (int iter = 0; iter < 500; ++iter) {
    Corpus c;
    for (int i = 0; i < 3; ++i) {
      c.hyps.push_back(random_tokens(rng, 8, 3));
      c.refs.push_back(random_tokens(rng, 8, 3));
    }
    auto b = bleu_of(c);
    std::vector<double> p;
    for (std::size_t n = 1; n <= 4; ++n) {
      std::size_t m = 0, t = 0;
      for (std::size_t i = 0; i < c.hyps.size(); ++i) {
        auto bh = ngram_bag(c.hyps[i], n), br = ngram_bag(c.refs[i], n);
        for (auto& [g, k] : bh) {
          t += k;
          if (auto it = br.find(g); it != br.end()) m += std::min(k, it->second);
        }
      }
      p.push_back(t ? double(m) / double(t) : 0.0);
    }
    double log_sum = 0;
    for (std::size_t n = 1; n < 4; ++n) {
      if (b[n - 1] == 0) {
        CHECK(b[n] == 0);
        continue;
      }
      log_sum += std::log(p[n - 1]);
      double geo = std::exp(log_sum / double(n));
      if (p[n] <= geo * (1 - 1e-12)) CHECK(b[n] <= b[n - 1] + 1e-9);
      if (p[n] >= geo * (1 + 1e-12)) CHECK(b[n] >= b[n - 1] - 1e-9);
    }
  }
}
