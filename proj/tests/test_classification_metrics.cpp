#include <random>

#include "doctest.h"
#include "sarceval/error.hpp"
#include "sarceval/metrics/classification.hpp"

using namespace sarceval;
using namespace sarceval::metrics;

namespace {

std::vector<LabelPair> pairs_from(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  std::vector<LabelPair> out;
  out.insert(out.end(), tp, {Label::Sarcastic, Label::Sarcastic});
  out.insert(out.end(), fp, {Label::Sarcastic, Label::NotSarcastic});
  out.insert(out.end(), tn, {Label::NotSarcastic, Label::NotSarcastic});
  out.insert(out.end(), fn, {Label::NotSarcastic, Label::Sarcastic});
  return out;
}

}  // namespace

TEST_CASE("accuracy and F1 closed forms") {
  auto pairs = pairs_from(959, 1409, 0, 41);
  // Accuracy 959/2409, F1 2*959/(2*959+1409+41) = 1918/3368.
  CHECK(accuracy(pairs) == doctest::Approx(100.0 * 959 / 2409).epsilon(1e-12));
  CHECK(std::abs(accuracy(pairs) - 39.81) <= 0.01);
  CHECK(f1_binary(pairs) == doctest::Approx(100.0 * 1918 / 3368).epsilon(1e-12));
  CHECK(std::abs(f1_binary(pairs) - 56.95) <= 0.01);

  CHECK(accuracy(pairs_from(1, 0, 2, 1)) == 75.0);
  CHECK(f1_binary(pairs_from(1, 0, 2, 1)) == doctest::Approx(200.0 / 3));
  CHECK(f1_binary(pairs_from(0, 3, 1, 0)) == 0.0);
  CHECK(f1_binary(pairs_from(0, 0, 5, 0)) == 0.0);
  CHECK(accuracy(pairs_from(0, 0, 5, 0)) == 100.0);
}

TEST_CASE("empty input") {
  std::vector<LabelPair> none;
  for (auto fn : {+[](std::span<const LabelPair> p) { return accuracy(p); },
                  +[](std::span<const LabelPair> p) { return f1_binary(p); }}) {
    try {
      fn(none);
      FAIL("expected EmptyInput");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyInput);
    }
  }
}

TEST_CASE("confusion tally, bounds and F1 from precision/recall") {
  std::mt19937 rng(17);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<LabelPair> pairs(1 + rng() % 40);
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (auto& p : pairs) {
      p.predicted = rng() % 2 ? Label::Sarcastic : Label::NotSarcastic;
      p.gold = rng() % 2 ? Label::Sarcastic : Label::NotSarcastic;
      bool ps = p.predicted == Label::Sarcastic, gs = p.gold == Label::Sarcastic;
      tp += ps && gs, fp += ps && !gs, tn += !ps && !gs, fn += !ps && gs;
    }
    auto cm = confusion(pairs);
    CHECK(cm == ConfusionMatrix{tp, fp, tn, fn});
    CHECK(cm.total() == pairs.size());
    double acc = accuracy(pairs), f1 = f1_binary(pairs);
    CHECK(acc >= 0);
    CHECK(acc <= 100);
    CHECK(f1 >= 0);
    CHECK(f1 <= 100);
    double expected_f1 = 0;
    if (tp > 0) {
      double precision = double(tp) / double(tp + fp), recall = double(tp) / double(tp + fn);
      expected_f1 = 100 * 2 * precision * recall / (precision + recall);
    }
    CHECK(f1 == doctest::Approx(expected_f1).epsilon(1e-12));
    CHECK(acc == doctest::Approx(100.0 * double(tp + tn) / double(pairs.size())).epsilon(1e-12));
  }
}

TEST_CASE("positive class is configurable") {
  auto pairs = pairs_from(2, 1, 3, 0);
  auto flipped = confusion(pairs, Label::NotSarcastic);
  CHECK(flipped == ConfusionMatrix{3, 0, 2, 1});
}
