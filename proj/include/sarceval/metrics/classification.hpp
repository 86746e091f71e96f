#pragma once

#include <cstddef>
#include <span>

#include "sarceval/datamodel.hpp"

namespace sarceval::metrics {

struct LabelPair {
  Label predicted;
  Label gold;
};

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const LabelPair> pairs, Label positive = Label::Sarcastic);

/// 100 * matches / total. Throws EmptyInput.
double accuracy(std::span<const LabelPair> pairs);

/// Binary F1 for the positive class, percent; 0 when there are no true positives. Throws EmptyInput.
double f1_binary(std::span<const LabelPair> pairs, Label positive = Label::Sarcastic);

double f1_from(const ConfusionMatrix& cm);

}  // namespace sarceval::metrics
