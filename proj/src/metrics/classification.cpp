#include "sarceval/metrics/classification.hpp"

#include "sarceval/error.hpp"

namespace sarceval::metrics {

ConfusionMatrix confusion(std::span<const LabelPair> pairs, Label positive) {
  ConfusionMatrix cm;
  for (const auto& [pred, gold] : pairs) {
    const bool p = pred == positive;
    const bool g = gold == positive;
    if (p && g) ++cm.tp;
    else if (p) ++cm.fp;
    else if (g) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double accuracy(std::span<const LabelPair> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "accuracy over zero pairs");
  std::size_t hits = 0;
  for (const auto& [pred, gold] : pairs) hits += pred == gold ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pairs.size());
}

double f1_from(const ConfusionMatrix& cm) {
  if (cm.tp == 0) return 0.0;
  // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN).
  const auto tp = static_cast<double>(cm.tp);
  return 100.0 * 2.0 * tp / (2.0 * tp + static_cast<double>(cm.fp) + static_cast<double>(cm.fn));
}

double f1_binary(std::span<const LabelPair> pairs, Label positive) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "f1 over zero pairs");
  return f1_from(confusion(pairs, positive));
}

}  // namespace sarceval::metrics
