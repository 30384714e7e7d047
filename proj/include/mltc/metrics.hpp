#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "mltc/corpus.hpp"
#include "mltc/predictions.hpp"

namespace mltc {

struct ConfusionTotals {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

/// Per-label tp/fp/fn, indexed like the vocabulary.
struct ConfusionCounts {
  std::vector<std::uint64_t> tp;
  std::vector<std::uint64_t> fp;
  std::vector<std::uint64_t> fn;

  explicit ConfusionCounts(std::size_t n_labels = 0)
      : tp(n_labels), fp(n_labels), fn(n_labels) {}

  std::size_t size() const noexcept { return tp.size(); }
  ConfusionTotals totals() const noexcept;
  ConfusionCounts& operator+=(const ConfusionCounts& other);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// 0/0 precision or recall is 0; tp = fp = fn = 0 scores F1 = 1.
PrfScore prf(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) noexcept;

/// Gold and predictions are matched by id; both id sets must be equal.
ConfusionCounts confusion(const Dataset& gold, const PredictionSet& pred,
                          const LabelVocabulary& vocab);
/// Row-aligned multi-hot matrices.
ConfusionCounts confusion(std::span<const MultiHot> gold,
                          std::span<const MultiHot> pred, std::size_t n_labels);

/// F1 over counts pooled across all labels.
double micro_f1(const ConfusionCounts& counts) noexcept;
/// Unweighted mean of per-label F1 over labels with tp + fp + fn > 0
/// (1.0 when there are none).
double macro_f1(const ConfusionCounts& counts) noexcept;

struct ReportOptions {
  bool percent = false;
  bool per_label = false;
};

/// {micro_f1, macro_f1, precision, recall, tp, fp, fn, n_examples[, per_label]}
/// rounded to 6 decimals, or to 3 decimals of a percentage with `percent`.
nlohmann::json score_report(const ConfusionCounts& counts,
                            const LabelVocabulary& vocab,
                            std::size_t n_examples, ReportOptions options = {});

}  // namespace mltc
