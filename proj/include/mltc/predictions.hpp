#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mltc/corpus.hpp"

namespace mltc {

/// One model's output for one example. Scores are optional and ignored by
/// hard voting.
struct Prediction {
  std::string id;
  LabelSet labels;
  std::optional<std::map<std::string, double>> scores;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using PredictionSet = std::vector<Prediction>;

/// `{"id": str, "labels": [str...], "scores": {label: float}?}` per line.
/// Empty label lists are allowed; ids must be unique.
PredictionSet parse_predictions(std::string_view content,
                                const LabelVocabulary* vocab = nullptr);
PredictionSet load_predictions(const std::filesystem::path& path,
                               const LabelVocabulary* vocab = nullptr);
std::string to_jsonl(const PredictionSet& predictions);
void save_predictions(const std::filesystem::path& path,
                      const PredictionSet& predictions);

}  // namespace mltc
