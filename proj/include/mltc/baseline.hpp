#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mltc/corpus.hpp"
#include "mltc/features.hpp"
#include "mltc/kernels.hpp"
#include "mltc/predictions.hpp"

namespace mltc {

struct TrainConfig {
  FeatureSpec features;
  std::uint64_t seed = 0;
  double learning_rate = 0.1;
  std::size_t epochs = 30;
  double l2 = 1e-4;
  double threshold = 0.5;
  std::size_t batch_size = 16;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void validate(const TrainConfig& config);
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& json);

/// One-vs-rest logistic regression over hashed character n-grams.
struct LinearModel {
  TrainConfig config;
  LabelVocabulary vocab;
  Weights weights;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_micro_f1 = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  LinearModel model;
  /// Entry 0 is the zero-initialized model, entry k is after epoch k.
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

/// Mini-batch SGD from zero weights with a seeded shuffle per epoch. After
/// every epoch the model is scored on `valid` (micro-F1 at the configured
/// threshold); the best epoch is returned, ties going to the earlier one.
TrainResult train(const Dataset& train_set, const Dataset& valid_set,
                  const LabelVocabulary& vocab, const TrainConfig& config);

/// Labels with p >= threshold, or the single highest-scoring label (lowest
/// index on ties) when none reaches it.
LabelSet decide(std::span<const double> probabilities,
                const LabelVocabulary& vocab, double threshold);

/// Throws when `vocab` is given and its hash differs from the model's.
PredictionSet predict(const LinearModel& model, const Dataset& dataset,
                      const LabelVocabulary* vocab = nullptr);

/// Versioned little-endian binary: magic, format version, JSON header
/// (config, labels, vocabulary hash), then per label the bias and the
/// nonzero weights as (index, value) pairs.
std::string serialize_model(const LinearModel& model);
LinearModel deserialize_model(std::string_view bytes);
void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace mltc
