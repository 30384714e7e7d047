#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "mltc/corpus.hpp"
#include "mltc/predictions.hpp"

namespace mltc {

enum class Fallback { none, top_plurality };

Fallback parse_fallback(std::string_view name);
std::string_view to_string(Fallback fallback);

struct VoteOptions {
  /// Defaults to a strict majority, floor(K / 2) + 1.
  std::optional<std::size_t> threshold_votes;
  Fallback fallback = Fallback::none;
  /// When set, every predicted label must belong to it.
  const LabelVocabulary* vocab = nullptr;
};

struct VoteResult {
  PredictionSet predictions;
  std::size_t n_models = 0;
  std::size_t threshold_votes = 0;
  /// Examples whose output set is empty.
  std::size_t empty_outputs = 0;
  /// Examples rescued by the fallback.
  std::size_t fallbacks_applied = 0;
};

std::size_t majority_threshold(std::size_t n_models) noexcept;

/// Hard voting: a label is kept for an example when at least
/// `threshold_votes` models predicted it. Output follows the id order of the
/// first input. Scores are ignored.
VoteResult vote(std::span<const PredictionSet> models, VoteOptions options = {});

/// `vote` with `options.fallback = mode`. Under top_plurality an empty
/// majority set is replaced by every label tied at the highest vote count,
/// provided that count is positive.
VoteResult vote_with_fallback(std::span<const PredictionSet> models,
                              Fallback mode, VoteOptions options = {});

nlohmann::json summary_json(const VoteResult& result);

}  // namespace mltc
