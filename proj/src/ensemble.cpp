#include "mltc/ensemble.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "mltc/error.hpp"
#include "mltc/kernels.hpp"

namespace mltc {

using nlohmann::json;

namespace {

std::string quote_list(const std::set<std::string>& ids) {
  constexpr std::size_t kShown = 10;
  std::string out;
  std::size_t i = 0;
  for (const auto& id : ids) {
    if (i == kShown) {
      out += ", ... (" + std::to_string(ids.size()) + " total)";
      break;
    }
    if (i++) out += ", ";
    out += "'" + id + "'";
  }
  return out;
}

void check_same_ids(const PredictionSet& first, const PredictionSet& other, std::size_t k) {
  std::set<std::string> a, b;
  for (const auto& p : first) a.insert(p.id);
  for (const auto& p : other) b.insert(p.id);
  if (a == b) return;
  std::set<std::string> only_first, only_other;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(only_first, only_first.end()));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                      std::inserter(only_other, only_other.end()));
  std::string msg = "prediction set " + std::to_string(k) + " covers different ids than set 0";
  if (!only_first.empty()) msg += "; only in set 0: " + quote_list(only_first);
  if (!only_other.empty()) {
    msg += "; only in set " + std::to_string(k) + ": " + quote_list(only_other);
  }
  throw Error(msg);
}

// Models that publish scores expose their label vocabulary; all such models
// must agree on it.
void check_score_vocabularies(std::span<const PredictionSet> models) {
  std::optional<std::set<std::string>> reference;
  std::size_t reference_model = 0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    for (const auto& p : models[k]) {
      if (!p.scores) continue;
      std::set<std::string> keys;
      for (const auto& [label, value] : *p.scores) keys.insert(label);
      if (!reference) {
        reference = std::move(keys);
        reference_model = k;
      } else if (keys != *reference) {
        throw Error("prediction set " + std::to_string(k) + " (id '" + p.id +
                    "') scores a different label vocabulary than set " +
                    std::to_string(reference_model));
      }
    }
  }
}

}  // namespace

Fallback parse_fallback(std::string_view name) {
  if (name == "none") return Fallback::none;
  if (name == "top-plurality") return Fallback::top_plurality;
  throw Error("unknown fallback '" + std::string(name) + "' (expected none or top-plurality)");
}

std::string_view to_string(Fallback fallback) {
  return fallback == Fallback::none ? "none" : "top-plurality";
}

std::size_t majority_threshold(std::size_t n_models) noexcept { return n_models / 2 + 1; }

VoteResult vote(std::span<const PredictionSet> models, VoteOptions options) {
  if (models.empty()) throw Error("voting needs at least one prediction set");
  for (std::size_t k = 1; k < models.size(); ++k) check_same_ids(models[0], models[k], k);
  check_score_vocabularies(models);

  // Column space: the given vocabulary, or every label any model predicted.
  std::vector<std::string> columns;
  if (options.vocab != nullptr) {
    columns = options.vocab->labels();
  } else {
    std::set<std::string> seen;
    for (const auto& model : models) {
      for (const auto& p : model) seen.insert(p.labels.begin(), p.labels.end());
    }
    columns.assign(seen.begin(), seen.end());
  }
  const LabelVocabulary space(columns);
  const std::size_t n_labels = space.size();
  const PredictionSet& order = models[0];

  std::vector<std::vector<MultiHot>> rows(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    std::unordered_map<std::string_view, const Prediction*> by_id;
    for (const auto& p : models[k]) by_id.emplace(p.id, &p);
    rows[k].reserve(order.size());
    for (const auto& p : order) {
      const Prediction& mine = *by_id.at(p.id);
      for (const auto& label : mine.labels) {
        if (!space.contains(label)) {
          throw Error("prediction set " + std::to_string(k) + " uses unknown label '" + label +
                      "' for id '" + p.id + "'");
        }
      }
      rows[k].push_back(encode(mine.labels, space));
    }
  }

  VoteResult result;
  result.n_models = models.size();
  result.threshold_votes = options.threshold_votes.value_or(majority_threshold(models.size()));
  if (result.threshold_votes < 1) throw Error("threshold_votes must be at least 1");

  const auto tally = kernels::omp::vote_tally(rows, n_labels);
  result.predictions.reserve(order.size());
  for (std::size_t e = 0; e < order.size(); ++e) {
    const std::uint32_t* votes = tally.data() + e * n_labels;
    Prediction out;
    out.id = order[e].id;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (votes[l] >= result.threshold_votes) out.labels.insert(space.at(l));
    }
    if (out.labels.empty() && options.fallback == Fallback::top_plurality) {
      const std::uint32_t top = n_labels == 0 ? 0 : *std::max_element(votes, votes + n_labels);
      if (top > 0) {
        for (std::size_t l = 0; l < n_labels; ++l) {
          if (votes[l] == top) out.labels.insert(space.at(l));
        }
        ++result.fallbacks_applied;
      }
    }
    if (out.labels.empty()) ++result.empty_outputs;
    result.predictions.push_back(std::move(out));
  }
  return result;
}

VoteResult vote_with_fallback(std::span<const PredictionSet> models, Fallback mode,
                              VoteOptions options) {
  options.fallback = mode;
  return vote(models, options);
}

json summary_json(const VoteResult& result) {
  return {{"n_models", result.n_models},
          {"n_examples", result.predictions.size()},
          {"threshold_votes", result.threshold_votes},
          {"empty_outputs", result.empty_outputs},
          {"fallbacks_applied", result.fallbacks_applied}};
}

}  // namespace mltc
