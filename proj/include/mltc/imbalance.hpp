#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "mltc/corpus.hpp"

namespace mltc {

inline constexpr std::size_t kDefaultClip = 10;

/// Mean of per-label counts over labels that occur at least once, kept as an
/// exact fraction so the eligibility test is an integer comparison.
struct AverageCount {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  /// count < numerator / denominator
  bool above(std::uint64_t count) const noexcept {
    return count * denominator < numerator;
  }
};

struct OversamplePlan {
  std::map<std::string, std::size_t> per_example_copies;
  std::map<std::string, std::size_t> label_counts_before;
  std::map<std::string, std::size_t> label_counts_after;
  AverageCount average_count;
  std::size_t clip = kDefaultClip;
};

/// Copies for an example are 1 unless all of its labels are strictly rarer
/// than the average label count. Eligible examples get
/// min(clip, round(average / count_of_rarest_label)), rounding half away
/// from zero.
OversamplePlan plan_oversample(const Dataset& dataset,
                               std::size_t clip = kDefaultClip);

/// Each example is followed by its duplicates, named `<id>#dup<k>`. Ids
/// missing from the plan are kept once.
Dataset materialize(const Dataset& dataset, const OversamplePlan& plan);

nlohmann::json to_json(const OversamplePlan& plan);
OversamplePlan plan_from_json(const nlohmann::json& json);

}  // namespace mltc
