#include "mltc/imbalance.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "mltc/error.hpp"
#include "mltc/version.hpp"

namespace mltc {

using nlohmann::json;

namespace {

// round(num / den) for positive operands, halves away from zero.
std::uint64_t round_ratio(std::uint64_t num, std::uint64_t den) {
  return (2 * num + den) / (2 * den);
}

std::map<std::string, std::size_t> count_labels(
    const Dataset& dataset, const std::map<std::string, std::size_t>* copies) {
  std::map<std::string, std::size_t> counts;
  for (const auto& ex : dataset) {
    std::size_t weight = 1;
    if (copies != nullptr) {
      if (auto it = copies->find(ex.id); it != copies->end()) weight = it->second;
    }
    for (const auto& label : ex.labels) counts[label] += weight;
  }
  return counts;
}

}  // namespace

OversamplePlan plan_oversample(const Dataset& dataset, std::size_t clip) {
  if (dataset.empty()) throw Error("cannot plan oversampling for an empty dataset");
  if (clip < 1) throw Error("oversampling clip must be at least 1");

  OversamplePlan plan;
  plan.clip = clip;
  plan.label_counts_before = count_labels(dataset, nullptr);
  if (plan.label_counts_before.empty()) {
    throw Error("cannot plan oversampling for a dataset without labels");
  }

  std::uint64_t total = 0;
  for (const auto& [label, count] : plan.label_counts_before) total += count;
  plan.average_count = {total, plan.label_counts_before.size()};

  for (const auto& ex : dataset) {
    std::size_t copies = 1;
    if (!ex.labels.empty()) {
      std::uint64_t rarest = std::numeric_limits<std::uint64_t>::max();
      bool eligible = true;
      for (const auto& label : ex.labels) {
        const std::uint64_t count = plan.label_counts_before.at(label);
        eligible = eligible && plan.average_count.above(count);
        rarest = std::min(rarest, count);
      }
      if (eligible) {
        const std::uint64_t factor =
            round_ratio(plan.average_count.numerator,
                        plan.average_count.denominator * rarest);
        copies = static_cast<std::size_t>(std::min<std::uint64_t>(clip, factor));
        copies = std::max<std::size_t>(copies, 1);
      }
    }
    plan.per_example_copies[ex.id] = copies;
  }
  plan.label_counts_after = count_labels(dataset, &plan.per_example_copies);
  return plan;
}

Dataset materialize(const Dataset& dataset, const OversamplePlan& plan) {
  std::unordered_map<std::string_view, const Example*> by_id;
  by_id.reserve(dataset.size());
  for (const auto& ex : dataset) by_id.emplace(ex.id, &ex);
  for (const auto& [id, copies] : plan.per_example_copies) {
    if (!by_id.contains(id)) throw Error("oversampling plan references unknown id '" + id + "'");
    if (copies < 1) throw Error("oversampling plan gives '" + id + "' zero copies");
  }

  Dataset out;
  out.reserve(dataset.size());
  for (const auto& ex : dataset) {
    out.push_back(ex);
    auto it = plan.per_example_copies.find(ex.id);
    const std::size_t copies = it == plan.per_example_copies.end() ? 1 : it->second;
    for (std::size_t k = 1; k < copies; ++k) {
      Example dup = ex;
      dup.id = ex.id + "#dup" + std::to_string(k);
      out.push_back(std::move(dup));
    }
  }
  return out;
}

json to_json(const OversamplePlan& plan) {
  json out;
  out["format_version"] = kPlanFormatVersion;
  out["clip"] = plan.clip;
  out["average_count"] = {{"numerator", plan.average_count.numerator},
                          {"denominator", plan.average_count.denominator},
                          {"value", plan.average_count.value()}};
  out["label_counts_before"] = plan.label_counts_before;
  out["label_counts_after"] = plan.label_counts_after;
  out["per_example_copies"] = plan.per_example_copies;
  return out;
}

OversamplePlan plan_from_json(const json& in) {
  try {
    OversamplePlan plan;
    plan.clip = in.at("clip").get<std::size_t>();
    plan.average_count.numerator = in.at("average_count").at("numerator").get<std::uint64_t>();
    plan.average_count.denominator =
        in.at("average_count").at("denominator").get<std::uint64_t>();
    plan.label_counts_before =
        in.at("label_counts_before").get<std::map<std::string, std::size_t>>();
    plan.label_counts_after =
        in.at("label_counts_after").get<std::map<std::string, std::size_t>>();
    plan.per_example_copies =
        in.at("per_example_copies").get<std::map<std::string, std::size_t>>();
    return plan;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed oversampling plan: ") + e.what());
  }
}

}  // namespace mltc
