#include "mltc/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "mltc/error.hpp"
#include "mltc/kernels.hpp"

namespace mltc {

using nlohmann::json;

namespace {

double safe_ratio(std::uint64_t num, std::uint64_t den) noexcept {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Nearest double to the decimal text, so reports print e.g. 0.355212.
double round_to(double value, int decimals) {
  char buf[64];
  const auto printed = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  double out = value;
  std::from_chars(buf, printed.ptr, out);
  return out;
}

std::string list_ids(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 10;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i) out += ", ";
    out += "'" + ids[i] + "'";
  }
  if (ids.size() > kShown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

}  // namespace

ConfusionTotals ConfusionCounts::totals() const noexcept {
  ConfusionTotals t;
  for (std::size_t l = 0; l < size(); ++l) {
    t.tp += tp[l];
    t.fp += fp[l];
    t.fn += fn[l];
  }
  return t;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  if (other.size() != size()) throw Error("cannot add confusion counts of different widths");
  for (std::size_t l = 0; l < size(); ++l) {
    tp[l] += other.tp[l];
    fp[l] += other.fp[l];
    fn[l] += other.fn[l];
  }
  return *this;
}

PrfScore prf(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) noexcept {
  if (tp == 0 && fp == 0 && fn == 0) return {0.0, 0.0, 1.0};
  PrfScore s;
  s.precision = safe_ratio(tp, tp + fp);
  s.recall = safe_ratio(tp, tp + fn);
  const double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

ConfusionCounts confusion(std::span<const MultiHot> gold, std::span<const MultiHot> pred,
                          std::size_t n_labels) {
  return kernels::omp::confusion_counts(gold, pred, n_labels);
}

ConfusionCounts confusion(const Dataset& gold, const PredictionSet& pred,
                          const LabelVocabulary& vocab) {
  std::unordered_map<std::string_view, const Prediction*> by_id;
  by_id.reserve(pred.size());
  for (const auto& p : pred) by_id.emplace(p.id, &p);

  std::vector<std::string> missing;
  std::vector<MultiHot> gold_rows;
  std::vector<MultiHot> pred_rows;
  gold_rows.reserve(gold.size());
  pred_rows.reserve(gold.size());
  for (const auto& ex : gold) {
    auto it = by_id.find(ex.id);
    if (it == by_id.end()) {
      missing.push_back(ex.id);
      continue;
    }
    gold_rows.push_back(encode(ex.labels, vocab));
    pred_rows.push_back(encode(it->second->labels, vocab));
  }
  std::vector<std::string> extra;
  if (gold_rows.size() != pred.size()) {
    std::unordered_map<std::string_view, bool> gold_ids;
    for (const auto& ex : gold) gold_ids.emplace(ex.id, true);
    for (const auto& p : pred) {
      if (!gold_ids.contains(p.id)) extra.push_back(p.id);
    }
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "prediction ids do not match gold ids";
    if (!missing.empty()) msg += "; missing from predictions: " + list_ids(missing);
    if (!extra.empty()) msg += "; not in gold: " + list_ids(extra);
    throw Error(msg);
  }
  return confusion(gold_rows, pred_rows, vocab.size());
}

double micro_f1(const ConfusionCounts& counts) noexcept {
  const auto t = counts.totals();
  return prf(t.tp, t.fp, t.fn).f1;
}

double macro_f1(const ConfusionCounts& counts) noexcept {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts.tp[l] + counts.fp[l] + counts.fn[l] == 0) continue;
    sum += prf(counts.tp[l], counts.fp[l], counts.fn[l]).f1;
    ++used;
  }
  return used == 0 ? 1.0 : sum / static_cast<double>(used);
}

json score_report(const ConfusionCounts& counts, const LabelVocabulary& vocab,
                  std::size_t n_examples, ReportOptions options) {
  const auto fmt = [&](double value) {
    return options.percent ? round_to(100.0 * value, 3) : round_to(value, 6);
  };
  const auto t = counts.totals();
  const PrfScore pooled = prf(t.tp, t.fp, t.fn);

  json out;
  out["micro_f1"] = fmt(pooled.f1);
  out["macro_f1"] = fmt(macro_f1(counts));
  out["precision"] = fmt(pooled.precision);
  out["recall"] = fmt(pooled.recall);
  out["tp"] = t.tp;
  out["fp"] = t.fp;
  out["fn"] = t.fn;
  out["n_examples"] = n_examples;
  out["percent"] = options.percent;
  if (options.per_label) {
    json per_label = json::object();
    for (std::size_t l = 0; l < counts.size(); ++l) {
      const PrfScore s = prf(counts.tp[l], counts.fp[l], counts.fn[l]);
      per_label[vocab.at(l)] = {{"tp", counts.tp[l]}, {"fp", counts.fp[l]},
                                {"fn", counts.fn[l]}, {"p", fmt(s.precision)},
                                {"r", fmt(s.recall)}, {"f1", fmt(s.f1)}};
    }
    out["per_label"] = std::move(per_label);
  }
  return out;
}

}  // namespace mltc
