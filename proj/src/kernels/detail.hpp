#pragma once

// Pieces shared by the serial and OpenMP kernels. Both variants call these
// per (label, example) so their floating-point results agree exactly.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "mltc/error.hpp"
#include "mltc/kernels.hpp"

namespace mltc::kernels::detail {

inline double dot(std::span<const double> row, const SparseVector& x) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < x.indices.size(); ++k) sum += row[x.indices[k]] * x.values[k];
  return sum;
}

struct Cell {
  double loss;
  // d(cell loss)/dz; zero where the probability was clamped.
  double slope;
};

inline Cell bce_cell(double z, bool positive) noexcept {
  const double p = sigmoid(z);
  const double pc = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
  const double loss = positive ? -std::log(pc) : -std::log(1.0 - pc);
  const bool clamped = p < kProbEpsilon || p > 1.0 - kProbEpsilon;
  const double slope = clamped ? 0.0 : p - (positive ? 1.0 : 0.0);
  return {loss, slope};
}

inline double sum_squares(std::span<const double> row) noexcept {
  double sum = 0.0;
  for (double x : row) sum += x * x;
  return sum;
}

inline void check_batch(const Weights& weights, std::span<const SparseVector> x,
                        std::span<const MultiHot> y) {
  if (x.size() != y.size()) {
    throw Error("batch has " + std::to_string(x.size()) + " feature rows but " +
                std::to_string(y.size()) + " target rows");
  }
  if (x.empty()) throw Error("empty batch");
  if (weights.w.size() != weights.n_labels * weights.dim ||
      weights.b.size() != weights.n_labels) {
    throw Error("weight matrix shape is inconsistent");
  }
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (y[e].size() != weights.n_labels) {
      throw Error("target row " + std::to_string(e) + " has " + std::to_string(y[e].size()) +
                  " labels, model has " + std::to_string(weights.n_labels));
    }
    if (!x[e].indices.empty() && x[e].indices.back() >= weights.dim) {
      throw Error("feature index out of range in row " + std::to_string(e));
    }
  }
}

inline void check_features(const Weights& weights, std::span<const SparseVector> x) {
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (!x[e].indices.empty() && x[e].indices.back() >= weights.dim) {
      throw Error("feature index out of range in row " + std::to_string(e));
    }
  }
}

inline void check_pairs(std::span<const MultiHot> gold, std::span<const MultiHot> pred,
                        std::size_t n_labels) {
  if (gold.size() != pred.size()) throw Error("gold and prediction row counts differ");
  for (std::size_t e = 0; e < gold.size(); ++e) {
    if (gold[e].size() != n_labels || pred[e].size() != n_labels) {
      throw Error("multi-hot row " + std::to_string(e) + " has the wrong length");
    }
  }
}

inline void check_models(std::span<const std::vector<MultiHot>> models,
                         std::size_t n_labels) {
  if (models.empty()) return;
  const std::size_t n = models.front().size();
  for (const auto& model : models) {
    if (model.size() != n) throw Error("models disagree on the number of examples");
    for (const auto& row : model) {
      if (row.size() != n_labels) throw Error("multi-hot row has the wrong length");
    }
  }
}

}  // namespace mltc::kernels::detail
