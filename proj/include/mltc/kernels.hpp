#pragma once

// Data-parallel inner loops. Each kernel exists twice with identical
// signatures: `serial` is the plain reference and `omp` the OpenMP version
// used by the library. Work is split so that every output cell is produced
// by one thread in the same order as the serial loop, which keeps the two
// bit-for-bit identical.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mltc/corpus.hpp"
#include "mltc/features.hpp"
#include "mltc/metrics.hpp"

namespace mltc {

/// Row-major L x D weight matrix plus L biases.
struct Weights {
  std::size_t n_labels = 0;
  std::size_t dim = 0;
  std::vector<double> w;
  std::vector<double> b;

  Weights() = default;
  Weights(std::size_t labels, std::size_t dimension)
      : n_labels(labels), dim(dimension), w(labels * dimension, 0.0), b(labels, 0.0) {}

  std::span<const double> row(std::size_t label) const {
    return {w.data() + label * dim, dim};
  }
  std::span<double> row(std::size_t label) { return {w.data() + label * dim, dim}; }
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Weights kept as scale * stored, so the uniform L2 shrink of every SGD step
/// costs O(1) instead of O(L * D).
struct ScaledWeights {
  Weights stored;
  double scale = 1.0;

  /// Multiplies `scale` into `stored` and resets it to 1.
  void fold();
  Weights materialized() const;
};

struct LossAndGrad {
  double loss = 0.0;
  Weights grad;
};

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before log.
inline constexpr double kProbEpsilon = 1e-12;

double sigmoid(double z) noexcept;

namespace kernels {

namespace serial {

std::vector<SparseVector> featurize_batch(std::span<const std::string> texts,
                                          const FeatureSpec& spec);

// N x L row-major sigmoid(scale * w . x + b).
std::vector<double> probabilities(const Weights& weights,
                                  std::span<const SparseVector> x,
                                  double scale = 1.0);

// Mean BCE over all (example, label) cells + l2 * ||W||^2, with its exact
// dense gradient.
LossAndGrad bce_loss_and_grad(const Weights& weights,
                              std::span<const SparseVector> x,
                              std::span<const MultiHot> y, double l2);

// Same loss evaluated at scale * stored, without the gradient.
double bce_loss(const ScaledWeights& weights, std::span<const SparseVector> x,
                std::span<const MultiHot> y, double l2);

// W <- W - lr * grad(batch). Returns the data term of the batch loss at the
// pre-step weights.
double sgd_step(ScaledWeights& weights, std::span<const SparseVector> x,
                std::span<const MultiHot> y, double learning_rate, double l2);

ConfusionCounts confusion_counts(std::span<const MultiHot> gold,
                                 std::span<const MultiHot> pred,
                                 std::size_t n_labels);

// models[k][e] is model k's multi-hot row for example e; result is N x L.
std::vector<std::uint32_t> vote_tally(std::span<const std::vector<MultiHot>> models,
                                      std::size_t n_labels);

}  // namespace serial

namespace omp {

std::vector<SparseVector> featurize_batch(std::span<const std::string> texts,
                                          const FeatureSpec& spec);

// N x L row-major sigmoid(scale * w . x + b).
std::vector<double> probabilities(const Weights& weights,
                                  std::span<const SparseVector> x,
                                  double scale = 1.0);

// Mean BCE over all (example, label) cells + l2 * ||W||^2, with its exact
// dense gradient.
LossAndGrad bce_loss_and_grad(const Weights& weights,
                              std::span<const SparseVector> x,
                              std::span<const MultiHot> y, double l2);

// Same loss evaluated at scale * stored, without the gradient.
double bce_loss(const ScaledWeights& weights, std::span<const SparseVector> x,
                std::span<const MultiHot> y, double l2);

// W <- W - lr * grad(batch). Returns the data term of the batch loss at the
// pre-step weights.
double sgd_step(ScaledWeights& weights, std::span<const SparseVector> x,
                std::span<const MultiHot> y, double learning_rate, double l2);

ConfusionCounts confusion_counts(std::span<const MultiHot> gold,
                                 std::span<const MultiHot> pred,
                                 std::size_t n_labels);

// models[k][e] is model k's multi-hot row for example e; result is N x L.
std::vector<std::uint32_t> vote_tally(std::span<const std::vector<MultiHot>> models,
                                      std::size_t n_labels);

}  // namespace omp

}  // namespace kernels
}  // namespace mltc
