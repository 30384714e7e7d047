// Reference kernels: straightforward loops, no threading.

#include "detail.hpp"

namespace mltc::kernels::serial {

std::vector<SparseVector> featurize_batch(std::span<const std::string> texts,
                                          const FeatureSpec& spec) {
  std::vector<SparseVector> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) out[i] = featurize(texts[i], spec);
  return out;
}

std::vector<double> probabilities(const Weights& weights, std::span<const SparseVector> x,
                                  double scale) {
  detail::check_features(weights, x);
  const std::size_t n_labels = weights.n_labels;
  std::vector<double> out(x.size() * n_labels);
  for (std::size_t e = 0; e < x.size(); ++e) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      out[e * n_labels + l] = sigmoid(scale * detail::dot(weights.row(l), x[e]) + weights.b[l]);
    }
  }
  return out;
}

LossAndGrad bce_loss_and_grad(const Weights& weights, std::span<const SparseVector> x,
                              std::span<const MultiHot> y, double l2) {
  detail::check_batch(weights, x, y);
  const std::size_t n_labels = weights.n_labels;
  const double cells = static_cast<double>(x.size() * n_labels);
  LossAndGrad out{0.0, Weights(n_labels, weights.dim)};

  std::vector<double> data_loss(n_labels, 0.0);
  std::vector<double> penalty(n_labels, 0.0);
  for (std::size_t l = 0; l < n_labels; ++l) {
    const auto row = weights.row(l);
    auto grad_row = out.grad.row(l);
    for (std::size_t e = 0; e < x.size(); ++e) {
      const auto cell = detail::bce_cell(detail::dot(row, x[e]) + weights.b[l], y[e][l] != 0);
      data_loss[l] += cell.loss;
      const double r = cell.slope / cells;
      for (std::size_t k = 0; k < x[e].indices.size(); ++k) {
        grad_row[x[e].indices[k]] += r * x[e].values[k];
      }
      out.grad.b[l] += r;
    }
    for (std::size_t j = 0; j < weights.dim; ++j) grad_row[j] += 2.0 * l2 * row[j];
    penalty[l] = detail::sum_squares(row);
  }
  double data = 0.0;
  double norm = 0.0;
  for (std::size_t l = 0; l < n_labels; ++l) {
    data += data_loss[l];
    norm += penalty[l];
  }
  out.loss = data / cells + l2 * norm;
  return out;
}

double bce_loss(const ScaledWeights& weights, std::span<const SparseVector> x,
                std::span<const MultiHot> y, double l2) {
  const Weights& stored = weights.stored;
  detail::check_batch(stored, x, y);
  const std::size_t n_labels = stored.n_labels;
  const double cells = static_cast<double>(x.size() * n_labels);
  std::vector<double> data_loss(n_labels, 0.0);
  std::vector<double> penalty(n_labels, 0.0);
  for (std::size_t l = 0; l < n_labels; ++l) {
    const auto row = stored.row(l);
    for (std::size_t e = 0; e < x.size(); ++e) {
      const double z = weights.scale * detail::dot(row, x[e]) + stored.b[l];
      data_loss[l] += detail::bce_cell(z, y[e][l] != 0).loss;
    }
    penalty[l] = detail::sum_squares(row);
  }
  double data = 0.0;
  double norm = 0.0;
  for (std::size_t l = 0; l < n_labels; ++l) {
    data += data_loss[l];
    norm += penalty[l];
  }
  return data / cells + l2 * weights.scale * weights.scale * norm;
}

double sgd_step(ScaledWeights& weights, std::span<const SparseVector> x,
                std::span<const MultiHot> y, double learning_rate, double l2) {
  Weights& stored = weights.stored;
  detail::check_batch(stored, x, y);
  const std::size_t n_labels = stored.n_labels;
  const double cells = static_cast<double>(x.size() * n_labels);
  const double scale = weights.scale;
  const double next_scale = scale * (1.0 - 2.0 * learning_rate * l2);

  std::vector<double> data_loss(n_labels, 0.0);
  std::vector<double> residual(x.size());
  for (std::size_t l = 0; l < n_labels; ++l) {
    auto row = stored.row(l);
    double bias_grad = 0.0;
    for (std::size_t e = 0; e < x.size(); ++e) {
      const double z = scale * detail::dot(row, x[e]) + stored.b[l];
      const auto cell = detail::bce_cell(z, y[e][l] != 0);
      data_loss[l] += cell.loss;
      residual[e] = cell.slope / cells;
      bias_grad += residual[e];
    }
    for (std::size_t e = 0; e < x.size(); ++e) {
      const double step = learning_rate * residual[e] / next_scale;
      for (std::size_t k = 0; k < x[e].indices.size(); ++k) {
        row[x[e].indices[k]] -= step * x[e].values[k];
      }
    }
    stored.b[l] -= learning_rate * bias_grad;
  }
  weights.scale = next_scale;

  double data = 0.0;
  for (double v : data_loss) data += v;
  return data / cells;
}

ConfusionCounts confusion_counts(std::span<const MultiHot> gold, std::span<const MultiHot> pred,
                                 std::size_t n_labels) {
  detail::check_pairs(gold, pred, n_labels);
  ConfusionCounts out(n_labels);
  for (std::size_t e = 0; e < gold.size(); ++e) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      const bool g = gold[e][l] != 0;
      const bool p = pred[e][l] != 0;
      out.tp[l] += g && p;
      out.fp[l] += !g && p;
      out.fn[l] += g && !p;
    }
  }
  return out;
}

std::vector<std::uint32_t> vote_tally(std::span<const std::vector<MultiHot>> models,
                                      std::size_t n_labels) {
  detail::check_models(models, n_labels);
  const std::size_t n = models.empty() ? 0 : models.front().size();
  std::vector<std::uint32_t> out(n * n_labels, 0);
  for (const auto& model : models) {
    for (std::size_t e = 0; e < n; ++e) {
      for (std::size_t l = 0; l < n_labels; ++l) out[e * n_labels + l] += model[e][l] != 0;
    }
  }
  return out;
}

}  // namespace mltc::kernels::serial
