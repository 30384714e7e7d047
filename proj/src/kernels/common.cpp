#include <cmath>

#include "mltc/kernels.hpp"

namespace mltc {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void ScaledWeights::fold() {
  if (scale == 1.0) return;
  for (double& x : stored.w) x *= scale;
  scale = 1.0;
}

Weights ScaledWeights::materialized() const {
  Weights out = stored;
  if (scale != 1.0) {
    for (double& x : out.w) x *= scale;
  }
  return out;
}

}  // namespace mltc
