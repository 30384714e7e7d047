#include "mltc/features.hpp"

#include <algorithm>
#include <cmath>

#include "mltc/error.hpp"
#include "mltc/hash.hpp"
#include "mltc/unicode.hpp"

namespace mltc {

void validate(const FeatureSpec& spec) {
  if (spec.dim == 0 || (spec.dim & (spec.dim - 1)) != 0) {
    throw Error("feature dimension must be a power of two, got " + std::to_string(spec.dim));
  }
  if (spec.dim > (std::size_t{1} << 32)) throw Error("feature dimension must be <= 2^32");
  if (spec.ngram_min < 1 || spec.ngram_min > spec.ngram_max) {
    throw Error("n-gram range must satisfy 1 <= min <= max");
  }
}

SparseVector featurize(std::string_view text, const FeatureSpec& spec) {
  const auto units = unicode::decode(text);
  const std::uint64_t mask = spec.dim - 1;

  std::vector<std::uint32_t> buckets;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t n = spec.ngram_min; n <= spec.ngram_max && i + n <= units.size(); ++n) {
      const auto& last = units[i + n - 1];
      const std::size_t begin = units[i].offset;
      const std::size_t end = last.offset + last.length;
      buckets.push_back(static_cast<std::uint32_t>(fnv1a64(text.substr(begin, end - begin)) & mask));
    }
  }
  std::sort(buckets.begin(), buckets.end());

  SparseVector v;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    v.indices.push_back(buckets[i]);
    v.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  const double norm = l2_norm(v);
  if (norm > 0.0) {
    for (double& x : v.values) x /= norm;
  }
  return v;
}

double l2_norm(const SparseVector& v) noexcept {
  double sum = 0.0;
  for (double x : v.values) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace mltc
