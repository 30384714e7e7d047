#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mltc {

/// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct FeatureSpec {
  std::size_t dim = std::size_t{1} << 18;
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 5;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Throws `Error` unless dim is a power of two below 2^32 and
/// 1 <= ngram_min <= ngram_max.
void validate(const FeatureSpec& spec);

/// Counts every character n-gram (characters are code points; malformed
/// bytes count as one character each) for n in [ngram_min, ngram_max].
/// Bucket = FNV-1a-64 of the n-gram's UTF-8 bytes, masked to dim - 1. The
/// count vector is L2-normalized; empty input yields the zero vector.
SparseVector featurize(std::string_view text, const FeatureSpec& spec);

double l2_norm(const SparseVector& v) noexcept;

}  // namespace mltc
