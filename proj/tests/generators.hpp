#pragma once

// Dataset generators shared by unit and acceptance tests.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mltc/corpus.hpp"
#include "mltc/features.hpp"
#include "mltc/kernels.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace mltc::test {

/// Multi-label dataset whose label frequencies fall off geometrically, so the
/// most common label is at least `min_ratio` times the rarest present one.
/// Needs n_labels >= 2 and enough examples for the ratio to show up.
inline Dataset skewed_dataset(Rng& rng, std::size_t n_labels, std::size_t n_examples,
                              double min_ratio = 20.0) {
  for (int attempt = 0;; ++attempt) {
    if (attempt == 1000) throw std::runtime_error("skewed_dataset: ratio not reachable");
    // Expected rarest-to-commonest weight ratio lands in [2, 6] x min_ratio.
    std::vector<double> weight(n_labels);
    const double target = min_ratio * std::uniform_real_distribution<double>(2.0, 6.0)(rng);
    const double decay = std::pow(1.0 / target, 1.0 / double(std::max<std::size_t>(n_labels - 1, 1)));
    for (std::size_t l = 0; l < n_labels; ++l) weight[l] = std::pow(decay, double(l));
    std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());

    Dataset data;
    for (std::size_t i = 0; i < n_examples; ++i) {
      Example ex{"e" + std::to_string(i), "text " + std::to_string(i), {}};
      std::size_t k = 1;
      while (k < 4 && coin(rng, 0.3)) ++k;
      for (std::size_t j = 0; j < k; ++j) ex.labels.insert("L" + std::to_string(pick(rng)));
      data.push_back(std::move(ex));
    }
    const auto stats = compute_stats(data);
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& [label, count] : stats.per_label_counts) {
      lo = std::min(lo, count);
      hi = std::max(hi, count);
    }
    if (double(hi) >= min_ratio * double(lo)) return data;
  }
}

/// Label l is present iff the text contains the token "tok<l>"; every example
/// has at least one label. Token-presence is linearly separable in n-gram
/// space.
inline Dataset separable_dataset(Rng& rng, std::size_t n_labels, std::size_t n_examples,
                                 const std::string& id_prefix = "s") {
  static const std::vector<std::string> noise{"و", "في", "من", "على", "hello", "نعم", "😀", "la"};
  Dataset data;
  for (std::size_t i = 0; i < n_examples; ++i) {
    Example ex{id_prefix + std::to_string(i), "", {}};
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (coin(rng, 0.35)) ex.labels.insert("L" + std::to_string(l));
    }
    if (ex.labels.empty()) ex.labels.insert("L" + std::to_string(uniform(rng, 0, n_labels - 1)));
    std::vector<std::string> words;
    for (const auto& label : ex.labels) words.push_back("tok" + label.substr(1) + "q");
    for (std::size_t k = uniform(rng, 1, 4); k > 0; --k) {
      words.push_back(noise[uniform(rng, 0, noise.size() - 1)]);
    }
    std::shuffle(words.begin(), words.end(), rng);
    for (const auto& w : words) ex.text += (ex.text.empty() ? "" : " ") + w;
    data.push_back(std::move(ex));
  }
  return data;
}

// Random mix of scripts, emoji, whitespace and the markers the rules act on.
inline std::string random_tweet(Rng& rng) {
  static const std::vector<std::string> atoms{
      "مرحبا", "فلسطين", "ال", "hello", "World", "x", "42", "٣", "😀", "🔥", "❤️", "🇵🇸",
      "👨‍👩‍👧", "@", "#", "_", "__", "http://", "https://", "HTTPS://", "www.", "://", ".",
      ":", "!", "?", " ", "  ", "\t", "\n", " ", "t.co/x", "ab_cd", "#tag", "@user",
      "é", "中文", "\xff", "\xd8"};
  std::string s;
  for (std::size_t n = uniform(rng, 0, 14); n > 0; --n) {
    s += atoms[uniform(rng, 0, atoms.size() - 1)];
  }
  return s;
}

inline double max_min_ratio(const Dataset& data) {
  const auto stats = compute_stats(data);
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& [label, count] : stats.per_label_counts) {
    lo = std::min(lo, count);
    hi = std::max(hi, count);
  }
  return double(hi) / double(lo);
}

// Random sparse rows over a small dense space, plus the dense copy the
// oracle works on.
struct RandomBatch {
  std::vector<SparseVector> x;
  std::vector<MultiHot> y;
  oracle::DenseProblem dense;
};

inline RandomBatch random_batch(Rng& rng, std::size_t labels, std::size_t dim, std::size_t n,
                                double l2) {
  RandomBatch b;
  b.dense.labels = labels;
  b.dense.dim = dim;
  b.dense.l2 = l2;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t e = 0; e < n; ++e) {
    SparseVector v;
    std::vector<double> dense(dim, 0.0);
    for (std::uint32_t j = 0; j < dim; ++j) {
      if (!coin(rng, 0.4)) continue;
      const double value = normal(rng);
      v.indices.push_back(j);
      v.values.push_back(value);
      dense[j] = value;
    }
    const MultiHot bits = random_bits(rng, labels, 0.4);
    b.x.push_back(std::move(v));
    b.y.push_back(bits);
    b.dense.x.push_back(std::move(dense));
    b.dense.y.emplace_back(bits.begin(), bits.end());
  }
  return b;
}

inline Weights random_weights(Rng& rng, std::size_t labels, std::size_t dim, double sd) {
  Weights w(labels, dim);
  std::normal_distribution<double> normal(0.0, sd);
  for (double& v : w.w) v = normal(rng);
  for (double& v : w.b) v = normal(rng);
  return w;
}

inline std::vector<double> flatten(const Weights& w) {
  std::vector<double> out = w.w;
  out.insert(out.end(), w.b.begin(), w.b.end());
  return out;
}

}  // namespace mltc::test
