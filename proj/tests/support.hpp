#pragma once

// Random generators and filesystem helpers shared by the test binaries.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mltc/corpus.hpp"
#include "mltc/io.hpp"
#include "mltc/predictions.hpp"

namespace mltc::test {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline LabelVocabulary make_vocab(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("L" + std::to_string(i));
  return LabelVocabulary(std::move(labels));
}

inline LabelSet random_subset(Rng& rng, const LabelVocabulary& vocab, double p = 0.3) {
  LabelSet out;
  for (const auto& label : vocab.labels()) {
    if (coin(rng, p)) out.insert(label);
  }
  return out;
}

inline MultiHot random_bits(Rng& rng, std::size_t n, double p = 0.3) {
  MultiHot bits(n);
  for (auto& b : bits) b = coin(rng, p) ? 1 : 0;
  return bits;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    Rng rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("mltc_" + tag + "_" + std::to_string(rng() % 1000000007ULL) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    io::write_file_atomic(p, content);
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace mltc::test
