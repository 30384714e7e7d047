#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace mltc {

using LabelSet = std::set<std::string>;

/// Ordered, duplicate-free list of label names. A label's index is its
/// position in the list.
class LabelVocabulary {
 public:
  LabelVocabulary() = default;
  explicit LabelVocabulary(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& at(std::size_t index) const { return labels_.at(index); }

  std::optional<std::size_t> find(std::string_view label) const;
  bool contains(std::string_view label) const { return find(label).has_value(); }
  /// Throws `Error` for unknown labels.
  std::size_t index(std::string_view label) const;

  /// FNV-1a over the newline-joined label list; stored in model files.
  std::uint64_t hash() const noexcept;

  friend bool operator==(const LabelVocabulary& a, const LabelVocabulary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Example {
  std::string id;
  std::string text;
  LabelSet labels;

  friend bool operator==(const Example&, const Example&) = default;
};

using Dataset = std::vector<Example>;
using MultiHot = std::vector<std::uint8_t>;

struct DatasetStats {
  std::map<std::string, std::size_t> per_label_counts;
  std::map<std::size_t, std::size_t> labels_per_example_histogram;
  std::size_t n_examples = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

LabelVocabulary load_vocabulary(const std::filesystem::path& path);
LabelVocabulary parse_vocabulary(std::string_view content);

struct LoadOptions {
  /// Every example must carry at least one label.
  bool require_labels = false;
};

/// Reads JSONL (`.jsonl`/`.json`) or TSV (`.tsv`: id, text, comma-separated
/// labels). When `vocab` is given every label must belong to it.
Dataset load_dataset(const std::filesystem::path& path,
                     const LabelVocabulary* vocab, LoadOptions options = {});
Dataset parse_jsonl_dataset(std::string_view content,
                            const LabelVocabulary* vocab,
                            LoadOptions options = {});
Dataset parse_tsv_dataset(std::string_view content,
                          const LabelVocabulary* vocab,
                          LoadOptions options = {});

/// One JSON object per line, LF terminated, labels in sorted order.
std::string to_jsonl(const Dataset& dataset);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

MultiHot encode(const LabelSet& labels, const LabelVocabulary& vocab);
LabelSet decode(const MultiHot& bits, const LabelVocabulary& vocab);

DatasetStats compute_stats(const Dataset& dataset);
nlohmann::json to_json(const DatasetStats& stats);

}  // namespace mltc
