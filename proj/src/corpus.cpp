#include "mltc/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include "mltc/error.hpp"
#include "mltc/hash.hpp"
#include "mltc/io.hpp"

namespace mltc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on '\n', dropping one trailing '\r' per line.
std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no); }

void check_labels(const Example& ex, const LabelVocabulary* vocab,
                  const LoadOptions& options, std::size_t line_no) {
  if (options.require_labels && ex.labels.empty()) {
    throw Error(where(line_no) + ": example '" + ex.id + "' has no labels");
  }
  if (vocab == nullptr) return;
  for (const auto& label : ex.labels) {
    if (!vocab->contains(label)) {
      throw Error(where(line_no) + ": unknown label '" + label + "'");
    }
  }
}

void add_unique(Dataset& out, std::unordered_set<std::string>& seen, Example ex,
                std::size_t line_no) {
  if (!seen.insert(ex.id).second) {
    throw Error(where(line_no) + ": duplicate id '" + ex.id + "'");
  }
  out.push_back(std::move(ex));
}

}  // namespace

LabelVocabulary::LabelVocabulary(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw Error("empty label name at index " + std::to_string(i));
    if (!index_.emplace(labels_[i], i).second) {
      throw Error("duplicate label '" + labels_[i] + "'");
    }
  }
}

std::optional<std::size_t> LabelVocabulary::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelVocabulary::index(std::string_view label) const {
  auto found = find(label);
  if (!found) throw Error("unknown label '" + std::string(label) + "'");
  return *found;
}

std::uint64_t LabelVocabulary::hash() const noexcept {
  std::uint64_t h = kFnvOffset;
  for (const auto& label : labels_) {
    h = fnv1a64(label, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

LabelVocabulary parse_vocabulary(std::string_view content) {
  std::vector<std::string> labels;
  for (auto line : split_lines(content)) {
    line = trim(line);
    if (!line.empty()) labels.emplace_back(line);
  }
  if (labels.empty()) throw Error("label file is empty");
  return LabelVocabulary(std::move(labels));
}

LabelVocabulary load_vocabulary(const fs::path& path) {
  try {
    return parse_vocabulary(io::read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Dataset parse_jsonl_dataset(std::string_view content, const LabelVocabulary* vocab,
                            LoadOptions options) {
  Dataset out;
  std::unordered_set<std::string> seen;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw Error(where(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error(where(line_no) + ": expected a JSON object");
    Example ex;
    auto id = obj.find("id");
    auto text = obj.find("text");
    if (id == obj.end() || !id->is_string()) {
      throw Error(where(line_no) + ": missing string field 'id'");
    }
    if (text == obj.end() || !text->is_string()) {
      throw Error(where(line_no) + ": missing string field 'text'");
    }
    ex.id = id->get<std::string>();
    ex.text = text->get<std::string>();
    if (auto labels = obj.find("labels"); labels != obj.end() && !labels->is_null()) {
      if (!labels->is_array()) throw Error(where(line_no) + ": 'labels' must be a list");
      for (const auto& label : *labels) {
        if (!label.is_string()) {
          throw Error(where(line_no) + ": labels must be strings");
        }
        ex.labels.insert(label.get<std::string>());
      }
    }
    check_labels(ex, vocab, options, line_no);
    add_unique(out, seen, std::move(ex), line_no);
  }
  return out;
}

Dataset parse_tsv_dataset(std::string_view content, const LabelVocabulary* vocab,
                          LoadOptions options) {
  Dataset out;
  std::unordered_set<std::string> seen;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (trim(line).empty()) continue;
    const auto tab1 = line.find('\t');
    if (tab1 == std::string_view::npos) {
      throw Error(where(line_no) + ": expected id<TAB>text[<TAB>labels]");
    }
    const auto tab2 = line.find('\t', tab1 + 1);
    Example ex;
    ex.id = std::string(line.substr(0, tab1));
    ex.text = std::string(line.substr(tab1 + 1, tab2 == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : tab2 - tab1 - 1));
    if (tab2 != std::string_view::npos) {
      std::string_view rest = line.substr(tab2 + 1);
      if (rest.find('\t') != std::string_view::npos) {
        throw Error(where(line_no) + ": too many columns");
      }
      std::size_t start = 0;
      while (start <= rest.size()) {
        std::size_t comma = rest.find(',', start);
        if (comma == std::string_view::npos) comma = rest.size();
        auto label = trim(rest.substr(start, comma - start));
        if (!label.empty()) ex.labels.emplace(label);
        start = comma + 1;
      }
    }
    if (ex.id.empty()) throw Error(where(line_no) + ": empty id");
    check_labels(ex, vocab, options, line_no);
    add_unique(out, seen, std::move(ex), line_no);
  }
  return out;
}

Dataset load_dataset(const fs::path& path, const LabelVocabulary* vocab,
                     LoadOptions options) {
  const std::string content = io::read_file(path);
  try {
    if (path.extension() == ".tsv") return parse_tsv_dataset(content, vocab, options);
    return parse_jsonl_dataset(content, vocab, options);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& ex : dataset) {
    nlohmann::ordered_json obj;
    obj["id"] = ex.id;
    obj["text"] = ex.text;
    obj["labels"] = ex.labels;
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void save_dataset(const fs::path& path, const Dataset& dataset) {
  io::write_file_atomic(path, to_jsonl(dataset));
}

MultiHot encode(const LabelSet& labels, const LabelVocabulary& vocab) {
  MultiHot bits(vocab.size(), 0);
  for (const auto& label : labels) bits[vocab.index(label)] = 1;
  return bits;
}

LabelSet decode(const MultiHot& bits, const LabelVocabulary& vocab) {
  if (bits.size() != vocab.size()) {
    throw Error("multi-hot length " + std::to_string(bits.size()) +
                " does not match vocabulary size " + std::to_string(vocab.size()));
  }
  LabelSet labels;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) labels.insert(vocab.at(i));
  }
  return labels;
}

DatasetStats compute_stats(const Dataset& dataset) {
  DatasetStats stats;
  stats.n_examples = dataset.size();
  for (const auto& ex : dataset) {
    ++stats.labels_per_example_histogram[ex.labels.size()];
    for (const auto& label : ex.labels) ++stats.per_label_counts[label];
  }
  return stats;
}

json to_json(const DatasetStats& stats) {
  json out;
  out["n_examples"] = stats.n_examples;
  out["per_label_counts"] = json::object();
  for (const auto& [label, count] : stats.per_label_counts) {
    out["per_label_counts"][label] = count;
  }
  out["labels_per_example_histogram"] = json::object();
  for (const auto& [k, count] : stats.labels_per_example_histogram) {
    out["labels_per_example_histogram"][std::to_string(k)] = count;
  }
  return out;
}

}  // namespace mltc
