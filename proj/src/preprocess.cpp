#include "mltc/preprocess.hpp"

#include <cctype>
#include <vector>

#include "mltc/io.hpp"
#include "mltc/unicode.hpp"

namespace mltc {

namespace {

using unicode::CodeUnit;

bool ascii_prefix_ci(std::string_view text, std::size_t offset, std::string_view prefix) {
  if (text.size() - offset < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    const auto c = static_cast<unsigned char>(text[offset + k]);
    if (std::tolower(c) != prefix[k]) return false;
  }
  return true;
}

bool space_at(const std::vector<CodeUnit>& units, std::size_t i) {
  return units[i].valid && unicode::is_whitespace(units[i].cp);
}

bool word_at(const std::vector<CodeUnit>& units, std::size_t i) {
  return i < units.size() && units[i].valid && unicode::is_word(units[i].cp);
}

void copy_unit(std::string& out, std::string_view text, const CodeUnit& u) {
  out.append(text.substr(u.offset, u.length));
}

std::string strip_urls(std::string_view text, std::size_t& removed) {
  const auto units = unicode::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < units.size()) {
    const std::size_t at = units[i].offset;
    const bool token_start = i == 0 || space_at(units, i - 1);
    const bool url = ascii_prefix_ci(text, at, "http://") ||
                     ascii_prefix_ci(text, at, "https://") ||
                     (token_start && ascii_prefix_ci(text, at, "www."));
    if (!url) {
      copy_unit(out, text, units[i++]);
      continue;
    }
    ++removed;
    while (i < units.size() && !space_at(units, i)) ++i;
  }
  return out;
}

std::string strip_mentions(std::string_view text, std::size_t& removed) {
  const auto units = unicode::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < units.size()) {
    if (units[i].cp == U'@' && word_at(units, i + 1)) {
      ++removed;
      ++i;
      while (word_at(units, i)) ++i;
      continue;
    }
    copy_unit(out, text, units[i++]);
  }
  return out;
}

std::string strip_hashtags(std::string_view text, bool drop_body, std::size_t& processed) {
  const auto units = unicode::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < units.size()) {
    if (units[i].cp != U'#') {
      copy_unit(out, text, units[i++]);
      continue;
    }
    // "##tag" loses both markers; a '#' run not followed by a word stays.
    std::size_t run_end = i;
    while (run_end < units.size() && units[run_end].cp == U'#') ++run_end;
    if (!word_at(units, run_end)) {
      for (; i < run_end; ++i) copy_unit(out, text, units[i]);
      continue;
    }
    ++processed;
    i = run_end;
    if (drop_body) {
      while (word_at(units, i)) ++i;
    }
  }
  return out;
}

std::string replace_underscores(std::string_view text, std::size_t& replaced) {
  std::string out(text);
  for (char& c : out) {
    if (c == '_') {
      c = ' ';
      ++replaced;
    }
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  const auto units = unicode::decode(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (space_at(units, i)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    copy_unit(out, text, units[i]);
  }
  return out;
}

std::string apply_rules(std::string_view text, const NormalizeOptions& options,
                        NormalizationReport& report) {
  std::string s = strip_urls(text, report.urls_removed);
  s = strip_mentions(s, report.mentions_removed);
  s = strip_hashtags(s, options.drop_hashtag_body, report.hashtags_processed);
  s = replace_underscores(s, report.underscores_replaced);
  return collapse_whitespace(s);
}

}  // namespace

NormalizationReport& NormalizationReport::operator+=(const NormalizationReport& other) {
  urls_removed += other.urls_removed;
  mentions_removed += other.mentions_removed;
  hashtags_processed += other.hashtags_processed;
  underscores_replaced += other.underscores_replaced;
  return *this;
}

Normalized normalize(std::string_view text, NormalizeOptions options) {
  Normalized result;
  result.text = apply_rules(text, options, result.report);
  // A pass that changes nothing has nothing left to count, so the loop ends
  // at the first fixed point. Every changing pass after the first shortens
  // the text.
  for (;;) {
    std::string next = apply_rules(result.text, options, result.report);
    if (next == result.text) break;
    result.text = std::move(next);
  }
  return result;
}

NormalizationReport normalize_examples(Dataset& dataset, NormalizeOptions options) {
  std::size_t urls = 0, mentions = 0, hashtags = 0, underscores = 0;
  const auto n = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(dynamic, 64) \
    reduction(+ : urls, mentions, hashtags, underscores)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& ex = dataset[static_cast<std::size_t>(i)];
    Normalized result = normalize(ex.text, options);
    ex.text = std::move(result.text);
    urls += result.report.urls_removed;
    mentions += result.report.mentions_removed;
    hashtags += result.report.hashtags_processed;
    underscores += result.report.underscores_replaced;
  }
  return {urls, mentions, hashtags, underscores};
}

NormalizationReport normalize_dataset(const std::filesystem::path& in,
                                      const std::filesystem::path& out,
                                      NormalizeOptions options) {
  Dataset dataset = load_dataset(in, nullptr);
  const NormalizationReport report = normalize_examples(dataset, options);
  save_dataset(out, dataset);
  return report;
}

nlohmann::json to_json(const NormalizationReport& report) {
  return {{"urls_removed", report.urls_removed},
          {"mentions_removed", report.mentions_removed},
          {"hashtags_processed", report.hashtags_processed},
          {"underscores_replaced", report.underscores_replaced}};
}

}  // namespace mltc
