#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mltc/corpus.hpp"

namespace mltc {

struct NormalizationReport {
  std::size_t urls_removed = 0;
  std::size_t mentions_removed = 0;
  std::size_t hashtags_processed = 0;
  std::size_t underscores_replaced = 0;

  NormalizationReport& operator+=(const NormalizationReport& other);
  friend bool operator==(const NormalizationReport&,
                         const NormalizationReport&) = default;
};

struct NormalizeOptions {
  /// Delete the hashtag text together with the `#` marker.
  bool drop_hashtag_body = false;
};

struct Normalized {
  std::string text;
  NormalizationReport report;
};

/// Tweet cleanup, applied in this order:
///   1. drop URL tokens (`http://`, `https://` anywhere, or a token starting
///      with `www.`) up to the next whitespace;
///   2. drop mentions: `@` plus the maximal run of word characters after it;
///   3. drop the `#` marker of hashtags, keeping the tag text;
///   4. turn every `_` into a space;
///   5. collapse whitespace runs to one space and trim.
/// Everything else, emoji included, is copied through byte for byte. Removing
/// a token can splice its neighbours into a new match (`http@x://` becomes
/// `http://`), so the rules are re-applied until nothing changes.
Normalized normalize(std::string_view text, NormalizeOptions options = {});

/// Normalizes every example's text; ids and labels are kept. Labels are not
/// checked against a vocabulary.
NormalizationReport normalize_dataset(const std::filesystem::path& in,
                                      const std::filesystem::path& out,
                                      NormalizeOptions options = {});
NormalizationReport normalize_examples(Dataset& dataset,
                                       NormalizeOptions options = {});

nlohmann::json to_json(const NormalizationReport& report);

}  // namespace mltc
