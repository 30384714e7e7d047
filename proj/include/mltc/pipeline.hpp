#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mltc/baseline.hpp"
#include "mltc/ensemble.hpp"
#include "mltc/preprocess.hpp"

namespace mltc {

struct RunConfig {
  std::filesystem::path labels;
  std::filesystem::path train;
  std::filesystem::path valid;
  std::filesystem::path test;
  std::filesystem::path out_dir;

  bool preprocess = true;
  NormalizeOptions normalize;

  bool oversample = false;
  std::size_t clip = 10;

  /// Hyperparameters shared by every baseline variant; `seed` is replaced
  /// per variant.
  TrainConfig baseline;
  /// One baseline model is trained per seed. Empty means {seed}.
  std::vector<std::uint64_t> model_seeds;

  /// Extra prediction files (e.g. from external models) joined to the vote.
  std::vector<std::filesystem::path> ensemble_inputs;
  std::optional<std::size_t> threshold_votes;
  Fallback fallback = Fallback::none;

  std::uint64_t seed = 0;
};

/// INI text. Keys are `section.key`; see README for the full list.
/// Relative paths resolve against `base_dir`. Overrides use the same dotted
/// keys and win over the file. Without a `seed` key the MLTC_SEED
/// environment variable is used, then 0.
RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir,
                           const std::map<std::string, std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& overrides = {});

/// Throws `Error` naming the first missing input.
void validate(const RunConfig& config);

/// Canonical, location-independent form used for the config hash: input
/// files are identified by content hash, the output directory is left out.
nlohmann::json canonical_json(const RunConfig& config);

struct PipelineResult {
  std::filesystem::path manifest;
  std::map<std::string, std::filesystem::path> artifacts;
  /// Ensemble score report.
  nlohmann::json score;
  /// Score report of each baseline variant, in seed order.
  std::vector<nlohmann::json> model_scores;
};

/// preprocess -> oversample -> train -> predict -> vote -> score, writing
/// every artifact plus manifest.json under out_dir. On failure every artifact
/// written by this run is removed and an `Error` naming the stage is thrown.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace mltc
