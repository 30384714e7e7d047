#include "mltc/pipeline.hpp"

#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mltc/error.hpp"
#include "mltc/hash.hpp"
#include "mltc/imbalance.hpp"
#include "mltc/io.hpp"
#include "mltc/metrics.hpp"
#include "mltc/version.hpp"

namespace mltc {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "seed",
      "paths.labels",
      "paths.train",
      "paths.valid",
      "paths.test",
      "paths.out_dir",
      "preprocess.enabled",
      "preprocess.drop_hashtag_body",
      "oversample.enabled",
      "oversample.clip",
      "baseline.seeds",
      "baseline.epochs",
      "baseline.learning_rate",
      "baseline.l2",
      "baseline.dim",
      "baseline.ngram_min",
      "baseline.ngram_max",
      "baseline.threshold",
      "baseline.batch_size",
      "ensemble.inputs",
      "ensemble.threshold_votes",
      "ensemble.fallback",
  };
  return keys;
}

void collect_keys(const pt::ptree& tree, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& [name, child] : tree) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (child.empty()) {
      out.push_back(key);
    } else {
      collect_keys(child, key, out);
    }
  }
}

std::string trimmed(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trimmed(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trimmed(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config key '" + key + "': expected a boolean, got '" + raw + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string v = trimmed(raw);
  std::size_t used = 0;
  try {
    if (!v.empty() && v.front() != '-') {
      const unsigned long long x = std::stoull(v, &used, 10);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw Error("config key '" + key + "': expected a non-negative integer, got '" + raw + "'");
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = trimmed(raw);
  std::size_t used = 0;
  try {
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error("config key '" + key + "': expected a number, got '" + raw + "'");
}

fs::path resolve(const fs::path& base, const std::string& raw) {
  fs::path p(trimmed(raw));
  if (p.empty()) return p;
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::string file_digest(const fs::path& path) { return hex64(fnv1a64(io::read_file(path))); }

// Tracks every file written by a run so a failure can remove them all.
class ArtifactLog {
 public:
  explicit ArtifactLog(fs::path dir) : dir_(std::move(dir)) {}

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, std::string_view content) {
    const fs::path p = path(name);
    written_.push_back(name);
    io::write_file_atomic(p, content);
    digests_[name] = hex64(fnv1a64(content));
  }

  void rollback() noexcept {
    for (const auto& name : written_) {
      std::error_code ignored;
      fs::remove(path(name), ignored);
    }
    written_.clear();
    digests_.clear();
  }

  const std::map<std::string, std::string>& digests() const { return digests_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
  std::map<std::string, std::string> digests_;
};

std::string dump_line(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir,
                           const std::map<std::string, std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  for (const auto& [key, value] : overrides) tree.put(key, value);

  std::vector<std::string> keys;
  collect_keys(tree, "", keys);
  std::map<std::string, std::string> values;
  for (const auto& key : keys) {
    if (!known_keys().contains(key)) throw Error("config: unknown key '" + key + "'");
    values[key] = tree.get<std::string>(key);
  }
  const auto get = [&](const std::string& key) -> const std::string* {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };

  RunConfig c;
  if (auto v = get("seed")) {
    c.seed = parse_u64("seed", *v);
  } else if (const char* env = std::getenv("MLTC_SEED"); env != nullptr && *env != '\0') {
    c.seed = parse_u64("MLTC_SEED", env);
  }
  if (auto v = get("paths.labels")) c.labels = resolve(base_dir, *v);
  if (auto v = get("paths.train")) c.train = resolve(base_dir, *v);
  if (auto v = get("paths.valid")) c.valid = resolve(base_dir, *v);
  if (auto v = get("paths.test")) c.test = resolve(base_dir, *v);
  if (auto v = get("paths.out_dir")) c.out_dir = resolve(base_dir, *v);

  if (auto v = get("preprocess.enabled")) c.preprocess = parse_bool("preprocess.enabled", *v);
  if (auto v = get("preprocess.drop_hashtag_body")) {
    c.normalize.drop_hashtag_body = parse_bool("preprocess.drop_hashtag_body", *v);
  }
  if (auto v = get("oversample.enabled")) c.oversample = parse_bool("oversample.enabled", *v);
  if (auto v = get("oversample.clip")) c.clip = parse_u64("oversample.clip", *v);

  TrainConfig& b = c.baseline;
  if (auto v = get("baseline.epochs")) b.epochs = parse_u64("baseline.epochs", *v);
  if (auto v = get("baseline.learning_rate")) {
    b.learning_rate = parse_double("baseline.learning_rate", *v);
  }
  if (auto v = get("baseline.l2")) b.l2 = parse_double("baseline.l2", *v);
  if (auto v = get("baseline.dim")) b.features.dim = parse_u64("baseline.dim", *v);
  if (auto v = get("baseline.ngram_min")) b.features.ngram_min = parse_u64("baseline.ngram_min", *v);
  if (auto v = get("baseline.ngram_max")) b.features.ngram_max = parse_u64("baseline.ngram_max", *v);
  if (auto v = get("baseline.threshold")) b.threshold = parse_double("baseline.threshold", *v);
  if (auto v = get("baseline.batch_size")) b.batch_size = parse_u64("baseline.batch_size", *v);
  if (auto v = get("baseline.seeds")) {
    for (const auto& item : split_list(*v)) c.model_seeds.push_back(parse_u64("baseline.seeds", item));
  }
  if (c.model_seeds.empty()) c.model_seeds.push_back(c.seed);
  b.seed = c.model_seeds.front();

  if (auto v = get("ensemble.inputs")) {
    for (const auto& item : split_list(*v)) c.ensemble_inputs.push_back(resolve(base_dir, item));
  }
  if (auto v = get("ensemble.threshold_votes")) {
    c.threshold_votes = parse_u64("ensemble.threshold_votes", *v);
  }
  if (auto v = get("ensemble.fallback")) c.fallback = parse_fallback(trimmed(*v));
  return c;
}

RunConfig load_run_config(const fs::path& path,
                          const std::map<std::string, std::string>& overrides) {
  const std::string text = io::read_file(path);
  try {
    return parse_run_config(text, path.parent_path(), overrides);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& config) {
  const auto require = [](const fs::path& p, const char* key) {
    if (p.empty()) throw Error(std::string("config: '") + key + "' is not set");
    if (!fs::is_regular_file(p)) {
      throw Error(std::string("config: ") + key + " file '" + p.string() + "' does not exist");
    }
  };
  require(config.labels, "paths.labels");
  require(config.train, "paths.train");
  require(config.valid, "paths.valid");
  require(config.test, "paths.test");
  for (const auto& input : config.ensemble_inputs) require(input, "ensemble.inputs");
  if (config.out_dir.empty()) throw Error("config: 'paths.out_dir' is not set");
  if (config.clip < 1) throw Error("config: oversample.clip must be at least 1");
  if (config.threshold_votes && *config.threshold_votes < 1) {
    throw Error("config: ensemble.threshold_votes must be at least 1");
  }
  TrainConfig probe = config.baseline;
  validate(probe);
}

json canonical_json(const RunConfig& config) {
  json inputs = {{"labels", file_digest(config.labels)},
                 {"train", file_digest(config.train)},
                 {"valid", file_digest(config.valid)},
                 {"test", file_digest(config.test)}};
  json extra = json::array();
  for (const auto& p : config.ensemble_inputs) extra.push_back(file_digest(p));

  json baseline = to_json(config.baseline);
  baseline.erase("seed");
  return {{"seed", config.seed},
          {"inputs", inputs},
          {"preprocess", {{"enabled", config.preprocess},
                          {"drop_hashtag_body", config.normalize.drop_hashtag_body}}},
          {"oversample", {{"enabled", config.oversample}, {"clip", config.clip}}},
          {"baseline", baseline},
          {"model_seeds", config.model_seeds},
          {"ensemble", {{"inputs", extra},
                        {"threshold_votes", config.threshold_votes
                                                ? json(*config.threshold_votes)
                                                : json(nullptr)},
                        {"fallback", std::string(to_string(config.fallback))}}}};
}

PipelineResult run_pipeline(const RunConfig& config) {
  validate(config);
  const json canonical = canonical_json(config);

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + config.out_dir.string() + "': " + ec.message());

  ArtifactLog log(config.out_dir);
  PipelineResult result;
  std::string stage;
  const auto run_stage = [&](const std::string& name, const std::function<void()>& body) {
    stage = name;
    body();
  };

  try {
    LabelVocabulary vocab;
    Dataset train_set, valid_set, test_set;
    run_stage("load", [&] {
      vocab = load_vocabulary(config.labels);
      const LoadOptions gold{.require_labels = true};
      train_set = load_dataset(config.train, &vocab, gold);
      valid_set = load_dataset(config.valid, &vocab, gold);
      test_set = load_dataset(config.test, &vocab, gold);
    });

    run_stage("preprocess", [&] {
      if (!config.preprocess) return;
      json report;
      for (auto [name, data] : {std::pair{"train", &train_set}, std::pair{"valid", &valid_set},
                                std::pair{"test", &test_set}}) {
        report[name] = to_json(normalize_examples(*data, config.normalize));
        log.write(std::string(name) + ".norm.jsonl", to_jsonl(*data));
      }
      log.write("preprocess_report.json", dump_line(report));
    });

    run_stage("oversample", [&] {
      if (!config.oversample) return;
      const OversamplePlan plan = plan_oversample(train_set, config.clip);
      log.write("oversample_plan.json", dump_line(to_json(plan)));
      train_set = materialize(train_set, plan);
      log.write("train.oversampled.jsonl", to_jsonl(train_set));
    });

    std::vector<LinearModel> models;
    run_stage("train", [&] {
      for (std::uint64_t seed : config.model_seeds) {
        TrainConfig tc = config.baseline;
        tc.seed = seed;
        TrainResult trained = train(train_set, valid_set, vocab, tc);
        const std::string tag = "seed" + std::to_string(seed);
        log.write("model_" + tag + ".bin", serialize_model(trained.model));
        json history = json::array();
        for (const auto& r : trained.history) {
          history.push_back({{"epoch", r.epoch},
                             {"train_loss", r.train_loss},
                             {"valid_micro_f1", r.valid_micro_f1}});
        }
        log.write("train_" + tag + ".json",
                  dump_line({{"best_epoch", trained.best_epoch}, {"history", history}}));
        models.push_back(std::move(trained.model));
      }
    });

    std::vector<PredictionSet> predictions;
    run_stage("predict", [&] {
      for (std::size_t m = 0; m < models.size(); ++m) {
        const std::string tag = "seed" + std::to_string(config.model_seeds[m]);
        PredictionSet preds = predict(models[m], test_set, &vocab);
        log.write("pred_" + tag + ".jsonl", to_jsonl(preds));
        const json score = score_report(confusion(test_set, preds, vocab), vocab, test_set.size());
        log.write("score_" + tag + ".json", dump_line(score));
        result.model_scores.push_back(score);
        predictions.push_back(std::move(preds));
      }
      for (const auto& input : config.ensemble_inputs) {
        predictions.push_back(load_predictions(input, &vocab));
      }
    });

    PredictionSet ensemble;
    run_stage("vote", [&] {
      VoteOptions options;
      options.threshold_votes = config.threshold_votes;
      options.fallback = config.fallback;
      options.vocab = &vocab;
      VoteResult voted = vote(predictions, options);
      log.write("ensemble.jsonl", to_jsonl(voted.predictions));
      log.write("vote_summary.json", dump_line(summary_json(voted)));
      ensemble = std::move(voted.predictions);
    });

    run_stage("score", [&] {
      result.score = score_report(confusion(test_set, ensemble, vocab), vocab, test_set.size(),
                                  {.percent = false, .per_label = true});
      log.write("score.json", dump_line(result.score));
    });

    run_stage("manifest", [&] {
      json manifest;
      manifest["toolkit_version"] = kToolkitVersion;
      manifest["formats"] = {{"model", kModelFormatVersion},
                             {"manifest", kManifestFormatVersion},
                             {"oversample_plan", kPlanFormatVersion}};
      manifest["config"] = canonical;
      manifest["config_hash"] = hex64(fnv1a64(canonical.dump()));
      manifest["artifacts"] = log.digests();
      log.write("manifest.json", dump_line(manifest));
    });
  } catch (const std::exception& e) {
    log.rollback();
    throw Error("stage '" + stage + "': " + e.what());
  }

  result.manifest = log.path("manifest.json");
  for (const auto& [name, digest] : log.digests()) result.artifacts[name] = log.path(name);
  return result;
}

}  // namespace mltc
