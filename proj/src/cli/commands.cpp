#include "mltc/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mltc/baseline.hpp"
#include "mltc/corpus.hpp"
#include "mltc/ensemble.hpp"
#include "mltc/error.hpp"
#include "mltc/imbalance.hpp"
#include "mltc/io.hpp"
#include "mltc/metrics.hpp"
#include "mltc/pipeline.hpp"
#include "mltc/preprocess.hpp"
#include "mltc/version.hpp"

namespace mltc::cli {

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
  const char* env = std::getenv("MLTC_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const std::string s(env);
    const auto value = std::stoull(s, &used);
    if (used == s.size() && s.front() != '-') return value;
  } catch (const std::exception&) {
  }
  throw Error(std::string("MLTC_SEED is not a non-negative integer: '") + env + "'");
}

std::string version_text() {
  return std::string("mltc ") + kToolkitVersion + " (model format " +
         std::to_string(kModelFormatVersion) + ", manifest format " +
         std::to_string(kManifestFormatVersion) + ", plan format " +
         std::to_string(kPlanFormatVersion) + ")";
}

struct PreprocessArgs {
  std::string in, out;
  bool drop_hashtag_body = false;
};

struct StatsArgs {
  std::string in, labels;
};

struct OversampleArgs {
  std::string in, out, plan_out, labels;
  std::size_t clip = kDefaultClip;
};

struct TrainArgs {
  std::string train, valid, labels, model_out, history_out;
  TrainConfig config;
};

struct PredictArgs {
  std::string model, in, out, labels;
};

struct VoteArgs {
  std::vector<std::string> preds;
  std::string out, labels, fallback = "none";
  std::optional<std::size_t> threshold_votes;
};

struct ScoreArgs {
  std::string gold, pred, labels, out;
  bool percent = false;
  bool per_label = false;
};

struct RunArgs {
  std::string config, out_dir;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

std::optional<LabelVocabulary> maybe_vocab(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_vocabulary(path);
}

// Vocabulary for scoring when no labels file is given: sorted union of every
// label seen. Labels absent from both sides do not affect any reported score.
LabelVocabulary infer_vocab(const Dataset& gold, const PredictionSet& pred) {
  LabelSet all;
  for (const auto& ex : gold) all.insert(ex.labels.begin(), ex.labels.end());
  for (const auto& p : pred) all.insert(p.labels.begin(), p.labels.end());
  return LabelVocabulary(std::vector<std::string>(all.begin(), all.end()));
}

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const auto report = normalize_dataset(a.in, a.out, {.drop_hashtag_body = a.drop_hashtag_body});
  out << to_json(report).dump() << '\n';
  return 0;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const auto vocab = maybe_vocab(a.labels);
  const Dataset data = load_dataset(a.in, vocab ? &*vocab : nullptr, {.require_labels = true});
  if (data.empty()) throw Error(a.in + ": no examples (empty dataset)");
  out << to_json(compute_stats(data)).dump(2) << '\n';
  return 0;
}

int cmd_oversample(const OversampleArgs& a, std::ostream& out) {
  const auto vocab = maybe_vocab(a.labels);
  const Dataset data = load_dataset(a.in, vocab ? &*vocab : nullptr, {.require_labels = true});
  const OversamplePlan plan = plan_oversample(data, a.clip);
  const Dataset expanded = materialize(data, plan);
  const std::string plan_text = to_json(plan).dump(2) + "\n";
  save_dataset(a.out, expanded);
  if (!a.plan_out.empty()) io::write_file_atomic(a.plan_out, plan_text);
  out << json{{"n_in", data.size()},
              {"n_out", expanded.size()},
              {"average_count", plan.average_count.value()},
              {"clip", plan.clip}}
             .dump()
      << '\n';
  return 0;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const LabelVocabulary vocab = load_vocabulary(a.labels);
  const Dataset train_set = load_dataset(a.train, &vocab, {.require_labels = true});
  const Dataset valid_set = load_dataset(a.valid, &vocab, {.require_labels = true});
  const TrainResult result = train(train_set, valid_set, vocab, a.config);
  json history = json::array();
  for (const auto& r : result.history) {
    history.push_back({{"epoch", r.epoch},
                       {"train_loss", r.train_loss},
                       {"valid_micro_f1", r.valid_micro_f1}});
  }
  const json summary = {{"best_epoch", result.best_epoch}, {"history", history}};
  save_model(a.model_out, result.model);
  if (!a.history_out.empty()) io::write_file_atomic(a.history_out, summary.dump(2) + "\n");
  out << json{{"best_epoch", result.best_epoch},
              {"valid_micro_f1", result.history[result.best_epoch].valid_micro_f1}}
             .dump()
      << '\n';
  return 0;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const LinearModel model = load_model(a.model);
  const auto vocab = maybe_vocab(a.labels);
  const Dataset data = load_dataset(a.in, nullptr);
  const PredictionSet preds = predict(model, data, vocab ? &*vocab : nullptr);
  save_predictions(a.out, preds);
  out << json{{"n_examples", preds.size()}}.dump() << '\n';
  return 0;
}

int cmd_vote(const VoteArgs& a, std::ostream& out) {
  const auto vocab = maybe_vocab(a.labels);
  std::vector<PredictionSet> models;
  for (const auto& path : a.preds) models.push_back(load_predictions(path, vocab ? &*vocab : nullptr));
  VoteOptions options;
  options.threshold_votes = a.threshold_votes;
  options.fallback = parse_fallback(a.fallback);
  options.vocab = vocab ? &*vocab : nullptr;
  const VoteResult result = vote(models, options);
  save_predictions(a.out, result.predictions);
  out << summary_json(result).dump() << '\n';
  return 0;
}

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const auto given = maybe_vocab(a.labels);
  const Dataset gold = load_dataset(a.gold, given ? &*given : nullptr, {.require_labels = true});
  const PredictionSet pred = load_predictions(a.pred, given ? &*given : nullptr);
  const LabelVocabulary vocab = given ? *given : infer_vocab(gold, pred);
  const json report = score_report(confusion(gold, pred, vocab), vocab, gold.size(),
                                   {.percent = a.percent, .per_label = a.per_label});
  if (!a.out.empty()) io::write_file_atomic(a.out, report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  std::map<std::string, std::string> overrides;
  for (const auto& item : a.sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("--set expects key=value, got '" + item + "'");
    overrides[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (a.seed) overrides["seed"] = std::to_string(*a.seed);
  if (!a.out_dir.empty()) {
    overrides["paths.out_dir"] = std::filesystem::absolute(a.out_dir).string();
  }
  const RunConfig config = load_run_config(a.config, overrides);
  const PipelineResult result = run_pipeline(config);
  out << json{{"manifest", result.manifest.string()},
              {"micro_f1", result.score.at("micro_f1")},
              {"macro_f1", result.score.at("macro_f1")}}
             .dump()
      << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-label tweet classification toolkit: preprocessing, oversampling, "
               "baseline training, hard-voting ensembles and micro-F1 scoring."};
  app.name("mltc");
  app.set_version_flag("--version", version_text());
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Normalize tweet text in a dataset");
  c_pre->add_option("--in", pre.in, "Input dataset (JSONL or TSV)")->required();
  c_pre->add_option("--out", pre.out, "Output dataset (JSONL)")->required();
  c_pre->add_flag("--drop-hashtag-body", pre.drop_hashtag_body,
                  "Delete hashtag text along with the '#' marker");

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Label counts and labels-per-example histogram");
  c_stats->add_option("--in", stats.in, "Labeled dataset")->required();
  c_stats->add_option("--labels", stats.labels, "Labels file to validate against");

  OversampleArgs over;
  auto* c_over = app.add_subcommand("oversample", "Duplicate examples of rare labels");
  c_over->add_option("--in", over.in, "Labeled dataset")->required();
  c_over->add_option("--out", over.out, "Expanded dataset (JSONL)")->required();
  c_over->add_option("--clip", over.clip, "Maximum copies per example")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_over->add_option("--plan-out", over.plan_out, "Write the oversampling plan as JSON");
  c_over->add_option("--labels", over.labels, "Labels file to validate against");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the hashed n-gram logistic baseline");
  c_train->add_option("--train", tr.train, "Training dataset")->required();
  c_train->add_option("--valid", tr.valid, "Validation dataset")->required();
  c_train->add_option("--labels", tr.labels, "Labels file")->required();
  c_train->add_option("--model-out", tr.model_out, "Model output path")->required();
  c_train->add_option("--history-out", tr.history_out, "Write per-epoch history as JSON");
  c_train->add_option("--epochs", tr.config.epochs)->capture_default_str();
  c_train->add_option("--lr", tr.config.learning_rate)->capture_default_str();
  c_train->add_option("--l2", tr.config.l2)->capture_default_str();
  c_train->add_option("--dim", tr.config.features.dim, "Hash buckets (power of two)")
      ->capture_default_str();
  c_train->add_option("--ngram-min", tr.config.features.ngram_min)->capture_default_str();
  c_train->add_option("--ngram-max", tr.config.features.ngram_max)->capture_default_str();
  c_train->add_option("--batch-size", tr.config.batch_size)->capture_default_str();
  c_train->add_option("--threshold", tr.config.threshold)->capture_default_str();
  auto* seed_opt = c_train->add_option("--seed", tr.config.seed, "Shuffle seed (default: $MLTC_SEED or 0)");

  PredictArgs pr;
  auto* c_pred = app.add_subcommand("predict", "Write baseline predictions as JSONL");
  c_pred->add_option("--model", pr.model, "Model file")->required();
  c_pred->add_option("--in", pr.in, "Dataset to label")->required();
  c_pred->add_option("--out", pr.out, "Prediction JSONL")->required();
  c_pred->add_option("--labels", pr.labels, "Labels file that must match the model");

  VoteArgs vo;
  auto* c_vote = app.add_subcommand("vote", "Hard-vote several prediction files");
  c_vote->add_option("--preds", vo.preds, "Prediction JSONL files")->required()->expected(1, -1);
  c_vote->add_option("--out", vo.out, "Ensemble prediction JSONL")->required();
  c_vote->add_option("--threshold-votes", vo.threshold_votes,
                     "Votes needed per label (default: strict majority)")
      ->check(CLI::PositiveNumber);
  c_vote->add_option("--fallback", vo.fallback, "none or top-plurality")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "top-plurality"}));
  c_vote->add_option("--labels", vo.labels, "Labels file to validate against");

  ScoreArgs sc;
  auto* c_score = app.add_subcommand("score", "Micro/macro F1 of predictions against gold");
  c_score->add_option("--gold", sc.gold, "Gold dataset")->required();
  c_score->add_option("--pred", sc.pred, "Prediction JSONL")->required();
  c_score->add_option("--labels", sc.labels, "Labels file (default: labels seen in the files)");
  c_score->add_option("--out", sc.out, "Also write the report to this file");
  c_score->add_flag("--percent", sc.percent, "Report percentages with 3 decimals");
  c_score->add_flag("--per-label", sc.per_label, "Include per-label counts and scores");

  RunArgs ru;
  auto* c_run = app.add_subcommand("run", "Run the whole pipeline from a config file");
  c_run->add_option("--config", ru.config, "INI config file")->required();
  c_run->add_option("--set", ru.sets, "Override a config key (section.key=value)");
  c_run->add_option("--seed", ru.seed, "Override the config seed");
  c_run->add_option("--out-dir", ru.out_dir, "Override paths.out_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*c_pre) return cmd_preprocess(pre, out);
    if (*c_stats) return cmd_stats(stats, out);
    if (*c_over) return cmd_oversample(over, out);
    if (*c_train) {
      if (seed_opt->count() == 0) tr.config.seed = default_seed();
      return cmd_train(tr, out);
    }
    if (*c_pred) return cmd_predict(pr, out);
    if (*c_vote) return cmd_vote(vo, out);
    if (*c_score) return cmd_score(sc, out);
    if (*c_run) return cmd_run(ru, out);
  } catch (const std::exception& e) {
    err << "mltc: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mltc::cli
