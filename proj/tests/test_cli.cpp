#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "mltc/cli.hpp"
#include "mltc/error.hpp"
#include "mltc/io.hpp"
#include "mltc/pipeline.hpp"
#include "mltc/version.hpp"
#include "support.hpp"

using namespace mltc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mltc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const fs::path kFixture = fs::path(MLTC_TEST_DATA_DIR) / "synthetic";

// Small, quick config over the bundled fixture.
std::string quick_ini(const fs::path& out_dir) {
  return "seed = 5\n"
         "[paths]\n"
         "labels = " + (kFixture / "labels.txt").string() + "\n"
         "train = " + (kFixture / "train.jsonl").string() + "\n"
         "valid = " + (kFixture / "valid.jsonl").string() + "\n"
         "test = " + (kFixture / "test.jsonl").string() + "\n"
         "out_dir = " + out_dir.string() + "\n"
         "[baseline]\n"
         "seeds = 1, 2, 3\n"
         "epochs = 3\n"
         "dim = 4096\n"
         "learning_rate = 2\n";
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::exists(dir)) return names;
  for (const auto& entry : fs::directory_iterator(dir)) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("run config parsing") {
  const fs::path base = "/data/run";

  SUBCASE("defaults") {
    unsetenv("MLTC_SEED");
    const RunConfig c = parse_run_config("", base);
    CHECK(c.seed == 0);
    CHECK(c.preprocess);
    CHECK_FALSE(c.oversample);
    CHECK(c.clip == 10);
    CHECK(c.model_seeds == std::vector<std::uint64_t>{0});
    CHECK(c.baseline == TrainConfig{});
    CHECK(c.fallback == Fallback::none);
    CHECK_FALSE(c.threshold_votes.has_value());
  }

  SUBCASE("values, lists and relative paths") {
    const RunConfig c = parse_run_config(
        "seed = 18446744073709551615\n"
        "[paths]\nlabels = labels.txt\ntrain = /abs/train.tsv\n"
        "[preprocess]\ndrop_hashtag_body = yes\n"
        "[oversample]\nenabled = true\nclip = 4\n"
        "[baseline]\nseeds = 3, 1 ,2\nepochs = 7\nlearning_rate = 0.25\ndim = 1024\n"
        "[ensemble]\ninputs = a.jsonl, b.jsonl\nthreshold_votes = 3\nfallback = top-plurality\n",
        base);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.labels == base / "labels.txt");
    CHECK(c.train == "/abs/train.tsv");
    CHECK(c.normalize.drop_hashtag_body);
    CHECK(c.oversample);
    CHECK(c.clip == 4);
    CHECK(c.model_seeds == std::vector<std::uint64_t>{3, 1, 2});
    CHECK(c.baseline.epochs == 7);
    CHECK(c.baseline.learning_rate == 0.25);
    CHECK(c.baseline.features.dim == 1024);
    CHECK(c.ensemble_inputs == std::vector<fs::path>{base / "a.jsonl", base / "b.jsonl"});
    CHECK(c.threshold_votes == std::optional<std::size_t>(3));
    CHECK(c.fallback == Fallback::top_plurality);
  }

  SUBCASE("overrides beat the file, the file beats the environment") {
    setenv("MLTC_SEED", "99", 1);
    CHECK(parse_run_config("", base).seed == 99);
    CHECK(parse_run_config("seed = 4\n", base).seed == 4);
    CHECK(parse_run_config("seed = 4\n", base, {{"seed", "8"}}).seed == 8);
    CHECK(parse_run_config("[baseline]\nepochs = 2\n", base, {{"baseline.epochs", "6"}}).baseline.epochs == 6);
    unsetenv("MLTC_SEED");
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_run_config("[baseline]\nepoch = 2\n", base), Error);
    CHECK_THROWS_AS(parse_run_config("", base, {{"nope.key", "1"}}), Error);
    CHECK_THROWS_AS(parse_run_config("seed = -1\n", base), Error);
    CHECK_THROWS_AS(parse_run_config("seed = 1x\n", base), Error);
    CHECK_THROWS_AS(parse_run_config("[oversample]\nenabled = maybe\n", base), Error);
    CHECK_THROWS_AS(parse_run_config("[ensemble]\nfallback = random\n", base), Error);
    CHECK_THROWS_AS(parse_run_config("[paths\n", base), Error);
  }
}

TEST_CASE("validation happens before any stage") {
  test::TempDir dir("cli_validate");
  const fs::path out = dir / "out";
  RunConfig c = parse_run_config(quick_ini(out), dir.path());
  c.labels = dir / "missing_labels.txt";
  CHECK_THROWS_WITH_AS(run_pipeline(c), doctest::Contains("paths.labels"), Error);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("pipeline determinism and manifest") {
  test::TempDir dir("cli_pipeline");
  const RunConfig a = parse_run_config(quick_ini(dir / "a"), dir.path());
  const RunConfig b = parse_run_config(quick_ini(dir / "b"), dir.path());
  const PipelineResult ra = run_pipeline(a);
  const PipelineResult rb = run_pipeline(b);

  CHECK(listing(dir / "a") == listing(dir / "b"));
  for (const auto& name : listing(dir / "a")) {
    CHECK_MESSAGE(io::read_file(dir / "a" / name) == io::read_file(dir / "b" / name), name);
  }

  const json manifest = json::parse(io::read_file(ra.manifest));
  CHECK(manifest.at("toolkit_version") == kToolkitVersion);
  CHECK(manifest.at("config").at("model_seeds") == json({1, 2, 3}));
  for (const auto& name : {"model_seed1.bin", "pred_seed3.jsonl", "ensemble.jsonl", "score.json",
                           "train.norm.jsonl", "preprocess_report.json", "vote_summary.json"}) {
    CHECK_MESSAGE(manifest.at("artifacts").contains(name), name);
  }
  CHECK_FALSE(manifest.at("artifacts").contains("oversample_plan.json"));
  CHECK(ra.model_scores.size() == 3);

  // A different seed list changes the config hash.
  RunConfig c = a;
  c.model_seeds = {1, 2, 4};
  CHECK(canonical_json(c) != canonical_json(a));
}

TEST_CASE("a failing stage removes everything it wrote") {
  test::TempDir dir("cli_rollback");
  const fs::path out = dir / "out";
  // Ids that do not match the test split make the vote stage fail after
  // models and predictions were already written.
  dir.write("extra.jsonl", "{\"id\": \"nope\", \"labels\": [\"Doubt\"]}\n");
  const RunConfig c =
      parse_run_config(quick_ini(out) + "[ensemble]\ninputs = extra.jsonl\n", dir.path());
  CHECK_THROWS_WITH_AS(run_pipeline(c), doctest::Contains("stage 'vote'"), Error);
  CHECK(listing(out).empty());
}

TEST_CASE("subcommands") {
  test::TempDir dir("cli_sub");

  SUBCASE("version") {
    const auto r = invoke({"--version"});
    CHECK(r.code == 0);
    CHECK(r.out.find(kToolkitVersion) != std::string::npos);
    CHECK(r.out.find("model format 1") != std::string::npos);
  }

  SUBCASE("stats on a hand-counted fixture") {
    const auto in = dir.write("five.jsonl",
                              "{\"id\":\"1\",\"text\":\"a\",\"labels\":[\"A\"]}\n"
                              "{\"id\":\"2\",\"text\":\"b\",\"labels\":[\"A\",\"B\"]}\n"
                              "{\"id\":\"3\",\"text\":\"c\",\"labels\":[\"C\"]}\n"
                              "{\"id\":\"4\",\"text\":\"d\",\"labels\":[\"A\",\"B\",\"C\"]}\n"
                              "{\"id\":\"5\",\"text\":\"e\",\"labels\":[\"B\"]}\n");
    const auto r = invoke({"stats", "--in", in.string()});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("n_examples") == 5);
    CHECK(j.at("per_label_counts") == json({{"A", 3}, {"B", 3}, {"C", 2}}));
    CHECK(j.at("labels_per_example_histogram") == json({{"1", 3}, {"2", 1}, {"3", 1}}));
  }

  SUBCASE("stats on an empty file fails") {
    const auto in = dir.write("empty.jsonl", "");
    const auto r = invoke({"stats", "--in", in.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("mltc: error:") != std::string::npos);
  }

  SUBCASE("malformed input exits nonzero without an output file") {
    const auto in = dir.write("bad.jsonl", "{\"id\": 1, \"text\": \n");
    const auto out = dir / "out.jsonl";
    CHECK(invoke({"preprocess", "--in", in.string(), "--out", out.string()}).code != 0);
    CHECK_FALSE(fs::exists(out));
    CHECK(invoke({"vote", "--preds", in.string(), "--out", out.string()}).code != 0);
    CHECK_FALSE(fs::exists(out));
  }

  SUBCASE("missing subcommand or option is a usage error") {
    CHECK(invoke({}).code != 0);
    CHECK(invoke({"score", "--gold", "x"}).code != 0);
    CHECK(invoke({"vote", "--preds", "a", "--out", "b", "--fallback", "coin"}).code != 0);
  }

  SUBCASE("score the hand-checked fixture") {
    const auto gold = dir.write("gold.jsonl",
                                "{\"id\":\"e1\",\"text\":\"\",\"labels\":[\"A\",\"B\"]}\n"
                                "{\"id\":\"e2\",\"text\":\"\",\"labels\":[\"C\"]}\n");
    const auto pred = dir.write("pred.jsonl",
                                "{\"id\":\"e1\",\"labels\":[\"A\"]}\n"
                                "{\"id\":\"e2\",\"labels\":[\"B\",\"C\"]}\n");
    auto r = invoke({"score", "--gold", gold.string(), "--pred", pred.string()});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("micro_f1").get<double>() == doctest::Approx(0.666667).epsilon(1e-9));
    r = invoke({"score", "--gold", gold.string(), "--pred", pred.string(), "--percent"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("micro_f1").get<double>() == doctest::Approx(66.667).epsilon(1e-9));
  }

  SUBCASE("run with --set and --out-dir") {
    const auto ini = dir.write("run.ini", quick_ini(dir / "ignored"));
    const auto r = invoke({"run", "--config", ini.string(), "--out-dir", (dir / "o").string(),
                           "--set", "baseline.seeds=9", "--seed", "3"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "o" / "model_seed9.bin"));
    CHECK_FALSE(fs::exists(dir / "ignored"));
    const json manifest = json::parse(io::read_file(dir / "o" / "manifest.json"));
    CHECK(manifest.at("config").at("seed") == 3);
    CHECK(invoke({"run", "--config", ini.string(), "--set", "baseline.nope=1"}).code != 0);
    CHECK(invoke({"run", "--config", ini.string(), "--set", "novalue"}).code != 0);
  }
}
