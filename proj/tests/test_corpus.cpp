#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mltc/corpus.hpp"
#include "mltc/error.hpp"
#include "support.hpp"

using namespace mltc;
using mltc::test::TempDir;

TEST_CASE("vocabulary keeps file order") {
  const auto vocab = parse_vocabulary("A\nB\nC\n");
  CHECK(vocab.size() == 3);
  CHECK(vocab.index("B") == 1);
  CHECK(vocab.at(2) == "C");
  CHECK_FALSE(vocab.contains("D"));
}

TEST_CASE("vocabulary skips blank lines and CRLF") {
  const auto vocab = parse_vocabulary("A\r\n\r\n  \nB\r\n");
  CHECK(vocab.labels() == std::vector<std::string>{"A", "B"});
}

TEST_CASE("vocabulary errors") {
  CHECK_THROWS_WITH_AS(parse_vocabulary("A\nA\n"), doctest::Contains("'A'"), Error);
  CHECK_THROWS_AS(parse_vocabulary(""), Error);
  CHECK_THROWS_AS(parse_vocabulary("\n \n"), Error);
}

TEST_CASE("a 21-technique labels file gives 21 entries") {
  std::string text;
  for (int i = 0; i < 21; ++i) text += "technique_" + std::to_string(i) + "\n";
  TempDir dir("vocab");
  const auto vocab = load_vocabulary(dir.write("labels.txt", text));
  CHECK(vocab.size() == 21);
}

TEST_CASE("vocabulary hash is FNV-1a over newline-terminated labels") {
  // Frozen from an independent FNV-1a implementation over "A\nB\nC\n".
  CHECK(parse_vocabulary("A\nB\nC").hash() == 0xeda2e65dc02c0187ULL);
  CHECK(parse_vocabulary("A\nB").hash() != parse_vocabulary("B\nA").hash());
}

TEST_CASE("load_dataset reads JSONL in file order") {
  const auto vocab = parse_vocabulary("A\nB\nC");
  const std::string content =
      R"({"id": "1", "text": "x", "labels": ["A"]})" "\n"
      R"({"id": "2", "text": "مرحبا 😀", "labels": ["C", "B"]})" "\n"
      R"({"id": "3", "text": "z", "labels": ["B"]})" "\n";
  const auto data = parse_jsonl_dataset(content, &vocab, {.require_labels = true});
  REQUIRE(data.size() == 3);
  CHECK(data[0].id == "1");
  CHECK(data[1].text == "مرحبا 😀");
  CHECK(data[1].labels == LabelSet{"B", "C"});
  CHECK(data[2].id == "3");
}

TEST_CASE("load_dataset errors carry line numbers") {
  const auto vocab = parse_vocabulary("A\nB");
  SUBCASE("unknown label") {
    const std::string content = R"({"id":"1","text":"t","labels":["A"]})" "\n"
                                R"({"id":"2","text":"t","labels":["NotATechnique"]})";
    CHECK_THROWS_WITH_AS(parse_jsonl_dataset(content, &vocab),
                         doctest::Contains("line 2: unknown label 'NotATechnique'"), Error);
  }
  SUBCASE("malformed line") {
    CHECK_THROWS_WITH_AS(parse_jsonl_dataset("{\"id\":\"1\",\"text\":\"t\"}\n{oops", &vocab),
                         doctest::Contains("line 2"), Error);
  }
  SUBCASE("duplicate id") {
    const std::string content = R"({"id":"1","text":"a"})" "\n" R"({"id":"1","text":"b"})";
    CHECK_THROWS_WITH_AS(parse_jsonl_dataset(content, &vocab),
                         doctest::Contains("duplicate id '1'"), Error);
  }
  SUBCASE("missing labels when required") {
    CHECK_THROWS_AS(parse_jsonl_dataset(R"({"id":"1","text":"a"})", &vocab,
                                        {.require_labels = true}),
                    Error);
    CHECK_THROWS_AS(parse_jsonl_dataset(R"({"id":"1","text":"a","labels":[]})", &vocab,
                                        {.require_labels = true}),
                    Error);
  }
  SUBCASE("missing text") {
    CHECK_THROWS_AS(parse_jsonl_dataset(R"({"id":"1"})", &vocab), Error);
  }
}

TEST_CASE("unlabeled examples are fine without require_labels") {
  const auto data = parse_jsonl_dataset(R"({"id":"1","text":"a"})", nullptr);
  REQUIRE(data.size() == 1);
  CHECK(data[0].labels.empty());
}

TEST_CASE("TSV import") {
  const auto vocab = parse_vocabulary("A\nB\nC");
  const auto data = parse_tsv_dataset("e1\thello\tA, C\ne2\tbye\tB\n", &vocab,
                                      {.require_labels = true});
  REQUIRE(data.size() == 2);
  CHECK(data[0].labels == LabelSet{"A", "C"});
  CHECK(data[1].text == "bye");
  CHECK_THROWS_AS(parse_tsv_dataset("no-tab-here\n", &vocab), Error);
  CHECK_THROWS_AS(parse_tsv_dataset("e1\tx\tZ\n", &vocab), Error);
}

TEST_CASE("load_dataset picks the parser from the extension") {
  TempDir dir("load");
  const auto vocab = parse_vocabulary("A\nB");
  const auto tsv = load_dataset(dir.write("d.tsv", "e1\ttext\tA\n"), &vocab);
  const auto jsonl = load_dataset(dir.write("d.jsonl", R"({"id":"e1","text":"text","labels":["A"]})"), &vocab);
  CHECK(tsv == jsonl);
  CHECK_THROWS_WITH_AS(load_dataset(dir / "missing.jsonl", &vocab), doctest::Contains("cannot open"), Error);
}

TEST_CASE("encode and decode") {
  const auto vocab = parse_vocabulary("A\nB\nC");
  CHECK(encode({"C", "A"}, vocab) == MultiHot{1, 0, 1});
  CHECK(encode({}, vocab) == MultiHot{0, 0, 0});
  CHECK(decode(encode({"B"}, vocab), vocab) == LabelSet{"B"});
  CHECK_THROWS_AS(encode({"D"}, vocab), Error);
  CHECK_THROWS_AS(decode(MultiHot{1, 0}, vocab), Error);
}

TEST_CASE("property: decode(encode(S)) == S for random subsets") {
  test::Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto vocab = test::make_vocab(test::uniform(rng, 1, 25));
    const LabelSet s = test::random_subset(rng, vocab, 0.4);
    const MultiHot bits = encode(s, vocab);
    CHECK(bits.size() == vocab.size());
    CHECK(decode(bits, vocab) == s);
  }
}

TEST_CASE("compute_stats") {
  SUBCASE("hand count") {
    const Dataset data{{"1", "x", {"A"}}, {"2", "y", {"A", "B"}}};
    const auto stats = compute_stats(data);
    CHECK(stats.n_examples == 2);
    CHECK(stats.per_label_counts == std::map<std::string, std::size_t>{{"A", 2}, {"B", 1}});
    CHECK(stats.labels_per_example_histogram == std::map<std::size_t, std::size_t>{{1, 1}, {2, 1}});
  }
  SUBCASE("empty") {
    const auto stats = compute_stats({});
    CHECK(stats.n_examples == 0);
    CHECK(stats.per_label_counts.empty());
    CHECK(stats.labels_per_example_histogram.empty());
  }
  SUBCASE("an example with seven labels") {
    Dataset data{{"1", "x", {"A"}}, {"2", "y", {"A", "B", "C", "D", "E", "F", "G"}}};
    CHECK(compute_stats(data).labels_per_example_histogram.at(7) == 1);
  }
  SUBCASE("json keys") {
    const auto j = to_json(compute_stats({{"1", "x", {"A"}}}));
    CHECK(j["n_examples"] == 1);
    CHECK(j["per_label_counts"]["A"] == 1);
    CHECK(j["labels_per_example_histogram"]["1"] == 1);
  }
}

TEST_CASE("property: stats sum identities") {
  test::Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto vocab = test::make_vocab(test::uniform(rng, 1, 10));
    Dataset data;
    const std::size_t n = test::uniform(rng, 0, 40);
    for (std::size_t i = 0; i < n; ++i) {
      data.push_back({std::to_string(i), "t", test::random_subset(rng, vocab)});
    }
    const auto stats = compute_stats(data);
    std::size_t weighted = 0, examples = 0, occurrences = 0;
    for (const auto& [k, count] : stats.labels_per_example_histogram) {
      weighted += k * count;
      examples += count;
    }
    for (const auto& [label, count] : stats.per_label_counts) occurrences += count;
    CHECK(weighted == occurrences);
    CHECK(examples == stats.n_examples);
  }
}

TEST_CASE("property: save then load is the identity") {
  test::Rng rng(99);
  const auto vocab = test::make_vocab(6);
  const std::vector<std::string> pieces{"مرحبا", "😀", "a\"quote", "back\\slash", "tab\there",
                                        "new\nline", "plain", "#tag", "@who", "🇵🇸"};
  TempDir dir("roundtrip");
  for (int trial = 0; trial < 50; ++trial) {
    Dataset data;
    const std::size_t n = test::uniform(rng, 0, 12);
    for (std::size_t i = 0; i < n; ++i) {
      std::string text;
      for (std::size_t k = test::uniform(rng, 0, 5); k > 0; --k) {
        text += pieces[test::uniform(rng, 0, pieces.size() - 1)] + " ";
      }
      data.push_back({"id" + std::to_string(i), text, test::random_subset(rng, vocab)});
    }
    save_dataset(dir / "d.jsonl", data);
    CHECK(load_dataset(dir / "d.jsonl", &vocab) == data);
  }
}
