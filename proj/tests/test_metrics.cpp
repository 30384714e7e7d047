#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mltc/error.hpp"
#include "mltc/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mltc;

namespace {

const LabelVocabulary kAbc = parse_vocabulary("A\nB\nC");

Dataset gold_fixture() { return {{"e1", "", {"A", "B"}}, {"e2", "", {"C"}}}; }

PredictionSet pred_fixture() { return {{"e1", {"A"}, std::nullopt}, {"e2", {"B", "C"}, std::nullopt}}; }

oracle::Matrix as_matrix(const std::vector<MultiHot>& rows) {
  oracle::Matrix m;
  for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
  return m;
}

}  // namespace

TEST_CASE("confusion fixture") {
  const auto c = confusion(gold_fixture(), pred_fixture(), kAbc);
  const auto t = c.totals();
  CHECK(t.tp == 2);
  CHECK(t.fp == 1);
  CHECK(t.fn == 1);
  CHECK(c.tp == std::vector<std::uint64_t>{1, 0, 1});
  CHECK(c.fp == std::vector<std::uint64_t>{0, 1, 0});
  CHECK(c.fn == std::vector<std::uint64_t>{0, 1, 0});
  CHECK(micro_f1(c) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("identity and all-empty predictions") {
  const Dataset gold = gold_fixture();
  PredictionSet same, none;
  for (const auto& ex : gold) {
    same.push_back({ex.id, ex.labels, std::nullopt});
    none.push_back({ex.id, {}, std::nullopt});
  }
  const auto t = confusion(gold, same, kAbc).totals();
  CHECK(t.fp == 0);
  CHECK(t.fn == 0);
  CHECK(micro_f1(confusion(gold, same, kAbc)) == 1.0);
  CHECK(macro_f1(confusion(gold, same, kAbc)) == 1.0);

  const auto z = confusion(gold, none, kAbc).totals();
  CHECK(z.tp == 0);
  CHECK(z.fp == 0);
  CHECK(z.fn == 3);
  CHECK(micro_f1(confusion(gold, none, kAbc)) == 0.0);
}

TEST_CASE("id mismatch lists missing and extra ids") {
  PredictionSet pred = pred_fixture();
  pred[1].id = "e9";
  CHECK_THROWS_WITH_AS(confusion(gold_fixture(), pred, kAbc),
                       doctest::Contains("missing from predictions: 'e2'; not in gold: 'e9'"), Error);
}

TEST_CASE("prf conventions") {
  CHECK(prf(0, 0, 0).f1 == 1.0);
  CHECK(prf(0, 3, 0).precision == 0.0);
  CHECK(prf(0, 3, 0).recall == 0.0);
  CHECK(prf(0, 3, 0).f1 == 0.0);
  CHECK(prf(0, 0, 2).f1 == 0.0);
  CHECK(prf(2, 1, 1).precision == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("macro F1") {
  ConfusionCounts c(2);
  c.tp = {3, 0};
  c.fn = {0, 4};
  CHECK(macro_f1(c) == doctest::Approx(0.5));

  ConfusionCounts unused(3);  // third label never appears: left out of the mean
  unused.tp = {3, 0, 0};
  unused.fn = {0, 4, 0};
  CHECK(macro_f1(unused) == doctest::Approx(0.5));
  CHECK(macro_f1(ConfusionCounts(4)) == 1.0);

  ConfusionCounts single(1);
  single.tp = {2};
  single.fp = {1};
  single.fn = {3};
  CHECK(macro_f1(single) == micro_f1(single));
}

TEST_CASE("report formatting") {
  const auto c = confusion(gold_fixture(), pred_fixture(), kAbc);
  const auto plain = score_report(c, kAbc, 2);
  CHECK(plain["micro_f1"].get<double>() == 0.666667);
  CHECK_FALSE(plain.contains("per_label"));
  const auto pct = score_report(c, kAbc, 2, {.percent = true, .per_label = true});
  CHECK(pct["micro_f1"].get<double>() == 66.667);
  CHECK(pct["per_label"]["B"]["fp"] == 1);
  CHECK(pct["per_label"]["A"]["f1"].get<double>() == 100.0);
}

TEST_CASE("property: micro F1 matches the brute-force oracle") {
  test::Rng rng(1000);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = test::uniform(rng, 0, 20), labels = test::uniform(rng, 1, 8);
    std::vector<MultiHot> gold, pred;
    for (std::size_t e = 0; e < n; ++e) {
      gold.push_back(test::random_bits(rng, labels, 0.3));
      pred.push_back(test::random_bits(rng, labels, 0.3));
    }
    const auto c = confusion(gold, pred, labels);
    const double f1 = micro_f1(c);
    CHECK(std::abs(f1 - oracle::brute_force_micro_f1(as_matrix(gold), as_matrix(pred))) <= 1e-12);
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);

    // swapping gold and prediction swaps fp and fn
    const auto swapped = confusion(pred, gold, labels);
    CHECK(swapped.fp == c.fn);
    CHECK(swapped.fn == c.fp);
    CHECK(micro_f1(swapped) == doctest::Approx(f1).epsilon(1e-15));

    // perfect iff equal, provided gold has a label
    const auto g = c.totals();
    if (g.tp + g.fn > 0) CHECK((f1 == 1.0) == (gold == pred));

    // fixing one missed gold label never hurts
    for (std::size_t e = 0, fixed = 0; e < n && !fixed; ++e) {
      for (std::size_t l = 0; l < labels; ++l) {
        if (gold[e][l] && !pred[e][l]) {
          auto better = pred;
          better[e][l] = 1;
          CHECK(micro_f1(confusion(gold, better, labels)) >= f1);
          fixed = 1;
          break;
        }
      }
    }
  }
}
