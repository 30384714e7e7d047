// Serial reference kernels vs their OpenMP counterparts on the same inputs.
// Thread count follows OMP_NUM_THREADS.

#include <map>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "mltc/kernels.hpp"

namespace {

using namespace mltc;

constexpr std::size_t kLabels = 21;

std::vector<std::string> make_texts(std::size_t n) {
  static const std::vector<std::string> words{
      "مرحبا", "فلسطين", "الخونة", "كارثة", "احذروا", "الحكومة", "hello", "news", "😀", "🔥",
      "today", "على", "من", "في", "المرتزقة", "مشكوك"};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(8, 30);
  std::vector<std::string> texts(n);
  for (auto& t : texts) {
    for (std::size_t k = len(rng); k > 0; --k) t += (t.empty() ? "" : " ") + words[pick(rng)];
  }
  return texts;
}

struct Problem {
  FeatureSpec spec;
  std::vector<SparseVector> x;
  std::vector<MultiHot> y;
  Weights weights;
};

const Problem& problem(std::size_t n) {
  static std::map<std::size_t, Problem> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Problem p{FeatureSpec{}, {}, {}, Weights(kLabels, FeatureSpec{}.dim)};
  p.x = kernels::serial::featurize_batch(make_texts(n), p.spec);
  std::mt19937_64 rng(11);
  std::bernoulli_distribution bit(0.2);
  std::normal_distribution<double> normal(0.0, 0.1);
  for (std::size_t e = 0; e < n; ++e) {
    MultiHot row(kLabels);
    for (auto& b : row) b = bit(rng) ? 1 : 0;
    p.y.push_back(std::move(row));
  }
  for (double& w : p.weights.w) w = normal(rng);
  return cache.emplace(n, std::move(p)).first->second;
}

template <auto Fn>
void BM_featurize(benchmark::State& state) {
  const auto texts = make_texts(static_cast<std::size_t>(state.range(0)));
  const FeatureSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(texts, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_probabilities(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p.weights, p.x, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_loss_and_grad(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p.weights, p.x, p.y, 1e-4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_sgd_step(benchmark::State& state) {
  const Problem& p = problem(static_cast<std::size_t>(state.range(0)));
  ScaledWeights w{p.weights, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(w, p.x, p.y, 1e-3, 1e-4));
    if (w.scale < 1e-4) w.fold();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_featurize<kernels::serial::featurize_batch>)->Name("featurize/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_featurize<kernels::omp::featurize_batch>)->Name("featurize/omp")->Arg(256)->Arg(2048);
BENCHMARK(BM_probabilities<kernels::serial::probabilities>)->Name("probabilities/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_probabilities<kernels::omp::probabilities>)->Name("probabilities/omp")->Arg(256)->Arg(2048);
BENCHMARK(BM_loss_and_grad<kernels::serial::bce_loss_and_grad>)->Name("bce_loss_and_grad/serial")->Arg(16)->Arg(256);
BENCHMARK(BM_loss_and_grad<kernels::omp::bce_loss_and_grad>)->Name("bce_loss_and_grad/omp")->Arg(16)->Arg(256);
BENCHMARK(BM_sgd_step<kernels::serial::sgd_step>)->Name("sgd_step/serial")->Arg(16)->Arg(128);
BENCHMARK(BM_sgd_step<kernels::omp::sgd_step>)->Name("sgd_step/omp")->Arg(16)->Arg(128);

BENCHMARK_MAIN();
