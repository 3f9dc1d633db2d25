#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tnloss/generator.hpp"

using namespace tnloss;

namespace {

std::vector<TruthValue> random_truths(size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<TruthValue> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.emplace_back(u(rng));
  return out;
}

void bm_tnorm_binary_fold(benchmark::State& state) {
  const Generator g = Generator::parse("ss:-1");
  const auto xs = random_truths(static_cast<size_t>(state.range(0)), 7);
  for (auto _ : state) {
    TruthValue acc = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) acc = tnorm(g, acc, xs[i]);
    benchmark::DoNotOptimize(acc);
  }
}

void bm_tnorm_nary(benchmark::State& state) {
  const Generator g = Generator::parse("ss:-1");
  const auto xs = random_truths(static_cast<size_t>(state.range(0)), 7);
  for (auto _ : state) {
    TruthValue acc = tnorm_nary(g, xs);
    benchmark::DoNotOptimize(acc);
  }
}

}  // namespace

BENCHMARK(bm_tnorm_binary_fold)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(bm_tnorm_nary)->Arg(8)->Arg(64)->Arg(512);
