#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tnloss/model.hpp"

using namespace tnloss;

namespace {

SparseFeatures random_features(int rows, int cols, double density, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> trips;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (u(rng) < density) trips.emplace_back(r, c, 1.0);
  SparseFeatures X(rows, cols);
  X.setFromTriplets(trips.begin(), trips.end());
  return X;
}

void bm_mlp_forward(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  MlpPredicateGroup model({3703, 50, 6}, {"a", "b", "c", "d", "e", "f"});
  model.init_params(3);
  SparseFeatures X = random_features(rows, 3703, 0.01, 5);
  MlpPredicateGroup::Workspace ws;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(X, ws).sum());
}

}  // namespace

BENCHMARK(bm_mlp_forward)->Arg(64)->Arg(512)->Arg(3312);
