#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "tnloss/compile.hpp"
#include "tnloss/context.hpp"
#include "tnloss/generator.hpp"
#include "tnloss/parser.hpp"
#include "tnloss/tape.hpp"

using namespace tnloss;

namespace {

struct Fixture {
  KnowledgeBase kb;
  GroundingContext ctx;
  LossGraph graph{Generator::product()};
  std::vector<double> atom_values;
};

// A transitive chain rule grounded over n individuals with a sparse guard.
Fixture make_fixture(int n, bool simplified) {
  Fixture f;
  std::string text =
      "domain D;\n"
      "pred link/2 given;\n"
      "pred p/1 learnable;\n"
      "pred q/1 learnable;\n"
      "rule forall x, y in D: link(x, y) => (p(x) & q(x) => p(y));\n";
  f.kb = parse_kb(text);
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("i" + std::to_string(i));
  f.ctx.domains["D"] = ids;
  GivenTable links;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int e = 0; e < 4 * n; ++e)
    links.values[{ids[static_cast<size_t>(pick(rng))],
                  ids[static_cast<size_t>(pick(rng))]}] = 1.0;
  f.ctx.given["link"] = links;
  CompileOptions opts;
  opts.prune_guarded = simplified;
  f.graph = kb_loss(f.kb, Generator::product(), f.ctx, opts);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  f.atom_values.resize(f.graph.atoms().size());
  for (double& v : f.atom_values) v = u(rng);
  return f;
}

void bm_compile_chain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture f = make_fixture(n, true);
  for (auto _ : state) {
    LossGraph g = kb_loss(f.kb, Generator::product(), f.ctx);
    benchmark::DoNotOptimize(g.nodes().size());
  }
}

void bm_eval_pruned(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), true);
  Tape tape(f.graph);
  for (auto _ : state) benchmark::DoNotOptimize(tape.forward(f.atom_values));
}

void bm_eval_unpruned(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), false);
  Tape tape(f.graph);
  for (auto _ : state) benchmark::DoNotOptimize(tape.forward(f.atom_values));
}

}  // namespace

BENCHMARK(bm_compile_chain)->Arg(16)->Arg(64);
BENCHMARK(bm_eval_pruned)->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(bm_eval_unpruned)->Arg(16)->Arg(64)->Arg(128);
