#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "tnloss/train.hpp"

using namespace tnloss;

namespace {

RelationalDataset easy_synth(unsigned seed = 0) {
  // Noise-free block features: linearly separable, small enough to train fast.
  return synth_relational(20, 3, 12, 0.3, 0.02, 0.0, seed);
}

}  // namespace

TEST_CASE("transductive split is stratified, sorted, and seeded") {
  RelationalDataset ds = synth_relational(50, 2, 4, 0.0, 0.0, 0.1, 1);
  SplitResult s = transductive_split(ds, 0.10, 0);
  CHECK(s.test_ids.size() == 10);  // ceil(0.1 * 50) per class
  CHECK(s.train_ids.size() == 90);
  CHECK(std::is_sorted(s.train_ids.begin(), s.train_ids.end()));
  CHECK(std::is_sorted(s.test_ids.begin(), s.test_ids.end()));

  // Each class contributes ceil-proportionally to the test side.
  int per_class[2] = {0, 0};
  for (int i : s.test_ids) ++per_class[ds.labels[static_cast<size_t>(i)]];
  CHECK(per_class[0] == 5);
  CHECK(per_class[1] == 5);

  // Train and test partition the items.
  std::set<int> seen(s.train_ids.begin(), s.train_ids.end());
  seen.insert(s.test_ids.begin(), s.test_ids.end());
  CHECK(seen.size() == 100);

  SplitResult again = transductive_split(ds, 0.10, 0);
  CHECK(again.test_ids == s.test_ids);
  SplitResult other = transductive_split(ds, 0.10, 9);
  CHECK(other.test_ids != s.test_ids);

  // Uneven class sizes still get at least ceil() each.
  SplitResult tiny = transductive_split(ds, 0.01, 0);
  CHECK(tiny.test_ids.size() == 2);  // ceil(0.5) per class
}

TEST_CASE("training emits one trace row per epoch plus the initial state") {
  RelationalDataset ds = easy_synth();
  ExperimentConfig cfg;
  cfg.epochs = 5;
  cfg.optimizer = OptimizerConfig::adam(0.05);
  TrainResult r = run_experiment(ds, cfg);
  REQUIRE(r.trace.size() == 6);
  CHECK(r.trace[0].epoch == 0);
  CHECK(r.trace[5].epoch == 5);
  for (const TraceRow& row : r.trace) {
    CHECK(std::isfinite(row.loss));
    CHECK(row.loss >= 0.0);
    CHECK(row.train_acc >= 0.0);
    CHECK(row.train_acc <= 1.0);
  }
  CHECK(r.train_acc == r.trace.back().train_acc);
  CHECK(r.test_acc == r.trace.back().test_acc);
  CHECK(r.beta_used == 0.0);
  REQUIRE(r.model.has_value());
  CHECK(r.model->layer_dims().front() == ds.n_features());
  CHECK(r.model->layer_dims().back() == ds.n_classes());
}

TEST_CASE("repeated runs are bit-identical") {
  RelationalDataset ds = easy_synth();
  ExperimentConfig cfg;
  cfg.epochs = 8;
  cfg.beta = 0.01;
  cfg.hidden = {16};
  TrainResult a = run_experiment(ds, cfg);
  TrainResult b = run_experiment(ds, cfg);
  CHECK(trace_csv(a.trace) == trace_csv(b.trace));
  CHECK(a.model->params() == b.model->params());
}

TEST_CASE("noise-free blocks are learned to high train accuracy") {
  RelationalDataset ds = easy_synth();
  ExperimentConfig cfg;
  cfg.epochs = 150;
  cfg.optimizer = OptimizerConfig::adam(0.1);
  cfg.test_fraction = 0.2;
  TrainResult r = run_experiment(ds, cfg);
  CHECK(r.train_acc >= 0.95);
  CHECK(r.trace.back().loss < r.trace.front().loss);
}

TEST_CASE("per-example and quantified styles agree for a strict generator") {
  // With a strict generator the quantified rule loss is the plain sum of the
  // grounded per-example losses, so whole training runs coincide.
  RelationalDataset ds = easy_synth();
  ExperimentConfig cfg;
  cfg.generator = "prod";
  cfg.epochs = 4;
  cfg.rule_style = RuleStyle::PerExample;
  TrainResult per = run_experiment(ds, cfg);
  cfg.rule_style = RuleStyle::Quantified;
  TrainResult quant = run_experiment(ds, cfg);
  REQUIRE(per.trace.size() == quant.trace.size());
  for (size_t i = 0; i < per.trace.size(); ++i) {
    CHECK(per.trace[i].loss == doctest::Approx(quant.trace[i].loss).epsilon(1e-9));
    CHECK(per.trace[i].train_acc == quant.trace[i].train_acc);
  }
}

TEST_CASE("beta grids pick a value on a validation fold") {
  RelationalDataset ds = easy_synth();
  ExperimentConfig cfg;
  cfg.epochs = 10;
  cfg.beta_grid = {0.0, 0.05};
  TrainResult r = run_experiment(ds, cfg);
  CHECK((r.beta_used == 0.0 || r.beta_used == 0.05));
  TrainResult again = run_experiment(ds, cfg);
  CHECK(again.beta_used == r.beta_used);
}

TEST_CASE("sweeps are ordered and deterministic across thread counts") {
  RelationalDataset ds = synth_relational(10, 2, 6, 0.2, 0.05, 0.0, 2);
  ExperimentConfig base;
  base.epochs = 6;
  const std::vector<double> fractions = {0.2, 0.5};
  const std::vector<double> lambdas = {0.0, 1.0};
  const std::vector<unsigned> seeds = {0, 1, 2};

  std::vector<SweepRow> serial = sweep(ds, base, "ss", fractions, lambdas, seeds, 1);
  REQUIRE(serial.size() == 4);
  for (size_t i = 1; i < serial.size(); ++i) {
    const bool ordered = serial[i - 1].split < serial[i].split ||
                         (serial[i - 1].split == serial[i].split &&
                          serial[i - 1].lambda < serial[i].lambda);
    CHECK(ordered);
  }
  for (const SweepRow& row : serial) {
    CHECK(row.mean_acc >= 0.0);
    CHECK(row.mean_acc <= 1.0);
    CHECK(row.stddev >= 0.0);
  }

  std::vector<SweepRow> threaded = sweep(ds, base, "ss", fractions, lambdas, seeds, 4);
  CHECK(sweep_csv(threaded) == sweep_csv(serial));
}

TEST_CASE("csv serializations have pinned headers") {
  std::vector<TraceRow> trace = {{0, 1.5, 0.25, 0.5}};
  const std::string t = trace_csv(trace);
  CHECK(t.substr(0, t.find('\n')) == "epoch,loss,train_acc,test_acc");
  CHECK(t.find("\n0,1.5,0.25,0.5\n") != std::string::npos);

  std::vector<SweepRow> rows = {{0.1, -1.0, 0.75, 0.01}};
  const std::string s = sweep_csv(rows);
  CHECK(s.substr(0, s.find('\n')) == "split,lambda,mean_acc,stddev");
  CHECK(s.find("\n0.1,-1,0.75,0.01\n") != std::string::npos);
}

TEST_CASE("experiment configs load from json") {
  ExperimentConfig cfg = ExperimentConfig::from_json(R"({
    "generator": "ss:-1",
    "optimizer": "gd",
    "lr": 0.5,
    "epochs": 12,
    "hidden": [32, 16],
    "test_fraction": 0.25,
    "seed": 7,
    "beta": 0.003,
    "rule_style": "quantified",
    "quantifier_mode": "minmax",
    "exists_mode": "max",
    "symmetric_relations": false
  })");
  CHECK(cfg.generator == "ss:-1");
  CHECK(cfg.optimizer.method == OptimizerConfig::Method::FixedLrGd);
  CHECK(cfg.optimizer.lr == 0.5);
  CHECK(cfg.epochs == 12);
  CHECK(cfg.hidden == std::vector<int>{32, 16});
  CHECK(cfg.test_fraction == 0.25);
  CHECK(cfg.seed == 7);
  CHECK(cfg.beta == 0.003);
  CHECK(cfg.rule_style == RuleStyle::Quantified);
  CHECK(cfg.quantifier_mode == QuantifierMode::MinMax);
  CHECK(cfg.exists_mode == ExistsMode::Max);
  CHECK(cfg.symmetric_relations == false);

  ExperimentConfig defaults = ExperimentConfig::from_json("{}");
  CHECK(defaults.generator == "prod");
  CHECK(defaults.epochs == 200);
  CHECK(defaults.rule_style == RuleStyle::PerExample);

  ExperimentConfig grid = ExperimentConfig::from_json(R"({"beta_grid": [0.1, 0.01]})");
  CHECK(grid.beta_grid == std::vector<double>{0.1, 0.01});

  CHECK_THROWS_AS(ExperimentConfig::from_json("{nope"), DataError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"unknown_key": 1})"), DataError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"rule_style": "both"})"), DataError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"epochs": -5})"), DataError);
}
