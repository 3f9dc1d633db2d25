#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnloss/compile.hpp"
#include "tnloss/data.hpp"
#include "tnloss/model.hpp"
#include "tnloss/optim.hpp"

namespace tnloss {

struct TraceRow {
  int epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
};

struct SweepRow {
  double split = 0.0;   // test fraction
  double lambda = 0.0;  // generator family parameter
  double mean_acc = 0.0;
  double stddev = 0.0;  // sample standard deviation over seeds
};

struct SplitResult {
  std::vector<int> train_ids;
  std::vector<int> test_ids;
};

/// Label-stratified split: ceil(test_fraction * n_c) test items per class c,
/// shuffled by `seed`. Both sides stay sorted by item index.
SplitResult transductive_split(const RelationalDataset& ds, double test_fraction,
                               unsigned seed);

/// Quantified keeps each rule as one universally quantified formula;
/// PerExample grounds the supervision rules to one implication per labeled
/// training item and the link rules to one per edge. The two agree for
/// strict generators; PerExample keeps gradients alive for nilpotent ones,
/// whose quantified form saturates its truncation at typical initialization.
enum class RuleStyle { Quantified, PerExample };

struct ExperimentConfig {
  std::string generator = "prod";
  OptimizerConfig optimizer = OptimizerConfig::adam();
  int epochs = 200;
  std::vector<int> hidden;  // hidden layer sizes; empty = linear model
  double test_fraction = 0.1;
  unsigned seed = 0;
  double beta = 0.0;               // link-rule weight; 0 = supervision only
  std::vector<double> beta_grid;   // >1 entries: pick beta on a validation fold
  RuleStyle rule_style = RuleStyle::PerExample;
  QuantifierMode quantifier_mode = QuantifierMode::Generated;
  ExistsMode exists_mode = ExistsMode::TConorm;
  bool symmetric_relations = true;

  static ExperimentConfig from_json(const std::string& json_text);
};

struct TrainResult {
  std::vector<TraceRow> trace;  // epochs+1 rows: initial state then one per epoch
  double train_acc = 0.0;
  double test_acc = 0.0;
  double beta_used = 0.0;
  std::optional<MlpPredicateGroup> model;
};

/// Compiles the KB loss for `ds` restricted to `split.train_ids` supervision,
/// then optimizes an MLP over all items (transductive: test features are
/// visible, test labels are not). Deterministic for a fixed config.
TrainResult train(const RelationalDataset& ds, const SplitResult& split,
                  const ExperimentConfig& cfg);

/// Splits with cfg.seed, runs beta selection if a grid is configured, trains.
TrainResult run_experiment(const RelationalDataset& ds, const ExperimentConfig& cfg);

/// Grid of (test_fraction, family lambda) cells, each averaged over `seeds`;
/// cells run on `jobs` threads, output ordered by (split, lambda) regardless
/// of scheduling. `family` is a generator family prefix such as "ss".
std::vector<SweepRow> sweep(const RelationalDataset& ds, const ExperimentConfig& base,
                            const std::string& family,
                            const std::vector<double>& test_fractions,
                            const std::vector<double>& lambdas,
                            const std::vector<unsigned>& seeds, int jobs);

/// CSV with header `epoch,loss,train_acc,test_acc`.
std::string trace_csv(const std::vector<TraceRow>& rows);
/// CSV with header `split,lambda,mean_acc,stddev`; accuracies are fractions.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace tnloss
