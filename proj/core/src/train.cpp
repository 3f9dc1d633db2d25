#include "tnloss/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <json.hpp>

#include "tnloss/tape.hpp"
#include "tnloss/util.hpp"

namespace tnloss {

namespace {

/// Stratified pick of ceil(fraction * n_c) per class from `pool`.
std::pair<std::vector<int>, std::vector<int>> stratified_take(
    const std::vector<int>& pool, const std::vector<int>& labels, int n_classes,
    double fraction, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> per_class(static_cast<size_t>(n_classes));
  for (int i : pool) per_class[static_cast<size_t>(labels[static_cast<size_t>(i)])].push_back(i);
  std::vector<int> taken, rest;
  for (auto& ids : per_class) {
    std::shuffle(ids.begin(), ids.end(), rng);
    const size_t k = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(ids.size()) - 1e-12));
    for (size_t j = 0; j < ids.size(); ++j)
      (j < k ? taken : rest).push_back(ids[j]);
  }
  std::sort(taken.begin(), taken.end());
  std::sort(rest.begin(), rest.end());
  return {std::move(taken), std::move(rest)};
}

double accuracy(const Eigen::MatrixXd& Y, const std::vector<int>& labels,
                const std::vector<int>& over) {
  if (over.empty()) return 0.0;
  int hits = 0;
  for (int i : over) {
    int best = 0;
    for (int c = 1; c < Y.cols(); ++c)
      if (Y(i, c) > Y(i, best)) best = c;
    if (best == labels[static_cast<size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(over.size());
}

KnowledgeBase per_example_kb(const RelationalDataset& ds, const ContextOptions& co,
                             double beta, const std::vector<int>& train_ids,
                             const GroundingContext& ctx) {
  // Same declarations as the quantified citation KB, but rules ground to one
  // formula per supervised item / per linked pair. For the supervision rule
  // P_c(i) => p_c(i) with P_c(i) = 1 the residuum loss reduces to the loss
  // of the bare atom, so the atom is the rule.
  KnowledgeBase kb = citation_kb(ds, co, 0.0);
  kb.rules.clear();
  for (int i : train_ids) {
    const std::string& cls = ds.classes[static_cast<size_t>(ds.labels[static_cast<size_t>(i)])];
    kb.rules.push_back(Rule{
        Formula::atom(co.learnable_prefix + cls, {Term::constant(ds.ids[static_cast<size_t>(i)])}),
        1.0, "supervision"});
  }
  if (beta > 0.0) {
    const GivenTable& cite = ctx.given.at(co.relation_name);
    for (const std::string& c : ds.classes) {
      for (const auto& [tuple, val] : cite.values) {
        if (val == 0.0) continue;
        kb.rules.push_back(Rule{
            Formula::iff(Formula::atom(co.learnable_prefix + c, {Term::constant(tuple[0])}),
                         Formula::atom(co.learnable_prefix + c, {Term::constant(tuple[1])})),
            beta, "link"});
      }
    }
  }
  return kb;
}

}  // namespace

SplitResult transductive_split(const RelationalDataset& ds, double test_fraction,
                               unsigned seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
    throw DataError("test fraction must lie in [0,1]");
  std::vector<int> all(static_cast<size_t>(ds.n_items()));
  std::iota(all.begin(), all.end(), 0);
  auto [test, train] = stratified_take(all, ds.labels, ds.n_classes(), test_fraction, seed);
  return SplitResult{std::move(train), std::move(test)};
}

TrainResult train(const RelationalDataset& ds, const SplitResult& split,
                  const ExperimentConfig& cfg) {
  ContextOptions co;
  co.symmetric_relations = cfg.symmetric_relations;
  co.supervised_ids = split.train_ids;
  const GroundingContext ctx = to_grounding_context(ds, co);
  const KnowledgeBase kb =
      cfg.rule_style == RuleStyle::Quantified
          ? citation_kb(ds, co, cfg.beta)
          : per_example_kb(ds, co, cfg.beta, split.train_ids, ctx);
  const Generator gen = Generator::parse(cfg.generator);
  CompileOptions copts;
  copts.quantifier_mode = cfg.quantifier_mode;
  copts.exists_mode = cfg.exists_mode;
  const LossGraph graph = kb_loss(kb, gen, ctx, copts);

  std::vector<int> dims;
  dims.push_back(ds.n_features());
  for (int h : cfg.hidden) dims.push_back(h);
  dims.push_back(ds.n_classes());
  std::vector<std::string> heads;
  for (const std::string& c : ds.classes) heads.push_back(co.learnable_prefix + c);
  MlpPredicateGroup model(dims, heads);
  model.init_params(cfg.seed);

  // Atom -> (item row, head) map, fixed for the whole run.
  std::map<std::string, int> row_of;
  for (int i = 0; i < ds.n_items(); ++i) row_of[ds.ids[static_cast<size_t>(i)]] = i;
  struct Slot {
    int row, head;
  };
  std::vector<Slot> slots;
  slots.reserve(graph.atoms().size());
  for (const GroundAtom& a : graph.atoms()) {
    const int head = model.head_index(a.predicate);
    if (head < 0 || a.individuals.size() != 1)
      throw DataError("unexpected learnable atom '" + a.predicate + "' in training graph");
    slots.push_back(Slot{row_of.at(a.individuals[0]), head});
  }

  Tape tape(graph);
  Optimizer opt(cfg.optimizer, model.n_params());
  MlpPredicateGroup::Workspace ws;
  std::vector<double> atom_values(slots.size(), 0.0);
  Eigen::MatrixXd dY(ds.n_items(), ds.n_classes());

  TrainResult result;
  result.beta_used = cfg.beta;
  for (int epoch = 0;; ++epoch) {
    const Eigen::MatrixXd& Y = model.forward(ds.features, ws);
    for (size_t k = 0; k < slots.size(); ++k)
      atom_values[k] = Y(slots[k].row, slots[k].head);
    const double loss = tape.forward(atom_values);
    TraceRow row;
    row.epoch = epoch;
    row.loss = loss;
    row.train_acc = accuracy(Y, ds.labels, split.train_ids);
    row.test_acc = accuracy(Y, ds.labels, split.test_ids);
    result.trace.push_back(row);
    if (epoch == cfg.epochs) break;

    tape.backward();
    const std::vector<double>& adj = tape.atom_adjoints();
    dY.setZero();
    for (size_t k = 0; k < slots.size(); ++k)
      dY(slots[k].row, slots[k].head) += adj[k];
    const std::vector<double> grad = model.backward(ds.features, ws, dY);
    opt.step(model.params(), grad);
  }
  result.train_acc = result.trace.back().train_acc;
  result.test_acc = result.trace.back().test_acc;
  result.model = std::move(model);
  return result;
}

TrainResult run_experiment(const RelationalDataset& ds, const ExperimentConfig& cfg) {
  const SplitResult split = transductive_split(ds, cfg.test_fraction, cfg.seed);
  ExperimentConfig final_cfg = cfg;
  if (cfg.beta_grid.size() == 1) final_cfg.beta = cfg.beta_grid[0];
  if (cfg.beta_grid.size() > 1) {
    // Pick beta on a stratified validation fold carved out of the training
    // side (one tenth of it), then retrain on the full training set.
    auto [val, sub_train] =
        stratified_take(split.train_ids, ds.labels, ds.n_classes(), 0.1, cfg.seed + 1);
    SplitResult val_split{std::move(sub_train), std::move(val)};
    double best_beta = cfg.beta_grid.front();
    double best_acc = -1.0;
    for (double b : cfg.beta_grid) {
      ExperimentConfig probe = cfg;
      probe.beta_grid.clear();
      probe.beta = b;
      const TrainResult r = train(ds, val_split, probe);
      if (r.test_acc > best_acc) {
        best_acc = r.test_acc;
        best_beta = b;
      }
    }
    final_cfg.beta = best_beta;
  }
  final_cfg.beta_grid.clear();
  return train(ds, split, final_cfg);
}

std::vector<SweepRow> sweep(const RelationalDataset& ds, const ExperimentConfig& base,
                            const std::string& family,
                            const std::vector<double>& test_fractions,
                            const std::vector<double>& lambdas,
                            const std::vector<unsigned>& seeds, int jobs) {
  if (test_fractions.empty() || lambdas.empty() || seeds.empty())
    throw DataError("sweep needs at least one split, lambda and seed");
  struct Unit {
    size_t si, li, ki;
  };
  std::vector<Unit> units;
  for (size_t si = 0; si < test_fractions.size(); ++si)
    for (size_t li = 0; li < lambdas.size(); ++li)
      for (size_t ki = 0; ki < seeds.size(); ++ki) units.push_back(Unit{si, li, ki});

  std::vector<double> accs(units.size(), 0.0);
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    while (true) {
      const size_t u = next.fetch_add(1);
      if (u >= units.size()) return;
      try {
        ExperimentConfig cfg = base;
        cfg.generator = family + ":" + format_double(lambdas[units[u].li]);
        cfg.test_fraction = test_fractions[units[u].si];
        cfg.seed = seeds[units[u].ki];
        accs[u] = run_experiment(ds, cfg).test_acc;
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(units.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SweepRow> rows;
  size_t u = 0;
  for (size_t si = 0; si < test_fractions.size(); ++si) {
    for (size_t li = 0; li < lambdas.size(); ++li) {
      double mean = 0.0;
      for (size_t ki = 0; ki < seeds.size(); ++ki) mean += accs[u + ki];
      mean /= static_cast<double>(seeds.size());
      double sd = 0.0;
      if (seeds.size() > 1) {
        for (size_t ki = 0; ki < seeds.size(); ++ki)
          sd += (accs[u + ki] - mean) * (accs[u + ki] - mean);
        sd = std::sqrt(sd / static_cast<double>(seeds.size() - 1));
      }
      rows.push_back(SweepRow{test_fractions[si], lambdas[li], mean, sd});
      u += seeds.size();
    }
  }
  return rows;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "epoch,loss,train_acc,test_acc\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.epoch);
    out += ',';
    out += format_double(r.loss);
    out += ',';
    out += format_double(r.train_acc);
    out += ',';
    out += format_double(r.test_acc);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "split,lambda,mean_acc,stddev\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.split);
    out += ',';
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.mean_acc);
    out += ',';
    out += format_double(r.stddev);
    out += '\n';
  }
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad experiment config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "generator") {
        cfg.generator = val.get<std::string>();
      } else if (key == "optimizer") {
        cfg.optimizer.method = OptimizerConfig::parse_method(val.get<std::string>());
      } else if (key == "lr") {
        cfg.optimizer.lr = val.get<double>();
      } else if (key == "epochs") {
        cfg.epochs = val.get<int>();
      } else if (key == "hidden") {
        cfg.hidden.clear();
        for (const auto& h : val) cfg.hidden.push_back(h.get<int>());
      } else if (key == "test_fraction") {
        cfg.test_fraction = val.get<double>();
      } else if (key == "seed") {
        cfg.seed = val.get<unsigned>();
      } else if (key == "beta") {
        cfg.beta = val.get<double>();
      } else if (key == "beta_grid") {
        cfg.beta_grid.clear();
        for (const auto& b : val) cfg.beta_grid.push_back(b.get<double>());
      } else if (key == "rule_style") {
        const std::string s = val.get<std::string>();
        if (s == "quantified")
          cfg.rule_style = RuleStyle::Quantified;
        else if (s == "per-example")
          cfg.rule_style = RuleStyle::PerExample;
        else
          throw DataError("rule_style must be 'quantified' or 'per-example'");
      } else if (key == "quantifier_mode") {
        const std::string s = val.get<std::string>();
        if (s == "generated")
          cfg.quantifier_mode = QuantifierMode::Generated;
        else if (s == "minmax")
          cfg.quantifier_mode = QuantifierMode::MinMax;
        else
          throw DataError("quantifier_mode must be 'generated' or 'minmax'");
      } else if (key == "exists_mode") {
        const std::string s = val.get<std::string>();
        if (s == "tconorm")
          cfg.exists_mode = ExistsMode::TConorm;
        else if (s == "max")
          cfg.exists_mode = ExistsMode::Max;
        else
          throw DataError("exists_mode must be 'tconorm' or 'max'");
      } else if (key == "symmetric_relations") {
        cfg.symmetric_relations = val.get<bool>();
      } else {
        throw DataError("unknown experiment config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad experiment config: ") + e.what());
  }
  if (cfg.epochs < 0) throw DataError("epochs must be nonnegative");
  return cfg;
}

}  // namespace tnloss
