// Command-line front end: check generator axioms, compile knowledge bases to
// loss graphs, train predicate models, sweep generator families, and verify
// gradients. stdout carries data; diagnostics go to stderr.
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tnloss/checks.hpp"
#include "tnloss/compile.hpp"
#include "tnloss/data.hpp"
#include "tnloss/parser.hpp"
#include "tnloss/tape.hpp"
#include "tnloss/train.hpp"
#include "tnloss/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;      // a requested check did not pass
constexpr int kExitUsage = 2;     // bad flags or configuration
constexpr int kExitIo = 3;        // missing or unreadable files
constexpr int kExitKb = 4;        // KB parse or validation failure
constexpr int kExitNumeric = 5;   // NaN during evaluation

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  if (!is.good() && !is.eof()) throw IoError("failed reading '" + path + "'");
  return os.str();
}

void write_output(const std::string& out_path, const std::string& data) {
  if (out_path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + out_path + "' for writing");
  os << data;
  if (!os) throw IoError("failed writing '" + out_path + "'");
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

tnloss::CompileOptions make_compile_options(const std::string& qmode,
                                            const std::string& emode) {
  tnloss::CompileOptions opts;
  if (qmode == "generated")
    opts.quantifier_mode = tnloss::QuantifierMode::Generated;
  else if (qmode == "minmax")
    opts.quantifier_mode = tnloss::QuantifierMode::MinMax;
  else
    throw tnloss::DataError("--quantifier-mode must be generated or minmax");
  if (emode == "tconorm")
    opts.exists_mode = tnloss::ExistsMode::TConorm;
  else if (emode == "max")
    opts.exists_mode = tnloss::ExistsMode::Max;
  else
    throw tnloss::DataError("--exists-mode must be tconorm or max");
  return opts;
}

/// Context for grounding a KB when none is supplied: each domain must carry
/// a size hint, yielding individuals i0..i(n-1); given predicates start with
/// empty truth tables.
tnloss::GroundingContext default_context(const tnloss::KnowledgeBase& kb) {
  tnloss::GroundingContext ctx;
  for (const auto& d : kb.domains) {
    if (d.declared_size < 1)
      throw tnloss::DataError("domain '" + d.name +
                              "' has no size hint; pass --config with individuals");
    std::vector<std::string> ids;
    ids.reserve(static_cast<size_t>(d.declared_size));
    for (int i = 0; i < d.declared_size; ++i) ids.push_back("i" + std::to_string(i));
    ctx.domains[d.name] = std::move(ids);
  }
  for (const auto& p : kb.predicates)
    if (p.binding == tnloss::PredicateBinding::Given) ctx.given[p.name];
  return ctx;
}

tnloss::RelationalDataset make_dataset(const std::string& content,
                                       const std::string& cites,
                                       const std::string& synth, unsigned seed) {
  if (!content.empty() || !cites.empty()) {
    if (content.empty() || cites.empty())
      throw tnloss::DataError("--content and --cites must be given together");
    tnloss::LoadReport rep;
    auto ds = tnloss::load_dataset(content, cites, &rep);
    std::cerr << "loaded " << rep.n_items << " items, " << rep.n_features
              << " features, " << rep.n_classes << " classes, " << rep.n_edges
              << " edges (" << rep.skipped_edges << " skipped)\n";
    return ds;
  }
  const auto p = parse_list(synth);
  if (p.size() != 6)
    throw tnloss::DataError(
        "--synth wants per_class,classes,features,intra_p,inter_p,noise");
  return tnloss::synth_relational(static_cast<int>(p[0]), static_cast<int>(p[1]),
                                  static_cast<int>(p[2]), p[3], p[4], p[5], seed);
}

int cmd_check(const std::string& gen_spec, int grid, double tol) {
  const tnloss::Generator g = tnloss::Generator::parse(gen_spec);
  bool all_ok = true;
  for (const auto& r : tnloss::run_axiom_checks(g, grid, tol)) {
    std::cout << r.name << ' ' << tnloss::format_double(r.max_err) << ' '
              << (r.pass ? "pass" : "FAIL") << '\n';
    all_ok = all_ok && r.pass;
  }
  std::cerr << "generator " << g.spec_string() << " ("
            << (g.kind() == tnloss::TNormKind::Strict ? "strict" : "nilpotent")
            << ")\n";
  return all_ok ? kExitOk : kExitFail;
}

int cmd_compile(const std::string& kb_path, const std::string& gen_spec,
                const std::string& config, const std::string& qmode,
                const std::string& emode, const std::string& out) {
  const tnloss::KnowledgeBase kb = tnloss::parse_kb(read_file(kb_path));
  const tnloss::Generator g = tnloss::Generator::parse(gen_spec);
  const tnloss::GroundingContext ctx = config.empty()
                                           ? default_context(kb)
                                           : tnloss::context_from_json(read_file(config));
  const tnloss::LossGraph graph =
      tnloss::kb_loss(kb, g, ctx, make_compile_options(qmode, emode));
  write_output(out, graph.listing());
  std::cerr << "nodes " << graph.nodes().size() << ", atoms " << graph.atoms().size()
            << ", geneval " << graph.count_ops(tnloss::OpKind::GenEval) << ", genpinv "
            << graph.count_ops(tnloss::OpKind::GenPinv) << '\n';
  return kExitOk;
}

int cmd_train(const std::string& config, const std::string& content,
              const std::string& cites, const std::string& synth, bool seed_set,
              unsigned seed, const std::string& out, const std::string& model_out) {
  tnloss::ExperimentConfig cfg = config.empty()
                                     ? tnloss::ExperimentConfig{}
                                     : tnloss::ExperimentConfig::from_json(read_file(config));
  if (seed_set) cfg.seed = seed;
  const auto ds = make_dataset(content, cites, synth, cfg.seed);
  const tnloss::TrainResult r = tnloss::run_experiment(ds, cfg);
  write_output(out, tnloss::trace_csv(r.trace));
  if (!model_out.empty() && r.model) r.model->save(model_out);
  std::cerr << "train_acc " << tnloss::format_double(r.train_acc) << ", test_acc "
            << tnloss::format_double(r.test_acc) << ", beta "
            << tnloss::format_double(r.beta_used) << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& content,
              const std::string& cites, const std::string& synth, bool seed_set,
              unsigned seed, const std::string& family, const std::string& splits,
              const std::string& lambdas, const std::string& seeds_csv, int jobs,
              const std::string& out) {
  tnloss::ExperimentConfig cfg = config.empty()
                                     ? tnloss::ExperimentConfig{}
                                     : tnloss::ExperimentConfig::from_json(read_file(config));
  if (seed_set) cfg.seed = seed;
  const auto ds = make_dataset(content, cites, synth, cfg.seed);
  std::vector<unsigned> seed_list;
  for (double s : parse_list(seeds_csv)) seed_list.push_back(static_cast<unsigned>(s));
  const auto rows = tnloss::sweep(ds, cfg, family, parse_list(splits),
                                  parse_list(lambdas), seed_list, jobs);
  write_output(out, tnloss::sweep_csv(rows));
  return kExitOk;
}

int cmd_gradcheck(const std::string& kb_path, const std::string& gen_spec,
                  const std::string& config, const std::string& qmode,
                  const std::string& emode, unsigned seed, int points) {
  const tnloss::KnowledgeBase kb = tnloss::parse_kb(read_file(kb_path));
  const tnloss::Generator g = tnloss::Generator::parse(gen_spec);
  const tnloss::GroundingContext ctx = config.empty()
                                           ? default_context(kb)
                                           : tnloss::context_from_json(read_file(config));
  const tnloss::LossGraph graph =
      tnloss::kb_loss(kb, g, ctx, make_compile_options(qmode, emode));
  if (graph.atoms().empty())
    throw tnloss::DataError("loss graph has no learnable atoms to differentiate");
  tnloss::Tape tape(graph);
  auto f = [&](const std::vector<double>& v) { return tnloss::graph_eval(graph, v); };
  auto df = [&](const std::vector<double>& v) {
    tape.forward(v);
    tape.backward();
    return tape.atom_adjoints();
  };
  auto veto = [&](const std::vector<double>& v) {
    for (double x : v)
      if (x < 0.02 || x > 0.98) return true;
    return tnloss::near_graph_kink(graph, v, 1e-3);
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  double worst = 0.0;
  int resampled = 0;
  for (int p = 0; p < points; ++p) {
    std::vector<double> at(graph.atoms().size());
    for (double& x : at) x = unit(rng);
    const auto rep = tnloss::grad_check(f, df, at, veto, 1e-5, 1e-4, seed + 17 * p);
    worst = std::max(worst, rep.max_rel_err);
    resampled += rep.resampled;
    std::cout << "point " << p << " max_rel_err " << tnloss::format_double(rep.max_rel_err)
              << ' ' << (rep.pass ? "pass" : "FAIL") << '\n';
    if (!rep.pass) {
      std::cerr << "gradient mismatch at atom index " << rep.worst_index << ": analytic "
                << rep.worst_analytic << " vs numeric " << rep.worst_numeric << '\n';
      return kExitFail;
    }
  }
  std::cerr << "worst rel err " << tnloss::format_double(worst) << " over " << points
            << " points (" << resampled << " kink resamples)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"t-norm generator driven losses over FOL knowledge bases"};
  app.require_subcommand(1);

  std::string gen_spec = "prod", kb_path, config, out, model_out;
  std::string qmode = "generated", emode = "tconorm";
  std::string content, cites, synth = "50,3,40,0.2,0.02,0.1";
  std::string family = "ss", splits = "0.1", lambdas = "-1.5,-1,0,1,1.5",
              seeds_csv = "0,1,2,3,4";
  unsigned seed = 0;
  bool seed_set = false;
  int grid = 21, jobs = 1, points = 20;
  double tol = 1e-9;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--generator", gen_spec, "generator spec: luk, prod, ss:<l>, frank:<l>, pow:<base>:<l>");
    c->add_option("--quantifier-mode", qmode, "generated|minmax");
    c->add_option("--exists-mode", emode, "tconorm|max");
  };

  CLI::App* check = app.add_subcommand("check", "verify t-norm axioms on a grid");
  add_common(check);
  check->add_option("--grid", grid, "grid points per axis");
  check->add_option("--tol", tol, "max tolerated violation");

  CLI::App* compile = app.add_subcommand("compile", "compile a KB to a loss graph listing");
  add_common(compile);
  compile->add_option("--kb", kb_path, "knowledge base file")->required();
  compile->add_option("--config", config, "grounding context JSON");
  compile->add_option("--out", out, "write listing here instead of stdout");

  CLI::App* train = app.add_subcommand("train", "train predicate models against a KB loss");
  train->add_option("--config", config, "experiment config JSON");
  train->add_option("--content", content, "content file (id, features..., label)");
  train->add_option("--cites", cites, "cites file (cited citing)");
  train->add_option("--synth", synth, "per_class,classes,features,intra_p,inter_p,noise");
  CLI::Option* train_seed = train->add_option("--seed", seed, "override config seed");
  train->add_option("--out", out, "trace CSV path (default stdout)");
  train->add_option("--model-out", model_out, "save final model checkpoint here");

  CLI::App* sweep = app.add_subcommand("sweep", "accuracy over generator-family grid");
  sweep->add_option("--config", config, "experiment config JSON");
  sweep->add_option("--content", content, "content file");
  sweep->add_option("--cites", cites, "cites file");
  sweep->add_option("--synth", synth, "synthetic dataset spec");
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "override config seed");
  sweep->add_option("--family", family, "generator family prefix, e.g. ss");
  sweep->add_option("--splits", splits, "comma list of test fractions");
  sweep->add_option("--lambdas", lambdas, "comma list of family parameters");
  sweep->add_option("--seeds", seeds_csv, "comma list of training seeds");
  sweep->add_option("--jobs", jobs, "worker threads");
  sweep->add_option("--out", out, "sweep CSV path (default stdout)");

  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference check of a KB loss");
  add_common(gc);
  gc->add_option("--kb", kb_path, "knowledge base file")->required();
  gc->add_option("--config", config, "grounding context JSON");
  gc->add_option("--seed", seed, "RNG seed");
  gc->add_option("--points", points, "random atom assignments to test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  seed_set = train_seed->count() > 0 || sweep_seed->count() > 0;
  try {
    if (check->parsed()) return cmd_check(gen_spec, grid, tol);
    if (compile->parsed()) return cmd_compile(kb_path, gen_spec, config, qmode, emode, out);
    if (train->parsed())
      return cmd_train(config, content, cites, synth, seed_set, seed, out, model_out);
    if (sweep->parsed())
      return cmd_sweep(config, content, cites, synth, seed_set, seed, family, splits,
                       lambdas, seeds_csv, jobs, out);
    if (gc->parsed())
      return cmd_gradcheck(kb_path, gen_spec, config, qmode, emode, seed, points);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const tnloss::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitKb;
  } catch (const tnloss::CompileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitKb;
  } catch (const tnloss::NumericFault& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const tnloss::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
