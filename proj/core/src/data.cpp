#include "tnloss/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tnloss {

int RelationalDataset::index_of(const std::string& id) const {
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(std::move(tok));
  return out;
}

}  // namespace

RelationalDataset load_dataset(const std::string& content_path,
                               const std::string& cites_path, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  rep = LoadReport{};

  std::ifstream content(content_path);
  if (!content) throw DataError("cannot open content file '" + content_path + "'");

  RelationalDataset ds;
  std::vector<Eigen::Triplet<double>> trips;
  std::map<std::string, int> id_index;
  std::map<std::string, int> class_index;
  std::vector<std::string> raw_labels;
  std::string line;
  int lineno = 0;
  int n_feat = -1;
  while (std::getline(content, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split_ws(line);
    if (cols.size() < 3)
      throw DataError("content line " + std::to_string(lineno) +
                      ": expected id, features, label");
    const int d = static_cast<int>(cols.size()) - 2;
    if (n_feat < 0)
      n_feat = d;
    else if (d != n_feat)
      throw DataError("content line " + std::to_string(lineno) + ": has " +
                      std::to_string(d) + " features, expected " + std::to_string(n_feat));
    if (id_index.count(cols[0]))
      throw DataError("content line " + std::to_string(lineno) + ": duplicate id '" +
                      cols[0] + "'");
    const int row = static_cast<int>(ds.ids.size());
    id_index[cols[0]] = row;
    ds.ids.push_back(cols[0]);
    for (int j = 0; j < n_feat; ++j) {
      const std::string& c = cols[static_cast<size_t>(j) + 1];
      double v = 0.0;
      try {
        size_t pos = 0;
        v = std::stod(c, &pos);
        if (pos != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw DataError("content line " + std::to_string(lineno) +
                        ": feature column is not numeric: '" + c + "'");
      }
      if (v != 0.0) trips.emplace_back(row, j, v);
    }
    raw_labels.push_back(cols.back());
  }
  if (ds.ids.empty()) throw DataError("content file '" + content_path + "' is empty");

  std::set<std::string> class_set(raw_labels.begin(), raw_labels.end());
  ds.classes.assign(class_set.begin(), class_set.end());
  for (size_t i = 0; i < ds.classes.size(); ++i)
    class_index[ds.classes[i]] = static_cast<int>(i);
  ds.labels.reserve(raw_labels.size());
  for (const std::string& l : raw_labels) ds.labels.push_back(class_index.at(l));

  ds.features.resize(static_cast<int>(ds.ids.size()), n_feat);
  ds.features.setFromTriplets(trips.begin(), trips.end());

  std::ifstream cites(cites_path);
  if (!cites) throw DataError("cannot open cites file '" + cites_path + "'");
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split_ws(line);
    if (cols.size() != 2)
      throw DataError("cites line " + std::to_string(lineno) + ": expected two ids");
    const auto a = id_index.find(cols[0]);
    const auto b = id_index.find(cols[1]);
    if (a == id_index.end() || b == id_index.end()) {
      ++rep.skipped_edges;
      if (rep.warnings.size() < 10)
        rep.warnings.push_back("cites line " + std::to_string(lineno) +
                               " references unknown id; skipped");
      continue;
    }
    ds.edges.emplace_back(a->second, b->second);
  }

  rep.n_items = ds.n_items();
  rep.n_features = ds.n_features();
  rep.n_classes = ds.n_classes();
  rep.n_edges = static_cast<int>(ds.edges.size());
  return ds;
}

RelationalDataset synth_relational(int per_class, int n_classes, int n_features,
                                   double intra_p, double inter_p, double noise,
                                   unsigned seed) {
  if (per_class < 1 || n_classes < 2 || n_features < n_classes)
    throw DataError("synthetic dataset needs per_class >= 1, n_classes >= 2, "
                    "n_features >= n_classes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  RelationalDataset ds;
  const int n = per_class * n_classes;
  ds.classes.reserve(static_cast<size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) ds.classes.push_back("c" + std::to_string(c));
  std::vector<Eigen::Triplet<double>> trips;
  const int block = n_features / n_classes;
  for (int i = 0; i < n; ++i) {
    const int c = i / per_class;
    ds.ids.push_back("i" + std::to_string(i));
    ds.labels.push_back(c);
    for (int j = 0; j < n_features; ++j) {
      const bool in_block = j / block == c && j < block * n_classes;
      // Features follow the class's block pattern; `noise` is the chance a
      // coordinate is drawn from the wrong side.
      const bool flip = u(rng) < noise;
      const double p_on = (in_block != flip) ? 0.8 : 0.05;
      if (u(rng) < p_on) trips.emplace_back(i, j, 1.0);
    }
  }
  ds.features.resize(n, n_features);
  ds.features.setFromTriplets(trips.begin(), trips.end());

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double p = ds.labels[static_cast<size_t>(i)] == ds.labels[static_cast<size_t>(j)]
                           ? intra_p
                           : inter_p;
      if (u(rng) < p) ds.edges.emplace_back(i, j);
    }
  return ds;
}

KnowledgeBase citation_kb(const RelationalDataset& ds, const ContextOptions& opts,
                          double beta) {
  if (ds.n_classes() < 1) throw DataError("dataset has no classes");
  KnowledgeBase kb;
  kb.domains.push_back(DomainDecl{opts.domain_name, ds.n_items()});
  for (const std::string& c : ds.classes) {
    kb.predicates.push_back(
        PredicateDecl{opts.learnable_prefix + c, 1, PredicateBinding::Learnable});
    kb.predicates.push_back(
        PredicateDecl{opts.given_prefix + c, 1, PredicateBinding::Given});
  }
  kb.predicates.push_back(PredicateDecl{opts.relation_name, 2, PredicateBinding::Given});

  const std::vector<Term> x{Term::var("x")};
  const std::vector<Term> y{Term::var("y")};
  for (const std::string& c : ds.classes) {
    kb.rules.push_back(Rule{
        Formula::forall("x", opts.domain_name,
                        Formula::implies(Formula::atom(opts.given_prefix + c, x),
                                         Formula::atom(opts.learnable_prefix + c, x))),
        1.0, "supervision " + c});
    if (beta > 0.0) {
      auto body = Formula::implies(
          Formula::atom(opts.relation_name, {Term::var("x"), Term::var("y")}),
          Formula::iff(Formula::atom(opts.learnable_prefix + c, x),
                       Formula::atom(opts.learnable_prefix + c, y)));
      kb.rules.push_back(Rule{
          Formula::forall("x", opts.domain_name,
                          Formula::forall("y", opts.domain_name, std::move(body))),
          beta, "link " + c});
    }
  }
  return kb;
}

GroundingContext to_grounding_context(const RelationalDataset& ds,
                                      const ContextOptions& opts) {
  GroundingContext ctx;
  ctx.domains[opts.domain_name] = ds.ids;

  std::vector<int> sup = opts.supervised_ids;
  if (sup.empty()) {
    sup.resize(static_cast<size_t>(ds.n_items()));
    for (int i = 0; i < ds.n_items(); ++i) sup[static_cast<size_t>(i)] = i;
  }
  for (const std::string& c : ds.classes) ctx.given[opts.given_prefix + c];  // empty tables
  for (int i : sup) {
    if (i < 0 || i >= ds.n_items()) throw DataError("supervised id out of range");
    const std::string& cls = ds.classes[static_cast<size_t>(ds.labels[static_cast<size_t>(i)])];
    ctx.given[opts.given_prefix + cls].values[{ds.ids[static_cast<size_t>(i)]}] = 1.0;
  }

  GivenTable& cite = ctx.given[opts.relation_name];
  for (const auto& [a, b] : ds.edges) {
    cite.values[{ds.ids[static_cast<size_t>(a)], ds.ids[static_cast<size_t>(b)]}] = 1.0;
    if (opts.symmetric_relations)
      cite.values[{ds.ids[static_cast<size_t>(b)], ds.ids[static_cast<size_t>(a)]}] = 1.0;
  }
  return ctx;
}

GroundingContext context_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad context JSON: ") + e.what());
  }
  GroundingContext ctx;
  try {
    if (!j.contains("domains") || !j["domains"].is_object())
      throw DataError("context JSON needs a 'domains' object");
    for (const auto& [name, arr] : j["domains"].items()) {
      std::vector<std::string> ids;
      for (const auto& v : arr) ids.push_back(v.get<std::string>());
      ctx.domains[name] = std::move(ids);
    }
    if (j.contains("given")) {
      for (const auto& [pred, rows] : j["given"].items()) {
        GivenTable& t = ctx.given[pred];
        for (const auto& row : rows) {
          if (!row.is_array() || row.size() < 2)
            throw DataError("given rows are [arg..., value] arrays");
          std::vector<std::string> tuple;
          for (size_t k = 0; k + 1 < row.size(); ++k)
            tuple.push_back(row[k].get<std::string>());
          const double v = row.back().get<double>();
          if (!(v >= 0.0 && v <= 1.0))
            throw DataError("given truth values must lie in [0,1]");
          t.values[std::move(tuple)] = v;
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad context JSON: ") + e.what());
  }
  return ctx;
}

}  // namespace tnloss
