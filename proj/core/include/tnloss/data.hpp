#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tnloss/ast.hpp"
#include "tnloss/context.hpp"
#include "tnloss/model.hpp"

namespace tnloss {

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Items with sparse feature rows, one label each, and directed links
/// between items (a citation-network shape).
struct RelationalDataset {
  std::vector<std::string> ids;  // item names; index = feature row
  SparseFeatures features;       // n_items x n_features
  std::vector<int> labels;       // class index per item
  std::vector<std::string> classes;
  std::vector<std::pair<int, int>> edges;

  int n_items() const noexcept { return static_cast<int>(ids.size()); }
  int n_features() const noexcept { return static_cast<int>(features.cols()); }
  int n_classes() const noexcept { return static_cast<int>(classes.size()); }
  int index_of(const std::string& id) const;
};

struct LoadReport {
  int n_items = 0;
  int n_features = 0;
  int n_classes = 0;
  int n_edges = 0;
  int skipped_edges = 0;  // endpoints missing from the content file
  std::vector<std::string> warnings;
};

/// Loads the tab-separated citation format: content rows are
/// `id <f_1..f_d> label`, cites rows are `cited citing`. Malformed rows
/// throw DataError; edges naming unknown ids are skipped with a warning.
RelationalDataset load_dataset(const std::string& content_path,
                               const std::string& cites_path,
                               LoadReport* report = nullptr);

/// Synthetic citation-style data: `per_class` items per class, features
/// drawn from a class-specific Bernoulli block pattern with `noise`
/// corruption, edges sampled with probability `intra_p` inside a class and
/// `inter_p` across classes.
RelationalDataset synth_relational(int per_class, int n_classes, int n_features,
                                   double intra_p, double inter_p, double noise,
                                   unsigned seed);

struct ContextOptions {
  bool symmetric_relations = true;  // ground each edge in both directions
  /// Items whose labels ground the given supervision predicates; empty means
  /// every item.
  std::vector<int> supervised_ids;
  std::string domain_name = "D";
  std::string relation_name = "cite";
  std::string learnable_prefix = "p_";
  std::string given_prefix = "P_";
};

/// The citation KB: per class c, a supervision rule
///   forall x: P_c(x) => p_c(x)
/// with weight 1, and (when beta > 0) a link rule
///   forall x, y: cite(x,y) => (p_c(x) <=> p_c(y))
/// with weight beta.
KnowledgeBase citation_kb(const RelationalDataset& ds, const ContextOptions& opts,
                          double beta);

/// Domains plus given-predicate tables (supervision labels restricted to
/// supervised_ids, and the relation table) for grounding against `ds`.
GroundingContext to_grounding_context(const RelationalDataset& ds,
                                      const ContextOptions& opts);

/// Reads a grounding context from JSON text:
/// {"domains": {name: [ids...]}, "given": {pred: [[args..., value], ...]}}.
GroundingContext context_from_json(const std::string& json_text);

}  // namespace tnloss
