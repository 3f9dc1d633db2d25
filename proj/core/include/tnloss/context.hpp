#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnloss {

/// Fixed truth table for a given (non-learnable) predicate. Tuples absent
/// from the table are false. Keys are argument tuples of individual ids.
struct GivenTable {
  std::map<std::vector<std::string>, double> values;

  double lookup(const std::vector<std::string>& tuple) const {
    auto it = values.find(tuple);
    return it == values.end() ? 0.0 : it->second;
  }
};

/// Everything grounding needs beyond the KB itself: the individuals of each
/// domain (in a fixed order) and the truth tables of given predicates.
struct GroundingContext {
  std::map<std::string, std::vector<std::string>> domains;
  std::map<std::string, GivenTable> given;

  const std::vector<std::string>& domain(const std::string& name) const {
    auto it = domains.find(name);
    if (it == domains.end())
      throw std::out_of_range("no individuals for domain '" + name + "'");
    return it->second;
  }
};

}  // namespace tnloss
