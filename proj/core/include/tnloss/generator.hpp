#pragma once

#include <memory>
#include <span>
#include <string>

#include "tnloss/truth.hpp"

namespace tnloss {

enum class TNormKind { Strict, Nilpotent };

enum class GenFamily { Lukasiewicz, Product, SchweizerSklar, Frank, PowerOf };

/// An additive generator g: [0,1] -> [0, +inf], strictly decreasing with
/// g(1) = 0. The generator fully determines a t-norm T(x,y) =
/// ginv(min{g(0+), g(x)+g(y)}) together with every derived connective.
/// g(0+) may be +inf (strict t-norm) or finite (nilpotent t-norm).
///
/// Immutable after construction; all operations are pure.
class Generator {
 public:
  static Generator lukasiewicz();                // g(x) = 1 - x
  static Generator product();                    // g(x) = -log x
  static Generator schweizer_sklar(double lambda);  // finite lambda; 0 -> -log x
  static Generator frank(double lambda);            // lambda in (0, +inf]; 0 rejected
  static Generator power_of(const Generator& base, double lambda);  // (g(x))^lambda, lambda > 0

  /// Parses the short serialized form: "luk", "prod", "ss:<l>", "frank:<l>",
  /// "pow:<base>:<l>". Throws std::invalid_argument on malformed input.
  static Generator parse(const std::string& spec);
  std::string spec_string() const;

  GenFamily family() const noexcept { return family_; }
  double lambda() const noexcept { return lambda_; }
  const Generator& base() const;  // PowerOf only

  /// g(x) for x in [0,1]; x == 0 returns zero_limit() exactly (never clamps).
  double eval(double x) const;
  /// Exact inverse on [0, zero_limit]; inverse(0) == 1 exactly.
  double inverse(double y) const;
  /// ginv(min{y, zero_limit}); y >= zero_limit returns 0 exactly.
  double pseudo_inverse(double y) const;
  /// dg/dx on (0,1].
  double derivative(double x) const;
  /// d ginv / dy at y in [0, zero_limit); 0 at and past zero_limit.
  double pseudo_inverse_derivative(double y) const;

  double zero_limit() const noexcept { return zero_limit_; }
  TNormKind kind() const noexcept;

 private:
  Generator(GenFamily f, double lambda, std::shared_ptr<const Generator> base);

  GenFamily family_;
  double lambda_ = 0.0;
  std::shared_ptr<const Generator> base_;  // PowerOf
  double zero_limit_ = 0.0;
};

// Generator-constructed connectives.
TruthValue tnorm(const Generator& g, TruthValue x, TruthValue y);
TruthValue tnorm_nary(const Generator& g, std::span<const TruthValue> xs);
TruthValue tconorm(const Generator& g, TruthValue x, TruthValue y);
TruthValue residuum(const Generator& g, TruthValue x, TruthValue y);
TruthValue biresiduum(const Generator& g, TruthValue x, TruthValue y);
TruthValue residual_neg(const Generator& g, TruthValue x);
TruthValue material_impl(const Generator& g, TruthValue x, TruthValue y);

// Generator-independent connectives.
TruthValue weak_conj(TruthValue x, TruthValue y);
TruthValue weak_disj(TruthValue x, TruthValue y);
TruthValue strong_neg(TruthValue x);

}  // namespace tnloss
