#include "tnloss/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tnloss/util.hpp"

namespace tnloss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A Frank parameter within this distance of 1 is evaluated with the Product
// generator: the closed form log((l-1)/(l^x-1)) degenerates to 0/0 there.
constexpr double kFrankProductBand = 1e-6;

double require_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("generator argument outside [0,1]: " + format_double(x));
  return x;
}

bool frank_is_product(double lambda) { return std::fabs(lambda - 1.0) <= kFrankProductBand; }

}  // namespace

Generator::Generator(GenFamily f, double lambda, std::shared_ptr<const Generator> base)
    : family_(f), lambda_(lambda), base_(std::move(base)) {
  switch (family_) {
    case GenFamily::Lukasiewicz: zero_limit_ = 1.0; break;
    case GenFamily::Product: zero_limit_ = kInf; break;
    case GenFamily::SchweizerSklar:
      zero_limit_ = lambda_ > 0.0 ? 1.0 / lambda_ : kInf;
      break;
    case GenFamily::Frank:
      zero_limit_ = std::isinf(lambda_) ? 1.0 : kInf;
      break;
    case GenFamily::PowerOf:
      zero_limit_ = std::isinf(base_->zero_limit_) ? kInf : std::pow(base_->zero_limit_, lambda_);
      break;
  }
}

Generator Generator::lukasiewicz() { return Generator(GenFamily::Lukasiewicz, 0.0, nullptr); }

Generator Generator::product() { return Generator(GenFamily::Product, 0.0, nullptr); }

Generator Generator::schweizer_sklar(double lambda) {
  if (!std::isfinite(lambda))
    throw std::invalid_argument("Schweizer-Sklar lambda must be finite");
  return Generator(GenFamily::SchweizerSklar, lambda, nullptr);
}

Generator Generator::frank(double lambda) {
  if (std::isnan(lambda) || lambda <= 0.0)
    throw std::invalid_argument("Frank lambda must be in (0, +inf]; lambda=0 has no additive generator");
  return Generator(GenFamily::Frank, lambda, nullptr);
}

Generator Generator::power_of(const Generator& base, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("power transform exponent must be finite and > 0");
  return Generator(GenFamily::PowerOf, lambda, std::make_shared<Generator>(base));
}

const Generator& Generator::base() const {
  if (!base_) throw std::logic_error("generator has no base");
  return *base_;
}

TNormKind Generator::kind() const noexcept {
  return std::isinf(zero_limit_) ? TNormKind::Strict : TNormKind::Nilpotent;
}

double Generator::eval(double x) const {
  require_unit(x);
  if (x == 0.0) return zero_limit_;
  if (x == 1.0) return 0.0;
  switch (family_) {
    case GenFamily::Lukasiewicz: return 1.0 - x;
    case GenFamily::Product: return -std::log(x);
    case GenFamily::SchweizerSklar:
      if (lambda_ == 0.0) return -std::log(x);
      return (1.0 - std::pow(x, lambda_)) / lambda_;
    case GenFamily::Frank: {
      if (std::isinf(lambda_)) return 1.0 - x;
      if (frank_is_product(lambda_)) return -std::log(x);
      return std::log((lambda_ - 1.0) / (std::pow(lambda_, x) - 1.0));
    }
    case GenFamily::PowerOf: return std::pow(base_->eval(x), lambda_);
  }
  return 0.0;
}

double Generator::inverse(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("generator inverse argument must be >= 0");
  if (y == 0.0) return 1.0;
  if (y >= zero_limit_) return 0.0;
  switch (family_) {
    case GenFamily::Lukasiewicz: return 1.0 - y;
    case GenFamily::Product: return std::exp(-y);
    case GenFamily::SchweizerSklar: {
      if (lambda_ == 0.0) return std::exp(-y);
      double b = 1.0 - lambda_ * y;
      if (b < 0.0) b = 0.0;  // fp slop just under zero_limit
      return std::pow(b, 1.0 / lambda_);
    }
    case GenFamily::Frank: {
      if (std::isinf(lambda_)) return 1.0 - y;
      if (frank_is_product(lambda_)) return std::exp(-y);
      return std::log1p((lambda_ - 1.0) * std::exp(-y)) / std::log(lambda_);
    }
    case GenFamily::PowerOf: return base_->inverse(std::pow(y, 1.0 / lambda_));
  }
  return 0.0;
}

double Generator::pseudo_inverse(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("pseudo-inverse argument must be >= 0");
  if (y >= zero_limit_) return 0.0;
  return inverse(y);
}

double Generator::derivative(double x) const {
  require_unit(x);
  switch (family_) {
    case GenFamily::Lukasiewicz: return -1.0;
    case GenFamily::Product: return -1.0 / x;
    case GenFamily::SchweizerSklar:
      if (lambda_ == 0.0) return -1.0 / x;
      return -std::pow(x, lambda_ - 1.0);
    case GenFamily::Frank: {
      if (std::isinf(lambda_)) return -1.0;
      if (frank_is_product(lambda_)) return -1.0 / x;
      const double lx = std::pow(lambda_, x);
      return -(lx * std::log(lambda_)) / (lx - 1.0);
    }
    case GenFamily::PowerOf: {
      const double gb = base_->eval(x);
      return lambda_ * std::pow(gb, lambda_ - 1.0) * base_->derivative(x);
    }
  }
  return 0.0;
}

double Generator::pseudo_inverse_derivative(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("pseudo-inverse argument must be >= 0");
  if (y >= zero_limit_) return 0.0;
  switch (family_) {
    case GenFamily::Lukasiewicz: return -1.0;
    case GenFamily::Product: return -std::exp(-y);
    case GenFamily::SchweizerSklar: {
      if (lambda_ == 0.0) return -std::exp(-y);
      double b = 1.0 - lambda_ * y;
      if (b < 0.0) b = 0.0;
      return -std::pow(b, (1.0 - lambda_) / lambda_);
    }
    case GenFamily::Frank: {
      if (std::isinf(lambda_)) return -1.0;
      if (frank_is_product(lambda_)) return -std::exp(-y);
      const double u = (lambda_ - 1.0) * std::exp(-y);
      return -u / (std::log(lambda_) * (1.0 + u));
    }
    case GenFamily::PowerOf: {
      const double r = std::pow(y, 1.0 / lambda_);
      return base_->pseudo_inverse_derivative(r) * (1.0 / lambda_) * std::pow(y, 1.0 / lambda_ - 1.0);
    }
  }
  return 0.0;
}

Generator Generator::parse(const std::string& spec) {
  auto parse_num = [&](const std::string& s) {
    if (s == "inf" || s == "+inf") return kInf;
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad generator parameter: '" + s + "' in '" + spec + "'");
    }
    if (pos != s.size())
      throw std::invalid_argument("bad generator parameter: '" + s + "' in '" + spec + "'");
    return v;
  };
  if (spec == "luk") return lukasiewicz();
  if (spec == "prod") return product();
  if (spec.rfind("ss:", 0) == 0) return schweizer_sklar(parse_num(spec.substr(3)));
  if (spec.rfind("frank:", 0) == 0) return frank(parse_num(spec.substr(6)));
  if (spec.rfind("pow:", 0) == 0) {
    const auto cut = spec.rfind(':');
    if (cut <= 4) throw std::invalid_argument("bad generator spec: '" + spec + "'");
    const Generator base = parse(spec.substr(4, cut - 4));
    return power_of(base, parse_num(spec.substr(cut + 1)));
  }
  throw std::invalid_argument("unknown generator spec: '" + spec + "'");
}

std::string Generator::spec_string() const {
  switch (family_) {
    case GenFamily::Lukasiewicz: return "luk";
    case GenFamily::Product: return "prod";
    case GenFamily::SchweizerSklar: return "ss:" + format_double(lambda_);
    case GenFamily::Frank: return "frank:" + format_double(lambda_);
    case GenFamily::PowerOf: return "pow:" + base_->spec_string() + ":" + format_double(lambda_);
  }
  return "?";
}

namespace {
TruthValue snap01(double v) { return TruthValue(std::clamp(v, 0.0, 1.0)); }
}  // namespace

TruthValue tnorm(const Generator& g, TruthValue x, TruthValue y) {
  return snap01(g.pseudo_inverse(g.eval(x.value()) + g.eval(y.value())));
}

TruthValue tnorm_nary(const Generator& g, std::span<const TruthValue> xs) {
  if (xs.empty()) throw std::invalid_argument("tnorm_nary of empty list");
  if (xs.size() == 1) return xs[0];
  double acc = 0.0;
  for (const TruthValue& v : xs) acc += g.eval(v.value());
  return snap01(g.pseudo_inverse(acc));
}

TruthValue tconorm(const Generator& g, TruthValue x, TruthValue y) {
  return snap01(1.0 - g.pseudo_inverse(g.eval(1.0 - x.value()) + g.eval(1.0 - y.value())));
}

TruthValue residuum(const Generator& g, TruthValue x, TruthValue y) {
  if (x.value() <= y.value()) return TruthValue(1.0);
  return snap01(g.pseudo_inverse(g.eval(y.value()) - g.eval(x.value())));
}

TruthValue biresiduum(const Generator& g, TruthValue x, TruthValue y) {
  if (x.value() == y.value()) return TruthValue(1.0);
  return snap01(g.pseudo_inverse(std::fabs(g.eval(x.value()) - g.eval(y.value()))));
}

TruthValue residual_neg(const Generator& g, TruthValue x) {
  return residuum(g, x, TruthValue(0.0));
}

TruthValue material_impl(const Generator& g, TruthValue x, TruthValue y) {
  return tconorm(g, strong_neg(x), y);
}

TruthValue weak_conj(TruthValue x, TruthValue y) {
  return TruthValue(std::min(x.value(), y.value()));
}

TruthValue weak_disj(TruthValue x, TruthValue y) {
  return TruthValue(std::max(x.value(), y.value()));
}

TruthValue strong_neg(TruthValue x) { return TruthValue(1.0 - x.value()); }

}  // namespace tnloss
