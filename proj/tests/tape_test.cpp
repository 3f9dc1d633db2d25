#include <doctest.h>

#include <cmath>
#include <limits>

#include "tnloss/graph.hpp"
#include "tnloss/tape.hpp"

using namespace tnloss;

namespace {

GroundAtom ga(const char* pred, const char* ind) {
  GroundAtom a;
  a.predicate = pred;
  a.individuals = {ind};
  return a;
}

/// min{1, (1-p) + (1-q)}: the nilpotent conjunction loss, built by hand.
LossGraph luk_conj_graph() {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  const int q = g.emit_pred(ga("q", "i0"));
  const int s = g.emit_add(g.emit_gen_eval(p), g.emit_gen_eval(q));
  g.set_output(g.emit_min(g.emit_const(1.0), s));
  return g;
}

}  // namespace

TEST_CASE("forward computes each op") {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  const int c = g.emit_const(0.25);
  const int add = g.emit_add(p, c);
  const int sub = g.emit_sub(p, c);
  const int mul = g.emit_mul(p, c);
  const int div = g.emit_div(p, c);
  const int neg = g.emit_neg(p);
  const int mn = g.emit_min(p, c);
  const int mx = g.emit_max(p, c);
  const int ab = g.emit_abs(sub);
  const int cl = g.emit_clamp_min0(neg);
  g.set_output(g.emit_sum({static_cast<int32_t>(add), static_cast<int32_t>(mul)}));
  Tape t(g);
  const double out = t.forward({0.6});
  CHECK(t.value(add) == doctest::Approx(0.85));
  CHECK(t.value(sub) == doctest::Approx(0.35));
  CHECK(t.value(mul) == doctest::Approx(0.15));
  CHECK(t.value(div) == doctest::Approx(2.4));
  CHECK(t.value(neg) == doctest::Approx(-0.6));
  CHECK(t.value(mn) == doctest::Approx(0.25));
  CHECK(t.value(mx) == doctest::Approx(0.6));
  CHECK(t.value(ab) == doctest::Approx(0.35));
  CHECK(t.value(cl) == 0.0);
  CHECK(out == doctest::Approx(1.0));
}

TEST_CASE("nilpotent conjunction loss and its gradient") {
  LossGraph g = luk_conj_graph();
  Tape t(g);
  // Unsaturated region: loss = (1-p) + (1-q).
  CHECK(t.forward({0.7, 0.5}) == doctest::Approx(0.8).epsilon(1e-12));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(-1.0));
  CHECK(t.atom_adjoints()[1] == doctest::Approx(-1.0));
  // Saturated: the min truncates at g(0+) = 1 and the gradient dies.
  CHECK(t.forward({0.7, 0.2}) == doctest::Approx(1.0));
  t.backward();
  CHECK(t.atom_adjoints()[0] == 0.0);
  CHECK(t.atom_adjoints()[1] == 0.0);
}

TEST_CASE("strict conjunction loss and gradient") {
  LossGraph g(Generator::product());
  const int p = g.emit_pred(ga("p", "i0"));
  const int q = g.emit_pred(ga("q", "i0"));
  g.set_output(g.emit_add(g.emit_gen_eval(p), g.emit_gen_eval(q)));
  Tape t(g);
  CHECK(t.forward({0.5, 0.4}) ==
        doctest::Approx(-std::log(0.5) - std::log(0.4)).epsilon(1e-12));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(-2.0));   // -1/0.5
  CHECK(t.atom_adjoints()[1] == doctest::Approx(-2.5));   // -1/0.4
}

TEST_CASE("abs subgradient conventions") {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  const int q = g.emit_pred(ga("q", "i0"));
  g.set_output(g.emit_abs(g.emit_sub(g.emit_gen_eval(p), g.emit_gen_eval(q))));
  Tape t(g);
  // |g(p) - g(q)| = p - q when p > q.
  CHECK(t.forward({0.9, 0.6}) == doctest::Approx(0.3).epsilon(1e-12));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(1.0));
  CHECK(t.atom_adjoints()[1] == doctest::Approx(-1.0));
  // At the tie, |.|' is taken as +1.
  t.forward({0.7, 0.7});
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(-1.0));
  CHECK(t.atom_adjoints()[1] == doctest::Approx(1.0));
}

TEST_CASE("min and max route to the first attaining operand") {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  const int q = g.emit_pred(ga("q", "i0"));
  g.set_output(g.emit_min(p, q));
  Tape t(g);
  t.forward({0.5, 0.5});
  t.backward();
  CHECK(t.atom_adjoints()[0] == 1.0);
  CHECK(t.atom_adjoints()[1] == 0.0);

  LossGraph h(Generator::lukasiewicz());
  const int a = h.emit_pred(ga("p", "i0"));
  const int b = h.emit_pred(ga("q", "i0"));
  h.set_output(h.emit_max(a, b));
  Tape s(h);
  s.forward({0.3, 0.8});
  s.backward();
  CHECK(s.atom_adjoints()[0] == 0.0);
  CHECK(s.atom_adjoints()[1] == 1.0);
}

TEST_CASE("clamp blocks gradient at and below zero") {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  const int d = g.emit_sub(p, g.emit_const(0.5));
  g.set_output(g.emit_clamp_min0(d));
  Tape t(g);
  t.forward({0.75});
  t.backward();
  CHECK(t.atom_adjoints()[0] == 1.0);
  t.forward({0.5});  // boundary: flat side
  t.backward();
  CHECK(t.atom_adjoints()[0] == 0.0);
  t.forward({0.25});
  t.backward();
  CHECK(t.atom_adjoints()[0] == 0.0);
}

TEST_CASE("generator eval respects the epsilon floor") {
  LossGraph g(Generator::product(), 1e-7);
  const int p = g.emit_pred(ga("p", "i0"));
  g.set_output(g.emit_gen_eval(p));
  Tape t(g);
  CHECK(t.forward({0.0}) == std::numeric_limits<double>::infinity());
  CHECK(t.forward({1e-9}) == doctest::Approx(-std::log(1e-7)));
  t.backward();
  CHECK(t.atom_adjoints()[0] == 0.0);  // floored flat
  CHECK(t.forward({1.0}) == 0.0);
  t.backward();
  CHECK(t.atom_adjoints()[0] == 0.0);
  CHECK(t.forward({0.5}) == doctest::Approx(std::log(2.0)));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(-2.0));
}

TEST_CASE("pseudo-inverse composes to the identity inside the unit interval") {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  g.set_output(g.emit_gen_pinv(g.emit_gen_eval(p)));
  Tape t(g);
  CHECK(t.forward({0.37}) == doctest::Approx(0.37).epsilon(1e-12));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(1.0));
}

TEST_CASE("pseudo-inverse is flat past the zero limit") {
  LossGraph g(Generator::lukasiewicz());
  const int p = g.emit_pred(ga("p", "i0"));
  const int scaled = g.emit_mul(g.emit_const(5.0), p);
  g.set_output(g.emit_gen_pinv(scaled));
  Tape t(g);
  CHECK(t.forward({0.5}) == 0.0);  // 2.5 is past g(0+) = 1
  t.backward();
  CHECK(t.atom_adjoints()[0] == 0.0);
  CHECK(t.forward({0.1}) == doctest::Approx(0.5));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(-5.0));
}

TEST_CASE("NaN faults name the node; infinities are legitimate") {
  LossGraph g(Generator::product());
  const int p = g.emit_pred(ga("p", "i0"));
  const int q = g.emit_pred(ga("q", "i0"));
  const int ep = g.emit_gen_eval(p);
  const int eq = g.emit_gen_eval(q);
  const int d = g.emit_sub(ep, eq);
  g.set_output(d);
  Tape t(g);
  // inf - finite is a legitimate extended value.
  CHECK(t.forward({0.0, 0.5}) == std::numeric_limits<double>::infinity());
  // Same-signed infinite losses cancel: the residuum of two totally false
  // operands is true, so their g-space difference is zero.
  CHECK(t.forward({0.0, 0.0}) == 0.0);

  // A genuinely undefined operation still faults, naming its node.
  LossGraph h(Generator::product());
  const int hp = h.emit_pred(ga("p", "i0"));
  const int hq = h.emit_pred(ga("q", "i0"));
  const int hd = h.emit_div(hp, hq);
  h.set_output(hd);
  Tape th(h);
  try {
    th.forward({0.0, 0.0});
    FAIL("expected a numeric fault");
  } catch (const NumericFault& e) {
    CHECK(e.node() == hd);
    CHECK(std::string(e.what()).find("div") != std::string::npos);
  }
}

TEST_CASE("zero adjoints are not propagated through infinite locals") {
  // With the output routed to one min branch, the other branch's adjoint is
  // zero; multiplying that zero by an infinite partial must not make NaN.
  LossGraph g(Generator::product());
  const int p = g.emit_pred(ga("p", "i0"));
  const int q = g.emit_pred(ga("q", "i0"));
  const int ep = g.emit_gen_eval(p);
  const int eq = g.emit_gen_eval(q);
  g.set_output(g.emit_min(ep, eq));
  Tape t(g);
  CHECK(t.forward({0.5, 0.0}) == doctest::Approx(std::log(2.0)));
  t.backward();
  CHECK(t.atom_adjoints()[0] == doctest::Approx(-2.0));
  CHECK(t.atom_adjoints()[1] == 0.0);
  CHECK_FALSE(std::isnan(t.atom_adjoints()[1]));
}

TEST_CASE("atom value count is validated") {
  LossGraph g = luk_conj_graph();
  Tape t(g);
  CHECK_THROWS_AS(t.forward({0.5}), std::invalid_argument);
}

TEST_CASE("graph_eval is a one-shot forward") {
  LossGraph g = luk_conj_graph();
  CHECK(graph_eval(g, {0.7, 0.5}) == doctest::Approx(0.8));
}

TEST_CASE("kink detector flags ties and boundaries") {
  LossGraph g = luk_conj_graph();
  // Sum 0.8 < 1: well away from the min tie at these margins.
  CHECK_FALSE(near_graph_kink(g, {0.7, 0.5}, 1e-3));
  // Sum exactly 1.0 ties with the truncation constant.
  CHECK(near_graph_kink(g, {0.7, 0.3}, 1e-3));
  // NaN production counts as a kink.
  LossGraph h(Generator::product());
  const int p = h.emit_pred(ga("p", "i0"));
  const int q = h.emit_pred(ga("q", "i0"));
  h.set_output(h.emit_div(p, q));
  CHECK(near_graph_kink(h, {0.0, 0.0}, 1e-3));
}

TEST_CASE("grad_check accepts a correct gradient and rejects a wrong one") {
  auto f = [](const std::vector<double>& v) { return v[0] * v[0] + 3.0 * v[1]; };
  auto good = [](const std::vector<double>& v) {
    return std::vector<double>{2.0 * v[0], 3.0};
  };
  auto bad = [](const std::vector<double>& v) {
    return std::vector<double>{2.0 * v[0], 2.9};
  };
  GradCheckReport ok = grad_check(f, good, {0.3, -0.2}, nullptr);
  CHECK(ok.pass);
  CHECK(ok.checked == 2);
  CHECK(ok.max_rel_err < 1e-6);
  GradCheckReport nok = grad_check(f, bad, {0.3, -0.2}, nullptr);
  CHECK_FALSE(nok.pass);
  CHECK(nok.worst_index == 1);
}

TEST_CASE("grad_check jitters away from vetoed points") {
  auto f = [](const std::vector<double>& v) { return std::fabs(v[0]); };
  auto an = [](const std::vector<double>& v) {
    return std::vector<double>{v[0] >= 0.0 ? 1.0 : -1.0};
  };
  auto veto = [](const std::vector<double>& v) { return std::fabs(v[0]) < 2e-2; };
  GradCheckReport rep = grad_check(f, an, {0.0}, veto);
  CHECK(rep.resampled > 0);
  CHECK(rep.pass);
}

TEST_CASE("tape reuse is deterministic") {
  LossGraph g = luk_conj_graph();
  Tape t(g);
  const double a = t.forward({0.61, 0.42});
  t.backward();
  const double g0 = t.atom_adjoints()[0];
  t.forward({0.2, 0.9});
  t.backward();
  const double b = t.forward({0.61, 0.42});
  t.backward();
  CHECK(a == b);
  CHECK(t.atom_adjoints()[0] == g0);
}
