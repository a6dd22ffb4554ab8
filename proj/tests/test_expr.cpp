#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "dwarp/expr.hpp"

using namespace dwarp;

namespace {

double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ScalarExpr random_leaf(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return ScalarExpr::var("x");
    case 1: return ScalarExpr::var("y");
    default: return ScalarExpr(0.25 + 2.0 * uniform_real(rng));
  }
}

ScalarExpr random_expr(std::mt19937_64& rng, int depth) {
  if (depth == 0) return random_leaf(rng);
  switch (rng() % 8) {
    case 0: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 1: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 2: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 3: return sin(random_expr(rng, depth - 1));
    case 4: return cos(random_expr(rng, depth - 1));
    case 5: return exp(ScalarExpr(0.3) * random_expr(rng, depth - 1));
    case 6: return pow(ScalarExpr(1.0) + random_expr(rng, depth - 1) *
                                             random_expr(rng, depth - 1),
                       1, 2);
    default: return random_leaf(rng);
  }
}

}  // namespace

TEST_CASE("parse: grammar instantiation") {
  const ScalarExpr e = parse("r*sin(th)");
  CHECK(e.kind() == ScalarExpr::Kind::kMul);
  CHECK(e.child(0).kind() == ScalarExpr::Kind::kVariable);
  CHECK(e.child(0).var_name() == "r");
  CHECK(e.child(1).kind() == ScalarExpr::Kind::kSin);

  const ScalarExpr one = parse("1");
  CHECK(one.is_constant());
  CHECK(one.value() == 1.0);
}

TEST_CASE("parse: hyperbolic identity evaluates to 1") {
  const ScalarExpr e = parse("cosh(z)^2 - sinh(z)^2");
  const double v = eval(e, {{"z", 0.7}});
  CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parse: errors carry byte offsets") {
  CHECK_THROWS_AS(parse("1 + * 2"), ParseError);
  try {
    parse("1 + * 2");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse("2 * tan(x)");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unknown function 'tan'") != std::string::npos);
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse("x + "), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("x ^ y"), ParseError);  // exponents are rational literals
}

TEST_CASE("parse: rational exponents") {
  CHECK(eval(parse("x^2"), {{"x", 3.0}}) == doctest::Approx(9.0));
  CHECK(eval(parse("x^-1"), {{"x", 4.0}}) == doctest::Approx(0.25));
  CHECK(eval(parse("x^(1/2)"), {{"x", 9.0}}) == doctest::Approx(3.0));
  CHECK(eval(parse("x^(-3/2)"), {{"x", 4.0}}) == doctest::Approx(0.125));
}

TEST_CASE("eval: examples and domain errors") {
  CHECK(eval(parse("r"), {{"r", 2.0}}) == 2.0);
  CHECK(eval(parse("exp(x)*cos(y)"), {{"x", 0.0}, {"y", 0.0}}) == 1.0);
  CHECK_THROWS_AS(eval(parse("1/t"), {{"t", 0.0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("log(x)"), {{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("log(x)"), {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("sqrt(x)"), {{"x", -4.0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("x^(1/2)"), {{"x", -4.0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("x + y"), {{"x", 1.0}}), UnboundVariableError);
  CHECK_THROWS_AS(eval(parse("exp(x)"), {{"x", 1e6}}), DomainError);   // overflow
  CHECK_THROWS_AS(eval(parse("x*x"), {{"x", 1e200}}), DomainError);    // overflow
}

TEST_CASE("eval: deterministic bit-identical results") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const ScalarExpr e = random_expr(rng, 4);
    const VarAssignment a{{"x", 0.37}, {"y", 1.21}};
    try {
      const double v1 = eval(e, a);
      const double v2 = eval(e, a);
      CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
    } catch (const DomainError&) {
    }
  }
}

TEST_CASE("diff: polynomial and trigonometric rules") {
  const ScalarExpr x = ScalarExpr::var("x");
  CHECK(eval(diff(x * x, "x"), {{"x", 3.0}}) == doctest::Approx(6.0));
  CHECK(eval(diff(sin(x), "x"), {{"x", 0.0}}) == doctest::Approx(1.0));
  // Derivative with respect to an absent variable is zero.
  CHECK(eval(diff(sin(x), "q"), {{"x", 0.5}}) == 0.0);
}

TEST_CASE("diff: product of log and square, frozen against the fd oracle") {
  const ScalarExpr e = parse("log(r)*s^2");
  const VarAssignment a{{"r", 2.0}, {"s", 3.0}};
  const double fd = fd_diff(e, "s", a, 1e-4);
  const double exact = eval(diff(e, "s"), a);
  // 2 s log r = 6 log 2
  CHECK(exact == doctest::Approx(6.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(exact == doctest::Approx(4.1588830833596715).epsilon(1e-12));
  CHECK(std::abs(exact - fd) < 1e-7);
}

TEST_CASE("fd_diff: reference values") {
  CHECK(std::abs(fd_diff(parse("x^2"), "x", {{"x", 3.0}}, 1e-4) - 6.0) < 1e-7);
  CHECK(std::abs(fd_diff(parse("sin(x)"), "x", {{"x", M_PI / 2}}, 1e-4)) < 1e-8);
  CHECK(std::abs(fd_diff(parse("log(r)"), "r", {{"r", 2.0}}, 1e-4) - 0.5) < 1e-8);
  CHECK_THROWS_AS(fd_diff(parse("log(r)"), "r", {{"r", 0.00005}}, 1e-4), DomainError);
}

TEST_CASE("diff is linear at 100 random points") {
  std::mt19937_64 rng(7);
  const ScalarExpr e1 = parse("sin(x)*y + x^2");
  const ScalarExpr e2 = parse("exp(x/4)*cos(y)");
  const double a = 1.7, b = -0.6;
  const ScalarExpr combo = ScalarExpr(a) * e1 + ScalarExpr(b) * e2;
  const ScalarExpr d_combo = diff(combo, "x");
  const ScalarExpr d1 = diff(e1, "x"), d2 = diff(e2, "x");
  for (int t = 0; t < 100; ++t) {
    const VarAssignment at{{"x", 4.0 * uniform_real(rng) - 2.0},
                           {"y", 4.0 * uniform_real(rng) - 2.0}};
    CHECK(eval(d_combo, at) ==
          doctest::Approx(a * eval(d1, at) + b * eval(d2, at)).epsilon(1e-12));
  }
}

TEST_CASE("mixed partials commute at random points") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    const ScalarExpr e = random_expr(rng, 4);
    const ScalarExpr dxy = diff(diff(e, "x"), "y");
    const ScalarExpr dyx = diff(diff(e, "y"), "x");
    for (int s = 0; s < 4; ++s) {
      const VarAssignment at{{"x", 2.0 * uniform_real(rng) - 1.0},
                             {"y", 2.0 * uniform_real(rng) - 1.0}};
      try {
        const double a = eval(dxy, at);
        const double b = eval(dyx, at);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
      } catch (const DomainError&) {
      }
    }
  }
}

TEST_CASE("diff agrees with the finite-difference oracle") {
  std::mt19937_64 rng(13);
  int checked = 0;
  while (checked < 100) {
    const ScalarExpr e = random_expr(rng, 4);
    const VarAssignment at{{"x", 1.5 * uniform_real(rng) - 0.75},
                           {"y", 1.5 * uniform_real(rng) - 0.75}};
    try {
      const double exact = eval(diff(e, "x"), at);
      const double fd = fd_diff(e, "x", at, 1e-4);
      const double rel = std::abs(exact - fd) / std::max(1.0, std::abs(exact));
      CHECK(rel <= 1e-5);
      ++checked;
    } catch (const DomainError&) {
    }
  }
}

TEST_CASE("print/parse round trip preserves values") {
  std::mt19937_64 rng(17);
  int checked = 0;
  while (checked < 60) {
    const ScalarExpr e = random_expr(rng, 4);
    const ScalarExpr back = parse(to_string(e));
    const VarAssignment at{{"x", 2.0 * uniform_real(rng) - 1.0},
                           {"y", 2.0 * uniform_real(rng) - 1.0}};
    try {
      const double v1 = eval(e, at);
      const double v2 = eval(back, at);
      CHECK(v1 == doctest::Approx(v2).epsilon(1e-15));
      ++checked;
    } catch (const DomainError&) {
    }
  }
  // Grammar subtleties: '^' binds to the preceding base, '-' to a base.
  CHECK(eval(parse("-x^2"), {{"x", 3.0}}) == 9.0);
  CHECK(eval(parse("-(x^2)"), {{"x", 3.0}}) == -9.0);
  CHECK(eval(parse(to_string(-pow(ScalarExpr::var("x"), 2))), {{"x", 3.0}}) == -9.0);
}

TEST_CASE("substitute composes expressions") {
  const ScalarExpr rho = parse("sqrt(t^2 + 1)");
  const ScalarExpr composed = substitute(rho, {{"t", parse("sinh(s)")}});
  CHECK(eval(composed, {{"s", 0.83}}) == doctest::Approx(std::cosh(0.83)).epsilon(1e-14));
  const auto vars = free_variables(composed);
  CHECK(vars.size() == 1);
  CHECK(vars.count("s") == 1);
}

TEST_CASE("constant folding keeps trees small but honest") {
  CHECK((ScalarExpr(0.0) + ScalarExpr::var("x")).kind() == ScalarExpr::Kind::kVariable);
  CHECK((ScalarExpr(1.0) * ScalarExpr::var("x")).kind() == ScalarExpr::Kind::kVariable);
  CHECK((ScalarExpr::var("x") * ScalarExpr(0.0)).is_constant());
  CHECK(pow(ScalarExpr::var("x"), 0).is_constant());
  // A division whose denominator happens to vanish is not folded away; it
  // errors at eval time.
  const ScalarExpr bad = ScalarExpr(1.0) / (ScalarExpr::var("x") - ScalarExpr::var("x"));
  CHECK_THROWS_AS(eval(bad, {{"x", 1.0}}), DomainError);
}
