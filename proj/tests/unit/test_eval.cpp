#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "gen.hpp"
#include "pap/corpus.hpp"
#include "pap/eval.hpp"
#include "pap/parser.hpp"
#include "pap/printer.hpp"

using namespace pap;

namespace {

Outcome cantor_at(double x, std::uint64_t fuel) {
  Outcome f = eval_closed(builtin("cantor"));
  Value arg = Value::real(x);
  return pap::apply(f.value, std::span<const Value>(&arg, 1), fuel);
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("examples") {
    Outcome sq = eval_closed(parse("(fun (x : real) -> mul(x, x)) 3.0"), 100);
    REQUIRE(sq.ok());
    CHECK(sq.value.as_real() == 9.0);
    CHECK(sq.steps == 1);

    Outcome half = cantor_at(0.5, 100000);
    REQUIRE(half.ok());
    CHECK(half.value.as_real() == 0.0);
    CHECK(cantor_at(0.25, 100000).status == Status::FuelExhausted);
  }

  TEST_CASE("eval_closed") {
    CHECK(eval_closed(parse("1.0")).value.as_real() == 1.0);
    CHECK_THROWS_AS(eval_closed(parse("score(1.0)")), NotDeterministic);
    CHECK_THROWS_AS(eval_closed(parse("if true then 0.0 else sample")), NotDeterministic);
    CHECK_THROWS_AS(eval_closed(Term::var("x")), std::invalid_argument);
    Outcome loop = eval_closed(parse("let f = mu f (x : real) : real -> f (x) in f (0.0)"), 50);
    CHECK(loop.status == Status::FuelExhausted);
    CHECK(loop.steps == 50);
  }

  TEST_CASE("domain errors are bottom") {
    CHECK(eval_closed(parse("div(1.0, 0.0)")).status == Status::DomainError);
    CHECK(eval_closed(parse("(1.0, log(neg(1.0)))")).status == Status::DomainError);
    // Untaken branches are never evaluated.
    CHECK(eval_closed(parse("if true then 1.0 else log(0.0)")).ok());
  }

  TEST_CASE("evaluation order is left to right") {
    // The first operand diverges before the second can fail.
    Term t = parse("add((mu f (x : real) : real -> f (x)) 0.0, div(1.0, 0.0))");
    CHECK(eval_closed(t, 1000).status == Status::FuelExhausted);
    Term u = parse("add(div(1.0, 0.0), (mu f (x : real) : real -> f (x)) 0.0)");
    CHECK(eval_closed(u, 1000).status == Status::DomainError);
  }

  TEST_CASE("higher order and shadowing") {
    Term t = parse(
        "let x = 2.0 in\n"
        "let f = fun (y : real) -> mul(x, y) in\n"
        "let x = 10.0 in\n"
        "f x");
    CHECK(eval_closed(t).value.as_real() == 20.0);
    Term m = parse("match (1.0, (2.0, 3.0)) with (a, p) -> match p with (b, c) -> sub(c, add(a, b))");
    CHECK(eval_closed(m).value.as_real() == 0.0);
  }

  TEST_CASE("recursion") {
    Term fact = parse(
        "(mu f (n : real) : real -> if le(n, 1.0) then 1.0 else mul(n, f (sub(n, 1.0)))) 10.0");
    Outcome o = eval_closed(fact);
    REQUIRE(o.ok());
    CHECK(o.value.as_real() == 3628800.0);
  }

  TEST_CASE("sillyid is the identity") {
    testing::TermGen gen(21);
    Outcome f = eval_closed(builtin("sillyid"));
    std::vector<double> xs = {0.0, -0.0, std::numeric_limits<double>::max(), std::numeric_limits<double>::denorm_min(),
                              -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < 10000; ++i) {
      std::uint64_t bits = gen.rng().next_u64();
      double x = std::bit_cast<double>(bits);
      if (std::isnan(x)) x = gen.rng().uniform(-1e6, 1e6);
      xs.push_back(x);
    }
    for (double x : xs) {
      Value arg = Value::real(x);
      Outcome o = pap::apply(f.value, std::span<const Value>(&arg, 1));
      REQUIRE(o.ok());
      // -0.0 maps to 0.0: the eq test treats the zeros as equal.
      if (x == 0.0)
        CHECK(o.value.as_real() == 0.0);
      else
        REQUIRE(testing::same_bits(o.value.as_real(), x));
    }
  }

  TEST_CASE("cantor diverger") {
    for (double x : {0.5, 0.125, 0.375, 0.9, 0.1}) CHECK(cantor_at(x, 100000).ok());
    for (double x : {0.0, 0.25, 0.75, 1.0}) CHECK(cantor_at(x, 100000).status == Status::FuelExhausted);
  }

  TEST_CASE("fuel monotonicity and determinism on generated terms") {
    testing::TermGen gen(22, {.max_depth = 5});
    int vals = 0;
    for (int i = 0; i < 1000; ++i) {
      Type ty = gen.ground_type(2);
      Term t = gen.closed(ty);
      Outcome a = eval_closed(t, 200);
      Outcome b = eval_closed(t, 200);
      INFO(print_term(t));
      REQUIRE(testing::same_outcome(a, b));
      if (a.ok()) {
        ++vals;
        REQUIRE(testing::value_has_type(a.value, ty));
        for (std::uint64_t m : {a.steps, a.steps + 1, std::uint64_t{1000}, kDefaultFuel}) {
          Outcome c = eval_closed(t, std::max<std::uint64_t>(m, 1));
          REQUIRE(c.ok());
          REQUIRE(identical(c.value, a.value));
        }
      } else if (a.status == Status::FuelExhausted) {
        CHECK(a.steps == 200);
      }
    }
    CHECK(vals > 500);
  }

  TEST_CASE("environment and substitution agree") {
    testing::TermGen gen(23, {.max_depth = 4});
    for (int i = 0; i < 500; ++i) {
      Type tx = gen.any_type(1);
      Type ty = gen.ground_type(2);
      Term body = gen.term(Context{}.extend("x", tx), ty);
      Term v = gen.value_term(tx);
      Outcome vx = eval_closed(v);
      REQUIRE(vx.ok());
      Outcome by_env = eval(body, Env{}.bind("x", vx.value), 500);
      Outcome by_sub = eval_closed(substitute(body, "x", v), 500);
      INFO(print_term(body));
      REQUIRE(by_env.status == by_sub.status);
      REQUIRE(by_env.steps == by_sub.steps);
      if (by_env.ok()) REQUIRE(identical(by_env.value, by_sub.value));
    }
  }
}
