#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "pap/corpus.hpp"
#include "pap/parser.hpp"
#include "pap/printer.hpp"
#include "pap/prob.hpp"

using namespace pap;

namespace {

using Trace = std::vector<double>;

WeightedOutcome on(const char* src, Trace r) { return run_trace(parse(src), r); }

Trace random_trace(Rng& rng, std::size_t max_len) {
  Trace r(rng.below(max_len + 1));
  for (double& x : r) x = rng.uniform();
  return r;
}

}  // namespace

TEST_SUITE("prob") {
  TEST_CASE("run_trace examples") {
    WeightedOutcome a = on("sample", {0.3});
    CHECK(a.status == Status::Val);
    CHECK(a.value.as_real() == 0.3);
    CHECK(a.weight == 1.0);
    CHECK(a.remainder.empty());

    WeightedOutcome b = on("sample", {});
    CHECK(b.status == Status::Incomplete);
    CHECK(b.weight == 0.0);
    CHECK(b.remainder.empty());

    WeightedOutcome c = on("let _ = score(2.5) in sample", {0.7});
    CHECK(c.status == Status::Val);
    CHECK(c.value.as_real() == 0.7);
    CHECK(c.weight == 2.5);
    CHECK(c.remainder.empty());

    WeightedOutcome d = on("score(-1.0)", {});
    CHECK(d.status == Status::Val);
    CHECK(d.value.is(ValueKind::Unit));
    CHECK(d.weight == 0.0);
    CHECK(d.remainder.empty());

    WeightedOutcome e = on("sample", {0.3, 0.4});
    CHECK(e.value.as_real() == 0.3);
    CHECK(e.remainder == Trace{0.4});
    CHECK(e.consumed == 1);

    WeightedOutcome f = on("let _ = score(2.0) in let _ = score(-0.0) in score(3.0)", {});
    CHECK(f.weight == 0.0);
    CHECK_FALSE(std::signbit(f.weight));

    WeightedOutcome g = on("let _ = score(2.0) in log(0.0)", {});
    CHECK(g.status == Status::DomainError);
    CHECK(g.weight == 0.0);

    WeightedOutcome h = on("(sample, (sample, sample))", {0.1, 0.2, 0.3});
    CHECK(h.value.first().as_real() == 0.1);
    CHECK(h.value.second().second().as_real() == 0.3);
  }

  TEST_CASE("weight_fn examples") {
    CHECK(weight_fn(parse("sample"), Trace{0.3}) == 1.0);
    CHECK(weight_fn(parse("sample"), Trace{0.3, 0.4}) == 0.0);
    CHECK(weight_fn(parse("let x = sample in score(x)"), Trace{0.6}) == 0.6);
    CHECK(weight_fn(parse("sample"), Trace{}) == 0.0);
    CHECK(weight_fn(parse("let _ = score(3.0) in div(1.0, 0.0)"), Trace{}) == 0.0);
  }

  TEST_CASE("simulate examples") {
    SimConfig cfg;
    cfg.seed = 7;
    for (std::uint64_t i = 0; i < 5; ++i) {
      Simulation s = simulate(parse("sample"), cfg, i);
      Rng rng(7, i);
      CHECK(s.outcome.value.as_real() == rng.uniform());
      CHECK(s.outcome.weight == 1.0);
      CHECK(s.trace.size() == 1);
    }
    for (std::uint64_t i = 0; i < 50; ++i) {
      Simulation g = simulate(builtin("geometric"), cfg, i);
      REQUIRE(g.outcome.ok());
      CHECK(g.outcome.weight == 1.0);
      CHECK(g.trace.size() == static_cast<std::size_t>(g.outcome.value.as_real()) + 1);
      // The recorded trace replays to the same outcome.
      WeightedOutcome replay = run_trace(builtin("geometric"), g.trace);
      CHECK(replay.value.as_real() == g.outcome.value.as_real());
      CHECK(replay.remainder.empty());
    }
    cfg.max_trace_len = 100;
    Simulation inf = simulate(parse("(mu f (u : unit) : real -> add(sample, f ())) ()"), cfg);
    CHECK(inf.outcome.status == Status::TraceOverflow);
    CHECK(inf.outcome.weight == 0.0);
    CHECK(inf.trace.size() == 100);
  }

  TEST_CASE("estimate examples") {
    SimConfig cfg;
    Estimate u = estimate(builtin("uniform"), TestFn::total_mass(), 100000, cfg);
    CHECK(u.mean == 1.0);
    CHECK(u.failures == 0);
    Estimate s = estimate(builtin("scaled_uniform"), TestFn::total_mass(), 100000, cfg);
    CHECK(s.mean == 2.0);
    Estimate m = estimate(builtin("uniform"), TestFn::coordinate_mean(0), 100000, cfg);
    CHECK(std::abs(m.mean - 0.5) <= 4 * m.halfwidth);
    Estimate b = estimate(builtin("diag"), TestFn::in_box({{0.0, 0.5}}), 100000, cfg);
    CHECK(std::abs(b.mean - 0.5) <= 4 * b.halfwidth);
    CHECK(b.halfwidth > 0.0);

    SimConfig tight;
    tight.max_trace_len = 3;
    Estimate f = estimate(builtin("geometric"), TestFn::total_mass(), 1000, tight);
    CHECK(f.failures > 0);
    CHECK(f.failure_fraction() == doctest::Approx(0.125).epsilon(0.3));
    CHECK_THROWS_AS(TestFn::coordinate_mean(3)(Value::real(1.0)), std::invalid_argument);
  }

  TEST_CASE("weight_grad examples") {
    WeightGrad a = weight_grad(parse("score(sample)"), Trace{0.4});
    REQUIRE(a.ok());
    CHECK(a.grad == std::vector<double>{1.0});
    WeightGrad b = weight_grad(parse("let x = sample in score(mul(x, x))"), Trace{0.5});
    CHECK(b.weight == 0.25);
    CHECK(b.grad == std::vector<double>{1.0});
    WeightGrad c = weight_grad(parse("if lt(sample, 0.5) then score(1.0) else score(2.0)"), Trace{0.3});
    CHECK(c.grad == std::vector<double>{0.0});
    WeightGrad d = weight_grad(parse("let x = sample in let y = sample in score(mul(x, exp(y)))"), Trace{0.5, 0.0});
    CHECK(d.grad[0] == 1.0);
    CHECK(d.grad[1] == 0.5);
    WeightGrad z = weight_grad(parse("score(sub(sample, 1.0))"), Trace{0.5});
    CHECK(z.weight == 0.0);
    CHECK(z.grad == std::vector<double>{0.0});
  }

  TEST_CASE("ae_diff_check examples") {
    AeConfig cfg;
    AeReport g = ae_diff_check(builtin("geometric"), 500, cfg);
    CHECK(g.interior_disagreements == 0);
    CHECK(g.interior_checks > 500);

    AeReport k = ae_diff_check_at(builtin("abs_kink"), {{0.5}, {0.5 + 1e-7}, {0.2}, {0.9}}, cfg);
    CHECK(k.interior_disagreements == 0);
    REQUIRE_FALSE(k.flags.empty());
    for (const BoundaryFlag& f : k.flags) CHECK(std::abs(f.location - 0.5) <= 10 * 0x1p-17);
    CHECK(k.interior_checks >= 2);

    AeReport n = ae_diff_check(parse("(sample, mul(sample, 2.0))"), 100, cfg);
    CHECK(n.interior_disagreements == 0);
    CHECK(n.flags.empty());
  }

  TEST_CASE("support_dim examples") {
    DimConfig cfg;
    RankHistogram diag = support_dim(builtin("diag"), 200, cfg);
    CHECK(diag.fraction(1) == 1.0);
    RankHistogram pair = support_dim(builtin("pair2"), 200, cfg);
    CHECK(pair.fraction(2) == 1.0);
    RankHistogram mix = support_dim(builtin("mixture"), 1000, cfg);
    CHECK(mix.fraction(1) + mix.fraction(2) == doctest::Approx(1.0));
    CHECK(mix.fraction(1) > 0.44);
    CHECK(mix.fraction(1) < 0.56);
    for (std::size_t i = 0; i < mix.samples(); ++i) CHECK(mix.dims[i].first == 2);

    std::vector<double> m = {1, 2, 2, 4};
    CHECK(numerical_rank(m, 2, 2, 1e-8) == 1);
    std::vector<double> id = {1, 0, 0, 1, 0, 0};
    CHECK(numerical_rank(id, 3, 2, 1e-8) == 2);
    std::vector<double> z = {0, 0};
    CHECK(numerical_rank(z, 1, 2, 1e-8) == 0);
  }

  TEST_CASE("weights are nonnegative") {
    testing::TermGen gen(51, {.max_depth = 5, .probabilistic = true});
    for (int i = 0; i < 500; ++i) {
      Term t = gen.closed(gen.ground_type(2));
      Trace r = random_trace(gen.rng(), 6);
      double w = weight_fn(t, r, 500);
      INFO(print_term(t));
      CHECK(w >= 0.0);
      CHECK_FALSE(std::signbit(w));
    }
  }

  TEST_CASE("bind is multiplicative") {
    testing::TermGen gen(52, {.max_depth = 4, .probabilistic = true});
    int complete = 0;
    for (int i = 0; i < 200; ++i) {
      Type t1 = gen.ground_type(1), t2 = gen.ground_type(1);
      Term a = gen.closed(t1);
      Term b = gen.term(Context{}.extend("x", t1), t2);
      Trace r = random_trace(gen.rng(), 5);
      WeightedOutcome whole = run_trace(Term::let("x", t1, a, b), r, 10000);
      WeightedOutcome first = run_trace(a, r, 10000);
      INFO(print_term(a) << "  ;  " << print_term(b));
      if (!first.ok()) {
        CHECK(whole.status == first.status);
        CHECK(whole.weight == 0.0);
        continue;
      }
      WeightedOutcome second = run_trace(b, first.remainder, 10000, Env{}.bind("x", first.value));
      REQUIRE(whole.status == second.status);
      if (!whole.ok()) continue;
      ++complete;
      CHECK(identical(whole.value, second.value));
      CHECK(testing::same_bits(whole.weight, first.weight * second.weight));
      CHECK(whole.remainder == second.remainder);
    }
    CHECK(complete > 50);
  }

  TEST_CASE("prefix stability and determinism") {
    testing::TermGen gen(53, {.max_depth = 5, .probabilistic = true});
    for (int i = 0; i < 500; ++i) {
      Term t = gen.closed(gen.ground_type(2));
      Trace r = random_trace(gen.rng(), 4);
      Trace s = random_trace(gen.rng(), 3);
      Trace rs = r;
      rs.insert(rs.end(), s.begin(), s.end());
      WeightedOutcome a = run_trace(t, r, 500);
      WeightedOutcome a2 = run_trace(t, r, 500);
      WeightedOutcome b = run_trace(t, rs, 500);
      INFO(print_term(t));
      CHECK(a.status == a2.status);
      CHECK(a.path == a2.path);
      CHECK(testing::same_bits(a.weight, a2.weight));
      if (a.status == Status::Incomplete) {
        CHECK((b.status == Status::Incomplete || b.consumed > r.size() || !b.ok()));
      } else if (a.ok()) {
        REQUIRE(b.ok());
        CHECK(identical(a.value, b.value));
        CHECK(testing::same_bits(a.weight, b.weight));
        CHECK(a.consumed == b.consumed);
        CHECK(a.steps == b.steps);
        Trace rest = a.remainder;
        rest.insert(rest.end(), s.begin(), s.end());
        CHECK(b.remainder == rest);
      } else {
        CHECK(b.status == a.status);
      }
    }
  }

  TEST_CASE("rank bound") {
    DimConfig cfg;
    for (const char* src : {"let u = sample in (u, (mul(u, u), u))", "(sample, 1.0)", "let u = sample in u",
                            "if lt(sample, 0.3) then (0.5, 0.5) else (sample, sample)"}) {
      RankHistogram h = support_dim(parse(src), 100, cfg);
      // Samples of rank >= r can't outnumber samples whose Jacobian admits rank r.
      for (std::size_t r = 0; r <= 3; ++r) {
        std::size_t at_least = 0, room = 0;
        for (auto [rank, n] : h.counts)
          if (rank >= r) at_least += n;
        for (auto [rows, cols] : h.dims)
          if (std::min(rows, cols) >= r) ++room;
        CHECK(at_least <= room);
      }
      CHECK(h.samples() == 100);
    }
  }
}
