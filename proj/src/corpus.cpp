#include "pap/corpus.hpp"

#include <stdexcept>

#include "pap/format.hpp"
#include "pap/parser.hpp"

namespace pap {

std::string counterexample_source(double lr) {
  const std::string l = format_real(lr);
  return "let g = mu g (a : real * real) : real ->\n"
         "  match a with (x, n) ->\n"
         "    if gt(x, 0.0) then div(mul(sub(x, n), sub(x, n)), mul(" + l + ", 2.0))\n"
         "    else if eq(x, 0.0) then add(div(x, " + l + "), div(mul(n, n), mul(2.0, " + l + ")))\n"
         "    else g (add(x, 1.0), add(n, 1.0))\n"
         "in fun (x : real) -> g (x, 0.0)\n";
}

const std::vector<NamedProgram>& builtin_programs() {
  static const std::vector<NamedProgram> programs = {
      {"sillyid", "fun (x : real) -> if eq(x, 0.0) then 0.0 else x\n"},
      {"p", counterexample_source(1.0)},
      {"q", "fun (x : real) -> if eq(x, 1.0) then 1.0 else mul(x, x)\n"},
      {"square", "fun (x : real) -> mul(x, x)\n"},
      {"half_square", "fun (x : real) -> mul(0.5, mul(x, x))\n"},
      {"abs", "fun (x : real) -> abs(x)\n"},
      {"cantor",
       "mu c (x : real) : real ->\n"
       "  if gt(x, 0.3333333333333333) then\n"
       "    (if lt(x, 0.6666666666666666) then 0.0 else c (sub(mul(3.0, x), 2.0)))\n"
       "  else c (mul(3.0, x))\n"},
      {"geometric", "(mu g (u : unit) : real -> if lt(sample, 0.5) then 0.0 else add(1.0, g ())) ()\n"},
      {"abs_kink", "score(abs(sub(sample, 0.5)))\n"},
      {"diag", "let u = sample in (u, u)\n"},
      {"pair2", "(sample, sample)\n"},
      {"mixture", "if lt(sample, 0.5) then (let u = sample in (u, u)) else (sample, sample)\n"},
      {"uniform", "sample\n"},
      {"scaled_uniform", "let _ = score(2.0) in sample\n"},
  };
  return programs;
}

const std::string& builtin_source(std::string_view name) {
  for (const NamedProgram& p : builtin_programs())
    if (p.name == name) return p.source;
  throw std::out_of_range("no builtin program named '" + std::string(name) + "'");
}

Term builtin(std::string_view name) { return parse(builtin_source(name)); }

const char* to_string(Family f) {
  switch (f) {
    case Family::Analytic:
      return "analytic";
    case Family::Piecewise:
      return "piecewise";
    case Family::Recursive:
      return "recursive";
  }
  return "?";
}

const std::vector<AuditProgram>& audit_corpus() {
  using F = Family;
  static const std::vector<AuditProgram> corpus = {
      {"square", F::Analytic, "fun (x : real) -> mul(x, x)", -3, 3},
      {"cubic", F::Analytic, "fun (x : real) -> sub(mul(x, mul(x, x)), mul(2.0, x))", -3, 3},
      {"exp_sin", F::Analytic, "fun (x : real) -> exp(sin(x))", -3, 3},
      {"cos_sq", F::Analytic, "fun (x : real) -> mul(cos(x), cos(x))", -3, 3},
      {"rational", F::Analytic, "fun (x : real) -> div(1.0, add(1.0, mul(x, x)))", -3, 3},
      {"log_quad", F::Analytic, "fun (x : real) -> log(add(mul(x, x), 1.0))", -3, 3},
      {"sqrt_quad", F::Analytic, "fun (x : real) -> sqrt(add(mul(x, x), 1.0))", -3, 3},
      {"let_chain", F::Analytic, "fun (x : real) -> let y = mul(x, 3.0) in sub(exp(neg(y)), y)", -1, 1},
      {"twice_sin", F::Analytic,
       "fun (x : real) ->\n"
       "  let twice = fun (f : real -> real) -> fun (z : real) -> f (f z) in\n"
       "  twice (fun (z : real) -> sin(z)) x",
       -3, 3},
      {"log_domain", F::Analytic, "fun (x : real) -> mul(x, log(x))", 0.01, 3},
      {"sillyid", F::Piecewise, "fun (x : real) -> if eq(x, 0.0) then 0.0 else x", -1, 1},
      {"q", F::Piecewise, "fun (x : real) -> if eq(x, 1.0) then 1.0 else mul(x, x)", -3, 3},
      {"abs", F::Piecewise, "fun (x : real) -> abs(x)", -1, 1},
      {"relu", F::Piecewise, "fun (x : real) -> max(x, 0.0)", -1, 1},
      {"clip", F::Piecewise, "fun (x : real) -> min(max(x, neg(1.0)), 1.0)", -3, 3},
      {"branch", F::Piecewise, "fun (x : real) -> if lt(x, 0.5) then mul(x, x) else sub(mul(2.0, x), 0.25)", -3, 3},
      {"sign_of_sin", F::Piecewise, "fun (x : real) -> if gt(sin(x), 0.0) then x else neg(x)", -3, 3},
      {"two_kinks", F::Piecewise, "fun (x : real) -> add(abs(sub(x, 1.0)), abs(add(x, 1.0)))", -3, 3},
      {"pair_match", F::Piecewise,
       "fun (x : real) -> match (x, mul(x, 2.0)) with (a, b) -> if le(a, b) then mul(a, b) else sub(a, b)", -3, 3},
      {"p", F::Recursive, counterexample_source(1.0), -3, 3},
      {"cantor", F::Recursive, builtin_source("cantor"), 0, 1},
      {"power", F::Recursive,
       "fun (x : real) ->\n"
       "  (mu pow (a : real * real) : real ->\n"
       "     match a with (z, n) -> if le(n, 0.0) then 1.0 else mul(z, pow (z, sub(n, 1.0)))) (x, 5.0)",
       -2, 2},
      {"newton_sqrt", F::Recursive,
       "fun (x : real) ->\n"
       "  let c = add(mul(x, x), 1.0) in\n"
       "  (mu it (a : real * real) : real ->\n"
       "     match a with (y, k) -> if le(k, 0.0) then y else it (mul(0.5, add(y, div(c, y))), sub(k, 1.0))) (c, 8.0)",
       -3, 3},
      {"frac", F::Recursive, "mu fr (z : real) : real -> if lt(z, 1.0) then z else fr (sub(z, 1.0))", -1, 5},
      {"halving", F::Recursive,
       "mu h (z : real) : real -> if gt(abs(z), 1.0) then mul(2.0, h (mul(0.5, z))) else sin(z)", -6, 6},
  };
  return corpus;
}

}  // namespace pap
