// Runs the eleven acceptance criteria and prints one line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "gen.hpp"
#include "pap/ad.hpp"
#include "pap/corpus.hpp"
#include "pap/format.hpp"
#include "pap/gd.hpp"
#include "pap/numcheck.hpp"
#include "pap/parser.hpp"
#include "pap/prob.hpp"

using namespace pap;
using json = nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool bits_equal(double a, double b) { return testing::same_bits(a, b); }

// 1 -------------------------------------------------------------------------

Verdict sillyid_grad() {
  Rng rng(101);
  std::vector<std::string> args = {"grad", std::string(PAP_PROGRAMS_DIR) + "/sillyid.pap", "--stable", "--at", "0.0"};
  std::vector<double> pts;
  while (pts.size() < 100) {
    double x = rng.uniform(-10.0, 10.0);
    if (x == 0.0) continue;
    pts.push_back(x);
    args.push_back(format_real(x));
  }
  std::ostringstream out, err;
  int code = cli::dispatch(args, out, err);
  if (code != 0) return {false, "dispatch exit " + std::to_string(code) + ": " + err.str()};
  json j = json::parse(out.str());
  const json& reps = j["reports"];
  if (reps.size() != 101) return {false, "expected 101 reports"};
  bool zero_ok = reps[0]["ad"].get<double>() == 0.0 && reps[0]["point"].get<double>() == 0.0;
  int ones = 0;
  for (std::size_t i = 1; i < reps.size(); ++i)
    if (reps[i]["ad"].get<double>() == 1.0 && reps[i]["point"].get<double>() == pts[i - 1]) ++ones;
  return {zero_ok && ones == 100, fmt("grad(0) = %s, grad = 1.0 at %d/100 nonzero points",
                                      format_real(reps[0]["ad"].get<double>()).c_str(), ones)};
}

// 2 -------------------------------------------------------------------------

Verdict audit() {
  std::size_t programs = 0, points = 0, interior_dis = 0, boundary_pts = 0, boundary_dis = 0, undefined = 0,
              disagreements = 0;
  // Exact tie points of the corpus's comparisons, audited on top of the
  // uniform draws so the boundary path is exercised too.
  std::size_t kink_points = 0, kink_interior_dis = 0, kink_boundary_dis = 0;
  const double kinks[] = {-1.0, 0.0, 0.5, 1.0};
  std::set<Family> families;
  for (const AuditProgram& p : audit_corpus()) {
    Term t = parse(p.source);
    Rng rng(202, programs);
    std::vector<double> xs(1000);
    for (double& x : xs) x = rng.uniform(p.lo, p.hi);
    IntensionalAudit a = check_intensional(t, xs);
    ++programs;
    families.insert(p.family);
    points += a.reports.size();
    interior_dis += a.interior_disagreements;
    boundary_pts += a.boundary_points;
    boundary_dis += a.boundary_disagreements;
    undefined += a.undefined;
    for (const DerivReport& r : a.reports)
      if (r.defined && !r.agrees) ++disagreements;
    std::vector<double> ks;
    for (double k : kinks)
      if (k >= p.lo && k <= p.hi) ks.push_back(k);
    IntensionalAudit b = check_intensional(t, ks);
    kink_points += b.reports.size();
    kink_interior_dis += b.interior_disagreements;
    kink_boundary_dis += b.boundary_disagreements;
  }
  bool pass = programs >= 20 && families.size() == 3 && interior_dis == 0 && disagreements == boundary_dis &&
              kink_interior_dis == 0;
  return {pass, fmt("%zu programs, %zu points: interior disagreements %zu, boundary points %zu (%zu disagree), "
                    "undefined %zu; %zu tie points: %zu boundary disagreements, %zu interior",
                    programs, points, interior_dis, boundary_pts, boundary_dis, undefined, kink_points,
                    kink_boundary_dis, kink_interior_dis)};
}

// 3 -------------------------------------------------------------------------

Verdict counterexample() {
  Term p = builtin("p");
  std::string detail;
  bool pass = true;
  for (double x0 : {5.0, -3.7, 0.0, -2.0}) {
    GDConfig cfg;
    cfg.eps = 1.0;
    cfg.T = 100;
    cfg.mode = GradMode::AD;
    std::vector<double> start = {x0};
    Trajectory tr = gd_run(p, start, cfg);
    bool ok = tr.x.size() == 101;
    if (ok) {
      double x1 = tr.x[1][0];
      ok = x1 <= 0.0 && x1 == std::floor(x1);
      for (std::size_t t = 1; ok && t < 100; ++t) ok = tr.x[t + 1][0] == tr.x[t][0] - 1.0;
      ok = ok && tr.x[100][0] <= -95.0;
    }
    pass = pass && ok;
    detail += fmt("%sx0=%s -> x1=%s x100=%s", detail.empty() ? "" : ", ", format_real(x0).c_str(),
                  tr.x.size() > 1 ? format_real(tr.x[1][0]).c_str() : "?",
                  format_real(tr.x.back()[0]).c_str());
  }
  return {pass, detail};
}

// 4 -------------------------------------------------------------------------

Verdict stationary_trap() {
  Term q = builtin("q");
  bool stuck = true;
  for (double eps : {0.01, 0.1, 1.0}) {
    GDConfig cfg;
    cfg.eps = eps;
    cfg.T = 100;
    std::vector<double> x0 = {1.0};
    Trajectory tr = gd_run(q, x0, cfg);
    stuck = stuck && tr.x.size() == 101;
    for (const auto& x : tr.x) stuck = stuck && bits_equal(x[0], 1.0);
  }
  FDResult fd = fd_derivative(as_scalar_fn(q), 1.0);
  bool fd_ok = std::abs(fd.estimate - 2.0) <= 1e-4;
  return {stuck && fd_ok, fmt("iterates bitwise 1.0 for eps in {0.01, 0.1, 1}: %s; FD derivative at 1 = %.9f",
                              stuck ? "yes" : "no", fd.estimate)};
}

// 5 -------------------------------------------------------------------------

Verdict randomized() {
  RandomizedGDConfig cfg;
  cfg.L = 1.0;
  cfg.n_seeds = 200;
  cfg.x0_lo = -10.0;
  cfg.x0_hi = 10.0;
  cfg.seed = 0;
  cfg.gd.T = 100000;
  cfg.gd.stop_tol = 1e-3;
  RandomizedGDReport r = randomized_gd(builtin("p"), cfg);
  std::size_t non_monotone = 0;
  for (const SeedResult& s : r.seeds)
    if (s.converged && !s.monotone) ++non_monotone;
  bool pass = r.seeds.size() == 200 && r.converged_fraction >= 0.95 && non_monotone == 0;
  return {pass, fmt("converged %zu/200 = %.3f +- %.3f (95%% CI), indeterminate %zu, non-monotone converged %zu",
                    r.converged, r.converged_fraction, r.ci_halfwidth, r.indeterminate, non_monotone)};
}

// 6 -------------------------------------------------------------------------

Verdict quadratics() {
  Rng rng(606);
  std::size_t ok = 0;
  double worst_grad = 0.0;
  std::size_t max_steps = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 2 + rng.below(2);
    const double L = rng.uniform(0.5, 5.0);
    std::vector<double> a(d), c(d);
    std::string body = "0.0";
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = i == 0 ? L : rng.uniform(0.5 * L, L);
      c[i] = rng.uniform(-5.0, 5.0);
      std::string xi = "x" + std::to_string(i);
      std::string diff = "sub(" + xi + ", " + format_real(c[i]) + ")";
      body = "add(" + body + ", mul(" + format_real(0.5 * a[i]) + ", mul(" + diff + ", " + diff + ")))";
    }
    std::string src;
    for (std::size_t i = 0; i < d; ++i) src += "fun (x" + std::to_string(i) + " : real) -> ";
    src += body;
    Term f = parse(src);

    GDConfig cfg;
    cfg.eps = rng.uniform(0.1 / L, 1.9 / L);
    cfg.T = 100000;
    cfg.mode = GradMode::FD;
    cfg.stop_tol = 1e-6;
    std::vector<double> x0(d);
    for (double& x : x0) x = rng.uniform(-10.0, 10.0);
    Trajectory tr = gd_run(f, x0, cfg);

    // Analytic gradient at the final iterate as an independent check.
    double g2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double gi = a[i] * (tr.x.back()[i] - c[i]);
      g2 += gi * gi;
    }
    double g = std::sqrt(g2);
    worst_grad = std::max(worst_grad, g);
    max_steps = std::max(max_steps, tr.x.size() - 1);
    if (tr.termination == Termination::Converged && tr.monotone() && g < 1e-6) ++ok;
  }
  return {ok == 50, fmt("%zu/50 monotone and converged; worst final |grad| %.2e; max steps %zu", ok, worst_grad,
                        max_steps)};
}

// 7 -------------------------------------------------------------------------

Verdict weighted_sampler() {
  struct Row {
    const char* src;
    std::vector<double> trace;
    Status status;
    double weight;
    std::size_t remainder;
    std::optional<double> value;
  };
  const Row table[] = {
      {"sample", {}, Status::Incomplete, 0.0, 0, std::nullopt},
      {"sample", {0.3}, Status::Val, 1.0, 0, 0.3},
      {"sample", {0.3, 0.4}, Status::Val, 1.0, 1, 0.3},
      {"score(-1.0)", {}, Status::Val, 0.0, 0, std::nullopt},
      {"score(2.0)", {0.5}, Status::Val, 2.0, 1, std::nullopt},
      {"let _ = score(2.5) in sample", {0.7}, Status::Val, 2.5, 0, 0.7},
      {"let _ = score(2.5) in sample", {}, Status::Incomplete, 0.0, 0, std::nullopt},
      {"let _ = score(-3.0) in let _ = score(2.0) in sample", {0.1}, Status::Val, 0.0, 0, 0.1},
      {"let x = sample in let _ = score(mul(x, 4.0)) in add(x, sample)", {0.25, 0.5}, Status::Val, 1.0, 0, 0.75},
  };
  std::size_t rows_ok = 0;
  for (const Row& r : table) {
    WeightedOutcome o = run_trace(parse(r.src), r.trace);
    bool ok = o.status == r.status && bits_equal(o.weight, r.weight) && o.remainder.size() == r.remainder;
    if (r.value) ok = ok && o.ok() && bits_equal(o.value.as_real(), *r.value);
    if (ok) ++rows_ok;
  }

  testing::TermGen gen(707, {.max_depth = 4, .probabilistic = true});
  std::size_t pairs_ok = 0, completed = 0;
  for (int i = 0; i < 200; ++i) {
    Type t1 = gen.ground_type(1), t2 = gen.ground_type(1);
    Term a = gen.closed(t1);
    Term b = gen.term(Context{}.extend("x", t1), t2);
    std::vector<double> r(gen.rng().below(6));
    for (double& u : r) u = gen.rng().uniform();
    WeightedOutcome whole = run_trace(Term::let("x", t1, a, b), r, 10000);
    WeightedOutcome first = run_trace(a, r, 10000);
    bool ok;
    if (!first.ok()) {
      ok = whole.status == first.status && whole.weight == 0.0;
    } else {
      WeightedOutcome second = run_trace(b, first.remainder, 10000, Env{}.bind("x", first.value));
      ok = whole.status == second.status;
      if (ok && whole.ok()) {
        ++completed;
        ok = identical(whole.value, second.value) && bits_equal(whole.weight, first.weight * second.weight) &&
             whole.remainder == second.remainder;
      }
    }
    if (ok) ++pairs_ok;
  }
  std::size_t rows = std::size(table);
  return {rows_ok == rows && pairs_ok == 200, fmt("table %zu/%zu rows; bind %zu/200 pairs (%zu ran to a value)",
                                                  rows_ok, rows, pairs_ok, completed)};
}

// 8 -------------------------------------------------------------------------

Verdict ae_audit() {
  AeConfig cfg;
  AeReport g = ae_diff_check(builtin("geometric"), 10000, cfg);

  // Simulated traces essentially never land within a step of the kink, so a
  // few are placed there on purpose.
  AeReport k = ae_diff_check(builtin("abs_kink"), 10000, cfg);
  std::vector<std::vector<double>> near;
  for (int j = 1; j <= 8; ++j) {
    near.push_back({0.5 + j * 0x1p-20});
    near.push_back({0.5 - j * 0x1p-20});
  }
  AeReport kn = ae_diff_check_at(builtin("abs_kink"), near, cfg);
  const double h = cfg.fd.h;
  std::size_t flags = 0, far = 0;
  for (const AeReport* r : {&k, &kn})
    for (const BoundaryFlag& f : r->flags) {
      ++flags;
      if (std::abs(f.location - 0.5) > 10 * h) ++far;
    }
  bool pass = g.interior_disagreements == 0 && g.interior_checks > 0 && flags > 0 && far == 0 &&
              k.interior_disagreements == 0;
  return {pass, fmt("geometric: %zu interior checks, %zu disagreements; abs-kink: %zu flags, %zu farther than 10h "
                    "from 0.5, %zu interior disagreements",
                    g.interior_checks, g.interior_disagreements, flags, far,
                    k.interior_disagreements + kn.interior_disagreements)};
}

// 9 -------------------------------------------------------------------------

Verdict integrator() {
  SimConfig cfg;
  const std::size_t N = 100000;
  Estimate mass = estimate(builtin("scaled_uniform"), TestFn::total_mass(), N, cfg);
  Estimate mean = estimate(builtin("uniform"), TestFn::coordinate_mean(0), N, cfg);
  Estimate box = estimate(builtin("diag"), TestFn::in_box({{0.0, 0.5}}), N, cfg);
  auto within = [](const Estimate& e, double want) { return std::abs(e.mean - want) <= 4 * e.halfwidth; };
  bool pass = within(mass, 2.0) && within(mean, 0.5) && within(box, 0.5);
  return {pass, fmt("mass %.5f +- %.5f, mean %.5f +- %.5f, box %.5f +- %.5f", mass.mean, mass.halfwidth, mean.mean,
                    mean.halfwidth, box.mean, box.halfwidth)};
}

// 10 ------------------------------------------------------------------------

Verdict support_dimension() {
  DimConfig cfg;
  RankHistogram diag = support_dim(builtin("diag"), 1000, cfg);
  RankHistogram pair = support_dim(builtin("pair2"), 1000, cfg);
  RankHistogram mix = support_dim(builtin("mixture"), 1000, cfg);
  double f1 = mix.fraction(1);
  bool pass = diag.samples() == 1000 && diag.fraction(1) == 1.0 && pair.samples() == 1000 &&
              pair.fraction(2) == 1.0 && mix.samples() == 1000 && f1 >= 0.44 && f1 <= 0.56;
  return {pass, fmt("diag rank-1 %.3f, pair rank-2 %.3f, mixture rank-1 %.3f", diag.fraction(1), pair.fraction(2),
                    f1)};
}

// 11 ------------------------------------------------------------------------

// Exact ternary digits of k / 2^m: the number is in the Cantor set iff no
// digit is 1. Digits are periodic in the residue, so stop on a repeat.
bool in_cantor(std::uint64_t k, int m) {
  const std::uint64_t den = std::uint64_t{1} << m;
  if (k == 0 || k == den) return true;
  std::set<std::uint64_t> seen;
  while (seen.insert(k).second) {
    std::uint64_t t = 3 * k;
    std::uint64_t digit = t / den;
    if (digit == 1) return false;
    k = t % den;
    if (k == 0) return true;
  }
  return true;
}

Verdict interpreter() {
  testing::TermGen gen(1111, {.max_depth = 5});
  std::size_t mono_ok = 0, det_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    Term t = gen.closed(gen.ground_type(2));
    Outcome a = eval_closed(t, 300);
    Outcome b = eval_closed(t, 300);
    if (testing::same_outcome(a, b)) ++det_ok;
    bool mono = true;
    if (a.ok()) {
      for (std::uint64_t m : {a.steps, a.steps + 1, a.steps * 2 + 7, std::uint64_t{100000}}) {
        Outcome c = eval_closed(t, std::max<std::uint64_t>(m, 1));
        mono = mono && c.ok() && identical(c.value, a.value);
      }
    }
    if (mono) ++mono_ok;
  }

  Outcome cantor = eval_closed(builtin("cantor"));
  auto run_at = [&](double x) {
    Value v = Value::real(x);
    return pap::apply(cantor.value, std::span<const Value>(&v, 1), 100000);
  };

  Rng rng(1112);
  std::size_t halted = 0, drawn = 0;
  while (drawn < 100) {
    int m = 1 + static_cast<int>(rng.below(30));
    std::uint64_t k = rng.below((std::uint64_t{1} << m) + 1);
    if (in_cantor(k, m)) continue;
    ++drawn;
    if (run_at(std::ldexp(static_cast<double>(k), -m)).ok()) ++halted;
  }

  std::vector<double> cantor_points;
  for (int m = 0; m <= 18; ++m)
    for (std::uint64_t k = 0; k <= (std::uint64_t{1} << m); ++k) {
      if ((k & 1) == 0 && m > 0) continue;  // already seen at a smaller m
      if (in_cantor(k, m)) cantor_points.push_back(std::ldexp(static_cast<double>(k), -m));
    }
  std::size_t exhausted = 0;
  std::set<double> distinct;
  for (int i = 0; i < 20; ++i) {
    double x = cantor_points[rng.below(cantor_points.size())];
    distinct.insert(x);
    if (run_at(x).status == Status::FuelExhausted) ++exhausted;
  }
  bool all_points_diverge = true;
  for (double x : cantor_points) all_points_diverge = all_points_diverge && run_at(x).status == Status::FuelExhausted;

  bool pass = mono_ok == 1000 && det_ok == 1000 && halted == 100 && exhausted == 20 && all_points_diverge;
  return {pass, fmt("monotone %zu/1000, deterministic %zu/1000; cantor halts on %zu/100 non-Cantor dyadics, "
                    "exhausts fuel on %zu/20 probes (%zu distinct of %zu representable Cantor dyadics)",
                    mono_ok, det_ok, halted, exhausted, distinct.size(), cantor_points.size())};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "sillyid AD derivative", 1, sillyid_grad},
      {2, "AD vs FD audit", 30, audit},
      {3, "counterexample divergence", 1, counterexample},
      {4, "stationary-point trap", 1, stationary_trap},
      {5, "randomized convergence", 60, randomized},
      {6, "true-gradient GD on quadratics", 10, quadratics},
      {7, "weighted-sampler semantics", 5, weighted_sampler},
      {8, "weight-function a.e. differentiability", 60, ae_audit},
      {9, "Monte Carlo integrator", 10, integrator},
      {10, "support dimension", 30, support_dimension},
      {11, "interpreter and fuel", 30, interpreter},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.budget_s;
    bool pass = v.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s (%.3f s, budget %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                in_time ? "" : ", over budget", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
