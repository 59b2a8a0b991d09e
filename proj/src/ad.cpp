#include "pap/ad.hpp"

#include <cmath>

#include "pap/primitives.hpp"
#include "pap/typecheck.hpp"

namespace pap {

Term ad_transform(const Term& t) {
  const Term::Node& n = t.node();
  auto kids = [&] {
    std::vector<Term> out;
    out.reserve(n.kids.size());
    for (const Term& k : n.kids) out.push_back(ad_transform(k));
    return out;
  };
  switch (n.kind) {
    case TermKind::Var:
    case TermKind::ConstBool:
    case TermKind::ConstUnit:
      return t;
    case TermKind::ConstReal:
      return Term::pair(t, Term::real(0.0, n.span), n.span);
    case TermKind::Prim:
      if (n.dual) throw std::invalid_argument("term is already AD-translated (" + n.prim->name + "_D)");
      return Term::prim(*n.prim, kids(), true, n.span);
    case TermKind::Pair:
    case TermKind::MatchPair:
    case TermKind::If:
    case TermKind::App:
      return t.with_kids(kids());
    case TermKind::Lam:
      return Term::lam(n.name, dual_type(n.ty1), ad_transform(n.kids[0]), n.span);
    case TermKind::Mu:
      return Term::mu(n.name2, n.name, dual_type(n.ty1), dual_type(n.ty2), ad_transform(n.kids[0]), n.span);
    case TermKind::Sample:
      if (n.dual) throw std::invalid_argument("term is already AD-translated (sample_D)");
      return Term::sample(true, n.span);
    case TermKind::Score:
      if (n.dual) throw std::invalid_argument("term is already AD-translated (score_D)");
      return Term::score(ad_transform(n.kids[0]), true, n.span);
  }
  throw std::logic_error("ad_transform: unknown term kind");
}

RealSignature real_signature(const Type& ty) {
  RealSignature sig;
  Type cur = ty;
  while (cur.is(TypeKind::Arrow)) {
    int k = real_leaf_count(cur.left());
    if (k <= 0) throw std::invalid_argument("argument type " + to_string(cur.left()) + " is not a product of reals");
    sig.args.push_back(cur.left());
    sig.input_dim += static_cast<std::size_t>(k);
    cur = cur.right();
  }
  if (sig.args.empty()) throw std::invalid_argument("expected a function type, got " + to_string(ty));
  int m = real_leaf_count(cur);
  if (m <= 0) throw std::invalid_argument("result type " + to_string(cur) + " is not a product of reals");
  sig.result = cur;
  sig.output_dim = static_cast<std::size_t>(m);
  return sig;
}

Value lift_dual(const Type& ty, std::span<const double> x, std::span<const double> v, std::size_t& offset) {
  if (ty.is(TypeKind::Real)) {
    Value out = Value::pair(Value::real(x[offset]), Value::real(v[offset]));
    ++offset;
    return out;
  }
  if (ty.is(TypeKind::Prod)) {
    Value a = lift_dual(ty.left(), x, v, offset);
    Value b = lift_dual(ty.right(), x, v, offset);
    return Value::pair(std::move(a), std::move(b));
  }
  throw std::invalid_argument("lift_dual: " + to_string(ty) + " is not a product of reals");
}

void flatten_reals(const Value& v, std::vector<double>& out) {
  if (v.is(ValueKind::Real)) {
    out.push_back(v.as_real());
  } else if (v.is(ValueKind::Pair)) {
    flatten_reals(v.first(), out);
    flatten_reals(v.second(), out);
  } else {
    throw std::invalid_argument("flatten_reals: value " + to_string(v) + " is not a tuple of reals");
  }
}

void flatten_dual(const Value& v, std::vector<double>& primal, std::vector<double>& tangent) {
  if (!v.is(ValueKind::Pair)) throw std::invalid_argument("flatten_dual: " + to_string(v) + " is not a dual tuple");
  // A dual leaf is a pair of two reals; inner product nodes hold pairs.
  if (v.first().is(ValueKind::Real)) {
    primal.push_back(v.first().as_real());
    tangent.push_back(v.second().as_real());
    return;
  }
  flatten_dual(v.first(), primal, tangent);
  flatten_dual(v.second(), primal, tangent);
}

namespace {

// Argument literals cost no fuel, so t applied to them uses exactly the steps
// of the function itself.
Term literal(const Type& ty, std::span<const double> x, std::size_t& offset) {
  if (ty.is(TypeKind::Real)) return Term::real(x[offset++]);
  Term a = literal(ty.left(), x, offset);
  Term b = literal(ty.right(), x, offset);
  return Term::pair(std::move(a), std::move(b));
}

Term dual_literal(const Type& ty, std::span<const double> x, std::span<const double> v, std::size_t& offset) {
  if (ty.is(TypeKind::Real)) {
    Term out = Term::pair(Term::real(x[offset]), Term::real(v[offset]));
    ++offset;
    return out;
  }
  Term a = dual_literal(ty.left(), x, v, offset);
  Term b = dual_literal(ty.right(), x, v, offset);
  return Term::pair(std::move(a), std::move(b));
}

void require_closed(const Term& t) {
  if (!t.free_vars().empty()) throw std::invalid_argument("term has free variable '" + t.free_vars().front() + "'");
}

}  // namespace

Outcome derivative(const Term& t, double x, std::uint64_t fuel) {
  require_closed(t);
  Term call = Term::app(ad_transform(t), Term::pair(Term::real(x), Term::real(1.0)));
  Outcome o = eval(call, Env{}, fuel);
  if (o.ok()) o.value = o.value.second();
  return o;
}

JvpResult jvp(const Term& t, std::span<const double> x, std::span<const double> v, std::uint64_t fuel) {
  require_closed(t);
  RealSignature sig = real_signature(typecheck(Context{}, t));
  if (x.size() != sig.input_dim || v.size() != sig.input_dim)
    throw std::invalid_argument("jvp: expected " + std::to_string(sig.input_dim) + " inputs");
  Term call = ad_transform(t);
  std::size_t offset = 0;
  for (const Type& a : sig.args) call = Term::app(call, dual_literal(a, x, v, offset));
  Outcome o = eval(call, Env{}, fuel);
  JvpResult r;
  r.status = o.status;
  r.steps = o.steps;
  if (o.ok()) flatten_dual(o.value, r.primal, r.tangent);
  return r;
}

JvpResult ad_gradient(const Term& t, std::span<const double> x, std::uint64_t fuel) {
  JvpResult out;
  std::vector<double> seed(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    seed[i] = 1.0;
    JvpResult r = jvp(t, x, seed, fuel);
    seed[i] = 0.0;
    if (r.tangent.size() > 1) throw std::invalid_argument("ad_gradient needs a scalar-valued function");
    out.steps += r.steps;
    if (!r.ok()) {
      out.status = r.status;
      out.tangent.clear();
      return out;
    }
    if (i == 0) out.primal = r.primal;
    out.tangent.push_back(r.tangent[0]);
  }
  return out;
}

double IntensionalAudit::interior_disagreement_fraction() const {
  return reports.empty() ? 0.0 : static_cast<double>(interior_disagreements) / static_cast<double>(reports.size());
}

namespace {

struct Closed {
  Value fn;
  bool ok = false;
};

Closed close_over(const Term& t, std::uint64_t fuel) {
  require_closed(t);
  Outcome o = eval(t, Env{}, fuel);
  return {o.value, o.ok() && (o.value.is(ValueKind::Closure) || o.value.is(ValueKind::RecClosure))};
}

}  // namespace

ScalarFn as_scalar_fn(const Term& t, std::uint64_t fuel) {
  Closed c = close_over(t, fuel);
  return [c, fuel](double x) -> std::optional<double> {
    if (!c.ok) return std::nullopt;
    Value arg = Value::real(x);
    Outcome o = apply(c.fn, std::span<const Value>(&arg, 1), fuel);
    if (!o.ok() || !o.value.is(ValueKind::Real)) return std::nullopt;
    return o.value.as_real();
  };
}

PathFn as_path_fn(const Term& t, std::uint64_t fuel) {
  Closed c = close_over(t, fuel);
  return [c, fuel](double x) -> std::optional<std::uint64_t> {
    if (!c.ok) return std::nullopt;
    Value arg = Value::real(x);
    RunConfig cfg;
    cfg.fuel = fuel;
    RunResult r = run_apply(c.fn, std::span<const Value>(&arg, 1), cfg);
    if (!r.ok()) return std::nullopt;
    return r.path;
  };
}

IntensionalAudit check_intensional(const Term& t, std::span<const double> points, const FDConfig& cfg,
                                   std::uint64_t fuel) {
  IntensionalAudit audit;
  ScalarFn f = as_scalar_fn(t, fuel);
  PathFn path = as_path_fn(t, fuel);
  for (double x : points) {
    DerivReport rep;
    rep.point = x;
    Outcome d = derivative(t, x, fuel);
    rep.defined = d.ok();
    if (!rep.defined) {
      ++audit.undefined;
      audit.reports.push_back(rep);
      continue;
    }
    rep.ad_value = d.value.as_real();
    try {
      FDResult fd = fd_derivative(f, x, cfg, path);
      rep.fd_value = fd.estimate;
      rep.fd_class = fd.stability;
      rep.abs_err = std::abs(rep.ad_value - fd.estimate);
      double scale = std::max(std::abs(rep.ad_value), std::abs(fd.estimate));
      rep.rel_err = scale > 0.0 ? rep.abs_err / scale : 0.0;
      rep.agrees = close_enough(rep.ad_value, fd.estimate, cfg.rtol, cfg.atol);
    } catch (const UndefinedNearPoint&) {
      // Defined at x but not at a probe: x sits on the edge of the domain.
      rep.fd_class = Stability::SuspectedBoundary;
      rep.agrees = false;
    }
    if (rep.fd_class == Stability::SuspectedBoundary) {
      ++audit.boundary_points;
      if (!rep.agrees) ++audit.boundary_disagreements;
    } else if (!rep.agrees) {
      ++audit.interior_disagreements;
    }
    audit.reports.push_back(rep);
  }
  return audit;
}

}  // namespace pap
