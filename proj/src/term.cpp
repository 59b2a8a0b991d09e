#include "pap/term.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

#include "pap/primitives.hpp"

namespace pap {

namespace {

void merge_into(std::vector<std::string>& out, const std::vector<std::string>& in) {
  std::vector<std::string> merged;
  merged.reserve(out.size() + in.size());
  std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(merged));
  out = std::move(merged);
}

void erase_name(std::vector<std::string>& v, const std::string& name) {
  auto it = std::lower_bound(v.begin(), v.end(), name);
  if (it != v.end() && *it == name) v.erase(it);
}

}  // namespace

Term Term::make(Node node) {
  std::vector<std::string> free;
  bool prob = node.kind == TermKind::Sample || node.kind == TermKind::Score;
  switch (node.kind) {
    case TermKind::Var:
      free.push_back(node.name);
      break;
    case TermKind::MatchPair: {
      free = node.kids[0].free_vars();
      auto body = node.kids[1].free_vars();
      erase_name(body, node.name);
      erase_name(body, node.name2);
      merge_into(free, body);
      break;
    }
    case TermKind::Lam:
      free = node.kids[0].free_vars();
      erase_name(free, node.name);
      break;
    case TermKind::Mu:
      free = node.kids[0].free_vars();
      erase_name(free, node.name);
      erase_name(free, node.name2);
      break;
    default:
      for (const Term& k : node.kids) merge_into(free, k.free_vars());
      break;
  }
  for (const Term& k : node.kids) prob = prob || k.is_probabilistic();
  node.free = std::move(free);
  node.probabilistic = prob;
  return Term{std::make_shared<const Node>(std::move(node))};
}

Term Term::with_kids(std::vector<Term> kids) const {
  Node copy = *node_;
  copy.kids = std::move(kids);
  return make(std::move(copy));
}

Term Term::var(std::string name, SourceSpan span) {
  Node n;
  n.kind = TermKind::Var;
  n.span = span;
  n.name = std::move(name);
  return make(std::move(n));
}

Term Term::real(double value, SourceSpan span) {
  Node n;
  n.kind = TermKind::ConstReal;
  n.span = span;
  n.real = value;
  return make(std::move(n));
}

Term Term::boolean(bool value, SourceSpan span) {
  Node n;
  n.kind = TermKind::ConstBool;
  n.span = span;
  n.boolean = value;
  return make(std::move(n));
}

Term Term::unit(SourceSpan span) {
  Node n;
  n.kind = TermKind::ConstUnit;
  n.span = span;
  return make(std::move(n));
}

Term Term::prim(const PrimSpec& spec, std::vector<Term> args, bool dual, SourceSpan span) {
  Node n;
  n.kind = TermKind::Prim;
  n.span = span;
  n.prim = &spec;
  n.dual = dual;
  n.kids = std::move(args);
  return make(std::move(n));
}

Term Term::pair(Term first, Term second, SourceSpan span) {
  Node n;
  n.kind = TermKind::Pair;
  n.span = span;
  n.kids = {std::move(first), std::move(second)};
  return make(std::move(n));
}

Term Term::match_pair(Term scrutinee, std::string x, std::string y, Term body, SourceSpan span) {
  Node n;
  n.kind = TermKind::MatchPair;
  n.span = span;
  n.name = std::move(x);
  n.name2 = std::move(y);
  n.kids = {std::move(scrutinee), std::move(body)};
  return make(std::move(n));
}

Term Term::if_(Term cond, Term then_branch, Term else_branch, SourceSpan span) {
  Node n;
  n.kind = TermKind::If;
  n.span = span;
  n.kids = {std::move(cond), std::move(then_branch), std::move(else_branch)};
  return make(std::move(n));
}

Term Term::lam(std::string param, Type param_type, Term body, SourceSpan span) {
  Node n;
  n.kind = TermKind::Lam;
  n.span = span;
  n.name = std::move(param);
  n.ty1 = std::move(param_type);
  n.kids = {std::move(body)};
  return make(std::move(n));
}

Term Term::app(Term fn, Term arg, SourceSpan span) {
  Node n;
  n.kind = TermKind::App;
  n.span = span;
  n.kids = {std::move(fn), std::move(arg)};
  return make(std::move(n));
}

Term Term::mu(std::string fname, std::string param, Type param_type, Type result_type, Term body,
              SourceSpan span) {
  Node n;
  n.kind = TermKind::Mu;
  n.span = span;
  n.name = std::move(param);
  n.name2 = std::move(fname);
  n.ty1 = std::move(param_type);
  n.ty2 = std::move(result_type);
  n.kids = {std::move(body)};
  return make(std::move(n));
}

Term Term::sample(bool dual, SourceSpan span) {
  Node n;
  n.kind = TermKind::Sample;
  n.span = span;
  n.dual = dual;
  return make(std::move(n));
}

Term Term::score(Term weight, bool dual, SourceSpan span) {
  Node n;
  n.kind = TermKind::Score;
  n.span = span;
  n.dual = dual;
  n.kids = {std::move(weight)};
  return make(std::move(n));
}

Term Term::let(std::string x, Type bound_type, Term bound, Term body, SourceSpan span) {
  return app(lam(std::move(x), std::move(bound_type), std::move(body), span), std::move(bound), span);
}

bool operator==(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.kind != y.kind || x.dual != y.dual || x.kids.size() != y.kids.size()) return false;
  switch (x.kind) {
    case TermKind::Var:
      if (x.name != y.name) return false;
      break;
    case TermKind::ConstReal:
      if (std::bit_cast<std::uint64_t>(x.real) != std::bit_cast<std::uint64_t>(y.real)) return false;
      break;
    case TermKind::ConstBool:
      if (x.boolean != y.boolean) return false;
      break;
    case TermKind::Prim:
      if (x.prim != y.prim) return false;
      break;
    case TermKind::MatchPair:
      if (x.name != y.name || x.name2 != y.name2) return false;
      break;
    case TermKind::Lam:
      if (x.name != y.name || !(x.ty1 == y.ty1)) return false;
      break;
    case TermKind::Mu:
      if (x.name != y.name || x.name2 != y.name2 || !(x.ty1 == y.ty1) || !(x.ty2 == y.ty2)) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (!(x.kids[i] == y.kids[i])) return false;
  return true;
}

namespace {

bool occurs_free(const Term& t, const std::string& name) {
  const auto& f = t.free_vars();
  return std::binary_search(f.begin(), f.end(), name);
}

std::string fresh_name(const std::string& base, const Term& avoid_a, const Term& avoid_b) {
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!occurs_free(avoid_a, candidate) && !occurs_free(avoid_b, candidate)) return candidate;
  }
}

// Renames binder `name` to something not free in `value` or `body`.
std::string avoid_capture(const std::string& name, const Term& value, Term& body) {
  if (!occurs_free(value, name)) return name;
  std::string fresh = fresh_name(name, value, body);
  body = substitute(body, name, Term::var(fresh));
  return fresh;
}

}  // namespace

Term substitute(const Term& t, const std::string& x, const Term& value) {
  if (!occurs_free(t, x)) return t;
  const auto& n = t.node();
  switch (n.kind) {
    case TermKind::Var:
      return value;
    case TermKind::Lam: {
      Term body = n.kids[0];
      std::string p = avoid_capture(n.name, value, body);
      return Term::lam(p, n.ty1, substitute(body, x, value), n.span);
    }
    case TermKind::Mu: {
      Term body = n.kids[0];
      std::string p = avoid_capture(n.name, value, body);
      std::string f = avoid_capture(n.name2, value, body);
      return Term::mu(f, p, n.ty1, n.ty2, substitute(body, x, value), n.span);
    }
    case TermKind::MatchPair: {
      Term body = n.kids[1];
      std::string a = n.name;
      std::string b = n.name2;
      if (a != x && b != x) {
        a = avoid_capture(a, value, body);
        b = avoid_capture(b, value, body);
        body = substitute(body, x, value);
      }
      return Term::match_pair(substitute(n.kids[0], x, value), a, b, body, n.span);
    }
    default: {
      std::vector<Term> kids = n.kids;
      for (Term& k : kids) k = substitute(k, x, value);
      return t.with_kids(std::move(kids));
    }
  }
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const Term& k : t.node().kids) n += term_size(k);
  return n;
}

}  // namespace pap
