#include "pap/typecheck.hpp"

#include "pap/primitives.hpp"
#include "pap/printer.hpp"

namespace pap {

Context Context::extend(std::string name, Type ty) const {
  Context c = *this;
  c.entries_.emplace_back(std::move(name), std::move(ty));
  return c;
}

const Type* Context::find(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

namespace {

std::string describe(const std::string& message, const Term& t, const Type& expected, const Type& actual) {
  std::string s = message;
  if (expected && actual) s += ": expected " + to_string(expected) + ", got " + to_string(actual);
  const auto& sp = t.span();
  if (sp.line > 0) s += " at " + std::to_string(sp.line) + ":" + std::to_string(sp.column);
  s += " in `" + print_term(t) + "`";
  return s;
}

// Environment as a persistent list walked during checking; avoids copying a
// Context per binder.
struct Scope {
  const std::string* name;
  const Type* type;
  const Scope* next;
};

class Checker {
 public:
  explicit Checker(const Context& ctx) : ctx_(ctx) {}

  Type check(const Term& t, const Scope* scope) {
    const auto& n = t.node();
    switch (n.kind) {
      case TermKind::Var: {
        for (const Scope* s = scope; s != nullptr; s = s->next)
          if (*s->name == n.name) return *s->type;
        if (const Type* ty = ctx_.find(n.name)) return *ty;
        throw TypeError("unbound variable '" + n.name + "'", t);
      }
      case TermKind::ConstReal:
        return Type::real();
      case TermKind::ConstBool:
        return Type::boolean();
      case TermKind::ConstUnit:
        return Type::unit();
      case TermKind::Prim: {
        const PrimSpec& p = *n.prim;
        std::vector<Type> args = n.dual ? p.dual_arg_types() : p.arg_types;
        if (n.kids.size() != args.size())
          throw TypeError("primitive '" + p.name + "' expects " + std::to_string(args.size()) + " arguments", t);
        for (std::size_t i = 0; i < args.size(); ++i) expect(n.kids[i], args[i], scope);
        return n.dual ? p.dual_result_type() : p.result_type;
      }
      case TermKind::Pair:
        return Type::prod(check(n.kids[0], scope), check(n.kids[1], scope));
      case TermKind::MatchPair: {
        Type s = check(n.kids[0], scope);
        if (!s.is(TypeKind::Prod))
          throw TypeError("match scrutinee must be a pair", n.kids[0], Type::prod(Type::real(), Type::real()), s);
        Scope sx{&n.name, &s.left(), scope};
        Scope sy{&n.name2, &s.right(), &sx};
        return check(n.kids[1], &sy);
      }
      case TermKind::If: {
        expect(n.kids[0], Type::boolean(), scope);
        Type a = check(n.kids[1], scope);
        Type b = check(n.kids[2], scope);
        if (!(a == b)) throw TypeError("branches of if disagree", n.kids[2], a, b);
        return a;
      }
      case TermKind::Lam: {
        Scope sx{&n.name, &n.ty1, scope};
        return Type::arrow(n.ty1, check(n.kids[0], &sx));
      }
      case TermKind::App: {
        Type f = check(n.kids[0], scope);
        if (!f.is(TypeKind::Arrow))
          throw TypeError("applying a non-function", n.kids[0], Type::arrow(Type::real(), Type::real()), f);
        expect(n.kids[1], f.left(), scope);
        return f.right();
      }
      case TermKind::Mu: {
        Type fty = Type::arrow(n.ty1, n.ty2);
        Scope sf{&n.name2, &fty, scope};
        Scope sx{&n.name, &n.ty1, &sf};
        expect(n.kids[0], n.ty2, &sx);
        return fty;
      }
      case TermKind::Sample:
        return n.dual ? dual_type(Type::real()) : Type::real();
      case TermKind::Score:
        expect(n.kids[0], n.dual ? dual_type(Type::real()) : Type::real(), scope);
        return Type::unit();
    }
    throw TypeError("unknown term", t);
  }

 private:
  void expect(const Term& t, const Type& want, const Scope* scope) {
    Type got = check(t, scope);
    if (!(got == want)) throw TypeError("type mismatch", t, want, got);
  }

  const Context& ctx_;
};

}  // namespace

TypeError::TypeError(const std::string& message, Term offending, Type expected, Type actual)
    : std::runtime_error(describe(message, offending, expected, actual)),
      term_(std::move(offending)),
      expected_(std::move(expected)),
      actual_(std::move(actual)) {}

Type typecheck(const Context& ctx, const Term& t) { return Checker(ctx).check(t, nullptr); }

std::set<std::string> free_vars(const Term& t) {
  return std::set<std::string>(t.free_vars().begin(), t.free_vars().end());
}

}  // namespace pap
