#include "pap/printer.hpp"

#include "pap/format.hpp"
#include "pap/primitives.hpp"

namespace pap {

namespace {

// Contexts: Open allows fun/mu/if/match that extend to the right, Func is the
// head of an application, Atom is an application argument.
enum class Ctx { Open, Func, Atom };

void print(const Term& t, Ctx ctx, std::string& out);

void print_open(const Term& t, Ctx ctx, std::string& out, void (*body)(const Term&, std::string&)) {
  if (ctx != Ctx::Open) out += '(';
  body(t, out);
  if (ctx != Ctx::Open) out += ')';
}

void print(const Term& t, Ctx ctx, std::string& out) {
  const auto& n = t.node();
  switch (n.kind) {
    case TermKind::Var:
      out += n.name;
      return;
    case TermKind::ConstReal:
      out += format_real(n.real);
      return;
    case TermKind::ConstBool:
      out += n.boolean ? "true" : "false";
      return;
    case TermKind::ConstUnit:
      out += "()";
      return;
    case TermKind::Prim:
      out += n.prim->name;
      if (n.dual) out += "_D";
      out += '(';
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i > 0) out += ", ";
        print(n.kids[i], Ctx::Open, out);
      }
      out += ')';
      return;
    case TermKind::Pair:
      out += '(';
      print(n.kids[0], Ctx::Open, out);
      out += ", ";
      print(n.kids[1], Ctx::Open, out);
      out += ')';
      return;
    case TermKind::Sample:
      out += n.dual ? "sample_D" : "sample";
      return;
    case TermKind::Score:
      out += n.dual ? "score_D(" : "score(";
      print(n.kids[0], Ctx::Open, out);
      out += ')';
      return;
    case TermKind::App:
      if (ctx == Ctx::Atom) out += '(';
      print(n.kids[0], Ctx::Func, out);
      out += ' ';
      print(n.kids[1], Ctx::Atom, out);
      if (ctx == Ctx::Atom) out += ')';
      return;
    case TermKind::MatchPair:
      print_open(t, ctx, out, [](const Term& m, std::string& o) {
        const auto& mn = m.node();
        o += "match ";
        print(mn.kids[0], Ctx::Open, o);
        o += " with (" + mn.name + ", " + mn.name2 + ") -> ";
        print(mn.kids[1], Ctx::Open, o);
      });
      return;
    case TermKind::If:
      print_open(t, ctx, out, [](const Term& m, std::string& o) {
        const auto& mn = m.node();
        o += "if ";
        print(mn.kids[0], Ctx::Open, o);
        o += " then ";
        print(mn.kids[1], Ctx::Open, o);
        o += " else ";
        print(mn.kids[2], Ctx::Open, o);
      });
      return;
    case TermKind::Lam:
      print_open(t, ctx, out, [](const Term& m, std::string& o) {
        const auto& mn = m.node();
        o += "fun (" + mn.name + " : " + to_string(mn.ty1) + ") -> ";
        print(mn.kids[0], Ctx::Open, o);
      });
      return;
    case TermKind::Mu:
      print_open(t, ctx, out, [](const Term& m, std::string& o) {
        const auto& mn = m.node();
        // an arrow result type must be parenthesized: `-> ` also starts the body
        std::string result = to_string(mn.ty2);
        if (mn.ty2.is(TypeKind::Arrow)) result = "(" + result + ")";
        o += "mu " + mn.name2 + " (" + mn.name + " : " + to_string(mn.ty1) + ") : " + result + " -> ";
        print(mn.kids[0], Ctx::Open, o);
      });
      return;
  }
}

}  // namespace

std::string print_term(const Term& t) {
  std::string out;
  print(t, Ctx::Open, out);
  return out;
}

}  // namespace pap
