#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pap/types.hpp"

namespace pap {

struct PrimSpec;

struct SourceSpan {
  int line = 0;
  int column = 0;
};

enum class TermKind {
  Var,
  ConstReal,
  ConstBool,
  ConstUnit,
  Prim,
  Pair,
  MatchPair,
  If,
  Lam,
  App,
  Mu,
  Sample,
  Score,
};

/// Immutable term handle over a shared node. Let-bindings never reach this
/// representation: the parser rewrites them to an applied lambda.
///
/// `dual` marks the translated forms produced by the AD macro: Prim nodes that
/// call a primitive's dual-number translation, and the dual-trace versions of
/// sample/score. Surface syntax spells them `name_D`, `sample_D`, `score_D`.
class Term {
 public:
  struct Node;

  Term() = default;

  static Term var(std::string name, SourceSpan span = {});
  static Term real(double value, SourceSpan span = {});
  static Term boolean(bool value, SourceSpan span = {});
  static Term unit(SourceSpan span = {});
  static Term prim(const PrimSpec& spec, std::vector<Term> args, bool dual = false, SourceSpan span = {});
  static Term pair(Term first, Term second, SourceSpan span = {});
  static Term match_pair(Term scrutinee, std::string x, std::string y, Term body, SourceSpan span = {});
  static Term if_(Term cond, Term then_branch, Term else_branch, SourceSpan span = {});
  static Term lam(std::string param, Type param_type, Term body, SourceSpan span = {});
  static Term app(Term fn, Term arg, SourceSpan span = {});
  static Term mu(std::string fname, std::string param, Type param_type, Type result_type, Term body,
                 SourceSpan span = {});
  static Term sample(bool dual = false, SourceSpan span = {});
  static Term score(Term weight, bool dual = false, SourceSpan span = {});
  /// `let x = bound in body`, already desugared.
  static Term let(std::string x, Type bound_type, Term bound, Term body, SourceSpan span = {});

  /// Same node with its children replaced (same count).
  Term with_kids(std::vector<Term> kids) const;

  explicit operator bool() const { return node_ != nullptr; }
  const Node& node() const { return *node_; }
  const Node* get() const { return node_.get(); }

  TermKind kind() const;
  const SourceSpan& span() const;
  /// Sorted, duplicate free.
  const std::vector<std::string>& free_vars() const;
  /// True if sample or score occurs anywhere inside.
  bool is_probabilistic() const;

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(Node node);
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  TermKind kind = TermKind::ConstUnit;
  SourceSpan span;
  // Var: variable. Lam/MatchPair: bound x. Mu: parameter.
  std::string name;
  // MatchPair: bound y. Mu: recursive function name.
  std::string name2;
  double real = 0.0;
  bool boolean = false;
  const PrimSpec* prim = nullptr;
  bool dual = false;
  // Lam and Mu: parameter type. Mu: result type in ty2.
  Type ty1;
  Type ty2;
  // Prim: args. Pair: first, second. MatchPair: scrutinee, body. If: cond,
  // then, else. Lam/Mu: body. App: fn, arg. Score: weight.
  std::vector<Term> kids;
  std::vector<std::string> free;
  bool probabilistic = false;
};

inline TermKind Term::kind() const { return node_->kind; }
inline const SourceSpan& Term::span() const { return node_->span; }
inline const std::vector<std::string>& Term::free_vars() const { return node_->free; }
inline bool Term::is_probabilistic() const { return node_->probabilistic; }

/// Structural equality ignoring source spans. Reals compare bitwise.
bool operator==(const Term& a, const Term& b);

/// Capture-avoiding substitution t[value/x]. Used by tests to cross-check the
/// environment-based interpreter against the substitution rule.
Term substitute(const Term& t, const std::string& x, const Term& value);

/// Number of nodes.
std::size_t term_size(const Term& t);

}  // namespace pap
