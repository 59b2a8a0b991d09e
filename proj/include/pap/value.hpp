#pragma once

#include <memory>
#include <string>
#include <variant>

#include "pap/term.hpp"

namespace pap {

class Value;

/// Persistent name -> Value map. Binding shadows, never mutates.
class Env {
 public:
  Env() = default;

  Env bind(std::string name, Value value) const;
  /// Innermost binding, or nullptr.
  const Value* find(const std::string& name) const;
  bool empty() const { return head_ == nullptr; }

 private:
  struct Node;
  explicit Env(std::shared_ptr<const Node> head) : head_(std::move(head)) {}
  std::shared_ptr<const Node> head_;
};

enum class ValueKind { Real, Bool, Unit, Pair, Closure, RecClosure };

struct PairCell;
struct ClosureCell;

/// Runtime value. Immutable; pairs and closures share structure.
class Value {
 public:
  Value() : v_(std::monostate{}) {}

  static Value real(double x) { return Value(Repr(std::in_place_index<1>, x)); }
  static Value boolean(bool b) { return Value(Repr(std::in_place_index<2>, b)); }
  static Value unit() { return Value(); }
  static Value pair(Value first, Value second);
  /// Captures exactly the free variables of the lambda from `env`.
  static Value closure(const Env& env, const Term& lam);
  /// Captures exactly the free variables of the mu term from `env`.
  static Value rec_closure(const Env& env, const Term& mu);

  ValueKind kind() const;
  bool is(ValueKind k) const { return kind() == k; }

  double as_real() const { return std::get<1>(v_); }
  bool as_bool() const { return std::get<2>(v_); }
  const Value& first() const;
  const Value& second() const;
  const ClosureCell& closure_cell() const { return *std::get<4>(v_); }

 private:
  using Repr = std::variant<std::monostate, double, bool, std::shared_ptr<const PairCell>,
                            std::shared_ptr<const ClosureCell>>;
  explicit Value(Repr r) : v_(std::move(r)) {}
  Repr v_;
};

struct PairCell {
  Value first;
  Value second;
};

/// Lambda or mu closure. `code` is the Lam or Mu term itself.
struct ClosureCell {
  Env env;
  Term code;
  bool recursive = false;
};

struct Env::Node {
  std::string name;
  Value value;
  std::shared_ptr<const Node> next;
};

inline const Value& Value::first() const { return std::get<3>(v_)->first; }
inline const Value& Value::second() const { return std::get<3>(v_)->second; }

/// Bitwise structural equality on first-order values; closures compare by
/// identity.
bool identical(const Value& a, const Value& b);

/// Short human-readable rendering, e.g. `(1.5, true)`.
std::string to_string(const Value& v);

}  // namespace pap
