#include "pap/value.hpp"

#include <bit>
#include <cstdint>

#include "pap/format.hpp"

namespace pap {

Env Env::bind(std::string name, Value value) const {
  return Env{std::make_shared<const Node>(Node{std::move(name), std::move(value), head_})};
}

const Value* Env::find(const std::string& name) const {
  for (const Node* n = head_.get(); n != nullptr; n = n->next.get())
    if (n->name == name) return &n->value;
  return nullptr;
}

Value Value::pair(Value first, Value second) {
  return Value(Repr(std::in_place_index<3>,
                    std::make_shared<const PairCell>(PairCell{std::move(first), std::move(second)})));
}

namespace {

Env capture(const Env& env, const std::vector<std::string>& free) {
  Env out;
  for (const std::string& name : free) {
    const Value* v = env.find(name);
    if (v != nullptr) out = out.bind(name, *v);
  }
  return out;
}

}  // namespace

Value Value::closure(const Env& env, const Term& lam) {
  return Value(Repr(std::in_place_index<4>,
                    std::make_shared<const ClosureCell>(ClosureCell{capture(env, lam.free_vars()), lam, false})));
}

Value Value::rec_closure(const Env& env, const Term& mu) {
  return Value(Repr(std::in_place_index<4>,
                    std::make_shared<const ClosureCell>(ClosureCell{capture(env, mu.free_vars()), mu, true})));
}

ValueKind Value::kind() const {
  switch (v_.index()) {
    case 0:
      return ValueKind::Unit;
    case 1:
      return ValueKind::Real;
    case 2:
      return ValueKind::Bool;
    case 3:
      return ValueKind::Pair;
    default:
      return std::get<4>(v_)->recursive ? ValueKind::RecClosure : ValueKind::Closure;
  }
}

bool identical(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Real:
      return std::bit_cast<std::uint64_t>(a.as_real()) == std::bit_cast<std::uint64_t>(b.as_real());
    case ValueKind::Bool:
      return a.as_bool() == b.as_bool();
    case ValueKind::Unit:
      return true;
    case ValueKind::Pair:
      return identical(a.first(), b.first()) && identical(a.second(), b.second());
    default:
      return &a.closure_cell() == &b.closure_cell();
  }
}

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Real:
      return format_real(v.as_real());
    case ValueKind::Bool:
      return v.as_bool() ? "true" : "false";
    case ValueKind::Unit:
      return "()";
    case ValueKind::Pair:
      return "(" + to_string(v.first()) + ", " + to_string(v.second()) + ")";
    case ValueKind::Closure:
      return "<fun>";
    case ValueKind::RecClosure:
      return "<mu>";
  }
  return "?";
}

}  // namespace pap
