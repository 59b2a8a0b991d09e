#include "pap/types.hpp"

namespace pap {

Type Type::real() {
  static const Type t{std::make_shared<const Node>(Node{TypeKind::Real, {}, {}})};
  return t;
}

Type Type::boolean() {
  static const Type t{std::make_shared<const Node>(Node{TypeKind::Bool, {}, {}})};
  return t;
}

Type Type::unit() {
  static const Type t{std::make_shared<const Node>(Node{TypeKind::Unit, {}, {}})};
  return t;
}

Type Type::prod(Type first, Type second) {
  return Type{std::make_shared<const Node>(Node{TypeKind::Prod, std::move(first), std::move(second)})};
}

Type Type::arrow(Type from, Type to) {
  return Type{std::make_shared<const Node>(Node{TypeKind::Arrow, std::move(from), std::move(to)})};
}

bool Type::is_ground() const {
  switch (kind()) {
    case TypeKind::Real:
    case TypeKind::Bool:
    case TypeKind::Unit:
      return true;
    case TypeKind::Prod:
      return left().is_ground() && right().is_ground();
    case TypeKind::Arrow:
      return false;
  }
  return false;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TypeKind::Prod:
    case TypeKind::Arrow:
      return a.left() == b.left() && a.right() == b.right();
    default:
      return true;
  }
}

namespace {

// Precedence: 0 = arrow level, 1 = product level, 2 = atom.
std::string print(const Type& ty, int ctx) {
  switch (ty.kind()) {
    case TypeKind::Real:
      return "real";
    case TypeKind::Bool:
      return "bool";
    case TypeKind::Unit:
      return "unit";
    case TypeKind::Prod: {
      // right associative: a * b * c == a * (b * c)
      std::string s = print(ty.left(), 2) + " * " + print(ty.right(), 1);
      return ctx > 1 ? "(" + s + ")" : s;
    }
    case TypeKind::Arrow: {
      std::string s = print(ty.left(), 1) + " -> " + print(ty.right(), 0);
      return ctx > 0 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Type& ty) {
  if (!ty) return "<none>";
  return print(ty, 0);
}

Type dual_type(const Type& ty) {
  switch (ty.kind()) {
    case TypeKind::Real:
      return Type::prod(Type::real(), Type::real());
    case TypeKind::Bool:
    case TypeKind::Unit:
      return ty;
    case TypeKind::Prod:
      return Type::prod(dual_type(ty.left()), dual_type(ty.right()));
    case TypeKind::Arrow:
      return Type::arrow(dual_type(ty.left()), dual_type(ty.right()));
  }
  return ty;
}

int real_leaf_count(const Type& ty) {
  if (ty.is(TypeKind::Real)) return 1;
  if (ty.is(TypeKind::Prod)) {
    int a = real_leaf_count(ty.left());
    int b = real_leaf_count(ty.right());
    return (a < 0 || b < 0) ? -1 : a + b;
  }
  return -1;
}

}  // namespace pap
