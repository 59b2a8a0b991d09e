#pragma once

#include <memory>
#include <string>

namespace pap {

enum class TypeKind { Real, Bool, Unit, Prod, Arrow };

/// Immutable type handle. Copies share structure; equality is structural.
/// A default-constructed Type is empty and only serves as a placeholder.
class Type {
 public:
  Type() = default;

  static Type real();
  static Type boolean();
  static Type unit();
  static Type prod(Type first, Type second);
  static Type arrow(Type from, Type to);

  explicit operator bool() const { return node_ != nullptr; }
  TypeKind kind() const;
  bool is(TypeKind k) const;

  // Components of Prod (first, second) and Arrow (from, to).
  const Type& left() const;
  const Type& right() const;

  /// Built only from real/bool/unit and products.
  bool is_ground() const;

  friend bool operator==(const Type& a, const Type& b);

 private:
  struct Node;
  friend struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Type::Node {
  TypeKind kind;
  Type left;
  Type right;
};

inline TypeKind Type::kind() const { return node_->kind; }
inline bool Type::is(TypeKind k) const { return node_ && node_->kind == k; }
inline const Type& Type::left() const { return node_->left; }
inline const Type& Type::right() const { return node_->right; }

std::string to_string(const Type& ty);

/// Type translation of the AD macro: real becomes real * real, the rest is
/// mapped structurally.
Type dual_type(const Type& ty);

/// Number of real leaves of a tree of products over real, or -1 when the type
/// contains anything else.
int real_leaf_count(const Type& ty);

}  // namespace pap
