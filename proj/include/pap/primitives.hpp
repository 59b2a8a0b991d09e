#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pap/types.hpp"
#include "pap/value.hpp"

namespace pap {

/// Evaluator signature shared by a primitive and its dual-number translation.
/// Returns nullopt outside the primitive's domain. `piece`, when non-null,
/// receives the index of the analytic piece that produced the result (-1 for
/// primitives with a single piece).
using PrimFn = std::optional<Value> (*)(std::span<const Value> args, int* piece);

struct PrimSpec {
  std::string name;
  std::vector<Type> arg_types;
  Type result_type;
  /// Which piece's derivative the dual translation uses at ties.
  std::string boundary_note;
  PrimFn eval = nullptr;
  /// Takes and returns values of the dual types: each real becomes a
  /// (primal, tangent) pair; bool results stay bool.
  PrimFn dual_eval = nullptr;

  std::size_t arity() const { return arg_types.size(); }
  std::vector<Type> dual_arg_types() const;
  Type dual_result_type() const { return dual_type(result_type); }
};

class UnknownPrimitive : public std::runtime_error {
 public:
  explicit UnknownPrimitive(const std::string& name)
      : std::runtime_error("unknown primitive '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Every shipped primitive, in a fixed order.
const std::vector<PrimSpec>& primitive_registry();

/// nullptr if no primitive has this name.
const PrimSpec* find_prim(std::string_view name);

/// Throws UnknownPrimitive.
const PrimSpec& lookup_prim(std::string_view name);

/// nullopt models the domain bottom (log of a nonpositive number, division by
/// zero, sqrt of a negative number).
std::optional<Value> eval_prim(const PrimSpec& spec, std::span<const Value> args, int* piece = nullptr);

/// f_D on dual-typed arguments. Defined exactly where eval_prim is, and its
/// primal component reproduces eval_prim bit for bit.
std::optional<Value> dual_prim(const PrimSpec& spec, std::span<const Value> args, int* piece = nullptr);

}  // namespace pap
