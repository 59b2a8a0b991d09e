#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pap/term.hpp"
#include "pap/types.hpp"

namespace pap {

/// Ordered variable -> type bindings. Later entries shadow earlier ones.
class Context {
 public:
  Context() = default;

  Context extend(std::string name, Type ty) const;
  /// Innermost binding, or nullptr when unbound.
  const Type* find(const std::string& name) const;
  const std::vector<std::pair<std::string, Type>>& bindings() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Type>> entries_;
};

class TypeError : public std::runtime_error {
 public:
  TypeError(const std::string& message, Term offending, Type expected = {}, Type actual = {});

  const Term& term() const { return term_; }
  const Type& expected() const { return expected_; }
  const Type& actual() const { return actual_; }

 private:
  Term term_;
  Type expected_;
  Type actual_;
};

/// Type of a desugared term. Throws TypeError.
Type typecheck(const Context& ctx, const Term& t);

/// Free variables as a set.
std::set<std::string> free_vars(const Term& t);

}  // namespace pap
