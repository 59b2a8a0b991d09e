#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pap/eval.hpp"
#include "pap/numcheck.hpp"
#include "pap/term.hpp"
#include "pap/types.hpp"

namespace pap {

/// The dual-number AD macro: a source-to-source transform. Real constants
/// become (c, 0), primitives become their dual translations, sample/score
/// become sample_D/score_D, and every other construct maps homomorphically.
/// Throws std::invalid_argument on terms that are already translated.
Term ad_transform(const Term& t);

/// The argument structure of a function type A1 -> ... -> Ak -> R whose
/// arguments are products of reals and whose result R is a product of reals.
struct RealSignature {
  std::vector<Type> args;
  Type result;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
};

/// Throws TypeError-free std::invalid_argument if `ty` is not of that form.
RealSignature real_signature(const Type& ty);

/// Lifts the flat vectors (x, v) into a dual value of type D(ty), consuming
/// leaves left to right starting at `offset`.
Value lift_dual(const Type& ty, std::span<const double> x, std::span<const double> v, std::size_t& offset);
/// Flattens a value of a product-of-reals type.
void flatten_reals(const Value& v, std::vector<double>& out);
/// Splits a value of type D(ty) into primal and tangent leaves.
void flatten_dual(const Value& v, std::vector<double>& primal, std::vector<double>& tangent);

/// Lifted intensional derivative of a closed t : real -> real at x. Val
/// exactly when t x evaluates.
Outcome derivative(const Term& t, double x, std::uint64_t fuel = kDefaultFuel);

struct JvpResult {
  Status status = Status::Val;
  std::vector<double> primal;
  std::vector<double> tangent;
  std::uint64_t steps = 0;

  bool ok() const { return status == Status::Val; }
};

/// Jacobian-vector product of a closed t : real^n -> real^m (curried or
/// tupled arguments) at x along v.
JvpResult jvp(const Term& t, std::span<const double> x, std::span<const double> v, std::uint64_t fuel = kDefaultFuel);

/// Gradient of t : real^n -> real by n JVP passes.
JvpResult ad_gradient(const Term& t, std::span<const double> x, std::uint64_t fuel = kDefaultFuel);

/// One AD-versus-finite-difference comparison.
struct DerivReport {
  double point = 0.0;
  bool defined = false;  // t x evaluated
  double ad_value = 0.0;
  std::optional<double> fd_value;  // nullopt when a probe was undefined
  Stability fd_class = Stability::Interior;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool agrees = true;
};

struct IntensionalAudit {
  std::vector<DerivReport> reports;
  std::size_t undefined = 0;
  std::size_t interior_disagreements = 0;
  std::size_t boundary_points = 0;
  std::size_t boundary_disagreements = 0;

  double interior_disagreement_fraction() const;
};

/// Audits AD against central finite differences at each point. Piece
/// boundaries are detected from one-sided differences and from changes of the
/// control path around the point.
IntensionalAudit check_intensional(const Term& t, std::span<const double> points, const FDConfig& cfg = {},
                                   std::uint64_t fuel = kDefaultFuel);

/// Black-box view of a closed t : real -> real for the numerical oracles:
/// value and control-path hash.
ScalarFn as_scalar_fn(const Term& t, std::uint64_t fuel = kDefaultFuel);
PathFn as_path_fn(const Term& t, std::uint64_t fuel = kDefaultFuel);

}  // namespace pap
