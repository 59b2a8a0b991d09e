#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pap/term.hpp"
#include "pap/value.hpp"

namespace pap {

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

enum class Status {
  Val,
  DomainError,    // a primitive left its domain
  FuelExhausted,  // the unfolding/primitive budget ran out
  Incomplete,     // `sample` on an exhausted trace
  TraceOverflow,  // streaming trace hit its length bound
};

const char* to_string(Status s);

/// Result of deterministic evaluation: a value, or bottom with its reason.
struct Outcome {
  Status status = Status::Val;
  Value value;
  std::uint64_t steps = 0;

  bool ok() const { return status == Status::Val; }
};

/// Raised when sample/score is reached without a trace, or when a
/// deterministic entry point is handed a probabilistic term.
class NotDeterministic : public std::runtime_error {
 public:
  NotDeterministic() : std::runtime_error("term uses sample/score; run it under the trace semantics") {}
};

/// Random draws consumed by `sample`, front to back. With `more` set, the
/// trace is extended on demand (one draw per call) up to `max_len`.
struct TraceFeed {
  std::vector<double> values;
  /// Tangents for dual runs (`sample_D`); missing entries count as 0.
  std::vector<double> tangents;
  std::function<double()> more;
  std::size_t max_len = std::numeric_limits<std::size_t>::max();
};

struct RunConfig {
  std::uint64_t fuel = kDefaultFuel;
  TraceFeed* trace = nullptr;
};

/// Full result of one run of the interpreter.
struct RunResult {
  Status status = Status::Val;
  Value value;
  /// Accumulated score weight; 0 unless the run produced a value.
  double weight = 1.0;
  /// Tangent of the weight under score_D (0 otherwise).
  double weight_tangent = 0.0;
  std::size_t consumed = 0;
  std::uint64_t steps = 0;
  /// Hash of every branch decision, piecewise-primitive piece and sample
  /// taken. Equal hashes mean the same control path.
  std::uint64_t path = 0;

  bool ok() const { return status == Status::Val; }
};

/// Call-by-value, left to right. Each primitive application and each mu
/// unfolding costs one unit of fuel. Scores multiply weights in the nesting
/// order of the weighted-sampler bind, so a sequenced computation's weight is
/// first * (rest).
RunResult run(const Term& t, const Env& env, const RunConfig& cfg);

/// Applies `fn` to each argument in turn.
RunResult run_apply(const Value& fn, std::span<const Value> args, const RunConfig& cfg);

/// Deterministic evaluation; throws NotDeterministic if sample/score runs.
Outcome eval(const Term& t, const Env& env, std::uint64_t fuel = kDefaultFuel);

/// Empty environment. Rejects open terms (std::invalid_argument) and
/// probabilistic ones (NotDeterministic) before running.
Outcome eval_closed(const Term& t, std::uint64_t fuel = kDefaultFuel);

/// Applies a deterministic function value to arguments.
Outcome apply(const Value& fn, std::span<const Value> args, std::uint64_t fuel = kDefaultFuel);

}  // namespace pap
