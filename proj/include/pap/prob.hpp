#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "pap/eval.hpp"
#include "pap/numcheck.hpp"
#include "pap/term.hpp"

namespace pap {

/// One run of a probabilistic program on a fixed trace.
struct WeightedOutcome {
  Status status = Status::Val;
  Value value;
  /// Always >= 0; 0 unless status is Val.
  double weight = 0.0;
  /// Unconsumed suffix of the trace.
  std::vector<double> remainder;
  std::size_t consumed = 0;
  std::uint64_t steps = 0;
  /// Control-path hash (branches, primitive pieces, samples).
  std::uint64_t path = 0;

  bool ok() const { return status == Status::Val; }
};

WeightedOutcome run_trace(const Term& t, std::span<const double> trace, std::uint64_t fuel = kDefaultFuel,
                          const Env& env = {});

/// The run's weight when it produced a value and consumed the whole trace;
/// 0 otherwise.
double weight_fn(const Term& t, std::span<const double> trace, std::uint64_t fuel = kDefaultFuel);

struct SimConfig {
  std::uint64_t seed = 0;
  std::size_t max_trace_len = 10'000;
  std::uint64_t fuel = kDefaultFuel;
};

struct Simulation {
  WeightedOutcome outcome;
  /// Exactly the draws the run consumed.
  std::vector<double> trace;
};

/// Streams uniforms from stream `index` of cfg.seed until the program stops
/// asking. TraceOverflow once it wants more than max_trace_len draws.
Simulation simulate(const Term& t, const SimConfig& cfg, std::uint64_t index = 0);

/// Builtin integrands for estimate().
struct TestFn {
  enum class Kind { TotalMass, CoordinateMean, Box };
  Kind kind = Kind::TotalMass;
  std::size_t coord = 0;
  /// Box: closed interval per leading coordinate; later coordinates are free.
  std::vector<std::pair<double, double>> box;

  static TestFn total_mass() { return {}; }
  static TestFn coordinate_mean(std::size_t i) { return {Kind::CoordinateMean, i, {}}; }
  static TestFn in_box(std::vector<std::pair<double, double>> b) { return {Kind::Box, 0, std::move(b)}; }

  double operator()(const Value& v) const;
};

struct Estimate {
  double mean = 0.0;
  double halfwidth = 0.0;
  std::size_t n = 0;
  /// Runs that ended in bottom or overflow (weight 0).
  std::size_t failures = 0;

  double failure_fraction() const { return n == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(n); }
};

/// Monte Carlo average of weight * f(value) over N simulations (streams
/// 0..N-1), with a 95% normal CI.
Estimate estimate(const Term& t, const TestFn& f, std::size_t N, const SimConfig& cfg);

struct WeightGrad {
  Status status = Status::Val;
  double weight = 0.0;
  /// d weight / d trace[i]; all zeros when the weight is 0.
  std::vector<double> grad;

  bool ok() const { return status == Status::Val; }
};

/// Gradient of r -> weight_fn(t, r) at `trace`, by one pass of the
/// AD-translated program per trace slot with a one-hot tangent trace.
WeightGrad weight_grad(const Term& t, std::span<const double> trace, std::uint64_t fuel = kDefaultFuel);

struct AeConfig {
  SimConfig sim;
  FDConfig fd;
};

struct BoundaryFlag {
  std::size_t trace_index = 0;
  std::size_t coord = 0;
  double location = 0.0;
};

struct AeReport {
  std::size_t traces = 0;
  /// Traces skipped because they had weight 0 or failed to simulate.
  std::size_t skipped = 0;
  std::size_t interior_checks = 0;
  std::size_t interior_disagreements = 0;
  std::vector<BoundaryFlag> flags;

  double boundary_fraction() const;
};

/// Compares weight_grad with one-coordinate-at-a-time finite differences of
/// weight_fn on the given traces. FD probes stay inside [0, 1]; a coordinate
/// is boundary-flagged when one-sided estimates split or when the control
/// path or consumption pattern changes under perturbation.
AeReport ae_diff_check_at(const Term& t, const std::vector<std::vector<double>>& traces, const AeConfig& cfg);

/// ae_diff_check_at on n_traces simulated traces.
AeReport ae_diff_check(const Term& t, std::size_t n_traces, const AeConfig& cfg);

struct RankHistogram {
  std::map<std::size_t, std::size_t> counts;
  /// (rows, cols) of each sample's Jacobian: output dimension by consumed.
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  double tolerance = 1e-8;
  std::size_t skipped = 0;

  std::size_t samples() const { return dims.size(); }
  double fraction(std::size_t rank) const;
};

struct DimConfig {
  SimConfig sim;
  /// Singular values above tolerance * sigma_max count toward the rank.
  double tolerance = 1e-8;
};

/// Rank of the Jacobian of the output tuple with respect to the consumed
/// trace, over n_samples simulated runs.
RankHistogram support_dim(const Term& t, std::size_t n_samples, const DimConfig& cfg);

/// Numerical rank of a rows x cols row-major matrix.
std::size_t numerical_rank(std::span<const double> m, std::size_t rows, std::size_t cols, double tolerance);

}  // namespace pap
