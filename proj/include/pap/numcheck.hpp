#pragma once

// Numerical oracles for checking derivatives and Monte Carlo estimates. This
// header deliberately knows nothing about the AD transform: everything here
// works on black-box functions.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pap {

/// nullopt means the function is undefined at the probe.
using ScalarFn = std::function<std::optional<double>(double)>;
using VectorFn = std::function<std::optional<double>(std::span<const double>)>;
/// Control-path fingerprint at a probe; a change between probes marks a
/// piece boundary even when the values look smooth.
using PathFn = std::function<std::optional<std::uint64_t>(double)>;
using VectorPathFn = std::function<std::optional<std::uint64_t>(std::span<const double>)>;

enum class Stability { Interior, SuspectedBoundary };

const char* to_string(Stability s);

struct FDConfig {
  /// Base step; the step at x is h * max(1, |x|).
  double h = 0x1p-17;
  double rtol = 1e-5;
  double atol = 1e-8;
  bool richardson = true;
  /// Optional closed domain. Probes stay inside it; near an edge the
  /// estimate is one-sided.
  std::optional<double> lower;
  std::optional<double> upper;
};

struct FDResult {
  double estimate = 0.0;
  Stability stability = Stability::Interior;
};

class UndefinedNearPoint : public std::runtime_error {
 public:
  explicit UndefinedNearPoint(double x);
  double point() const { return point_; }

 private:
  double point_;
};

/// |a - b| <= atol + rtol * max(|a|, |b|)
bool close_enough(double a, double b, double rtol, double atol);

/// Central difference (f(x+h) - f(x-h)) / 2h, Richardson-extrapolated once
/// when cfg.richardson is set.
///
/// Classification: suspected-boundary when the Richardson-combined forward
/// and backward one-sided differences (steps h and h/2) disagree beyond
/// 10 * (rtol, atol), or when `path` reports a different control path at any
/// probe. Throws UndefinedNearPoint if any probe is undefined.
FDResult fd_derivative(const ScalarFn& f, double x, const FDConfig& cfg = {}, const PathFn& path = {});

struct FDGradient {
  std::vector<double> grad;
  std::vector<Stability> stability;

  bool all_interior() const;
};

/// Coordinate-wise fd_derivative.
FDGradient fd_gradient(const VectorFn& f, std::span<const double> x, const FDConfig& cfg = {},
                       const VectorPathFn& path = {});

struct MeanCI {
  double mean = 0.0;
  double halfwidth = 0.0;
  /// All samples equal; the halfwidth is 0.
  bool degenerate = false;
};

/// Sample mean with a normal-approximation confidence interval. Needs at
/// least two finite samples (std::invalid_argument otherwise).
MeanCI mc_mean_ci(std::span<const double> samples, double confidence = 0.95);

/// Two-sided standard normal quantile for the given confidence level.
double normal_z(double confidence);

}  // namespace pap
