#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pap/eval.hpp"
#include "pap/numcheck.hpp"
#include "pap/term.hpp"

namespace pap {

enum class GradMode { AD, FD };

const char* to_string(GradMode m);

struct GDConfig {
  double eps = 0.1;
  std::size_t T = 100;
  GradMode mode = GradMode::AD;
  /// Stop once the gradient norm drops strictly below this. 0 never stops.
  double stop_tol = 0.0;
  std::uint64_t fuel = kDefaultFuel;
  FDConfig fd;
};

enum class Termination { Converged, Exhausted, Undefined };

const char* to_string(Termination t);

struct Trajectory {
  /// x[t] for t = 0..steps; grads[t] and f[t] are taken at x[t].
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> grads;
  std::vector<double> f;
  Termination termination = Termination::Exhausted;
  /// Iteration at which evaluation or differentiation hit bottom.
  std::size_t undefined_step = 0;

  /// f[t+1] <= f[t] for every recorded pair.
  bool monotone() const;
};

/// Closed deterministic function real^n -> real (curried or tupled), viewed as
/// value and gradient oracles at vector inputs.
class Objective {
 public:
  Objective(const Term& t, std::uint64_t fuel = kDefaultFuel);

  std::size_t dim() const { return dim_; }
  std::optional<double> value(std::span<const double> x) const;
  /// AD gradient (n JVP passes through the transformed program).
  std::optional<std::vector<double>> ad_grad(std::span<const double> x) const;
  /// Control-path hash of the primal run.
  std::optional<std::uint64_t> path(std::span<const double> x) const;

  VectorFn as_vector_fn() const;
  VectorPathFn as_path_fn() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::size_t dim_ = 0;
};

/// x^{t+1} = x^t - eps * g^t with g^t from AD or finite differences.
Trajectory gd_run(const Term& t, std::span<const double> x0, const GDConfig& cfg);
Trajectory gd_run(const Objective& f, std::span<const double> x0, const GDConfig& cfg);

struct RandomizedGDConfig {
  double L = 1.0;
  double x0_lo = -10.0;
  double x0_hi = 10.0;
  std::size_t n_seeds = 200;
  std::uint64_t seed = 0;
  /// Bypasses the step-size draw (degenerate experiment).
  std::optional<double> fixed_eps;
  /// eps is ignored unless fixed_eps is set; mode should be AD.
  GDConfig gd;
};

struct SeedResult {
  std::size_t index = 0;
  double eps = 0.0;
  std::vector<double> x0;
  std::vector<double> x_final;
  std::size_t steps = 0;
  Termination termination = Termination::Exhausted;
  /// FD gradient norm at the final iterate; nullopt when the point is
  /// boundary-classified or undefined (indeterminate).
  std::optional<double> final_grad_norm;
  bool monotone = true;
  bool converged = false;
};

struct RandomizedGDReport {
  std::vector<SeedResult> seeds;
  std::size_t converged = 0;
  std::size_t indeterminate = 0;
  double converged_fraction = 0.0;
  double ci_halfwidth = 0.0;
};

/// eps ~ U(0, 2/L) (endpoints rejected), x0 ~ U[lo, hi]^d, per-seed streams
/// derived from (seed, index). A seed converges when the true (FD) gradient
/// norm at its final iterate is below gd.stop_tol.
RandomizedGDReport randomized_gd(const Term& t, const RandomizedGDConfig& cfg);

struct SmoothnessEstimate {
  /// Largest ||g(x) - g(y)|| / ||x - y|| seen over all scales.
  double L = 0.0;
  /// Per-scale maxima, largest scale first.
  std::vector<double> scales;
  std::vector<double> per_scale;
  std::size_t skipped = 0;
  /// The estimate kept growing as pairs got closer.
  bool smooth = true;
};

/// Empirical Lipschitz constant of the FD gradient over the box [lo, hi]^d,
/// from sample_count random pairs, each refined by bisection toward the
/// half where the gradients differ most. Per-scale maxima are recorded every
/// five halvings.
SmoothnessEstimate smoothness_probe(const Term& t, std::size_t sample_count, double lo, double hi,
                                    std::uint64_t seed = 0, std::uint64_t fuel = kDefaultFuel);

}  // namespace pap
