#include "pap/numcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace pap {

const char* to_string(Stability s) {
  return s == Stability::Interior ? "interior" : "suspected-boundary";
}

UndefinedNearPoint::UndefinedNearPoint(double x)
    : std::runtime_error("function undefined near x = " + std::to_string(x)), point_(x) {}

bool close_enough(double a, double b, double rtol, double atol) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

namespace {

class Prober {
 public:
  Prober(const ScalarFn& f, const PathFn& path, double x) : f_(f), path_(path), x_(x) {
    if (path_) {
      auto p = path_(x);
      has_px_ = p.has_value();
      px_ = p.value_or(0);
    }
    fx_ = value(x);
  }

  double value(double at) {
    auto y = f_(at);
    if (!y) throw UndefinedNearPoint(x_);
    if (path_ && at != x_) {
      auto p = path_(at);
      if (!p || !has_px_ || *p != px_) path_changed_ = true;
    }
    return *y;
  }

  double fx() const { return fx_; }
  bool path_changed() const { return path_changed_; }

 private:
  const ScalarFn& f_;
  const PathFn& path_;
  double x_;
  double fx_ = 0.0;
  std::uint64_t px_ = 0;
  bool has_px_ = false;
  bool path_changed_ = false;
};

// One-sided difference using the step actually realised in floating point.
double one_sided(Prober& p, double x, double h) {
  double xs = x + h;
  return (p.value(xs) - p.fx()) / (xs - x);
}

double central(Prober& p, double x, double h) {
  double xp = x + h;
  double xm = x - h;
  return (p.value(xp) - p.value(xm)) / (xp - xm);
}

}  // namespace

FDResult fd_derivative(const ScalarFn& f, double x, const FDConfig& cfg, const PathFn& path) {
  const double h = cfg.h * std::max(1.0, std::abs(x));
  const bool room_below = !cfg.lower || x - h >= *cfg.lower;
  const bool room_above = !cfg.upper || x + h <= *cfg.upper;
  if (!room_below && !room_above) throw UndefinedNearPoint(x);

  Prober p(f, path, x);
  FDResult out;
  const double rtol = 10.0 * cfg.rtol;
  const double atol = 10.0 * cfg.atol;

  if (room_below && room_above) {
    double d1 = central(p, x, h);
    double d2 = central(p, x, h / 2);
    out.estimate = cfg.richardson ? d2 + (d2 - d1) / 3.0 : d1;
    double fwd = 2.0 * one_sided(p, x, h / 2) - one_sided(p, x, h);
    double bwd = 2.0 * one_sided(p, x, -h / 2) - one_sided(p, x, -h);
    bool split = !close_enough(fwd, bwd, rtol, atol);
    out.stability = (split || p.path_changed()) ? Stability::SuspectedBoundary : Stability::Interior;
    return out;
  }

  // Near a domain edge: one-sided, checked against the same rule at half the
  // step.
  const double s = room_above ? h : -h;
  double r1 = 2.0 * one_sided(p, x, s / 2) - one_sided(p, x, s);
  double r2 = 2.0 * one_sided(p, x, s / 4) - one_sided(p, x, s / 2);
  out.estimate = cfg.richardson ? r1 : one_sided(p, x, s);
  bool split = !close_enough(r1, r2, rtol, atol);
  out.stability = (split || p.path_changed()) ? Stability::SuspectedBoundary : Stability::Interior;
  return out;
}

bool FDGradient::all_interior() const {
  return std::all_of(stability.begin(), stability.end(), [](Stability s) { return s == Stability::Interior; });
}

FDGradient fd_gradient(const VectorFn& f, std::span<const double> x, const FDConfig& cfg, const VectorPathFn& path) {
  FDGradient out;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    ScalarFn fi = [&](double xi) {
      probe[i] = xi;
      auto r = f(probe);
      probe[i] = x[i];
      return r;
    };
    PathFn pi;
    if (path) {
      pi = [&](double xi) {
        probe[i] = xi;
        auto r = path(probe);
        probe[i] = x[i];
        return r;
      };
    }
    FDResult r = fd_derivative(fi, x[i], cfg, pi);
    out.grad.push_back(r.estimate);
    out.stability.push_back(r.stability);
  }
  return out;
}

double normal_z(double confidence) {
  boost::math::normal_distribution<double> n;
  return boost::math::quantile(n, 0.5 + confidence / 2.0);
}

MeanCI mc_mean_ci(std::span<const double> samples, double confidence) {
  if (samples.size() < 2) throw std::invalid_argument("mc_mean_ci needs at least two samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  double sum = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("mc_mean_ci given a non-finite sample");
    sum += s;
  }
  const double n = static_cast<double>(samples.size());
  MeanCI out;
  out.mean = sum / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - out.mean) * (s - out.mean);
  out.degenerate = std::all_of(samples.begin(), samples.end(), [&](double s) { return s == samples[0]; });
  if (out.degenerate) return out;
  out.halfwidth = normal_z(confidence) * std::sqrt(ss / (n - 1.0) / n);
  return out;
}

}  // namespace pap
