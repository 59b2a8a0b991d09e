#include "pap/prob.hpp"

#include <Eigen/SVD>

#include "pap/ad.hpp"
#include "pap/rng.hpp"

namespace pap {

WeightedOutcome run_trace(const Term& t, std::span<const double> trace, std::uint64_t fuel, const Env& env) {
  TraceFeed feed;
  feed.values.assign(trace.begin(), trace.end());
  RunConfig cfg;
  cfg.fuel = fuel;
  cfg.trace = &feed;
  RunResult r = run(t, env, cfg);
  WeightedOutcome out;
  out.status = r.status;
  out.value = r.value;
  out.weight = r.ok() ? r.weight : 0.0;
  out.consumed = r.consumed;
  out.remainder.assign(trace.begin() + static_cast<std::ptrdiff_t>(r.consumed), trace.end());
  out.steps = r.steps;
  out.path = r.path;
  return out;
}

double weight_fn(const Term& t, std::span<const double> trace, std::uint64_t fuel) {
  WeightedOutcome o = run_trace(t, trace, fuel);
  return o.ok() && o.remainder.empty() ? o.weight : 0.0;
}

Simulation simulate(const Term& t, const SimConfig& cfg, std::uint64_t index) {
  Rng rng(cfg.seed, index);
  TraceFeed feed;
  feed.more = [&rng] { return rng.uniform(); };
  feed.max_len = cfg.max_trace_len;
  RunConfig rc;
  rc.fuel = cfg.fuel;
  rc.trace = &feed;
  RunResult r = run(t, Env{}, rc);
  Simulation s;
  s.outcome.status = r.status;
  s.outcome.value = r.value;
  s.outcome.weight = r.ok() ? r.weight : 0.0;
  s.outcome.consumed = r.consumed;
  s.outcome.steps = r.steps;
  s.outcome.path = r.path;
  s.trace.assign(feed.values.begin(), feed.values.begin() + static_cast<std::ptrdiff_t>(r.consumed));
  return s;
}

double TestFn::operator()(const Value& v) const {
  switch (kind) {
    case Kind::TotalMass:
      return 1.0;
    case Kind::CoordinateMean: {
      std::vector<double> xs;
      flatten_reals(v, xs);
      if (coord >= xs.size()) throw std::invalid_argument("coordinate " + std::to_string(coord) + " out of range");
      return xs[coord];
    }
    case Kind::Box: {
      std::vector<double> xs;
      flatten_reals(v, xs);
      if (box.size() > xs.size()) throw std::invalid_argument("box has more intervals than the value has coordinates");
      for (std::size_t i = 0; i < box.size(); ++i)
        if (!(xs[i] >= box[i].first && xs[i] <= box[i].second)) return 0.0;
      return 1.0;
    }
  }
  return 0.0;
}

Estimate estimate(const Term& t, const TestFn& f, std::size_t N, const SimConfig& cfg) {
  std::vector<double> ys;
  ys.reserve(N);
  Estimate e;
  e.n = N;
  for (std::size_t i = 0; i < N; ++i) {
    Simulation s = simulate(t, cfg, i);
    if (!s.outcome.ok()) {
      ++e.failures;
      ys.push_back(0.0);
      continue;
    }
    double w = s.outcome.weight;
    ys.push_back(w == 0.0 ? 0.0 : w * f(s.outcome.value));
  }
  if (N >= 2) {
    MeanCI ci = mc_mean_ci(ys);
    e.mean = ci.mean;
    e.halfwidth = ci.halfwidth;
  } else if (N == 1) {
    e.mean = ys[0];
  }
  return e;
}

namespace {

RunResult run_dual(const Term& dt, std::span<const double> trace, std::size_t slot, std::uint64_t fuel) {
  TraceFeed feed;
  feed.values.assign(trace.begin(), trace.end());
  feed.tangents.assign(trace.size(), 0.0);
  if (slot < trace.size()) feed.tangents[slot] = 1.0;
  RunConfig cfg;
  cfg.fuel = fuel;
  cfg.trace = &feed;
  return run(dt, Env{}, cfg);
}

WeightGrad weight_grad_with(const Term& t, const Term& dt, std::span<const double> trace, std::uint64_t fuel) {
  WeightGrad g;
  g.grad.assign(trace.size(), 0.0);
  WeightedOutcome o = run_trace(t, trace, fuel);
  if (!o.ok()) {
    g.status = o.status;
    return g;
  }
  g.weight = o.remainder.empty() ? o.weight : 0.0;
  if (g.weight == 0.0) return g;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    RunResult r = run_dual(dt, trace, i, fuel);
    if (!r.ok()) {
      g.status = r.status;
      return g;
    }
    g.grad[i] = r.weight_tangent;
  }
  return g;
}

std::uint64_t outcome_signature(const WeightedOutcome& o) {
  std::uint64_t h = o.path;
  h ^= (static_cast<std::uint64_t>(o.status) + 1) * 0x9e3779b97f4a7c15ULL;
  h ^= (o.consumed + 1) * 0xc2b2ae3d27d4eb4fULL;
  h ^= (o.remainder.size() + 1) * 0x165667b19e3779f9ULL;
  return h;
}

}  // namespace

WeightGrad weight_grad(const Term& t, std::span<const double> trace, std::uint64_t fuel) {
  return weight_grad_with(t, ad_transform(t), trace, fuel);
}

double AeReport::boundary_fraction() const {
  std::size_t total = interior_checks + flags.size();
  return total == 0 ? 0.0 : static_cast<double>(flags.size()) / static_cast<double>(total);
}

AeReport ae_diff_check_at(const Term& t, const std::vector<std::vector<double>>& traces, const AeConfig& cfg) {
  const Term dt = ad_transform(t);
  const std::uint64_t fuel = cfg.sim.fuel;
  FDConfig fd = cfg.fd;
  fd.lower = 0.0;
  fd.upper = 1.0;
  AeReport rep;
  rep.traces = traces.size();
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const std::vector<double>& r = traces[k];
    WeightGrad g = weight_grad_with(t, dt, r, fuel);
    if (!g.ok() || g.weight == 0.0) {
      ++rep.skipped;
      continue;
    }
    std::vector<double> probe = r;
    for (std::size_t i = 0; i < r.size(); ++i) {
      ScalarFn f = [&](double y) -> std::optional<double> {
        probe[i] = y;
        double w = weight_fn(t, probe, fuel);
        probe[i] = r[i];
        return w;
      };
      PathFn path = [&](double y) -> std::optional<std::uint64_t> {
        probe[i] = y;
        WeightedOutcome o = run_trace(t, probe, fuel);
        probe[i] = r[i];
        return outcome_signature(o);
      };
      bool boundary = false;
      double est = 0.0;
      try {
        FDResult res = fd_derivative(f, r[i], fd, path);
        boundary = res.stability == Stability::SuspectedBoundary;
        est = res.estimate;
      } catch (const UndefinedNearPoint&) {
        boundary = true;
      }
      if (boundary) {
        rep.flags.push_back({k, i, r[i]});
        continue;
      }
      ++rep.interior_checks;
      if (!close_enough(g.grad[i], est, fd.rtol, fd.atol)) ++rep.interior_disagreements;
    }
  }
  return rep;
}

AeReport ae_diff_check(const Term& t, std::size_t n_traces, const AeConfig& cfg) {
  std::vector<std::vector<double>> traces;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < n_traces; ++i) {
    Simulation s = simulate(t, cfg.sim, i);
    if (s.outcome.ok())
      traces.push_back(std::move(s.trace));
    else
      ++failed;
  }
  AeReport rep = ae_diff_check_at(t, traces, cfg);
  rep.traces += failed;
  rep.skipped += failed;
  return rep;
}

double RankHistogram::fraction(std::size_t rank) const {
  auto it = counts.find(rank);
  if (it == counts.end() || dims.empty()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(dims.size());
}

std::size_t numerical_rank(std::span<const double> m, std::size_t rows, std::size_t cols, double tolerance) {
  if (rows == 0 || cols == 0) return 0;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i * cols + j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tolerance * s(0)) ++rank;
  return rank;
}

RankHistogram support_dim(const Term& t, std::size_t n_samples, const DimConfig& cfg) {
  const Term dt = ad_transform(t);
  RankHistogram h;
  h.tolerance = cfg.tolerance;
  for (std::size_t k = 0; k < n_samples; ++k) {
    Simulation s = simulate(t, cfg.sim, k);
    if (!s.outcome.ok()) {
      ++h.skipped;
      continue;
    }
    std::vector<double> out;
    try {
      flatten_reals(s.outcome.value, out);
    } catch (const std::invalid_argument&) {
      ++h.skipped;
      continue;
    }
    const std::size_t rows = out.size();
    const std::size_t cols = s.trace.size();
    std::vector<double> jac(rows * cols, 0.0);
    bool ok = true;
    for (std::size_t j = 0; j < cols && ok; ++j) {
      RunResult r = run_dual(dt, s.trace, j, cfg.sim.fuel);
      if (!r.ok()) {
        ok = false;
        break;
      }
      std::vector<double> primal, tangent;
      flatten_dual(r.value, primal, tangent);
      for (std::size_t i = 0; i < rows; ++i) jac[i * cols + j] = tangent[i];
    }
    if (!ok) {
      ++h.skipped;
      continue;
    }
    ++h.counts[numerical_rank(jac, rows, cols, cfg.tolerance)];
    h.dims.emplace_back(rows, cols);
  }
  return h;
}

}  // namespace pap
