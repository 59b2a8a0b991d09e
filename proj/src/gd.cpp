#include "pap/gd.hpp"

#include <cmath>

#include "pap/ad.hpp"
#include "pap/rng.hpp"
#include "pap/typecheck.hpp"

namespace pap {

const char* to_string(GradMode m) { return m == GradMode::AD ? "ad" : "fd"; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::Exhausted:
      return "exhausted";
    case Termination::Undefined:
      return "undefined";
  }
  return "?";
}

bool Trajectory::monotone() const {
  for (std::size_t i = 1; i < f.size(); ++i)
    if (!(f[i] <= f[i - 1])) return false;
  return true;
}

namespace {

Value lift_reals(const Type& ty, std::span<const double> x, std::size_t& offset) {
  if (ty.is(TypeKind::Real)) return Value::real(x[offset++]);
  Value a = lift_reals(ty.left(), x, offset);
  Value b = lift_reals(ty.right(), x, offset);
  return Value::pair(std::move(a), std::move(b));
}

Value closure_of(const Term& t, std::uint64_t fuel) {
  Outcome o = eval_closed(t, fuel);
  if (!o.ok()) throw std::invalid_argument(std::string("objective did not evaluate to a function: ") + to_string(o.status));
  return o.value;
}

double norm(std::span<const double> g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

}  // namespace

struct Objective::Impl {
  RealSignature sig;
  Value fn;
  Value dual_fn;
  std::uint64_t fuel;

  RunResult call(const Value& f, std::vector<Value> args) const {
    RunConfig cfg;
    cfg.fuel = fuel;
    return run_apply(f, args, cfg);
  }

  std::vector<Value> primal_args(std::span<const double> x) const {
    std::vector<Value> args;
    std::size_t off = 0;
    for (const Type& a : sig.args) args.push_back(lift_reals(a, x, off));
    return args;
  }
};

Objective::Objective(const Term& t, std::uint64_t fuel) {
  auto impl = std::make_shared<Impl>();
  impl->sig = real_signature(typecheck(Context{}, t));
  if (impl->sig.output_dim != 1) throw std::invalid_argument("objective must return a single real");
  impl->fn = closure_of(t, fuel);
  impl->dual_fn = closure_of(ad_transform(t), fuel);
  impl->fuel = fuel;
  dim_ = impl->sig.input_dim;
  impl_ = std::move(impl);
}

std::optional<double> Objective::value(std::span<const double> x) const {
  RunResult r = impl_->call(impl_->fn, impl_->primal_args(x));
  if (!r.ok()) return std::nullopt;
  return r.value.as_real();
}

std::optional<std::uint64_t> Objective::path(std::span<const double> x) const {
  RunResult r = impl_->call(impl_->fn, impl_->primal_args(x));
  if (!r.ok()) return std::nullopt;
  return r.path;
}

std::optional<std::vector<double>> Objective::ad_grad(std::span<const double> x) const {
  std::vector<double> g;
  std::vector<double> seed(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    seed[i] = 1.0;
    std::vector<Value> args;
    std::size_t off = 0;
    for (const Type& a : impl_->sig.args) args.push_back(lift_dual(a, x, seed, off));
    seed[i] = 0.0;
    RunResult r = impl_->call(impl_->dual_fn, std::move(args));
    if (!r.ok()) return std::nullopt;
    g.push_back(r.value.second().as_real());
  }
  return g;
}

VectorFn Objective::as_vector_fn() const {
  return [self = *this](std::span<const double> x) { return self.value(x); };
}

VectorPathFn Objective::as_path_fn() const {
  return [self = *this](std::span<const double> x) { return self.path(x); };
}

Trajectory gd_run(const Term& t, std::span<const double> x0, const GDConfig& cfg) {
  return gd_run(Objective(t, cfg.fuel), x0, cfg);
}

Trajectory gd_run(const Objective& f, std::span<const double> x0, const GDConfig& cfg) {
  if (!(cfg.eps > 0.0) || cfg.T < 1) throw std::invalid_argument("gd_run needs eps > 0 and T >= 1");
  if (x0.size() != f.dim()) throw std::invalid_argument("x0 has the wrong dimension");
  Trajectory tr;
  VectorFn fn = f.as_vector_fn();
  std::vector<double> x(x0.begin(), x0.end());
  for (std::size_t t = 0;; ++t) {
    std::optional<double> fx = f.value(x);
    std::optional<std::vector<double>> g;
    if (fx) {
      if (cfg.mode == GradMode::AD) {
        g = f.ad_grad(x);
      } else {
        try {
          g = fd_gradient(fn, x, cfg.fd).grad;
        } catch (const UndefinedNearPoint&) {
        }
      }
    }
    if (!fx || !g) {
      tr.x.push_back(x);
      tr.termination = Termination::Undefined;
      tr.undefined_step = t;
      return tr;
    }
    tr.x.push_back(x);
    tr.grads.push_back(*g);
    tr.f.push_back(*fx);
    if (norm(*g) < cfg.stop_tol) {
      tr.termination = Termination::Converged;
      return tr;
    }
    if (t == cfg.T) {
      tr.termination = Termination::Exhausted;
      return tr;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] - cfg.eps * (*g)[i];
  }
}

RandomizedGDReport randomized_gd(const Term& t, const RandomizedGDConfig& cfg) {
  if (!(cfg.L > 0.0)) throw std::invalid_argument("L must be positive");
  Objective f(t, cfg.gd.fuel);
  VectorFn fn = f.as_vector_fn();
  VectorPathFn pfn = f.as_path_fn();
  const double eps_hi = 2.0 / cfg.L;
  RandomizedGDReport rep;
  std::vector<double> hits;
  for (std::size_t i = 0; i < cfg.n_seeds; ++i) {
    Rng rng(cfg.seed, i);
    SeedResult s;
    s.index = i;
    if (cfg.fixed_eps) {
      s.eps = *cfg.fixed_eps;
    } else {
      do s.eps = eps_hi * rng.uniform();
      while (!(s.eps > 0.0 && s.eps < eps_hi));
    }
    for (std::size_t d = 0; d < f.dim(); ++d) s.x0.push_back(rng.uniform(cfg.x0_lo, cfg.x0_hi));
    GDConfig gcfg = cfg.gd;
    gcfg.eps = s.eps;
    Trajectory tr = gd_run(f, s.x0, gcfg);
    s.x_final = tr.x.back();
    s.steps = tr.x.size() - 1;
    s.termination = tr.termination;
    s.monotone = tr.monotone();
    if (tr.termination != Termination::Undefined) {
      try {
        FDGradient g = fd_gradient(fn, s.x_final, cfg.gd.fd, pfn);
        if (g.all_interior()) s.final_grad_norm = norm(g.grad);
      } catch (const UndefinedNearPoint&) {
      }
    }
    if (!s.final_grad_norm) ++rep.indeterminate;
    s.converged = s.final_grad_norm && *s.final_grad_norm < cfg.gd.stop_tol;
    if (s.converged) ++rep.converged;
    hits.push_back(s.converged ? 1.0 : 0.0);
    rep.seeds.push_back(std::move(s));
  }
  if (!hits.empty()) rep.converged_fraction = static_cast<double>(rep.converged) / static_cast<double>(hits.size());
  if (hits.size() >= 2) rep.ci_halfwidth = mc_mean_ci(hits).halfwidth;
  return rep;
}

SmoothnessEstimate smoothness_probe(const Term& t, std::size_t sample_count, double lo, double hi,
                                    std::uint64_t seed, std::uint64_t fuel) {
  // Each random pair is refined by bisection toward the half whose gradients
  // differ most; a kink makes the ratio grow like 1/separation, a smooth
  // gradient keeps it bounded.
  constexpr int kLevels = 20;
  constexpr int kRecordEvery = 5;
  Objective f(t, fuel);
  VectorFn fn = f.as_vector_fn();
  const std::size_t d = f.dim();
  SmoothnessEstimate out;
  const double sep0 = (hi - lo) / 4.0;
  for (int l = 0; l <= kLevels; l += kRecordEvery) {
    out.scales.push_back(sep0 * std::ldexp(1.0, -l));
    out.per_scale.push_back(0.0);
  }
  auto grad = [&](const std::vector<double>& x) -> std::optional<std::vector<double>> {
    try {
      return fd_gradient(fn, x, FDConfig{}).grad;
    } catch (const UndefinedNearPoint&) {
      return std::nullopt;
    }
  };
  auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  Rng rng(seed, 0x5300);
  for (std::size_t k = 0; k < sample_count; ++k) {
    std::vector<double> a(d), b(d), u(d);
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = rng.uniform(lo, hi);
      u[i] = rng.uniform(-1.0, 1.0);
    }
    double un = norm(u);
    for (std::size_t i = 0; i < d; ++i) b[i] = a[i] + sep0 * u[i] / un;
    auto ga = grad(a);
    auto gb = grad(b);
    if (!ga || !gb) {
      ++out.skipped;
      continue;
    }
    for (int l = 0; l <= kLevels; ++l) {
      double ratio = dist(*ga, *gb) / dist(a, b);
      if (l % kRecordEvery == 0) {
        double& m = out.per_scale[static_cast<std::size_t>(l / kRecordEvery)];
        m = std::max(m, ratio);
      }
      std::vector<double> mid(d);
      for (std::size_t i = 0; i < d; ++i) mid[i] = a[i] + (b[i] - a[i]) / 2.0;
      auto gm = grad(mid);
      if (!gm) {
        ++out.skipped;
        break;
      }
      if (dist(*ga, *gm) >= dist(*gm, *gb)) {
        b = mid;
        gb = gm;
      } else {
        a = mid;
        ga = gm;
      }
    }
  }
  for (double m : out.per_scale) out.L = std::max(out.L, m);
  out.smooth = !(out.per_scale.back() > 10.0 * out.per_scale.front() + 1e-6);
  return out;
}

}  // namespace pap
