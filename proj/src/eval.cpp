#include "pap/eval.hpp"

#include "pap/primitives.hpp"

namespace pap {

const char* to_string(Status s) {
  switch (s) {
    case Status::Val:
      return "val";
    case Status::DomainError:
      return "domain_error";
    case Status::FuelExhausted:
      return "fuel_exhausted";
    case Status::Incomplete:
      return "incomplete";
    case Status::TraceOverflow:
      return "trace_overflow";
  }
  return "?";
}

namespace {

struct Weight {
  double w = 1.0;
  double dw = 0.0;
  bool is_one() const { return w == 1.0 && dw == 0.0; }
};

// Product rule; for dw == 0 the primal is the plain product.
Weight operator*(Weight a, Weight b) { return {a.w * b.w, a.dw * b.w + a.w * b.dw}; }

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
  std::uint64_t z = h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class FrameKind : std::uint8_t {
  PrimArg,
  PairSecond,
  PairBuild,
  MatchBody,
  IfBranch,
  AppArg,
  AppCall,
  ScoreApply,
  Combine,
};

struct Frame {
  explicit Frame(FrameKind k, const Term::Node* n = nullptr, Env e = {}) : kind(k), node(n), env(std::move(e)) {}

  FrameKind kind;
  std::uint8_t index = 0;
  const Term::Node* node = nullptr;
  Env env;
  Value vals[2];
  Weight ws[2];
};

using Node = Term::Node;

class Machine {
 public:
  explicit Machine(const RunConfig& cfg) : cfg_(cfg) {}

  RunResult eval(const Term* t, Env env) { return exec(t, std::move(env), true, {}, {}); }

  RunResult apply(const Value& fn, std::span<const Value> args) {
    RunResult last;
    last.value = fn;
    Weight total;
    for (const Value& a : args) {
      Frame f(FrameKind::AppCall);
      f.vals[0] = last.value;
      stack_.push_back(std::move(f));
      last = exec(nullptr, {}, false, a, {});
      if (!last.ok()) return last;
      total = total * Weight{last.weight, last.weight_tangent};
    }
    last.weight = total.w;
    last.weight_tangent = total.dw;
    return finish(last.value, total);
  }

 private:
  RunResult stop(Status s) {
    stack_.clear();
    RunResult r;
    r.status = s;
    r.weight = 0.0;
    r.consumed = cursor_;
    r.steps = steps_;
    r.path = path_;
    return r;
  }

  RunResult finish(Value v, Weight w) {
    RunResult r;
    r.status = Status::Val;
    r.value = std::move(v);
    r.weight = w.w;
    r.weight_tangent = w.dw;
    r.consumed = cursor_;
    r.steps = steps_;
    r.path = path_;
    return r;
  }

  bool spend() {
    if (steps_ >= cfg_.fuel) return false;
    ++steps_;
    return true;
  }

  void push_combine(Weight w) {
    if (w.is_one()) return;
    Frame f(FrameKind::Combine);
    f.ws[0] = w;
    stack_.push_back(std::move(f));
  }

  // Sets (t, env) to the body of `fn` applied to `arg`. False when fuel runs
  // out on a mu unfolding.
  bool enter(const Value& fn, Value arg, const Term*& t, Env& env) {
    const ClosureCell& c = fn.closure_cell();
    const Node& code = c.code.node();
    if (c.recursive) {
      if (!spend()) return false;
      env = c.env.bind(code.name2, fn).bind(code.name, std::move(arg));
    } else {
      env = c.env.bind(code.name, std::move(arg));
    }
    t = &code.kids[0];
    return true;
  }

  RunResult exec(const Term* t, Env env, bool eval_mode, Value v, Weight w) {
    for (;;) {
      if (eval_mode) {
        const Node& tn = t->node();
        switch (tn.kind) {
          case TermKind::Var: {
            const Value* found = env.find(tn.name);
            if (found == nullptr) throw std::logic_error("unbound variable '" + tn.name + "' at runtime");
            v = *found;
            w = {};
            eval_mode = false;
            break;
          }
          case TermKind::ConstReal:
            v = Value::real(tn.real);
            w = {};
            eval_mode = false;
            break;
          case TermKind::ConstBool:
            v = Value::boolean(tn.boolean);
            w = {};
            eval_mode = false;
            break;
          case TermKind::ConstUnit:
            v = Value::unit();
            w = {};
            eval_mode = false;
            break;
          case TermKind::Lam:
          case TermKind::Mu: {
            v = tn.kind == TermKind::Lam ? Value::closure(env, *t) : Value::rec_closure(env, *t);
            w = {};
            eval_mode = false;
            break;
          }
          case TermKind::Prim:
            stack_.push_back(Frame(FrameKind::PrimArg, &tn, env));
            t = &tn.kids[0];
            break;
          case TermKind::Pair:
            stack_.push_back(Frame(FrameKind::PairSecond, &tn, env));
            t = &tn.kids[0];
            break;
          case TermKind::MatchPair:
            stack_.push_back(Frame(FrameKind::MatchBody, &tn, env));
            t = &tn.kids[0];
            break;
          case TermKind::If:
            stack_.push_back(Frame(FrameKind::IfBranch, &tn, env));
            t = &tn.kids[0];
            break;
          case TermKind::App:
            stack_.push_back(Frame(FrameKind::AppArg, &tn, env));
            t = &tn.kids[0];
            break;
          case TermKind::Sample: {
            if (cfg_.trace == nullptr) throw NotDeterministic();
            TraceFeed& tr = *cfg_.trace;
            if (cursor_ >= tr.values.size()) {
              if (!tr.more) return stop(Status::Incomplete);
              if (tr.values.size() >= tr.max_len) return stop(Status::TraceOverflow);
              tr.values.push_back(tr.more());
            }
            double r = tr.values[cursor_];
            double dr = cursor_ < tr.tangents.size() ? tr.tangents[cursor_] : 0.0;
            ++cursor_;
            path_ = mix(path_, 3);
            v = tn.dual ? Value::pair(Value::real(r), Value::real(dr)) : Value::real(r);
            w = {};
            eval_mode = false;
            break;
          }
          case TermKind::Score:
            if (cfg_.trace == nullptr) throw NotDeterministic();
            stack_.push_back(Frame(FrameKind::ScoreApply, &tn, env));
            t = &tn.kids[0];
            break;
        }
        continue;
      }

      if (stack_.empty()) return finish(std::move(v), w);
      Frame& f = stack_.back();
      switch (f.kind) {
        case FrameKind::PrimArg: {
          f.vals[f.index] = std::move(v);
          f.ws[f.index] = w;
          ++f.index;
          if (f.index < f.node->kids.size()) {
            t = &f.node->kids[f.index];
            env = f.env;
            eval_mode = true;
            break;
          }
          if (!spend()) return stop(Status::FuelExhausted);
          const Node* n = f.node;
          std::span<const Value> args(f.vals, n->kids.size());
          int piece = -1;
          auto r = n->dual ? dual_prim(*n->prim, args, &piece) : eval_prim(*n->prim, args, &piece);
          if (!r) return stop(Status::DomainError);
          if (piece >= 0) path_ = mix(path_, 16 + static_cast<std::uint64_t>(piece));
          w = n->kids.size() == 1 ? f.ws[0] : f.ws[0] * f.ws[1];
          v = std::move(*r);
          stack_.pop_back();
          break;
        }
        case FrameKind::PairSecond:
          f.vals[0] = std::move(v);
          f.ws[0] = w;
          f.kind = FrameKind::PairBuild;
          t = &f.node->kids[1];
          env = f.env;
          eval_mode = true;
          break;
        case FrameKind::PairBuild:
          v = Value::pair(std::move(f.vals[0]), std::move(v));
          w = f.ws[0] * w;
          stack_.pop_back();
          break;
        case FrameKind::MatchBody: {
          const Node* n = f.node;
          env = f.env.bind(n->name, v.first()).bind(n->name2, v.second());
          t = &n->kids[1];
          stack_.pop_back();
          push_combine(w);
          eval_mode = true;
          break;
        }
        case FrameKind::IfBranch: {
          bool b = v.as_bool();
          path_ = mix(path_, b ? 1 : 2);
          t = &f.node->kids[b ? 1 : 2];
          env = f.env;
          stack_.pop_back();
          push_combine(w);
          eval_mode = true;
          break;
        }
        case FrameKind::AppArg:
          f.vals[0] = std::move(v);
          f.ws[0] = w;
          f.kind = FrameKind::AppCall;
          t = &f.node->kids[1];
          env = f.env;
          eval_mode = true;
          break;
        case FrameKind::AppCall: {
          Value fn = std::move(f.vals[0]);
          Weight wf = f.ws[0];
          stack_.pop_back();
          push_combine(wf);
          push_combine(w);
          if (!enter(fn, std::move(v), t, env)) return stop(Status::FuelExhausted);
          eval_mode = true;
          break;
        }
        case FrameKind::ScoreApply: {
          double s = f.node->dual ? v.first().as_real() : v.as_real();
          double ds = f.node->dual ? v.second().as_real() : 0.0;
          // 0 v s: the s < 0 piece is the constant 0 (NaN also maps there);
          // adding +0.0 turns a -0.0 score into +0.0
          Weight factor = (s >= 0.0) ? Weight{s + 0.0, ds} : Weight{0.0, 0.0};
          w = w * factor;
          v = Value::unit();
          stack_.pop_back();
          break;
        }
        case FrameKind::Combine:
          w = f.ws[0] * w;
          stack_.pop_back();
          break;
      }
    }
  }

  const RunConfig& cfg_;
  std::vector<Frame> stack_;
  std::uint64_t steps_ = 0;
  std::size_t cursor_ = 0;
  std::uint64_t path_ = 0;
};

}  // namespace

RunResult run(const Term& t, const Env& env, const RunConfig& cfg) {
  Machine m(cfg);
  return m.eval(&t, env);
}

RunResult run_apply(const Value& fn, std::span<const Value> args, const RunConfig& cfg) {
  Machine m(cfg);
  return m.apply(fn, args);
}

namespace {

Outcome to_outcome(const RunResult& r) { return Outcome{r.status, r.value, r.steps}; }

}  // namespace

Outcome eval(const Term& t, const Env& env, std::uint64_t fuel) {
  RunConfig cfg;
  cfg.fuel = fuel;
  return to_outcome(run(t, env, cfg));
}

Outcome eval_closed(const Term& t, std::uint64_t fuel) {
  if (!t.free_vars().empty()) throw std::invalid_argument("term has free variable '" + t.free_vars().front() + "'");
  if (t.is_probabilistic()) throw NotDeterministic();
  return eval(t, Env{}, fuel);
}

Outcome apply(const Value& fn, std::span<const Value> args, std::uint64_t fuel) {
  RunConfig cfg;
  cfg.fuel = fuel;
  return to_outcome(run_apply(fn, args, cfg));
}

}  // namespace pap
