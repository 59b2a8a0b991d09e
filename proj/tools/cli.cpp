#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <tuple>

#include "pap/ad.hpp"
#include "pap/eval.hpp"
#include "pap/format.hpp"
#include "pap/gd.hpp"
#include "pap/parser.hpp"
#include "pap/primitives.hpp"
#include "pap/printer.hpp"
#include "pap/prob.hpp"
#include "pap/typecheck.hpp"

namespace pap::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

struct Program {
  std::string source;
  Term term;
  Type type;
};

Program load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Program p;
  p.source = ss.str();
  p.term = parse(p.source);
  if (!p.term.free_vars().empty()) throw UserError("program has free variable '" + p.term.free_vars().front() + "'");
  p.type = typecheck(Context{}, p.term);
  return p;
}

json real_json(double x) { return std::isfinite(x) ? json(x) : json(format_real(x)); }

json value_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Real:
      return real_json(v.as_real());
    case ValueKind::Bool:
      return v.as_bool();
    case ValueKind::Unit:
      return nullptr;
    case ValueKind::Pair:
      return json::array({value_json(v.first()), value_json(v.second())});
    case ValueKind::Closure:
    case ValueKind::RecClosure:
      return "<closure>";
  }
  return nullptr;
}

json reals_json(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(real_json(x));
  return a;
}

std::string csv_real(double x) { return format_real(x); }

// Shared state of one invocation.
struct Session {
  std::string command;
  std::string file;
  std::uint64_t fuel = kDefaultFuel;
  std::uint64_t seed = 0;
  bool stable = false;
  Clock::time_point start = Clock::now();
  json config = json::object();
  std::ostream* out = nullptr;

  json manifest(const Program& p) const {
    json m;
    m["command"] = command;
    m["program"] = file;
    m["program_hash"] = fnv1a(p.source);
    m["seed"] = seed;
    m["config"] = config;
    m["version"] = kVersion;
    if (!stable) {
      m["timing_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    return m;
  }

  json doc() const {
    json d;
    d["schema"] = "pap/1";
    d["command"] = command;
    return d;
  }

  void emit(json d, const Program& p, const std::string& path = "-") const {
    d["manifest"] = manifest(p);
    write(d.dump(2) + "\n", path);
  }

  void write(const std::string& content, const std::string& path) const {
    if (path.empty() || path == "-") {
      *out << content;
      return;
    }
    std::ofstream f(path);
    if (!f) throw UserError("cannot write '" + path + "'");
    f << content;
  }
};

std::vector<double> read_trace(const std::string& spec) {
  std::string text = spec;
  if (!spec.empty() && std::filesystem::is_regular_file(spec)) {
    std::ifstream in(spec);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<double> out;
  std::string tok;
  auto flush = [&] {
    std::size_t b = tok.find_first_not_of(" \t\r");
    if (b != std::string::npos) {
      std::size_t e = tok.find_last_not_of(" \t\r");
      std::string s = tok.substr(b, e - b + 1);
      try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        out.push_back(v);
      } catch (const std::exception&) {
        throw UserError("bad trace entry '" + s + "'");
      }
    }
    tok.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '\n') {
      flush();
    } else {
      tok += c;
    }
  }
  flush();
  return out;
}

std::pair<double, double> parse_range(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw UserError("expected lo,hi but got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UserError("expected lo,hi but got '" + s + "'");
  }
}

TestFn parse_event(const std::string& ev) {
  if (ev == "mass") return TestFn::total_mass();
  if (ev.rfind("mean:", 0) == 0) {
    try {
      return TestFn::coordinate_mean(std::stoul(ev.substr(5)));
    } catch (const std::exception&) {
      throw UserError("bad coordinate in '" + ev + "'");
    }
  }
  if (ev.rfind("box:", 0) == 0) {
    std::vector<std::pair<double, double>> box;
    std::string rest = ev.substr(4);
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t semi = rest.find(';', start);
      std::string part = rest.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
      box.push_back(parse_range(part));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    return TestFn::in_box(std::move(box));
  }
  throw UserError("unknown event '" + ev + "' (use mass, mean:I or box:LO,HI[;LO,HI...])");
}

json status_json(Status s) { return to_string(s); }

bool is_bottom(Status s) { return s == Status::DomainError || s == Status::FuelExhausted; }

void require_deterministic(const Program& p) {
  if (p.term.is_probabilistic())
    throw UserError("program uses sample/score; run it with trace, weight, simulate or estimate");
}

// --- subcommands ---------------------------------------------------------

int cmd_run(Session& s, const std::vector<double>& args) {
  Program p = load(s.file);
  require_deterministic(p);
  Term call = p.term;
  for (double a : args) call = Term::app(call, Term::real(a));
  typecheck(Context{}, call);
  s.config["fuel"] = s.fuel;
  s.config["args"] = reals_json(args);
  Outcome o = eval_closed(call, s.fuel);
  json d = s.doc();
  if (o.ok()) {
    d["status"] = "val";
    d["value"] = value_json(o.value);
  } else {
    d["status"] = "bottom";
    d["reason"] = status_json(o.status);
  }
  d["steps"] = o.steps;
  s.emit(d, p);
  return o.ok() ? kOk : kBottom;
}

int cmd_typecheck(Session& s) {
  Program p = load(s.file);
  json d = s.doc();
  d["type"] = to_string(p.type);
  d["probabilistic"] = p.term.is_probabilistic();
  s.emit(d, p);
  return kOk;
}

int cmd_ad(Session& s, bool emit_source) {
  Program p = load(s.file);
  Term dt = ad_transform(p.term);
  if (emit_source) {
    *s.out << print_term(dt) << "\n";
    return kOk;
  }
  json d = s.doc();
  d["type"] = to_string(dual_type(p.type));
  d["term"] = print_term(dt);
  s.emit(d, p);
  return kOk;
}

json deriv_report_json(const DerivReport& r, bool check) {
  json j;
  j["point"] = real_json(r.point);
  j["defined"] = r.defined;
  if (r.defined) j["ad"] = real_json(r.ad_value);
  if (check && r.defined) {
    j["fd"] = r.fd_value ? real_json(*r.fd_value) : json(nullptr);
    j["class"] = to_string(r.fd_class);
    j["abs_err"] = real_json(r.abs_err);
    j["rel_err"] = real_json(r.rel_err);
    j["agrees"] = r.agrees;
  }
  return j;
}

int cmd_grad(Session& s, const std::vector<double>& at, const std::vector<double>& seed_vec, bool check) {
  Program p = load(s.file);
  require_deterministic(p);
  RealSignature sig;
  try {
    sig = real_signature(p.type);
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  s.config["fuel"] = s.fuel;
  s.config["at"] = reals_json(at);
  if (!seed_vec.empty()) s.config["seed_vec"] = reals_json(seed_vec);
  s.config["check"] = check;
  json d = s.doc();

  if (sig.input_dim == 1 && sig.output_dim == 1 && seed_vec.empty()) {
    bool all_defined = true;
    json reports = json::array();
    for (double x : at) {
      DerivReport r;
      if (check) {
        std::vector<double> pt{x};
        r = check_intensional(p.term, pt, FDConfig{}, s.fuel).reports[0];
      } else {
        Outcome o = derivative(p.term, x, s.fuel);
        r.point = x;
        r.defined = o.ok();
        if (o.ok()) r.ad_value = o.value.as_real();
      }
      all_defined = all_defined && r.defined;
      reports.push_back(deriv_report_json(r, check));
    }
    if (reports.size() == 1) {
      for (auto& [k, v] : reports[0].items()) d[k] = v;
    } else {
      d["reports"] = reports;
    }
    s.emit(d, p);
    return all_defined ? kOk : kBottom;
  }

  if (at.size() != sig.input_dim)
    throw UserError("--at needs " + std::to_string(sig.input_dim) + " values for this program");
  d["at"] = reals_json(at);
  if (!seed_vec.empty()) {
    if (seed_vec.size() != sig.input_dim)
      throw UserError("--seed-vec needs " + std::to_string(sig.input_dim) + " values");
    JvpResult r = jvp(p.term, at, seed_vec, s.fuel);
    d["seed_vec"] = reals_json(seed_vec);
    d["defined"] = r.ok();
    if (r.ok()) {
      d["primal"] = reals_json(r.primal);
      d["tangent"] = reals_json(r.tangent);
    } else {
      d["reason"] = status_json(r.status);
    }
    s.emit(d, p);
    return r.ok() ? kOk : kBottom;
  }
  if (sig.output_dim != 1) throw UserError("vector-valued program: give --seed-vec for a JVP");
  JvpResult g = ad_gradient(p.term, at, s.fuel);
  d["defined"] = g.ok();
  if (!g.ok()) {
    d["reason"] = status_json(g.status);
    s.emit(d, p);
    return kBottom;
  }
  d["value"] = real_json(g.primal[0]);
  d["ad"] = reals_json(g.tangent);
  if (check) {
    Objective obj(p.term, s.fuel);
    try {
      FDGradient fd = fd_gradient(obj.as_vector_fn(), at, FDConfig{}, obj.as_path_fn());
      d["fd"] = reals_json(fd.grad);
      json cls = json::array();
      json agree = json::array();
      for (std::size_t i = 0; i < fd.grad.size(); ++i) {
        cls.push_back(to_string(fd.stability[i]));
        agree.push_back(close_enough(g.tangent[i], fd.grad[i], 1e-5, 1e-8));
      }
      d["class"] = cls;
      d["agrees"] = agree;
    } catch (const UndefinedNearPoint&) {
      d["fd"] = nullptr;
      d["class"] = "suspected-boundary";
    }
  }
  s.emit(d, p);
  return kOk;
}

int cmd_gd(Session& s, const std::vector<double>& x0, double eps, std::size_t T, const std::string& mode,
           double stop_tol, const std::string& csv, bool want_csv) {
  Program p = load(s.file);
  require_deterministic(p);
  GDConfig cfg;
  cfg.eps = eps;
  cfg.T = T;
  cfg.stop_tol = stop_tol;
  cfg.fuel = s.fuel;
  if (mode == "ad")
    cfg.mode = GradMode::AD;
  else if (mode == "fd")
    cfg.mode = GradMode::FD;
  else
    throw UserError("--mode must be ad or fd");
  s.config["x0"] = reals_json(x0);
  s.config["eps"] = eps;
  s.config["T"] = T;
  s.config["mode"] = mode;
  s.config["stop_tol"] = stop_tol;
  s.config["fuel"] = s.fuel;
  Trajectory tr;
  try {
    tr = gd_run(p.term, x0, cfg);
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  const std::size_t d = x0.size();
  if (want_csv) {
    std::ostringstream os;
    os << "# " << s.manifest(p).dump() << "\n";
    os << "t";
    if (d == 1) {
      os << ",x,grad,f\n";
    } else {
      for (std::size_t i = 0; i < d; ++i) os << ",x" << i;
      for (std::size_t i = 0; i < d; ++i) os << ",grad" << i;
      os << ",f\n";
    }
    for (std::size_t t = 0; t < tr.f.size(); ++t) {
      os << t;
      for (double v : tr.x[t]) os << "," << csv_real(v);
      for (double v : tr.grads[t]) os << "," << csv_real(v);
      os << "," << csv_real(tr.f[t]) << "\n";
    }
    s.write(os.str(), csv);
  } else {
    json j = s.doc();
    j["termination"] = to_string(tr.termination);
    if (tr.termination == Termination::Undefined) j["undefined_step"] = tr.undefined_step;
    j["steps"] = tr.x.size() - 1;
    json xs = json::array(), gs = json::array();
    for (const auto& x : tr.x) xs.push_back(d == 1 ? real_json(x[0]) : reals_json(x));
    for (const auto& g : tr.grads) gs.push_back(d == 1 ? real_json(g[0]) : reals_json(g));
    j["x"] = xs;
    j["grad"] = gs;
    j["f"] = reals_json(tr.f);
    j["monotone"] = tr.monotone();
    s.emit(j, p);
  }
  return tr.termination == Termination::Undefined ? kBottom : kOk;
}

int cmd_gd_random(Session& s, double L, std::size_t seeds, std::size_t T, double stop_tol, const std::string& range,
                  std::optional<double> fixed_eps, const std::string& json_path) {
  Program p = load(s.file);
  require_deterministic(p);
  RandomizedGDConfig cfg;
  cfg.L = L;
  cfg.n_seeds = seeds;
  cfg.seed = s.seed;
  std::tie(cfg.x0_lo, cfg.x0_hi) = parse_range(range);
  cfg.fixed_eps = fixed_eps;
  cfg.gd.T = T;
  cfg.gd.stop_tol = stop_tol;
  cfg.gd.fuel = s.fuel;
  s.config["L"] = L;
  s.config["seeds"] = seeds;
  s.config["T"] = T;
  s.config["stop_tol"] = stop_tol;
  s.config["x0_range"] = {cfg.x0_lo, cfg.x0_hi};
  if (fixed_eps) s.config["fixed_eps"] = *fixed_eps;
  s.config["fuel"] = s.fuel;
  RandomizedGDReport rep;
  try {
    rep = randomized_gd(p.term, cfg);
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  json d = s.doc();
  d["converged"] = rep.converged;
  d["indeterminate"] = rep.indeterminate;
  d["converged_fraction"] = rep.converged_fraction;
  d["ci95"] = rep.ci_halfwidth;
  json per = json::array();
  for (const SeedResult& r : rep.seeds) {
    json j;
    j["index"] = r.index;
    j["eps"] = real_json(r.eps);
    j["x0"] = reals_json(r.x0);
    j["x_final"] = reals_json(r.x_final);
    j["steps"] = r.steps;
    j["termination"] = to_string(r.termination);
    j["final_grad_norm"] = r.final_grad_norm ? real_json(*r.final_grad_norm) : json(nullptr);
    j["monotone"] = r.monotone;
    j["converged"] = r.converged;
    per.push_back(j);
  }
  d["seeds"] = per;
  s.emit(d, p, json_path);
  return kOk;
}

json weighted_json(const WeightedOutcome& o) {
  json j;
  j["status"] = status_json(o.status);
  if (o.ok()) j["value"] = value_json(o.value);
  j["weight"] = real_json(o.weight);
  j["consumed"] = o.consumed;
  j["remainder"] = reals_json(o.remainder);
  j["steps"] = o.steps;
  return j;
}

int cmd_trace(Session& s, const std::string& spec) {
  Program p = load(s.file);
  std::vector<double> tr = read_trace(spec);
  s.config["trace"] = reals_json(tr);
  s.config["fuel"] = s.fuel;
  WeightedOutcome o = run_trace(p.term, tr, s.fuel);
  json d = s.doc();
  json body = weighted_json(o);
  for (auto& [k, v] : body.items()) d[k] = v;
  s.emit(d, p);
  return is_bottom(o.status) ? kBottom : kOk;
}

int cmd_weight(Session& s, const std::string& spec) {
  Program p = load(s.file);
  std::vector<double> tr = read_trace(spec);
  s.config["trace"] = reals_json(tr);
  s.config["fuel"] = s.fuel;
  json d = s.doc();
  d["weight"] = real_json(weight_fn(p.term, tr, s.fuel));
  s.emit(d, p);
  return kOk;
}

int cmd_simulate(Session& s, std::size_t n, std::size_t max_len, bool want_csv, const std::string& csv) {
  Program p = load(s.file);
  SimConfig cfg{s.seed, max_len, s.fuel};
  s.config["N"] = n;
  s.config["max_trace_len"] = max_len;
  s.config["fuel"] = s.fuel;
  std::vector<Simulation> sims;
  for (std::size_t i = 0; i < n; ++i) sims.push_back(simulate(p.term, cfg, i));
  if (want_csv) {
    std::ostringstream os;
    os << "# " << s.manifest(p).dump() << "\n";
    os << "index,status,weight,consumed,value\n";
    for (std::size_t i = 0; i < n; ++i) {
      const WeightedOutcome& o = sims[i].outcome;
      os << i << "," << to_string(o.status) << "," << csv_real(o.weight) << "," << o.consumed << ",\""
         << (o.ok() ? to_string(o.value) : "") << "\"\n";
    }
    s.write(os.str(), csv);
    return kOk;
  }
  json d = s.doc();
  json runs = json::array();
  for (const Simulation& sim : sims) {
    json j = weighted_json(sim.outcome);
    j.erase("remainder");
    j["trace"] = reals_json(sim.trace);
    runs.push_back(j);
  }
  d["runs"] = runs;
  s.emit(d, p);
  return kOk;
}

int cmd_estimate(Session& s, const std::string& event, std::size_t n, std::size_t max_len) {
  Program p = load(s.file);
  TestFn f = parse_event(event);
  SimConfig cfg{s.seed, max_len, s.fuel};
  s.config["event"] = event;
  s.config["N"] = n;
  s.config["max_trace_len"] = max_len;
  s.config["fuel"] = s.fuel;
  Estimate e;
  try {
    e = estimate(p.term, f, n, cfg);
  } catch (const std::invalid_argument& ex) {
    throw UserError(ex.what());
  }
  json d = s.doc();
  d["mean"] = real_json(e.mean);
  d["halfwidth"] = real_json(e.halfwidth);
  d["ci95"] = {real_json(e.mean - e.halfwidth), real_json(e.mean + e.halfwidth)};
  d["n"] = e.n;
  d["failures"] = e.failures;
  d["failure_fraction"] = e.failure_fraction();
  s.emit(d, p);
  return kOk;
}

int cmd_dim(Session& s, std::size_t n, double tol, std::size_t max_len) {
  Program p = load(s.file);
  DimConfig cfg;
  cfg.sim = SimConfig{s.seed, max_len, s.fuel};
  cfg.tolerance = tol;
  s.config["N"] = n;
  s.config["tolerance"] = tol;
  s.config["max_trace_len"] = max_len;
  s.config["fuel"] = s.fuel;
  RankHistogram h = support_dim(p.term, n, cfg);
  json d = s.doc();
  json counts = json::object(), fracs = json::object();
  for (auto [rank, count] : h.counts) {
    counts[std::to_string(rank)] = count;
    fracs[std::to_string(rank)] = h.fraction(rank);
  }
  d["histogram"] = counts;
  d["fractions"] = fracs;
  d["samples"] = h.samples();
  d["skipped"] = h.skipped;
  d["tolerance"] = h.tolerance;
  s.emit(d, p);
  return kOk;
}

int cmd_prims(std::ostream& out, bool as_json) {
  if (as_json) {
    json d;
    d["schema"] = "pap/1";
    d["command"] = "prims";
    json list = json::array();
    for (const PrimSpec& p : primitive_registry()) {
      json j;
      j["name"] = p.name;
      j["arity"] = p.arity();
      json args = json::array();
      for (const Type& t : p.arg_types) args.push_back(to_string(t));
      j["arg_types"] = args;
      j["result_type"] = to_string(p.result_type);
      j["boundary_note"] = p.boundary_note;
      list.push_back(j);
    }
    d["primitives"] = list;
    d["manifest"] = {{"command", "prims"}, {"version", kVersion}};
    out << d.dump(2) << "\n";
    return kOk;
  }
  for (const PrimSpec& p : primitive_registry()) {
    std::string sig;
    for (const Type& t : p.arg_types) sig += (sig.empty() ? "" : ", ") + to_string(t);
    out << std::left << std::setw(6) << p.name << " (" << sig << ") -> " << to_string(p.result_type);
    if (!p.boundary_note.empty()) out << "    " << p.boundary_note;
    out << "\n";
  }
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for a recursive language with piecewise-analytic primitives", "pap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Session s;
  s.out = &out;

  auto common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("file", s.file, "program (.pap)")->required();
    sub->add_option("--fuel", s.fuel, "step budget")->capture_default_str();
    sub->add_flag("--stable", s.stable, "omit timing from the manifest");
    if (with_seed) sub->add_option("--seed", s.seed, "global random seed")->capture_default_str();
  };

  std::function<int()> action;

  std::vector<double> run_args;
  auto* run = app.add_subcommand("run", "evaluate a deterministic program");
  common(run, false);
  run->add_option("--arg", run_args, "apply the program to these reals in turn");
  run->callback([&] { action = [&] { return cmd_run(s, run_args); }; });

  auto* tc = app.add_subcommand("typecheck", "print the program's type");
  common(tc, false);
  tc->callback([&] { action = [&] { return cmd_typecheck(s); }; });

  bool emit = false;
  auto* ad = app.add_subcommand("ad", "apply the dual-number AD transform");
  common(ad, false);
  ad->add_flag("--emit", emit, "print the transformed program as source");
  ad->callback([&] { action = [&] { return cmd_ad(s, emit); }; });

  std::vector<double> at, seed_vec;
  bool check = false;
  auto* grad = app.add_subcommand("grad", "AD derivative, gradient or JVP");
  common(grad, false);
  grad->add_option("--at", at, "point (one value per input, or several points for real -> real)")->required();
  grad->add_option("--seed-vec", seed_vec, "tangent direction for a JVP");
  grad->add_flag("--check", check, "compare against finite differences");
  grad->callback([&] { action = [&] { return cmd_grad(s, at, seed_vec, check); }; });

  std::vector<double> x0;
  double eps = 0.1;
  std::size_t T = 100;
  std::string mode = "ad";
  double stop_tol = 0.0;
  std::string csv = "-";
  auto* gd = app.add_subcommand("gd", "gradient descent x <- x - eps * grad f(x)");
  common(gd, false);
  gd->add_option("--x0", x0, "initial point")->required();
  gd->add_option("--eps", eps, "step size")->required();
  gd->add_option("--T", T, "iterations")->capture_default_str();
  gd->add_option("--mode", mode, "ad or fd")->capture_default_str();
  gd->add_option("--stop-tol", stop_tol, "stop when the gradient norm falls below this")->capture_default_str();
  auto* gd_csv = gd->add_option("--csv", csv, "write CSV (t, x, grad, f) to PATH or - for stdout")->expected(0, 1);
  gd->callback([&] { action = [&] { return cmd_gd(s, x0, eps, T, mode, stop_tol, csv, gd_csv->count() > 0); }; });

  double L = 1.0;
  std::size_t seeds = 200;
  std::size_t rT = 100000;
  double rtol = 1e-3;
  std::string range = "-10,10";
  double fixed_eps = 0.0;
  std::string json_path = "-";
  auto* gdr = app.add_subcommand("gd-random", "gradient descent from random (eps, x0)");
  common(gdr, true);
  gdr->add_option("--L", L, "smoothness constant; eps ~ U(0, 2/L)")->required();
  gdr->add_option("--seeds", seeds, "number of runs")->capture_default_str();
  gdr->add_option("--T", rT, "max iterations per run")->capture_default_str();
  gdr->add_option("--stop-tol", rtol, "gradient-norm threshold")->capture_default_str();
  gdr->add_option("--x0-range", range, "lo,hi for every coordinate of x0")->capture_default_str();
  auto* fixed = gdr->add_option("--fixed-eps", fixed_eps, "use this step size in every run");
  gdr->add_option("--json", json_path, "write the report to PATH or - for stdout")->expected(0, 1);
  gdr->callback([&] { action = [&] { 
      std::optional<double> fe;
      if (fixed->count() > 0) fe = fixed_eps;
      return cmd_gd_random(s, L, seeds, rT, rtol, range, fe, json_path);
     }; });

  std::string trace_spec;
  bool trace_json = true;
  auto* trace = app.add_subcommand("trace", "run a program on a fixed trace");
  common(trace, false);
  trace->add_option("--trace", trace_spec, "comma-separated reals or a file with one per line")->required();
  trace->add_flag("--json", trace_json, "JSON output (default)");
  trace->callback([&] { action = [&] { return cmd_trace(s, trace_spec); }; });

  auto* weight = app.add_subcommand("weight", "weight function at a trace");
  common(weight, false);
  weight->add_option("--trace", trace_spec, "comma-separated reals or a file with one per line")->required();
  weight->callback([&] { action = [&] { return cmd_weight(s, trace_spec); }; });

  std::size_t N = 1;
  std::size_t max_len = 10000;
  std::string sim_csv = "-";
  auto* sim = app.add_subcommand("simulate", "run with fresh uniform draws");
  common(sim, true);
  sim->add_option("-N", N, "number of runs")->capture_default_str();
  sim->add_option("--max-trace-len", max_len, "draw budget per run")->capture_default_str();
  auto* sim_csv_opt = sim->add_option("--csv", sim_csv, "write CSV to PATH or - for stdout")->expected(0, 1);
  sim->callback([&] { action = [&] { return cmd_simulate(s, N, max_len, sim_csv_opt->count() > 0, sim_csv); }; });

  std::string event = "mass";
  std::size_t eN = 100000;
  auto* est = app.add_subcommand("estimate", "Monte Carlo integral of weight * f(value)");
  common(est, true);
  est->add_option("--event", event, "mass | mean:I | box:LO,HI[;LO,HI...]")->capture_default_str();
  est->add_option("-N", eN, "number of runs")->capture_default_str();
  est->add_option("--max-trace-len", max_len, "draw budget per run")->capture_default_str();
  est->callback([&] { action = [&] { return cmd_estimate(s, event, eN, max_len); }; });

  std::size_t dN = 1000;
  double tol = 1e-8;
  bool dim_json = true;
  auto* dim = app.add_subcommand("dim", "Jacobian-rank histogram of the output w.r.t. the trace");
  common(dim, true);
  dim->add_option("-N", dN, "number of samples")->capture_default_str();
  dim->add_option("--tol", tol, "relative singular-value cutoff")->capture_default_str();
  dim->add_option("--max-trace-len", max_len, "draw budget per run")->capture_default_str();
  dim->add_flag("--json", dim_json, "JSON output (default)");
  dim->callback([&] { action = [&] { return cmd_dim(s, dN, tol, max_len); }; });

  bool prims_json = false;
  auto* prims = app.add_subcommand("prims", "list the primitive registry");
  prims->add_flag("--json", prims_json, "JSON output");
  prims->callback([&] { action = [&] { return cmd_prims(out, prims_json); }; });

  std::vector<const char*> argv{"pap"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }
  for (CLI::App* sub : app.get_subcommands()) s.command = sub->get_name();

  try {
    return action();
  } catch (const UserError& e) {
    err << "pap: " << e.what() << "\n";
  } catch (const SyntaxError& e) {
    err << "pap: syntax error at " << e.what() << "\n";
  } catch (const TypeError& e) {
    err << "pap: type error: " << e.what() << "\n";
  } catch (const UnknownPrimitive& e) {
    err << "pap: " << e.what() << "\n";
  } catch (const NotDeterministic& e) {
    err << "pap: " << e.what() << "\n";
  }
  return kUserError;
}

}  // namespace pap::cli
