#include "pap/primitives.hpp"

#include <cmath>

namespace pap {

namespace {

struct Dual {
  double p;
  double t;
};

Dual to_dual(const Value& v) { return {v.first().as_real(), v.second().as_real()}; }
Value from_dual(Dual d) { return Value::pair(Value::real(d.p), Value::real(d.t)); }

void set_piece(int* piece, int k) {
  if (piece != nullptr) *piece = k;
}

// Each primitive is a struct with a scalar `value` and a `dual` rule. The dual
// rule recomputes the primal with the same expression as `value`, so primal
// agreement holds bitwise.

struct Add {
  static std::optional<double> value(double a, double b, int&) { return a + b; }
  static std::optional<Dual> dual(Dual a, Dual b, int&) { return Dual{a.p + b.p, a.t + b.t}; }
};

struct Sub {
  static std::optional<double> value(double a, double b, int&) { return a - b; }
  static std::optional<Dual> dual(Dual a, Dual b, int&) { return Dual{a.p - b.p, a.t - b.t}; }
};

struct Mul {
  static std::optional<double> value(double a, double b, int&) { return a * b; }
  static std::optional<Dual> dual(Dual a, Dual b, int&) { return Dual{a.p * b.p, a.t * b.p + a.p * b.t}; }
};

struct Div {
  static std::optional<double> value(double a, double b, int&) {
    if (b == 0.0) return std::nullopt;
    return a / b;
  }
  static std::optional<Dual> dual(Dual a, Dual b, int&) {
    if (b.p == 0.0) return std::nullopt;
    return Dual{a.p / b.p, (a.t * b.p - a.p * b.t) / (b.p * b.p)};
  }
};

struct Min {
  // a-piece when a < b, otherwise the b-piece.
  static std::optional<double> value(double a, double b, int& piece) {
    piece = a < b ? 0 : 1;
    return a < b ? a : b;
  }
  static std::optional<Dual> dual(Dual a, Dual b, int& piece) {
    piece = a.p < b.p ? 0 : 1;
    return a.p < b.p ? a : b;
  }
};

struct Max {
  // a-piece when a > b, otherwise the b-piece.
  static std::optional<double> value(double a, double b, int& piece) {
    piece = a > b ? 0 : 1;
    return a > b ? a : b;
  }
  static std::optional<Dual> dual(Dual a, Dual b, int& piece) {
    piece = a.p > b.p ? 0 : 1;
    return a.p > b.p ? a : b;
  }
};

struct Neg {
  static std::optional<double> value(double a, int&) { return -a; }
  static std::optional<Dual> dual(Dual a, int&) { return Dual{-a.p, -a.t}; }
};

struct Exp {
  static std::optional<double> value(double a, int&) { return std::exp(a); }
  static std::optional<Dual> dual(Dual a, int&) {
    double e = std::exp(a.p);
    return Dual{e, e * a.t};
  }
};

struct Log {
  static std::optional<double> value(double a, int&) {
    if (!(a > 0.0)) return std::nullopt;
    return std::log(a);
  }
  static std::optional<Dual> dual(Dual a, int&) {
    if (!(a.p > 0.0)) return std::nullopt;
    return Dual{std::log(a.p), a.t / a.p};
  }
};

struct Sin {
  static std::optional<double> value(double a, int&) { return std::sin(a); }
  static std::optional<Dual> dual(Dual a, int&) { return Dual{std::sin(a.p), std::cos(a.p) * a.t}; }
};

struct Cos {
  static std::optional<double> value(double a, int&) { return std::cos(a); }
  static std::optional<Dual> dual(Dual a, int&) { return Dual{std::cos(a.p), -std::sin(a.p) * a.t}; }
};

struct Sqrt {
  // Pieces: {0} (constant, derivative 0) and (0, inf).
  static std::optional<double> value(double a, int& piece) {
    if (!(a >= 0.0)) return std::nullopt;
    piece = a == 0.0 ? 0 : 1;
    return std::sqrt(a);
  }
  static std::optional<Dual> dual(Dual a, int& piece) {
    if (!(a.p >= 0.0)) return std::nullopt;
    double s = std::sqrt(a.p);
    piece = a.p == 0.0 ? 0 : 1;
    if (a.p == 0.0) return Dual{s, 0.0};
    return Dual{s, a.t / (2.0 * s)};
  }
};

struct Abs {
  // -x piece when x < 0, otherwise the x piece.
  static std::optional<double> value(double a, int& piece) {
    piece = a < 0.0 ? 0 : 1;
    return a < 0.0 ? -a : a;
  }
  static std::optional<Dual> dual(Dual a, int& piece) {
    piece = a.p < 0.0 ? 0 : 1;
    return a.p < 0.0 ? Dual{-a.p, -a.t} : a;
  }
};

struct Lt {
  static bool value(double a, double b) { return a < b; }
};
struct Le {
  static bool value(double a, double b) { return a <= b; }
};
struct Gt {
  static bool value(double a, double b) { return a > b; }
};
struct Ge {
  static bool value(double a, double b) { return a >= b; }
};
struct Eq {
  static bool value(double a, double b) { return a == b; }
};

template <class Op>
std::optional<Value> eval1(std::span<const Value> args, int* piece) {
  int k = -1;
  auto r = Op::value(args[0].as_real(), k);
  set_piece(piece, k);
  if (!r) return std::nullopt;
  return Value::real(*r);
}

template <class Op>
std::optional<Value> dual1(std::span<const Value> args, int* piece) {
  int k = -1;
  auto r = Op::dual(to_dual(args[0]), k);
  set_piece(piece, k);
  if (!r) return std::nullopt;
  return from_dual(*r);
}

template <class Op>
std::optional<Value> eval2(std::span<const Value> args, int* piece) {
  int k = -1;
  auto r = Op::value(args[0].as_real(), args[1].as_real(), k);
  set_piece(piece, k);
  if (!r) return std::nullopt;
  return Value::real(*r);
}

template <class Op>
std::optional<Value> dual2(std::span<const Value> args, int* piece) {
  int k = -1;
  auto r = Op::dual(to_dual(args[0]), to_dual(args[1]), k);
  set_piece(piece, k);
  if (!r) return std::nullopt;
  return from_dual(*r);
}

template <class Op>
std::optional<Value> cmp_eval(std::span<const Value> args, int* piece) {
  set_piece(piece, -1);
  return Value::boolean(Op::value(args[0].as_real(), args[1].as_real()));
}

template <class Op>
std::optional<Value> cmp_dual(std::span<const Value> args, int* piece) {
  set_piece(piece, -1);
  return Value::boolean(Op::value(args[0].first().as_real(), args[1].first().as_real()));
}

template <class Op>
PrimSpec unary(std::string name, std::string note) {
  return PrimSpec{std::move(name), {Type::real()}, Type::real(), std::move(note), &eval1<Op>, &dual1<Op>};
}

template <class Op>
PrimSpec binary(std::string name, std::string note) {
  return PrimSpec{std::move(name), {Type::real(), Type::real()}, Type::real(), std::move(note), &eval2<Op>,
                  &dual2<Op>};
}

template <class Op>
PrimSpec comparison(std::string name, std::string note) {
  return PrimSpec{std::move(name), {Type::real(), Type::real()}, Type::boolean(), std::move(note),
                  &cmp_eval<Op>, &cmp_dual<Op>};
}

std::vector<PrimSpec> build_registry() {
  std::vector<PrimSpec> r;
  r.push_back(binary<Add>("add", "analytic everywhere"));
  r.push_back(binary<Sub>("sub", "analytic everywhere"));
  r.push_back(binary<Mul>("mul", "analytic everywhere"));
  r.push_back(binary<Div>("div", "analytic on b != 0; undefined at b = 0"));
  r.push_back(unary<Neg>("neg", "analytic everywhere"));
  r.push_back(unary<Exp>("exp", "analytic everywhere"));
  r.push_back(unary<Log>("log", "analytic on x > 0; undefined at x <= 0"));
  r.push_back(unary<Sin>("sin", "analytic everywhere"));
  r.push_back(unary<Cos>("cos", "analytic everywhere"));
  r.push_back(unary<Sqrt>("sqrt", "pieces {0} (derivative 0) and x > 0; undefined at x < 0"));
  r.push_back(unary<Abs>("abs", "pieces x < 0 (derivative -1) and x >= 0 (derivative +1); at 0 the else piece"));
  r.push_back(binary<Min>("min", "pieces a < b (d/da) and a >= b (d/db); at a = b the b piece"));
  r.push_back(binary<Max>("max", "pieces a > b (d/da) and a <= b (d/db); at a = b the b piece"));
  r.push_back(comparison<Lt>("lt", "boolean result; no tangent"));
  r.push_back(comparison<Le>("le", "boolean result; no tangent"));
  r.push_back(comparison<Gt>("gt", "boolean result; no tangent"));
  r.push_back(comparison<Ge>("ge", "boolean result; no tangent"));
  r.push_back(comparison<Eq>("eq", "boolean result, exact bitwise comparison of primals; no tangent"));
  return r;
}

}  // namespace

std::vector<Type> PrimSpec::dual_arg_types() const {
  std::vector<Type> out;
  out.reserve(arg_types.size());
  for (const Type& t : arg_types) out.push_back(dual_type(t));
  return out;
}

const std::vector<PrimSpec>& primitive_registry() {
  static const std::vector<PrimSpec> registry = build_registry();
  return registry;
}

const PrimSpec* find_prim(std::string_view name) {
  for (const PrimSpec& p : primitive_registry())
    if (p.name == name) return &p;
  return nullptr;
}

const PrimSpec& lookup_prim(std::string_view name) {
  const PrimSpec* p = find_prim(name);
  if (p == nullptr) throw UnknownPrimitive(std::string(name));
  return *p;
}

std::optional<Value> eval_prim(const PrimSpec& spec, std::span<const Value> args, int* piece) {
  return spec.eval(args, piece);
}

std::optional<Value> dual_prim(const PrimSpec& spec, std::span<const Value> args, int* piece) {
  return spec.dual_eval(args, piece);
}

}  // namespace pap
