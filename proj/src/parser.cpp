#include "pap/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "pap/primitives.hpp"

namespace pap {

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Colon, Arrow, Star, Equals, Eof };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "fun", "mu",    "if",    "then",     "else",    "match", "with", "let", "in",  "sample",
    "score", "true", "false", "sample_D", "score_D", "real",  "bool", "unit", "inf", "nan",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Eof, {}, 0.0, line, col};
    bool negative = c == '-' && i + 1 < src.size() &&
                    (std::isdigit(static_cast<unsigned char>(src[i + 1])) || src.substr(i + 1, 3) == "inf");
    if (std::isdigit(static_cast<unsigned char>(c)) || negative) {
      std::size_t j = i + (negative ? 1 : 0);
      if (src.substr(j, 3) == "inf") {
        t.kind = Tok::Number;
        t.number = -std::numeric_limits<double>::infinity();
        t.text = "-inf";
        out.push_back(t);
        advance(4);
        continue;
      }
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        throw SyntaxError("malformed number '" + t.text + "'", line, col);
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Tok::Arrow;
      t.text = "->";
      out.push_back(t);
      advance(2);
      continue;
    }
    switch (c) {
      case '(':
        t.kind = Tok::LParen;
        break;
      case ')':
        t.kind = Tok::RParen;
        break;
      case ',':
        t.kind = Tok::Comma;
        break;
      case ':':
        t.kind = Tok::Colon;
        break;
      case '*':
        t.kind = Tok::Star;
        break;
      case '=':
        t.kind = Tok::Equals;
        break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
    }
    t.text = std::string(1, c);
    out.push_back(t);
    advance(1);
  }
  out.push_back(Token{Tok::Eof, "<end of input>", 0.0, line, col});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, const Context& scope) : toks_(lex(src)) {
    for (const auto& [name, ty] : scope.bindings()) scope_.emplace_back(name, ty);
  }

  Term parse_program() {
    Term t = expr();
    if (peek().kind != Tok::Eof) fail("unexpected '" + peek().text + "' after end of term");
    return t;
  }

  Type parse_type_only() {
    Type t = type();
    if (peek().kind != Tok::Eof) fail("unexpected '" + peek().text + "' after type");
    return t;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_kw(const Token& t, std::string_view kw) const { return t.kind == Tok::Ident && t.text == kw; }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().line, peek().column); }

  void expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) fail("expected " + std::string(what) + ", found '" + peek().text + "'");
    next();
  }
  void expect_kw(std::string_view kw) {
    if (!is_kw(peek(), kw)) fail("expected '" + std::string(kw) + "', found '" + peek().text + "'");
    next();
  }
  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text) != 0)
      fail("expected identifier, found '" + t.text + "'");
    return next().text;
  }

  SourceSpan span() const { return SourceSpan{peek().line, peek().column}; }

  // ty := prod ["->" ty]
  Type type() {
    Type a = prod_type();
    if (peek().kind == Tok::Arrow) {
      next();
      return Type::arrow(a, type());
    }
    return a;
  }
  // prod := atom ["*" prod]
  Type prod_type() {
    Type a = atom_type();
    if (peek().kind == Tok::Star) {
      next();
      return Type::prod(a, prod_type());
    }
    return a;
  }
  Type atom_type() {
    const Token& t = peek();
    if (is_kw(t, "real")) {
      next();
      return Type::real();
    }
    if (is_kw(t, "bool")) {
      next();
      return Type::boolean();
    }
    if (is_kw(t, "unit")) {
      next();
      return Type::unit();
    }
    if (t.kind == Tok::LParen) {
      next();
      Type inner = type();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail("expected a type, found '" + t.text + "'");
  }

  const Type* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  Context known_context() const {
    Context c;
    for (const auto& [name, ty] : scope_)
      if (ty) c = c.extend(name, ty);
    return c;
  }

  struct Bind {
    Bind(Parser& p, std::string name, Type ty) : p_(p) { p_.scope_.emplace_back(std::move(name), std::move(ty)); }
    ~Bind() { p_.scope_.pop_back(); }
    Bind(const Bind&) = delete;
    Bind& operator=(const Bind&) = delete;
    Parser& p_;
  };

  Term expr() {
    const Token& t = peek();
    SourceSpan sp = span();
    if (is_kw(t, "fun")) {
      next();
      expect(Tok::LParen, "'('");
      std::string x = ident();
      expect(Tok::Colon, "':'");
      Type ty = type();
      expect(Tok::RParen, "')'");
      expect(Tok::Arrow, "'->'");
      Bind b(*this, x, ty);
      return Term::lam(x, ty, expr(), sp);
    }
    if (is_kw(t, "mu")) {
      next();
      std::string f = ident();
      expect(Tok::LParen, "'('");
      std::string x = ident();
      expect(Tok::Colon, "':'");
      Type ty1 = type();
      expect(Tok::RParen, "')'");
      expect(Tok::Colon, "':'");
      Type ty2 = prod_type();
      expect(Tok::Arrow, "'->'");
      Bind bf(*this, f, Type::arrow(ty1, ty2));
      Bind bx(*this, x, ty1);
      return Term::mu(f, x, ty1, ty2, expr(), sp);
    }
    if (is_kw(t, "if")) {
      next();
      Term c = expr();
      expect_kw("then");
      Term a = expr();
      expect_kw("else");
      Term b = expr();
      return Term::if_(c, a, b, sp);
    }
    if (is_kw(t, "match")) {
      next();
      Term s = expr();
      expect_kw("with");
      expect(Tok::LParen, "'('");
      std::string x = ident();
      expect(Tok::Comma, "','");
      std::string y = ident();
      expect(Tok::RParen, "')'");
      expect(Tok::Arrow, "'->'");
      Type tx;
      Type ty;
      try {
        Type st = typecheck(known_context(), s);
        if (st.is(TypeKind::Prod)) {
          tx = st.left();
          ty = st.right();
        }
      } catch (const TypeError&) {
        // binder types stay unknown; only matters to an unannotated let
      }
      Bind bx(*this, x, tx);
      Bind by(*this, y, ty);
      return Term::match_pair(s, x, y, expr(), sp);
    }
    if (is_kw(t, "let")) {
      next();
      std::string x = ident();
      Type ty;
      if (peek().kind == Tok::Colon) {
        next();
        ty = type();
      }
      expect(Tok::Equals, "'='");
      Term bound = expr();
      expect_kw("in");
      if (!ty) ty = typecheck(known_context(), bound);
      Bind b(*this, x, ty);
      Term body = expr();
      return Term::let(x, ty, bound, body, sp);
    }
    return application();
  }

  bool starts_atom(const Token& t) const {
    if (t.kind == Tok::Number || t.kind == Tok::LParen) return true;
    if (t.kind != Tok::Ident) return false;
    static const std::set<std::string, std::less<>> kAtomKeywords = {"true",    "false",   "sample", "score",
                                                                      "sample_D", "score_D", "inf",    "nan"};
    return kKeywords.count(t.text) == 0 || kAtomKeywords.count(t.text) != 0;
  }

  Term application() {
    Term a = atom();
    while (starts_atom(peek())) {
      SourceSpan sp = span();
      a = Term::app(a, atom(), sp);
    }
    return a;
  }

  Term atom() {
    const Token& t = peek();
    SourceSpan sp = span();
    switch (t.kind) {
      case Tok::Number:
        return Term::real(next().number, sp);
      case Tok::LParen: {
        next();
        if (peek().kind == Tok::RParen) {
          next();
          return Term::unit(sp);
        }
        Term a = expr();
        if (peek().kind == Tok::Comma) {
          next();
          Term b = expr();
          expect(Tok::RParen, "')'");
          return Term::pair(a, b, sp);
        }
        expect(Tok::RParen, "')'");
        return a;
      }
      case Tok::Ident:
        break;
      default:
        fail("expected a term, found '" + t.text + "'");
    }
    if (is_kw(t, "true") || is_kw(t, "false")) return Term::boolean(next().text == "true", sp);
    if (is_kw(t, "inf")) {
      next();
      return Term::real(std::numeric_limits<double>::infinity(), sp);
    }
    if (is_kw(t, "nan")) {
      next();
      return Term::real(std::numeric_limits<double>::quiet_NaN(), sp);
    }
    if (is_kw(t, "sample") || is_kw(t, "sample_D")) return Term::sample(next().text == "sample_D", sp);
    if (is_kw(t, "score") || is_kw(t, "score_D")) {
      bool dual = next().text == "score_D";
      expect(Tok::LParen, "'('");
      Term w = expr();
      expect(Tok::RParen, "')'");
      return Term::score(w, dual, sp);
    }
    std::string name = ident();
    if (lookup(name) != nullptr || peek().kind != Tok::LParen) return Term::var(name, sp);

    // primitive call
    bool dual = false;
    const PrimSpec* spec = find_prim(name);
    if (spec == nullptr && name.size() > 2 && name.ends_with("_D")) {
      spec = find_prim(std::string_view(name).substr(0, name.size() - 2));
      dual = spec != nullptr;
    }
    if (spec == nullptr) throw UnknownPrimitive(name);
    next();  // (
    std::vector<Term> args;
    if (peek().kind != Tok::RParen) {
      args.push_back(expr());
      while (peek().kind == Tok::Comma) {
        next();
        args.push_back(expr());
      }
    }
    expect(Tok::RParen, "')'");
    if (args.size() != spec->arity())
      throw SyntaxError("primitive '" + name + "' takes " + std::to_string(spec->arity()) + " arguments, got " +
                            std::to_string(args.size()),
                        sp.line, sp.column);
    return Term::prim(*spec, std::move(args), dual, sp);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, Type>> scope_;
};

}  // namespace

Term parse(std::string_view source, const Context& scope) { return Parser(source, scope).parse_program(); }

Type parse_type(std::string_view source) { return Parser(source, Context{}).parse_type_only(); }

}  // namespace pap
