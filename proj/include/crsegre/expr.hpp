#pragma once

// Expression and manifest frontend.
//
// Grammar (precedence high to low): primary, '^' with a literal integer
// exponent, unary minus, '*' '/', '+' '-'. Binary operators are left
// associative. Numbers are exact: digits with an optional decimal part.
// 'I' is the imaginary unit; sqrt1p(e) is the only builtin.

#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "crsegre/series.hpp"

namespace crsegre {

struct SourcePos {
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " +
                           msg),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

enum class TokenKind {
  ident, number, imag, plus, minus, star, slash, caret, lparen, rparen, comma, equals,
  lbrace, rbrace, semicolon, colon, end
};

struct Token {
  TokenKind kind;
  std::string text;
  SourcePos pos;
};

inline const char* token_name(TokenKind k) {
  switch (k) {
    case TokenKind::ident: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::imag: return "'I'";
    case TokenKind::plus: return "'+'";
    case TokenKind::minus: return "'-'";
    case TokenKind::star: return "'*'";
    case TokenKind::slash: return "'/'";
    case TokenKind::caret: return "'^'";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::comma: return "','";
    case TokenKind::equals: return "'='";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::semicolon: return "';'";
    case TokenKind::colon: return "':'";
    case TokenKind::end: return "end of input";
  }
  return "?";
}

// Tokenizes the whole source; '#' starts a comment running to end of line.
// The result always ends with an `end` token.
inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
      pos.offset = i + 1;
    }
  };
  auto here = [&]() { return pos; };
  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SourcePos start = here();
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        if (j + 1 >= src.size() || !std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
          SourcePos bad = start;
          bad.column += static_cast<int>(j - i);
          bad.offset += j - i;
          throw ParseError(bad, "malformed number: '.' must be followed by digits");
        }
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({TokenKind::number, src.substr(i, j - i), start});
      advance(j - i);
      continue;
    }
    if (std::isalpha(c)) {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string text = src.substr(i, j - i);
      out.push_back({text == "I" ? TokenKind::imag : TokenKind::ident, text, start});
      advance(j - i);
      continue;
    }
    TokenKind k;
    switch (c) {
      case '+': k = TokenKind::plus; break;
      case '-': k = TokenKind::minus; break;
      case '*': k = TokenKind::star; break;
      case '/': k = TokenKind::slash; break;
      case '^': k = TokenKind::caret; break;
      case '(': k = TokenKind::lparen; break;
      case ')': k = TokenKind::rparen; break;
      case ',': k = TokenKind::comma; break;
      case '=': k = TokenKind::equals; break;
      case '{': k = TokenKind::lbrace; break;
      case '}': k = TokenKind::rbrace; break;
      case ';': k = TokenKind::semicolon; break;
      case ':': k = TokenKind::colon; break;
      default: {
        std::string shown = c >= 32 && c < 127 ? std::string(1, static_cast<char>(c)) : "\\x" + std::to_string(c);
        throw ParseError(start, "illegal character '" + shown + "'");
      }
    }
    out.push_back({k, std::string(1, static_cast<char>(c)), start});
    advance(1);
  }
  out.push_back({TokenKind::end, "", here()});
  return out;
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { variable, literal, imag, neg, add, sub, mul, div, pow, call };
  Kind kind;
  std::string name;    // variable or builtin name
  mpq_class value;     // literal value
  int exponent = 0;    // pow
  std::vector<ExprPtr> args;
  SourcePos pos;
};

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.exponent != b.exponent ||
      a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

// Recursive-descent parser over a token vector; usable on a sub-range so the
// manifest loader can embed expressions.
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t start = 0) : t_(toks), i_(start) {}

  ExprPtr parse_expression() { return sum(); }
  std::size_t position() const { return i_; }

  // Parses the full token stream as one expression.
  static ExprPtr parse_all(const std::vector<Token>& toks) {
    ExprParser p(toks);
    ExprPtr e = p.parse_expression();
    p.expect(TokenKind::end, "end of expression");
    return e;
  }

  const Token& peek() const { return t_[i_]; }
  const Token& take() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
  const Token& expect(TokenKind k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError(peek().pos, "expected " + what + " but found " + describe(peek()));
    return take();
  }

 private:
  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::end) return "end of input";
    return token_name(t.kind) + std::string(t.kind == TokenKind::ident || t.kind == TokenKind::number
                                                ? " '" + t.text + "'"
                                                : "");
  }
  static ExprPtr node(Expr::Kind k, SourcePos pos, std::vector<ExprPtr> args = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->pos = pos;
    e->args = std::move(args);
    return e;
  }

  ExprPtr sum() {
    ExprPtr lhs = product();
    while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
      const Token op = take();
      ExprPtr rhs = product();
      lhs = node(op.kind == TokenKind::plus ? Expr::Kind::add : Expr::Kind::sub, op.pos, {lhs, rhs});
    }
    return lhs;
  }
  ExprPtr product() {
    ExprPtr lhs = unary();
    while (peek().kind == TokenKind::star || peek().kind == TokenKind::slash) {
      const Token op = take();
      ExprPtr rhs = unary();
      lhs = node(op.kind == TokenKind::star ? Expr::Kind::mul : Expr::Kind::div, op.pos, {lhs, rhs});
    }
    return lhs;
  }
  // Nesting guard so hostile input cannot exhaust the stack.
  struct DepthGuard {
    ExprParser& p;
    explicit DepthGuard(ExprParser& q) : p(q) {
      if (++p.depth_ > 400) throw ParseError(p.peek().pos, "expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  ExprPtr unary() {
    DepthGuard guard(*this);
    if (peek().kind == TokenKind::minus) {
      const Token op = take();
      return node(Expr::Kind::neg, op.pos, {unary()});
    }
    return power();
  }
  ExprPtr power() {
    ExprPtr base = primary();
    if (peek().kind == TokenKind::caret) {
      const Token op = take();
      const Token& ex = peek();
      if (ex.kind != TokenKind::number || ex.text.find('.') != std::string::npos)
        throw ParseError(ex.pos, "exponent must be a literal nonnegative integer");
      if (ex.text.size() > 3 || std::stoi(ex.text) > kMaxOrder)
        throw ParseError(ex.pos, "exponent too large");
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::pow;
      e->pos = op.pos;
      e->exponent = std::stoi(take().text);
      e->args = {base};
      if (peek().kind == TokenKind::caret)
        throw ParseError(peek().pos, "repeated '^' is ambiguous; use parentheses");
      return e;
    }
    return base;
  }
  ExprPtr primary() {
    const Token& tk = peek();
    switch (tk.kind) {
      case TokenKind::number: {
        const Token t = take();
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::literal;
        e->pos = t.pos;
        e->value = parse_decimal(t.text);
        return e;
      }
      case TokenKind::imag: {
        const Token t = take();
        return node(Expr::Kind::imag, t.pos);
      }
      case TokenKind::ident: {
        const Token t = take();
        if (peek().kind == TokenKind::lparen) {
          take();
          ExprPtr arg = sum();
          expect(TokenKind::rparen, "')' to close the call");
          auto e = std::make_shared<Expr>();
          e->kind = Expr::Kind::call;
          e->name = t.text;
          e->pos = t.pos;
          e->args = {arg};
          return e;
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::variable;
        e->name = t.text;
        e->pos = t.pos;
        return e;
      }
      case TokenKind::lparen: {
        const Token open = take();
        ExprPtr inner = sum();
        if (peek().kind != TokenKind::rparen)
          throw ParseError(peek().pos, "unbalanced parenthesis: '(' at line " + std::to_string(open.pos.line) +
                                           ", column " + std::to_string(open.pos.column) + " is not closed");
        take();
        return inner;
      }
      case TokenKind::rparen:
        throw ParseError(tk.pos, "unbalanced parenthesis: unexpected ')'");
      default:
        throw ParseError(tk.pos, "unexpected " + describe(tk));
    }
  }

  static mpq_class parse_decimal(const std::string& text) {
    const auto dot = text.find('.');
    if (dot == std::string::npos) return mpq_class(mpz_class(text, 10));
    const std::string ip = text.substr(0, dot), fp = text.substr(dot + 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    mpq_class q(mpz_class(ip + fp, 10), den);
    q.canonicalize();
    return q;
  }

  const std::vector<Token>& t_;
  std::size_t i_;
  int depth_ = 0;
};

inline ExprPtr parse_expr(const std::vector<Token>& toks) { return ExprParser::parse_all(toks); }
inline ExprPtr parse_expr(const std::string& src) { return parse_expr(tokenize(src)); }

// Fully parenthesized text; reparsing it yields a structurally equal tree.
inline std::string to_string(const Expr& e) {
  auto literal = [](const mpq_class& v) {
    if (v.get_den() == 1) return v.get_str();
    // literals come from decimal text, so the denominator divides a power of ten
    mpz_class den = v.get_den(), scale = 1;
    int digits = 0;
    while (mpz_class(scale % den) != 0) {
      scale *= 10;
      ++digits;
      if (digits > 4096) return "(" + v.get_str() + ")";
    }
    mpz_class num = v.get_num() * (scale / den);
    std::string s = num.get_str();
    if (static_cast<int>(s.size()) <= digits) s = std::string(digits - s.size() + 1, '0') + s;
    return s.substr(0, s.size() - digits) + "." + s.substr(s.size() - digits);
  };
  switch (e.kind) {
    case Expr::Kind::variable: return e.name;
    case Expr::Kind::literal: return literal(e.value);
    case Expr::Kind::imag: return "I";
    case Expr::Kind::neg: return "(-" + to_string(*e.args[0]) + ")";
    case Expr::Kind::add: return "(" + to_string(*e.args[0]) + " + " + to_string(*e.args[1]) + ")";
    case Expr::Kind::sub: return "(" + to_string(*e.args[0]) + " - " + to_string(*e.args[1]) + ")";
    case Expr::Kind::mul: return "(" + to_string(*e.args[0]) + "*" + to_string(*e.args[1]) + ")";
    case Expr::Kind::div: return "(" + to_string(*e.args[0]) + "/" + to_string(*e.args[1]) + ")";
    case Expr::Kind::pow: return "(" + to_string(*e.args[0]) + "^" + std::to_string(e.exponent) + ")";
    case Expr::Kind::call: return e.name + "(" + to_string(*e.args[0]) + ")";
  }
  return "";
}

// Maps identifier names to series variable slots.
struct VariableScope {
  std::size_t arity = 0;
  std::unordered_map<std::string, std::size_t> slots;
  std::string description;  // for error messages, e.g. "complex-style variables"

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = slots.find(name);
    if (it == slots.end()) return std::nullopt;
    return it->second;
  }
};

// Names "<base>_1".."<base>_count" at slots offset..offset+count; the bare
// base name is an alias when count == 1.
inline void add_family(VariableScope& s, const std::string& base, std::size_t count, std::size_t offset) {
  for (std::size_t k = 0; k < count; ++k) s.slots[base + "_" + std::to_string(k + 1)] = offset + k;
  if (count == 1) s.slots[base] = offset;
}

// Theta_j(zbar, z, w): slots (zbar, z, w).
inline VariableScope complex_scope(std::size_t m, std::size_t d) {
  VariableScope s;
  s.arity = 2 * m + d;
  s.description = "complex_defining equations use zbar_k, z_k, w_j";
  add_family(s, "zbar", m, 0);
  add_family(s, "z", m, m);
  add_family(s, "w", d, 2 * m);
  return s;
}
// phi_j(x, y, u): slots (x, y, u).
inline VariableScope real_scope(std::size_t m, std::size_t d) {
  VariableScope s;
  s.arity = 2 * m + d;
  s.description = "real_graph equations use x_k, y_k, u_j";
  add_family(s, "x", m, 0);
  add_family(s, "y", m, m);
  add_family(s, "u", d, 2 * m);
  return s;
}
// Holomorphic map components in t = (z, w).
inline VariableScope holomorphic_scope(std::size_t m, std::size_t d) {
  VariableScope s;
  s.arity = m + d;
  s.description = "map components use z_k, w_j of the source";
  add_family(s, "z", m, 0);
  add_family(s, "w", d, m);
  return s;
}
inline VariableScope constant_scope() {
  VariableScope s;
  s.description = "point coordinates must be constants";
  return s;
}

// Throws on the first identifier or builtin that the scope does not know.
inline void check_identifiers(const Expr& e, const VariableScope& scope) {
  if (e.kind == Expr::Kind::variable && !scope.find(e.name))
    throw ParseError(e.pos, "unknown variable '" + e.name + "' (" + scope.description + ")");
  if (e.kind == Expr::Kind::call && e.name != "sqrt1p")
    throw ParseError(e.pos, "unknown function '" + e.name + "' (only sqrt1p is available)");
  for (const auto& a : e.args) check_identifiers(*a, scope);
}

inline Series expand_to_series(const Expr& e, const VariableScope& scope, int order) {
  using Q = GaussianRational;
  switch (e.kind) {
    case Expr::Kind::variable: {
      auto slot = scope.find(e.name);
      if (!slot) throw ParseError(e.pos, "unknown variable '" + e.name + "' (" + scope.description + ")");
      return Series::variable(scope.arity, order, *slot);
    }
    case Expr::Kind::literal: return Series::constant(scope.arity, order, Q(e.value));
    case Expr::Kind::imag: return Series::constant(scope.arity, order, Q::i());
    case Expr::Kind::neg: return -expand_to_series(*e.args[0], scope, order);
    case Expr::Kind::add:
      return expand_to_series(*e.args[0], scope, order) + expand_to_series(*e.args[1], scope, order);
    case Expr::Kind::sub:
      return expand_to_series(*e.args[0], scope, order) - expand_to_series(*e.args[1], scope, order);
    case Expr::Kind::mul:
      return expand_to_series(*e.args[0], scope, order) * expand_to_series(*e.args[1], scope, order);
    case Expr::Kind::div: {
      Series den = expand_to_series(*e.args[1], scope, order);
      if (den.constant_term().is_zero())
        throw ParseError(e.args[1]->pos, "denominator is not a unit (zero constant term)");
      return expand_to_series(*e.args[0], scope, order) * invert_unit(den);
    }
    case Expr::Kind::pow: return power(expand_to_series(*e.args[0], scope, order), e.exponent);
    case Expr::Kind::call: {
      if (e.name != "sqrt1p") throw ParseError(e.pos, "unknown function '" + e.name + "' (only sqrt1p is available)");
      Series arg = expand_to_series(*e.args[0], scope, order);
      if (!arg.constant_term().is_zero())
        throw ParseError(e.args[0]->pos, "sqrt1p needs an argument with zero constant term");
      return sqrt1p(arg);
    }
  }
  throw ParseError(e.pos, "unsupported expression node");
}

inline Series expand_to_series(const std::string& src, const VariableScope& scope, int order) {
  return expand_to_series(*parse_expr(src), scope, order);
}

// Degree bound of e as a polynomial after setting the variables in `zero`
// to 0: -1 for the zero polynomial, nullopt when e is not a polynomial.
inline std::optional<int> polynomial_degree(const Expr& e, const std::set<std::string>& zero = {}) {
  using R = std::optional<int>;
  auto sub = [&](std::size_t i) { return polynomial_degree(*e.args[i], zero); };
  switch (e.kind) {
    case Expr::Kind::variable: return zero.count(e.name) ? -1 : 1;
    case Expr::Kind::literal: return e.value == 0 ? -1 : 0;
    case Expr::Kind::imag: return 0;
    case Expr::Kind::neg: return sub(0);
    case Expr::Kind::add:
    case Expr::Kind::sub: {
      R a = sub(0), b = sub(1);
      if (!a || !b) return std::nullopt;
      return std::max(*a, *b);
    }
    case Expr::Kind::mul: {
      R a = sub(0), b = sub(1);
      if ((a && *a < 0) || (b && *b < 0)) return -1;
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Expr::Kind::div: {
      R a = sub(0), b = sub(1);
      if (a && *a < 0) return -1;
      if (!a || !b || *b != 0) return std::nullopt;
      return *a;
    }
    case Expr::Kind::pow: {
      if (e.exponent == 0) return 0;
      R a = sub(0);
      if (!a) return std::nullopt;
      return *a < 0 ? -1 : *a * e.exponent;
    }
    case Expr::Kind::call: {
      R a = sub(0);
      if (a && *a < 0) return 0;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline GaussianRational expand_constant(const Expr& e) {
  return expand_to_series(e, constant_scope(), 0).constant_term();
}

enum class EquationStyle { real_graph, complex_defining };

inline const char* to_string(EquationStyle s) {
  return s == EquationStyle::real_graph ? "real_graph" : "complex_defining";
}

// A point of M given by z_p and the real parts u_p; Im w_p is solved for.
struct PointSpec {
  std::vector<GaussianRational> z;  // length m
  std::vector<GaussianRational> u;  // length d, real
  std::string text;                 // normalized echo for reports
  SourcePos pos;
};

struct ManifoldSpec {
  std::string name;
  int m = 0;
  int d = 0;
  int order = 12;
  bool order_given = false;
  EquationStyle style = EquationStyle::complex_defining;
  std::vector<ExprPtr> equations;
  std::vector<std::string> equation_text;
  std::vector<PointSpec> points;
  SourcePos pos;

  int n() const { return m + d; }
  VariableScope scope() const {
    return style == EquationStyle::complex_defining ? complex_scope(m, d) : real_scope(m, d);
  }
};

struct MapSpec {
  std::string name;
  std::string source;
  std::string target;
  std::vector<ExprPtr> components;
  std::vector<std::string> component_text;
  SourcePos pos;
};

struct Manifest {
  std::vector<ManifoldSpec> manifolds;
  std::vector<MapSpec> maps;

  const ManifoldSpec* find_manifold(const std::string& name) const {
    for (const auto& m : manifolds)
      if (m.name == name) return &m;
    return nullptr;
  }
};

namespace detail {

class ManifestParser {
 public:
  explicit ManifestParser(const std::string& src) : src_(src), toks_(tokenize(src)) {}

  Manifest parse() {
    Manifest out;
    while (peek().kind != TokenKind::end) {
      const Token& kw = peek();
      if (kw.kind == TokenKind::ident && kw.text == "manifold")
        out.manifolds.push_back(parse_manifold());
      else if (kw.kind == TokenKind::ident && kw.text == "map")
        out.maps.push_back(parse_map(out));
      else
        throw ParseError(kw.pos, "expected 'manifold' or 'map' block");
    }
    if (out.manifolds.empty()) throw ParseError(peek().pos, "manifest declares no manifold");
    return out;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  const Token& expect(TokenKind k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError(peek().pos, "expected " + what + " but found " +
                                       (peek().kind == TokenKind::end ? std::string("end of input")
                                                                      : "'" + peek().text + "'"));
    return take();
  }
  std::string ident(const std::string& what) { return expect(TokenKind::ident, what).text; }
  int integer(const std::string& key) {
    const Token& t = expect(TokenKind::number, "an integer for '" + key + "'");
    if (t.text.find('.') != std::string::npos || t.text.size() > 6)
      throw ParseError(t.pos, "'" + key + "' must be a small nonnegative integer");
    return std::stoi(t.text);
  }
  ExprPtr expression(std::string& text) {
    ExprParser p(toks_, i_);
    const std::size_t begin = peek().pos.offset;
    ExprPtr e = p.parse_expression();
    i_ = p.position();
    text = src_.substr(begin, peek().pos.offset - begin);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    return e;
  }

  ManifoldSpec parse_manifold() {
    ManifoldSpec spec;
    spec.pos = take().pos;
    spec.name = ident("a manifold name");
    expect(TokenKind::lbrace, "'{'");
    bool have_m = false, have_d = false, have_style = false;
    struct PendingPoint {
      std::vector<std::pair<Token, ExprPtr>> entries;
      SourcePos pos;
      std::string text;
    };
    std::vector<PendingPoint> pending;
    while (peek().kind != TokenKind::rbrace) {
      const Token key = expect(TokenKind::ident, "a field name");
      if (key.text == "eq" || key.text == "point") {
        expect(TokenKind::colon, "':' after '" + key.text + "'");
        if (key.text == "eq") {
          std::string text;
          spec.equations.push_back(expression(text));
          spec.equation_text.push_back(text);
        } else {
          PendingPoint pp;
          pp.pos = key.pos;
          do {
            const Token name = expect(TokenKind::ident, "a coordinate name");
            expect(TokenKind::equals, "'='");
            std::string text;
            ExprPtr v = expression(text);
            if (!pp.text.empty()) pp.text += ", ";
            pp.text += name.text + " = " + text;
            pp.entries.emplace_back(name, v);
          } while (peek().kind == TokenKind::comma && (take(), true));
          pending.push_back(std::move(pp));
        }
      } else {
        expect(TokenKind::equals, "'=' after '" + key.text + "'");
        if (key.text == "m") {
          spec.m = integer("m");
          have_m = true;
        } else if (key.text == "d") {
          spec.d = integer("d");
          have_d = true;
        } else if (key.text == "order") {
          spec.order = integer("order");
          spec.order_given = true;
        } else if (key.text == "style") {
          const Token v = expect(TokenKind::ident, "real_graph or complex_defining");
          if (v.text == "real_graph")
            spec.style = EquationStyle::real_graph;
          else if (v.text == "complex_defining")
            spec.style = EquationStyle::complex_defining;
          else
            throw ParseError(v.pos, "unknown style '" + v.text + "' (use real_graph or complex_defining)");
          have_style = true;
        } else {
          throw ParseError(key.pos, "unknown manifold field '" + key.text + "'");
        }
      }
      expect(TokenKind::semicolon, "';'");
    }
    const SourcePos close = take().pos;
    if (!have_m || !have_d) throw ParseError(close, "manifold '" + spec.name + "' must declare m and d");
    if (!have_style) throw ParseError(close, "manifold '" + spec.name + "' must declare a style");
    if (spec.m < 1 || spec.d < 1) throw ParseError(spec.pos, "m and d must be at least 1");
    if (2 * spec.m + spec.d > 16) throw ParseError(spec.pos, "2m + d must not exceed 16");
    if (spec.order < 1) throw ParseError(spec.pos, "order must be positive");
    if (static_cast<int>(spec.equations.size()) != spec.d)
      throw ParseError(close, "manifold '" + spec.name + "' has " + std::to_string(spec.equations.size()) +
                                  " equation(s) but d = " + std::to_string(spec.d));
    const VariableScope scope = spec.scope();
    for (const auto& e : spec.equations) check_identifiers(*e, scope);
    for (auto& pp : pending) spec.points.push_back(resolve_point(spec, pp.entries, pp.pos, pp.text));
    return spec;
  }

  PointSpec resolve_point(const ManifoldSpec& spec, const std::vector<std::pair<Token, ExprPtr>>& entries,
                          SourcePos pos, const std::string& text) {
    using Q = GaussianRational;
    PointSpec p;
    p.pos = pos;
    p.text = text;
    p.z.assign(spec.m, Q(0));
    p.u.assign(spec.d, Q(0));
    VariableScope names;
    add_family(names, "z", spec.m, 0);
    add_family(names, "x", spec.m, 100);
    add_family(names, "y", spec.m, 200);
    add_family(names, "u", spec.d, 300);
    for (const auto& [tok, ex] : entries) {
      check_identifiers(*ex, constant_scope());
      const Q v = expand_constant(*ex);
      auto slot = names.find(tok.text);
      if (!slot) throw ParseError(tok.pos, "unknown point coordinate '" + tok.text + "' (use z_k, x_k, y_k, u_j)");
      const std::size_t s = *slot;
      if (s >= 100 && !v.is_real()) throw ParseError(ex->pos, "coordinate '" + tok.text + "' must be real");
      if (s < 100)
        p.z[s] = v;
      else if (s < 200)
        p.z[s - 100] = Q(v.re(), p.z[s - 100].im());
      else if (s < 300)
        p.z[s - 200] = Q(p.z[s - 200].re(), v.re());
      else
        p.u[s - 300] = v;
    }
    return p;
  }

  MapSpec parse_map(const Manifest& so_far) {
    MapSpec spec;
    spec.pos = take().pos;
    spec.name = ident("a map name");
    expect(TokenKind::lbrace, "'{'");
    Token src_tok{}, tgt_tok{};
    while (peek().kind != TokenKind::rbrace) {
      const Token key = expect(TokenKind::ident, "a field name");
      if (key.text == "h") {
        expect(TokenKind::colon, "':' after 'h'");
        std::string text;
        spec.components.push_back(expression(text));
        spec.component_text.push_back(text);
      } else if (key.text == "source" || key.text == "target") {
        expect(TokenKind::equals, "'='");
        const Token v = expect(TokenKind::ident, "a manifold name");
        (key.text == "source" ? spec.source : spec.target) = v.text;
        (key.text == "source" ? src_tok : tgt_tok) = v;
      } else {
        throw ParseError(key.pos, "unknown map field '" + key.text + "'");
      }
      expect(TokenKind::semicolon, "';'");
    }
    const SourcePos close = take().pos;
    if (spec.source.empty() || spec.target.empty())
      throw ParseError(close, "map '" + spec.name + "' must declare source and target");
    const ManifoldSpec* src = so_far.find_manifold(spec.source);
    const ManifoldSpec* tgt = so_far.find_manifold(spec.target);
    if (!src) throw ParseError(src_tok.pos, "unknown source manifold '" + spec.source + "'");
    if (!tgt) throw ParseError(tgt_tok.pos, "unknown target manifold '" + spec.target + "'");
    if (static_cast<int>(spec.components.size()) != tgt->n())
      throw ParseError(close, "map '" + spec.name + "' has " + std::to_string(spec.components.size()) +
                                  " component(s) but the target has n' = " + std::to_string(tgt->n()));
    const VariableScope scope = holomorphic_scope(src->m, src->d);
    for (const auto& e : spec.components) check_identifiers(*e, scope);
    return spec;
  }

  const std::string& src_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Manifest load_manifest(const std::string& text) { return detail::ManifestParser(text).parse(); }

// The first manifold block of a manifest.
inline ManifoldSpec load_manifold_spec(const std::string& text) { return load_manifest(text).manifolds.front(); }

}  // namespace crsegre
