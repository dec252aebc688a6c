#pragma once

// Arithmetic expressions and boolean predicates over x1..xn and t.
// Grammar (EBNF) is documented in docs/expressions.md.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowcomp/errors.hpp"

namespace flowcomp {

enum class ExprOp : std::uint8_t { number, variable, negate, add, sub, mul, div, pow, call };
enum class Func : std::uint8_t { sin, cos, exp, log, sqrt, abs, atan2, min, max };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op = ExprOp::number;
  double value = 0.0;  // number
  int var = 0;         // variable: 0 is t, k >= 1 is x_k
  Func func = Func::sin;
  std::vector<ExprNodePtr> args;
};

struct ParseOptions {
  int dimension = 0;  // highest admissible x-index, 0 = unrestricted
  bool allow_time = true;
};

namespace detail {

enum class Tok : std::uint8_t {
  number, ident, plus, minus, star, slash, caret, lparen, rparen, comma,
  lt, le, gt, ge, ne, eq, end
};

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t len, std::string text = {}) {
    out.push_back(Token{k, std::move(text), 0.0, line, col});
    i += len;
    col += 1;  // a UTF-8 glyph counts as one column
  };
  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      Token t{Tok::number, std::string(src.substr(i, j - i)), 0.0, line, col};
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, t.value);
      if (ec != std::errc() || ptr != src.data() + j) {
        throw ParseError("malformed number '" + t.text + "'", line, col);
      }
      out.push_back(std::move(t));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back(Token{Tok::ident, std::string(src.substr(i, j - i)), 0.0, line, col});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto next = [&](char ch) { return i + 1 < src.size() && src[i + 1] == ch; };
    auto utf8 = [&](std::string_view glyph) { return src.substr(i, glyph.size()) == glyph; };
    switch (c) {
      case '+': push(Tok::plus, 1); continue;
      case '-': push(Tok::minus, 1); continue;
      case '*': push(Tok::star, 1); continue;
      case '/': push(Tok::slash, 1); continue;
      case '^': push(Tok::caret, 1); continue;
      case '(': push(Tok::lparen, 1); continue;
      case ')': push(Tok::rparen, 1); continue;
      case ',': push(Tok::comma, 1); continue;
      case '<':
        if (next('=')) { push(Tok::le, 2); ++col; } else { push(Tok::lt, 1); }
        continue;
      case '>':
        if (next('=')) { push(Tok::ge, 2); ++col; } else { push(Tok::gt, 1); }
        continue;
      case '!':
        if (next('=')) { push(Tok::ne, 2); ++col; continue; }
        break;
      case '=':
        if (next('=')) { push(Tok::eq, 2); ++col; } else { push(Tok::eq, 1); }
        continue;
      default:
        break;
    }
    if (utf8("≤")) { push(Tok::le, 3); continue; }
    if (utf8("≥")) { push(Tok::ge, 3); continue; }
    if (utf8("≠")) { push(Tok::ne, 3); continue; }
    if (utf8("−")) { push(Tok::minus, 3); continue; }
    throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", line, col);
  }
  out.push_back(Token{Tok::end, {}, 0.0, line, col});
  return out;
}

struct FuncInfo {
  std::string_view name;
  Func func;
  int arity;
};

inline constexpr std::array<FuncInfo, 9> kFunctions{{
    {"sin", Func::sin, 1},
    {"cos", Func::cos, 1},
    {"exp", Func::exp, 1},
    {"log", Func::log, 1},
    {"sqrt", Func::sqrt, 1},
    {"abs", Func::abs, 1},
    {"atan2", Func::atan2, 2},
    {"min", Func::min, 2},
    {"max", Func::max, 2},
}};

inline const FuncInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

inline std::string_view function_name(Func f) {
  for (const auto& info : kFunctions) {
    if (info.func == f) return info.name;
  }
  return "?";
}

inline bool is_relop(Tok k) {
  return k == Tok::lt || k == Tok::le || k == Tok::gt || k == Tok::ge || k == Tok::ne || k == Tok::eq;
}

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t& pos, ParseOptions opts)
      : toks_(toks), pos_(pos), opts_(opts) {}

  ExprNodePtr expression() {
    auto lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const ExprOp op = take().kind == Tok::plus ? ExprOp::add : ExprOp::sub;
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.column);
  }

  static ExprNodePtr binary(ExprOp op, ExprNodePtr a, ExprNodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  ExprNodePtr term() {
    auto lhs = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const ExprOp op = take().kind == Tok::star ? ExprOp::mul : ExprOp::div;
      lhs = binary(op, lhs, unary());
    }
    return lhs;
  }

  ExprNodePtr unary() {
    if (peek().kind == Tok::minus) {
      take();
      auto n = std::make_shared<ExprNode>();
      n->op = ExprOp::negate;
      n->args = {unary()};
      return n;
    }
    return power();
  }

  ExprNodePtr power() {
    auto base = primary();
    if (peek().kind == Tok::caret) {
      take();
      return binary(ExprOp::pow, base, unary());
    }
    return base;
  }

  ExprNodePtr primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::number: {
        take();
        auto n = std::make_shared<ExprNode>();
        n->op = ExprOp::number;
        n->value = tok.value;
        return n;
      }
      case Tok::lparen: {
        take();
        auto inner = expression();
        if (peek().kind != Tok::rparen) fail("expected ')'", peek());
        take();
        return inner;
      }
      case Tok::ident:
        return identifier();
      case Tok::end:
        fail("unexpected end of input", tok);
      default:
        fail("unexpected token '" + token_text(tok) + "'", tok);
    }
  }

  ExprNodePtr identifier() {
    const Token& tok = take();
    if (peek().kind == Tok::lparen) {
      const FuncInfo* info = find_function(tok.text);
      if (info == nullptr) fail("unknown function '" + tok.text + "'", tok);
      take();
      auto n = std::make_shared<ExprNode>();
      n->op = ExprOp::call;
      n->func = info->func;
      if (peek().kind != Tok::rparen) {
        n->args.push_back(expression());
        while (peek().kind == Tok::comma) {
          take();
          n->args.push_back(expression());
        }
      }
      if (peek().kind != Tok::rparen) fail("expected ')' or ','", peek());
      take();
      if (static_cast<int>(n->args.size()) != info->arity) {
        fail("function '" + tok.text + "' expects " + std::to_string(info->arity) +
                 " argument(s), got " + std::to_string(n->args.size()),
             tok);
      }
      return n;
    }
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::variable;
    if (tok.text == "t") {
      if (!opts_.allow_time) fail("time variable 't' is not allowed here", tok);
      n->var = 0;
      return n;
    }
    if (tok.text.size() >= 2 && tok.text[0] == 'x' && tok.text[1] != '0') {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(tok.text.data() + 1, tok.text.data() + tok.text.size(), idx);
      if (ec == std::errc() && ptr == tok.text.data() + tok.text.size() && idx >= 1) {
        if (opts_.dimension > 0 && idx > opts_.dimension) {
          fail("unknown identifier '" + tok.text + "' (dimension is " +
                   std::to_string(opts_.dimension) + ")",
               tok);
        }
        n->var = idx;
        return n;
      }
    }
    fail("unknown identifier '" + tok.text + "'", tok);
  }

  static std::string token_text(const Token& t) {
    switch (t.kind) {
      case Tok::number:
      case Tok::ident: return t.text;
      case Tok::plus: return "+";
      case Tok::minus: return "-";
      case Tok::star: return "*";
      case Tok::slash: return "/";
      case Tok::caret: return "^";
      case Tok::lparen: return "(";
      case Tok::rparen: return ")";
      case Tok::comma: return ",";
      case Tok::lt: return "<";
      case Tok::le: return "<=";
      case Tok::gt: return ">";
      case Tok::ge: return ">=";
      case Tok::ne: return "!=";
      case Tok::eq: return "==";
      case Tok::end: return "<end>";
    }
    return "?";
  }

  const std::vector<Token>& toks_;
  std::size_t& pos_;
  ParseOptions opts_;
};

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Precedence levels used by the printer.
inline int precedence(const ExprNode& n) {
  switch (n.op) {
    case ExprOp::add:
    case ExprOp::sub: return 1;
    case ExprOp::mul:
    case ExprOp::div: return 2;
    case ExprOp::negate: return 3;
    case ExprOp::pow: return 4;
    default: return 5;
  }
}

inline void print_node(const ExprNode& n, std::string& out);

inline void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

inline void print_node(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case ExprOp::number: out += format_number(n.value); return;
    case ExprOp::variable:
      out += n.var == 0 ? std::string("t") : "x" + std::to_string(n.var);
      return;
    case ExprOp::negate:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case ExprOp::pow:
      print_child(*n.args[0], precedence(*n.args[0]) <= 4, out);
      out += '^';
      print_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    case ExprOp::call:
      out += function_name(n.func);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      return;
    default: {
      const int p = precedence(n);
      print_child(*n.args[0], precedence(*n.args[0]) < p, out);
      switch (n.op) {
        case ExprOp::add: out += " + "; break;
        case ExprOp::sub: out += " - "; break;
        case ExprOp::mul: out += " * "; break;
        default: out += " / "; break;
      }
      print_child(*n.args[1], precedence(*n.args[1]) <= p, out);
      return;
    }
  }
}

inline bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  switch (a.op) {
    case ExprOp::number:
      if (std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value)) return false;
      break;
    case ExprOp::variable:
      if (a.var != b.var) return false;
      break;
    case ExprOp::call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

struct Instr {
  ExprOp op;
  Func func;
  int var;
  double value;
};

inline void compile(const ExprNode& n, std::vector<Instr>& prog, int& depth, int& max_depth) {
  for (const auto& a : n.args) compile(*a, prog, depth, max_depth);
  const int nargs = static_cast<int>(n.args.size());
  depth += 1 - nargs;
  if (depth > max_depth) max_depth = depth;
  prog.push_back(Instr{n.op, n.func, n.var, n.value});
}

[[noreturn]] inline void domain_error(const char* what) {
  throw EvalError(EvalErrorKind::domain_error, what);
}

inline double checked_div(double a, double b) {
  if (b == 0.0) throw EvalError(EvalErrorKind::division_by_zero, "division by zero");
  return a / b;
}

inline double checked_pow(double base, double ex) {
  if (base == 0.0 && ex < 0.0) throw EvalError(EvalErrorKind::division_by_zero, "zero raised to a negative power");
  if (base < 0.0 && std::trunc(ex) != ex) domain_error("negative base raised to a non-integer power");
  return std::pow(base, ex);
}

inline double apply(Func f, double a, double b) {
  switch (f) {
    case Func::sin: return std::sin(a);
    case Func::cos: return std::cos(a);
    case Func::exp: return std::exp(a);
    case Func::log:
      if (!(a > 0.0)) domain_error("log of a non-positive number");
      return std::log(a);
    case Func::sqrt:
      if (a < 0.0) domain_error("sqrt of a negative number");
      return std::sqrt(a);
    case Func::abs: return std::fabs(a);
    case Func::atan2: return std::atan2(a, b);
    case Func::min: return std::fmin(a, b);
    case Func::max: return std::fmax(a, b);
  }
  return 0.0;
}

}  // namespace detail

/// An immutable arithmetic expression. Evaluation is reentrant.
class Expression {
 public:
  Expression() : Expression(constant(0.0)) {}

  static Expression parse(std::string_view source, ParseOptions opts = {}) {
    const auto toks = detail::tokenize(source);
    std::size_t pos = 0;
    detail::ExprParser p(toks, pos, opts);
    auto root = p.expression();
    if (toks[pos].kind != detail::Tok::end) {
      throw ParseError("unexpected trailing input", toks[pos].line, toks[pos].column);
    }
    return Expression(std::move(root));
  }

  static Expression constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::number;
    n->value = v;
    return Expression(std::move(n));
  }

  explicit Expression(ExprNodePtr root) : root_(std::move(root)) {
    int depth = 0;
    detail::compile(*root_, program_, depth, max_depth_);
    for (const auto& ins : program_) {
      if (ins.op == ExprOp::variable) {
        if (ins.var == 0) uses_time_ = true;
        if (ins.var > max_var_) max_var_ = ins.var;
      }
    }
  }

  /// Evaluates at point x and time t. Throws EvalError on singularities.
  double operator()(std::span<const double> x, double t = 0.0) const {
    if (max_var_ > static_cast<int>(x.size())) {
      throw EvalError(EvalErrorKind::dimension_mismatch,
                      "expression uses x" + std::to_string(max_var_) + " but point has dimension " +
                          std::to_string(x.size()));
    }
    constexpr int kInline = 32;
    std::array<double, kInline> small{};
    std::vector<double> big;
    double* stack = small.data();
    if (max_depth_ > kInline) {
      big.resize(static_cast<std::size_t>(max_depth_));
      stack = big.data();
    }
    int sp = 0;
    for (const auto& ins : program_) {
      switch (ins.op) {
        case ExprOp::number: stack[sp++] = ins.value; break;
        case ExprOp::variable: stack[sp++] = ins.var == 0 ? t : x[static_cast<std::size_t>(ins.var - 1)]; break;
        case ExprOp::negate: stack[sp - 1] = -stack[sp - 1]; break;
        case ExprOp::add: --sp; stack[sp - 1] += stack[sp]; break;
        case ExprOp::sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case ExprOp::mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case ExprOp::div: --sp; stack[sp - 1] = detail::checked_div(stack[sp - 1], stack[sp]); break;
        case ExprOp::pow: --sp; stack[sp - 1] = detail::checked_pow(stack[sp - 1], stack[sp]); break;
        case ExprOp::call:
          if (ins.func == Func::atan2 || ins.func == Func::min || ins.func == Func::max) {
            --sp;
            stack[sp - 1] = detail::apply(ins.func, stack[sp - 1], stack[sp]);
          } else {
            stack[sp - 1] = detail::apply(ins.func, stack[sp - 1], 0.0);
          }
          break;
      }
    }
    const double r = stack[0];
    if (std::isnan(r)) detail::domain_error("expression evaluated to NaN");
    return r;
  }

  std::string to_string() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  const ExprNode& root() const noexcept { return *root_; }
  int max_variable() const noexcept { return max_var_; }
  bool uses_time() const noexcept { return uses_time_; }

  friend bool operator==(const Expression& a, const Expression& b) {
    return detail::same_tree(*a.root_, *b.root_);
  }

 private:
  ExprNodePtr root_;
  std::vector<detail::Instr> program_;
  int max_depth_ = 0;
  int max_var_ = 0;
  bool uses_time_ = false;
};

inline Expression parse_expression(std::string_view source, ParseOptions opts = {}) {
  return Expression::parse(source, opts);
}

inline double evaluate(const Expression& e, std::span<const double> x, double t = 0.0) { return e(x, t); }

enum class Relop : std::uint8_t { lt, le, gt, ge, ne };

/// Boolean combination of comparisons. Equality tests are rejected at parse time
/// so that every predicate describes an open set.
class Predicate {
 public:
  enum class Kind : std::uint8_t { constant, compare, conj, disj, negation };

  struct Node {
    Kind kind = Kind::constant;
    bool value = true;
    Relop relop = Relop::lt;
    Expression lhs;
    Expression rhs;
    std::vector<std::shared_ptr<const Node>> children;
  };

  static Predicate parse(std::string_view source, ParseOptions opts = {}) {
    const auto toks = detail::tokenize(source);
    std::size_t pos = 0;
    Parser p{toks, pos, opts};
    auto root = p.disjunction();
    if (toks[pos].kind != detail::Tok::end) {
      throw ParseError("unexpected trailing input", toks[pos].line, toks[pos].column);
    }
    return Predicate(std::move(root));
  }

  static Predicate always() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = true;
    return Predicate(std::move(n));
  }

  /// Strict semantics: every operand is evaluated, so errors propagate.
  bool operator()(std::span<const double> x) const { return eval(*root_, x); }

  std::string to_string() const {
    std::string out;
    print(*root_, out);
    return out;
  }

  int max_variable() const {
    int m = 0;
    visit(*root_, [&](const Expression& e) { m = std::max(m, e.max_variable()); });
    return m;
  }

  friend bool operator==(const Predicate& a, const Predicate& b) { return same(*a.root_, *b.root_); }

  const Node& root() const noexcept { return *root_; }

 private:
  explicit Predicate(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  struct Parser {
    const std::vector<detail::Token>& toks;
    std::size_t& pos;
    ParseOptions opts;

    const detail::Token& peek() const { return toks[pos]; }
    bool keyword(std::string_view kw) const {
      return peek().kind == detail::Tok::ident && peek().text == kw;
    }

    std::shared_ptr<const Node> disjunction() {
      auto first = conjunction();
      if (!keyword("or")) return first;
      auto n = std::make_shared<Node>();
      n->kind = Kind::disj;
      n->children.push_back(std::move(first));
      while (keyword("or")) {
        ++pos;
        n->children.push_back(conjunction());
      }
      return n;
    }

    std::shared_ptr<const Node> conjunction() {
      auto first = negation();
      if (!keyword("and")) return first;
      auto n = std::make_shared<Node>();
      n->kind = Kind::conj;
      n->children.push_back(std::move(first));
      while (keyword("and")) {
        ++pos;
        n->children.push_back(negation());
      }
      return n;
    }

    std::shared_ptr<const Node> negation() {
      if (keyword("not")) {
        ++pos;
        auto n = std::make_shared<Node>();
        n->kind = Kind::negation;
        n->children.push_back(negation());
        return n;
      }
      if (keyword("true") || keyword("false")) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::constant;
        n->value = peek().text == "true";
        ++pos;
        return n;
      }
      if (peek().kind == detail::Tok::lparen) {
        // Either a parenthesized predicate or a comparison whose lhs starts with '('.
        const std::size_t save = pos;
        std::optional<ParseError> first_error;
        try {
          ++pos;
          auto inner = disjunction();
          if (peek().kind == detail::Tok::rparen) {
            ++pos;
            const auto k = peek().kind;
            const bool continues_expression =
                detail::is_relop(k) || k == detail::Tok::plus || k == detail::Tok::minus ||
                k == detail::Tok::star || k == detail::Tok::slash || k == detail::Tok::caret;
            if (!continues_expression) return inner;
          }
        } catch (const ParseError& e) {
          first_error = e;
        }
        pos = save;
        try {
          return comparison();
        } catch (const ParseError& e) {
          if (first_error && (first_error->line() > e.line() ||
                              (first_error->line() == e.line() && first_error->column() > e.column()))) {
            throw *first_error;
          }
          throw;
        }
      }
      return comparison();
    }

    std::shared_ptr<const Node> comparison() {
      detail::ExprParser ep(toks, pos, opts);
      auto lhs = ep.expression();
      const detail::Token& op = peek();
      Relop r{};
      switch (op.kind) {
        case detail::Tok::lt: r = Relop::lt; break;
        case detail::Tok::le: r = Relop::le; break;
        case detail::Tok::gt: r = Relop::gt; break;
        case detail::Tok::ge: r = Relop::ge; break;
        case detail::Tok::ne: r = Relop::ne; break;
        case detail::Tok::eq:
          throw ParseError("equality comparison is not allowed in a domain predicate (the set must be open)",
                           op.line, op.column);
        default:
          throw ParseError("expected comparison operator", op.line, op.column);
      }
      ++pos;
      auto rhs = ep.expression();
      auto n = std::make_shared<Node>();
      n->kind = Kind::compare;
      n->relop = r;
      n->lhs = Expression(std::move(lhs));
      n->rhs = Expression(std::move(rhs));
      return n;
    }
  };

  static bool eval(const Node& n, std::span<const double> x) {
    switch (n.kind) {
      case Kind::constant: return n.value;
      case Kind::compare: {
        const double a = n.lhs(x);
        const double b = n.rhs(x);
        switch (n.relop) {
          case Relop::lt: return a < b;
          case Relop::le: return a <= b;
          case Relop::gt: return a > b;
          case Relop::ge: return a >= b;
          case Relop::ne: return a != b;
        }
        return false;
      }
      case Kind::conj: {
        bool r = true;
        for (const auto& c : n.children) r = eval(*c, x) && r;
        return r;
      }
      case Kind::disj: {
        bool r = false;
        for (const auto& c : n.children) r = eval(*c, x) || r;
        return r;
      }
      case Kind::negation: return !eval(*n.children[0], x);
    }
    return false;
  }

  static void print(const Node& n, std::string& out) {
    switch (n.kind) {
      case Kind::constant: out += n.value ? "true" : "false"; return;
      case Kind::compare: {
        static constexpr std::array<std::string_view, 5> ops{" < ", " <= ", " > ", " >= ", " != "};
        out += n.lhs.to_string();
        out += ops[static_cast<std::size_t>(n.relop)];
        out += n.rhs.to_string();
        return;
      }
      case Kind::conj:
      case Kind::disj: {
        const bool is_and = n.kind == Kind::conj;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) out += is_and ? " and " : " or ";
          const Kind ck = n.children[i]->kind;
          const bool parens = ck == Kind::disj || (is_and && ck == Kind::conj);
          if (parens) out += '(';
          print(*n.children[i], out);
          if (parens) out += ')';
        }
        return;
      }
      case Kind::negation: {
        out += "not ";
        const Kind ck = n.children[0]->kind;
        const bool parens = ck == Kind::conj || ck == Kind::disj;
        if (parens) out += '(';
        print(*n.children[0], out);
        if (parens) out += ')';
        return;
      }
    }
  }

  static bool same(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    if (a.kind == Kind::constant && a.value != b.value) return false;
    if (a.kind == Kind::compare && (a.relop != b.relop || !(a.lhs == b.lhs) || !(a.rhs == b.rhs))) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
      if (!same(*a.children[i], *b.children[i])) return false;
    }
    return true;
  }

  template <typename F>
  static void visit(const Node& n, F&& f) {
    if (n.kind == Kind::compare) {
      f(n.lhs);
      f(n.rhs);
    }
    for (const auto& c : n.children) visit(*c, f);
  }

  std::shared_ptr<const Node> root_;
};

inline Predicate parse_predicate(std::string_view source, ParseOptions opts = {}) {
  return Predicate::parse(source, opts);
}

inline bool evaluate_predicate(const Predicate& p, std::span<const double> x) { return p(x); }

}  // namespace flowcomp
