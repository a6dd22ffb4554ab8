#include "dwarp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

namespace dwarp {

struct ScalarExpr::Node {
  Kind kind = Kind::kConstant;
  double value = 0.0;        // kConstant
  std::string var;           // kVariable
  std::shared_ptr<const Node> a, b;
  long long num = 1, den = 1;  // kPow exponent, reduced, den > 0
};

namespace {

using Kind = ScalarExpr::Kind;

bool is_unary_fn(Kind k) {
  switch (k) {
    case Kind::kNeg:
    case Kind::kExp:
    case Kind::kLog:
    case Kind::kSin:
    case Kind::kCos:
    case Kind::kSinh:
    case Kind::kCosh:
    case Kind::kSqrt:
      return true;
    default:
      return false;
  }
}

const char* fn_name(Kind k) {
  switch (k) {
    case Kind::kExp: return "exp";
    case Kind::kLog: return "log";
    case Kind::kSin: return "sin";
    case Kind::kCos: return "cos";
    case Kind::kSinh: return "sinh";
    case Kind::kCosh: return "cosh";
    case Kind::kSqrt: return "sqrt";
    default: return "";
  }
}

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval_pow(double base, long long num, long long den) {
  if (den == 1) {
    if (base == 0.0 && num < 0) throw DomainError("zero raised to a negative power");
    return require_finite(std::pow(base, static_cast<double>(num)), "pow");
  }
  if (base < 0.0) throw DomainError("fractional power of a negative base");
  if (base == 0.0 && num < 0) throw DomainError("zero raised to a negative power");
  return require_finite(
      std::pow(base, static_cast<double>(num) / static_cast<double>(den)), "pow");
}

// No-throw scalar kernel used for constant folding; returns false when the
// value would be a domain error so the node is kept and errors at eval time.
bool try_apply(Kind k, double x, double y, long long num, long long den, double& out) {
  switch (k) {
    case Kind::kAdd: out = x + y; break;
    case Kind::kSub: out = x - y; break;
    case Kind::kMul: out = x * y; break;
    case Kind::kDiv:
      if (y == 0.0) return false;
      out = x / y;
      break;
    case Kind::kNeg: out = -x; break;
    case Kind::kPow:
      if (den != 1 && x < 0.0) return false;
      if (x == 0.0 && num < 0) return false;
      out = std::pow(x, static_cast<double>(num) / static_cast<double>(den));
      break;
    case Kind::kExp: out = std::exp(x); break;
    case Kind::kLog:
      if (x <= 0.0) return false;
      out = std::log(x);
      break;
    case Kind::kSin: out = std::sin(x); break;
    case Kind::kCos: out = std::cos(x); break;
    case Kind::kSinh: out = std::sinh(x); break;
    case Kind::kCosh: out = std::cosh(x); break;
    case Kind::kSqrt:
      if (x < 0.0) return false;
      out = std::sqrt(x);
      break;
    default: return false;
  }
  return std::isfinite(out);
}

}  // namespace

ScalarExpr::ScalarExpr(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kConstant;
  n->value = value;
  node_ = std::move(n);
}

ScalarExpr ScalarExpr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kVariable;
  n->var = std::move(name);
  return ScalarExpr(std::shared_ptr<const Node>(std::move(n)));
}

ScalarExpr::Kind ScalarExpr::kind() const { return node_->kind; }

bool ScalarExpr::is_constant(double v) const {
  return node_->kind == Kind::kConstant && node_->value == v;
}

double ScalarExpr::value() const { return node_->value; }

const std::string& ScalarExpr::var_name() const { return node_->var; }

ScalarExpr ScalarExpr::child(int index) const {
  return ScalarExpr(index == 0 ? node_->a : node_->b);
}

long long ScalarExpr::pow_num() const { return node_->num; }
long long ScalarExpr::pow_den() const { return node_->den; }

ScalarExpr ScalarExpr::make(Kind kind, ScalarExpr a, ScalarExpr b, long long num,
                            long long den) {
  // Constant folding and 0/1 identities; anything beyond that is out of scope.
  const bool ca = a.node_ && a.is_constant();
  const bool cb = b.node_ && b.is_constant();
  if (kind == Kind::kPow) {
    if (den < 0) { den = -den; num = -num; }
    if (den == 0) throw Error("pow: zero exponent denominator");
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) return ScalarExpr(1.0);
    if (num == 1 && den == 1) return a;
  }
  switch (kind) {
    case Kind::kAdd:
      if (ca && a.value() == 0.0) return b;
      if (cb && b.value() == 0.0) return a;
      break;
    case Kind::kSub:
      if (cb && b.value() == 0.0) return a;
      break;
    case Kind::kMul:
      if ((ca && a.value() == 0.0) || (cb && b.value() == 0.0)) return ScalarExpr(0.0);
      if (ca && a.value() == 1.0) return b;
      if (cb && b.value() == 1.0) return a;
      break;
    case Kind::kDiv:
      if (ca && a.value() == 0.0 && cb && b.value() != 0.0) return ScalarExpr(0.0);
      if (cb && b.value() == 1.0) return a;
      break;
    case Kind::kNeg:
      if (a.node_->kind == Kind::kNeg) return a.child(0);
      break;
    default:
      break;
  }
  const bool unary = is_unary_fn(kind) || kind == Kind::kPow;
  if (ca && (unary || cb)) {
    double out = 0.0;
    if (try_apply(kind, a.value(), cb ? b.value() : 0.0, num, den, out))
      return ScalarExpr(out);
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = a.node_;
  n->b = b.node_;
  n->num = num;
  n->den = den;
  return ScalarExpr(std::shared_ptr<const Node>(std::move(n)));
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr::make(Kind::kAdd, a, b, 0, 1);
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr::make(Kind::kSub, a, b, 0, 1);
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr::make(Kind::kMul, a, b, 0, 1);
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr::make(Kind::kDiv, a, b, 0, 1);
}
ScalarExpr operator-(const ScalarExpr& a) {
  return ScalarExpr::make(Kind::kNeg, a, ScalarExpr(), 0, 1);
}
ScalarExpr pow(const ScalarExpr& base, long long num, long long den) {
  return ScalarExpr::make(Kind::kPow, base, ScalarExpr(), num, den);
}
ScalarExpr exp(const ScalarExpr& e) { return ScalarExpr::make(Kind::kExp, e, ScalarExpr(), 0, 1); }
ScalarExpr log(const ScalarExpr& e) { return ScalarExpr::make(Kind::kLog, e, ScalarExpr(), 0, 1); }
ScalarExpr sin(const ScalarExpr& e) { return ScalarExpr::make(Kind::kSin, e, ScalarExpr(), 0, 1); }
ScalarExpr cos(const ScalarExpr& e) { return ScalarExpr::make(Kind::kCos, e, ScalarExpr(), 0, 1); }
ScalarExpr sinh(const ScalarExpr& e) { return ScalarExpr::make(Kind::kSinh, e, ScalarExpr(), 0, 1); }
ScalarExpr cosh(const ScalarExpr& e) { return ScalarExpr::make(Kind::kCosh, e, ScalarExpr(), 0, 1); }
ScalarExpr sqrt(const ScalarExpr& e) { return ScalarExpr::make(Kind::kSqrt, e, ScalarExpr(), 0, 1); }

double eval(const ScalarExpr& e, const VarAssignment& a) {
  const ScalarExpr::Node* n = e.node_.get();
  double out = 0.0;
  switch (n->kind) {
    case Kind::kConstant: return n->value;
    case Kind::kVariable: return a.lookup(n->var);
    case Kind::kAdd: out = eval(ScalarExpr(n->a), a) + eval(ScalarExpr(n->b), a); break;
    case Kind::kSub: out = eval(ScalarExpr(n->a), a) - eval(ScalarExpr(n->b), a); break;
    case Kind::kMul: out = eval(ScalarExpr(n->a), a) * eval(ScalarExpr(n->b), a); break;
    case Kind::kDiv: {
      const double num = eval(ScalarExpr(n->a), a);
      const double den = eval(ScalarExpr(n->b), a);
      if (den == 0.0) throw DomainError("division by zero");
      out = num / den;
      break;
    }
    case Kind::kNeg: return -eval(ScalarExpr(n->a), a);
    case Kind::kPow: return eval_pow(eval(ScalarExpr(n->a), a), n->num, n->den);
    case Kind::kExp: out = std::exp(eval(ScalarExpr(n->a), a)); break;
    case Kind::kLog: {
      const double x = eval(ScalarExpr(n->a), a);
      if (x <= 0.0) throw DomainError("log of a non-positive value");
      return std::log(x);
    }
    case Kind::kSin: return std::sin(eval(ScalarExpr(n->a), a));
    case Kind::kCos: return std::cos(eval(ScalarExpr(n->a), a));
    case Kind::kSinh: out = std::sinh(eval(ScalarExpr(n->a), a)); break;
    case Kind::kCosh: out = std::cosh(eval(ScalarExpr(n->a), a)); break;
    case Kind::kSqrt: {
      const double x = eval(ScalarExpr(n->a), a);
      if (x < 0.0) throw DomainError("sqrt of a negative value");
      return std::sqrt(x);
    }
    default: throw Error("corrupt expression node");
  }
  return require_finite(out, "expression");
}

ScalarExpr diff(const ScalarExpr& e, const std::string& var) {
  const ScalarExpr::Node* n = e.node_.get();
  switch (n->kind) {
    case Kind::kConstant: return ScalarExpr(0.0);
    case Kind::kVariable: return ScalarExpr(n->var == var ? 1.0 : 0.0);
    case Kind::kAdd: return diff(e.child(0), var) + diff(e.child(1), var);
    case Kind::kSub: return diff(e.child(0), var) - diff(e.child(1), var);
    case Kind::kMul: {
      const ScalarExpr u = e.child(0), v = e.child(1);
      return diff(u, var) * v + u * diff(v, var);
    }
    case Kind::kDiv: {
      const ScalarExpr u = e.child(0), v = e.child(1);
      return (diff(u, var) * v - u * diff(v, var)) / (v * v);
    }
    case Kind::kNeg: return -diff(e.child(0), var);
    case Kind::kPow: {
      const ScalarExpr u = e.child(0);
      const ScalarExpr coeff(static_cast<double>(n->num) / static_cast<double>(n->den));
      return coeff * pow(u, n->num - n->den, n->den) * diff(u, var);
    }
    case Kind::kExp: return exp(e.child(0)) * diff(e.child(0), var);
    case Kind::kLog: return diff(e.child(0), var) / e.child(0);
    case Kind::kSin: return cos(e.child(0)) * diff(e.child(0), var);
    case Kind::kCos: return -(sin(e.child(0)) * diff(e.child(0), var));
    case Kind::kSinh: return cosh(e.child(0)) * diff(e.child(0), var);
    case Kind::kCosh: return sinh(e.child(0)) * diff(e.child(0), var);
    case Kind::kSqrt: return diff(e.child(0), var) / (ScalarExpr(2.0) * sqrt(e.child(0)));
  }
  throw Error("corrupt expression node");
}

double fd_diff(const ScalarExpr& e, const std::string& var, const VarAssignment& a,
               double step) {
  if (step <= 0.0) throw Error("fd_diff: step must be positive");
  VarAssignment hi = a, lo = a;
  const double x = a.lookup(var);
  hi.bind(var, x + step);
  lo.bind(var, x - step);
  return (eval(e, hi) - eval(e, lo)) / (2.0 * step);
}

void collect_variables(const ScalarExpr& e, std::set<std::string>& out) {
  const ScalarExpr::Node* n = e.node_.get();
  if (n->kind == Kind::kVariable) {
    out.insert(n->var);
    return;
  }
  if (n->a) collect_variables(ScalarExpr(n->a), out);
  if (n->b) collect_variables(ScalarExpr(n->b), out);
}

std::set<std::string> free_variables(const ScalarExpr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

ScalarExpr substitute(const ScalarExpr& e,
                      const std::map<std::string, ScalarExpr>& replacements) {
  const ScalarExpr::Node* n = e.node_.get();
  switch (n->kind) {
    case Kind::kConstant: return e;
    case Kind::kVariable: {
      auto it = replacements.find(n->var);
      return it == replacements.end() ? e : it->second;
    }
    default: {
      ScalarExpr a = n->a ? substitute(ScalarExpr(n->a), replacements) : ScalarExpr();
      ScalarExpr b = n->b ? substitute(ScalarExpr(n->b), replacements) : ScalarExpr();
      return ScalarExpr::make(n->kind, std::move(a), std::move(b), n->num, n->den);
    }
  }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Grammar levels: 0 = expr, 1 = term, 2 = factor, 3 = base. A node prints
// parenthesized whenever its own level is below what the context requires.
int node_level(const ScalarExpr& e) {
  switch (e.kind()) {
    case Kind::kAdd:
    case Kind::kSub: return 0;
    case Kind::kMul:
    case Kind::kDiv: return 1;
    case Kind::kPow: return 2;
    case Kind::kConstant:
      return e.value() < 0.0 ? 1 : 3;  // leading '-' ties like a term
    default: return 3;
  }
}

std::string format_constant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const ScalarExpr& e, int required);

std::string print_raw(const ScalarExpr& e) {
  switch (e.kind()) {
    case Kind::kConstant: return format_constant(e.value());
    case Kind::kVariable: return e.var_name();
    case Kind::kAdd: return print(e.child(0), 0) + " + " + print(e.child(1), 1);
    case Kind::kSub: return print(e.child(0), 0) + " - " + print(e.child(1), 1);
    case Kind::kMul: return print(e.child(0), 1) + "*" + print(e.child(1), 2);
    case Kind::kDiv: return print(e.child(0), 1) + "/" + print(e.child(1), 2);
    case Kind::kNeg: return "-" + print(e.child(0), 3);
    case Kind::kPow: {
      std::string exp_str = e.pow_den() == 1 && e.pow_num() >= 0
                                ? std::to_string(e.pow_num())
                                : "(" + std::to_string(e.pow_num()) + "/" +
                                      std::to_string(e.pow_den()) + ")";
      return print(e.child(0), 3) + "^" + exp_str;
    }
    default:
      return std::string(fn_name(e.kind())) + "(" + print(e.child(0), 0) + ")";
  }
}

std::string print(const ScalarExpr& e, int required) {
  if (node_level(e) < required) return "(" + print_raw(e) + ")";
  return print_raw(e);
}

}  // namespace

std::string to_string(const ScalarExpr& e) { return print(e, 0); }

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ScalarExpr run() {
    ScalarExpr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ScalarExpr parse_sum() {
    ScalarExpr e = parse_term();
    for (;;) {
      if (consume('+')) e = e + parse_term();
      else if (consume('-')) e = e - parse_term();
      else return e;
    }
  }

  ScalarExpr parse_term() {
    ScalarExpr e = parse_factor();
    for (;;) {
      if (consume('*')) e = e * parse_factor();
      else if (consume('/')) e = e / parse_factor();
      else return e;
    }
  }

  ScalarExpr parse_factor() {
    ScalarExpr base = parse_base();
    if (consume('^')) {
      auto [num, den] = parse_rational();
      return pow(base, num, den);
    }
    return base;
  }

  ScalarExpr parse_base() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -parse_base();
    }
    if (c == '(') {
      ++pos_;
      ScalarExpr e = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError("expected a number, identifier or '('", pos_);
  }

  ScalarExpr parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' was the start of an identifier, not an exponent
      }
    }
    double value = 0.0;
    auto result = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (result.ec != std::errc() || result.ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    return ScalarExpr(value);
  }

  ScalarExpr parse_ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (peek() == '(') {
      ++pos_;
      ScalarExpr arg = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      if (name == "exp") return exp(arg);
      if (name == "log") return log(arg);
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "sinh") return sinh(arg);
      if (name == "cosh") return cosh(arg);
      if (name == "sqrt") return sqrt(arg);
      throw ParseError("unknown function '" + name + "'", start);
    }
    return ScalarExpr::var(std::move(name));
  }

  std::pair<long long, long long> parse_rational() {
    skip_ws();
    const bool parenthesized = consume('(');
    skip_ws();
    long long sign = 1;
    if (consume('-')) sign = -1;
    long long num = parse_integer();
    long long den = 1;
    if (consume('/')) den = parse_integer();
    if (parenthesized && !consume(')')) throw ParseError("expected ')'", pos_);
    return {sign * num, den};
  }

  long long parse_integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) throw ParseError("expected an integer exponent", pos_);
    long long value = 0;
    auto result = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (result.ec != std::errc()) throw ParseError("exponent out of range", start);
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr parse(std::string_view text) { return ExprParser(text).run(); }

}  // namespace dwarp
