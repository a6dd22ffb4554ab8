#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dwarp {

/// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error while parsing an expression; carries the byte offset of the
/// offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

/// Evaluation left the real domain: log of a non-positive value, division by
/// zero, sqrt of a negative, fractional power of a negative base, or a
/// non-finite intermediate.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An expression was evaluated with a free variable missing from the
/// assignment.
class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Map from variable name to real value. Every free variable of the
/// expression being evaluated must be bound.
class VarAssignment {
 public:
  VarAssignment() = default;
  VarAssignment(std::initializer_list<std::pair<const std::string, double>> init)
      : values_(init) {}

  void bind(const std::string& name, double value) { values_[name] = value; }

  /// Throws UnboundVariableError if the name is not bound.
  double lookup(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw UnboundVariableError(name);
    return it->second;
  }

  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  std::size_t size() const { return values_.size(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  std::map<std::string, double> values_;
};

/// Immutable closed-form real expression tree in named variables.
///
/// Supported node kinds: constants, variables, the four arithmetic
/// operations, negation, powers with rational constant exponents, and the
/// function set exp, log, sin, cos, sinh, cosh, sqrt. Construction applies
/// constant folding and the 0/1 identities; no further rewriting is done.
/// Values are immutable and cheap to copy (shared subtrees), so concurrent
/// evaluation is unrestricted.
class ScalarExpr {
 public:
  enum class Kind {
    kConstant,
    kVariable,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kPow,  // rational constant exponent
    kExp,
    kLog,
    kSin,
    kCos,
    kSinh,
    kCosh,
    kSqrt,
  };

  /// Default-constructs the constant 0.
  ScalarExpr() : ScalarExpr(0.0) {}

  /// Implicit constant; lets numeric literals mix into expression formulas.
  ScalarExpr(double value);  // NOLINT(google-explicit-constructor)

  static ScalarExpr var(std::string name);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::kConstant; }
  bool is_constant(double v) const;
  /// Constant value; only valid for kConstant nodes.
  double value() const;
  /// Variable name; only valid for kVariable nodes.
  const std::string& var_name() const;
  /// Children: index 0 is the only child of unary nodes, 0/1 are lhs/rhs of
  /// binary nodes.
  ScalarExpr child(int index) const;
  /// Rational exponent of a kPow node, reduced, denominator positive.
  long long pow_num() const;
  long long pow_den() const;

  friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator-(const ScalarExpr& a);

  friend ScalarExpr pow(const ScalarExpr& base, long long num, long long den);
  friend ScalarExpr exp(const ScalarExpr& e);
  friend ScalarExpr log(const ScalarExpr& e);
  friend ScalarExpr sin(const ScalarExpr& e);
  friend ScalarExpr cos(const ScalarExpr& e);
  friend ScalarExpr sinh(const ScalarExpr& e);
  friend ScalarExpr cosh(const ScalarExpr& e);
  friend ScalarExpr sqrt(const ScalarExpr& e);

 private:
  struct Node;
  explicit ScalarExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static ScalarExpr make(Kind kind, ScalarExpr a, ScalarExpr b, long long num,
                         long long den);

  std::shared_ptr<const Node> node_;

  friend double eval(const ScalarExpr&, const VarAssignment&);
  friend ScalarExpr diff(const ScalarExpr&, const std::string&);
  friend std::string to_string(const ScalarExpr&);
  friend void collect_variables(const ScalarExpr&, std::set<std::string>&);
  friend ScalarExpr substitute(const ScalarExpr&,
                               const std::map<std::string, ScalarExpr>&);
};

ScalarExpr pow(const ScalarExpr& base, long long num, long long den = 1);

/// Parses the expression grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' rational)?
///   base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
/// where the function names are exp, log, sin, cos, sinh, cosh, sqrt and all
/// other identifiers become variables. Rational exponents accept the forms
/// 2, -2, 1/2, -1/2 and a parenthesized (p/q).
ScalarExpr parse(std::string_view text);

/// Prints in a form parse() accepts; eval(parse(to_string(e)), a) == eval(e, a).
std::string to_string(const ScalarExpr& e);

/// Evaluates at an assignment. Deterministic: identical expression and
/// assignment give a bit-identical double. Throws DomainError or
/// UnboundVariableError.
double eval(const ScalarExpr& e, const VarAssignment& a);

/// Exact symbolic derivative; closed over ScalarExpr. The derivative with
/// respect to an absent variable is 0.
ScalarExpr diff(const ScalarExpr& e, const std::string& var);

/// Central finite difference (e(a+h) - e(a-h)) / (2h) in the given variable;
/// the independent oracle for diff().
double fd_diff(const ScalarExpr& e, const std::string& var, const VarAssignment& a,
               double step = 1e-4);

/// Free variables of the expression.
std::set<std::string> free_variables(const ScalarExpr& e);

/// Simultaneous substitution of expressions for variables.
ScalarExpr substitute(const ScalarExpr& e,
                      const std::map<std::string, ScalarExpr>& replacements);

}  // namespace dwarp
