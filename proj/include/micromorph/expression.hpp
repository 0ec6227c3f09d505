#pragma once

// A minimal closed-form expression language over the coordinates x1, x2, x3.
//
// Grammar (infix, whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' ['-' | '+'] integer | '^' '(' ['-' | '+'] integer ')')?
//   primary := number | 'x1' | 'x2' | 'x3' | 'pi' | fn '(' expr ')' | '(' expr ')'
//   fn      := 'sin' | 'cos' | 'exp'
//
// Expressions are immutable DAGs. The arithmetic operators fold constants and
// drop additive zeros and multiplicative ones, so derivatives of polynomials
// terminate in literal zeros.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "micromorph/tensor.hpp"

namespace micromorph {

namespace detail {

enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow, kSin, kCos, kExp };

struct Node {
  Op op;
  double value = 0.0;  // kConst
  int index = 0;       // kVar: axis; kPow: integer exponent
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

}  // namespace detail

class Expression {
 public:
  /// The constant zero.
  Expression();
  /// Implicit so that numeric literals mix with expressions in arithmetic.
  Expression(double constant);  // NOLINT(google-explicit-constructor)

  static Expression variable(int axis);
  static Expression parse(std::string_view text);

  double evaluate(const Point& x) const;

  /// Exact symbolic derivative with respect to x_{axis+1}.
  Expression derivative(int axis) const;

  bool is_constant() const noexcept;
  std::optional<double> constant_value() const noexcept;
  bool is_zero() const noexcept;

  /// Infix text that `parse` maps back to an equal expression; constants are
  /// printed with 17 significant digits.
  std::string to_string() const;

  const detail::Node* node() const noexcept { return node_.get(); }
  const detail::NodePtr& shared_node() const noexcept { return node_; }

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& a, int exponent);
  friend Expression sin(const Expression& a);
  friend Expression cos(const Expression& a);
  friend Expression exp(const Expression& a);

  Expression& operator+=(const Expression& o) { return *this = *this + o; }
  Expression& operator-=(const Expression& o) { return *this = *this - o; }
  Expression& operator*=(const Expression& o) { return *this = *this * o; }

  explicit Expression(detail::NodePtr node) : node_(std::move(node)) {}

 private:
  detail::NodePtr node_;
};

/// Memoizing differentiator. Shared subexpressions are differentiated once and
/// the results share structure, which keeps higher derivatives of large
/// composite expressions linear in size.
class Differentiator {
 public:
  Expression operator()(const Expression& e, int axis);

 private:
  detail::NodePtr diff(const detail::NodePtr& n, int axis);

  std::array<std::map<const detail::Node*, std::pair<detail::NodePtr, detail::NodePtr>>, kDim> memo_;
};

/// Flattened evaluation tape for a batch of expressions. Nodes shared between
/// the roots (by identity) are evaluated once per point.
class Program {
 public:
  Program() = default;
  explicit Program(std::span<const Expression> roots);

  std::size_t output_count() const noexcept { return outputs_.size(); }
  std::size_t instruction_count() const noexcept { return code_.size(); }

  void evaluate(const Point& x, std::span<double> out) const;
  std::vector<double> evaluate(const Point& x) const;

 private:
  struct Instruction {
    detail::Op op;
    double value;
    int index;
    int lhs;
    int rhs;
  };
  std::vector<Instruction> code_;
  std::vector<int> outputs_;
};

}  // namespace micromorph
