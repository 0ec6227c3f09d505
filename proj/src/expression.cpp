#include "micromorph/expression.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <unordered_map>

namespace micromorph {

using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0, int index = 0) {
  return std::make_shared<const Node>(Node{op, value, index, std::move(lhs), std::move(rhs)});
}

NodePtr constant(double v) { return make_node(Op::kConst, nullptr, nullptr, v); }

const NodePtr& zero() {
  static const NodePtr z = constant(0.0);
  return z;
}
const NodePtr& one() {
  static const NodePtr o = constant(1.0);
  return o;
}

bool is_const(const NodePtr& n) { return n->op == Op::kConst; }
bool is_value(const NodePtr& n, double v) { return is_const(n) && n->value == v; }

NodePtr neg(const NodePtr& a) {
  if (is_const(a)) return constant(-a->value);
  if (a->op == Op::kNeg) return a->lhs;
  return make_node(Op::kNeg, a);
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  if (is_value(a, 0.0)) return b;
  if (is_value(b, 0.0)) return a;
  return make_node(Op::kAdd, a, b);
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  if (is_value(b, 0.0)) return a;
  if (is_value(a, 0.0)) return neg(b);
  if (a == b) return zero();
  return make_node(Op::kSub, a, b);
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return constant(a->value * b->value);
  if (is_value(a, 0.0) || is_value(b, 0.0)) return zero();
  if (is_value(a, 1.0)) return b;
  if (is_value(b, 1.0)) return a;
  if (is_value(a, -1.0)) return neg(b);
  if (is_value(b, -1.0)) return neg(a);
  return make_node(Op::kMul, a, b);
}

NodePtr div(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b) && b->value != 0.0) return constant(a->value / b->value);
  if (is_value(a, 0.0)) return zero();
  if (is_value(b, 1.0)) return a;
  return make_node(Op::kDiv, a, b);
}

NodePtr power(const NodePtr& a, int n) {
  if (n == 0) return one();
  if (n == 1) return a;
  if (is_const(a)) return constant(std::pow(a->value, n));
  return make_node(Op::kPow, a, nullptr, 0.0, n);
}

NodePtr unary(Op op, const NodePtr& a) {
  if (is_const(a)) {
    switch (op) {
      case Op::kSin: return constant(std::sin(a->value));
      case Op::kCos: return constant(std::cos(a->value));
      case Op::kExp: return constant(std::exp(a->value));
      default: break;
    }
  }
  return make_node(op, a);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = add(lhs, term());
      } else if (accept('-')) {
        lhs = sub(lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary_expr();
    for (;;) {
      if (accept('*')) {
        lhs = mul(lhs, unary_expr());
      } else if (accept('/')) {
        lhs = div(lhs, unary_expr());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary_expr() {
    if (accept('-')) return neg(unary_expr());
    if (accept('+')) return unary_expr();
    return power_expr();
  }

  NodePtr power_expr() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    const bool paren = accept('(');
    skip_space();
    int sign = 1;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      sign = text_[pos_] == '-' ? -1 : 1;
      ++pos_;
    }
    skip_space();
    const std::size_t start = pos_;
    int n = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), n);
    if (ec != std::errc{}) throw ParseError("exponent must be an integer", start);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      throw ParseError("exponent must be an integer", start);
    }
    if (paren) expect(')');
    return power(base, sign * n);
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc{}) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x1") return make_node(Op::kVar, nullptr, nullptr, 0.0, 0);
    if (name == "x2") return make_node(Op::kVar, nullptr, nullptr, 0.0, 1);
    if (name == "x3") return make_node(Op::kVar, nullptr, nullptr, 0.0, 2);
    if (name == "pi") return constant(std::numbers::pi);
    Op op;
    if (name == "sin") {
      op = Op::kSin;
    } else if (name == "cos") {
      op = Op::kCos;
    } else if (name == "exp") {
      op = Op::kExp;
    } else {
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    expect('(');
    NodePtr arg = expr();
    expect(')');
    return unary(op, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print(const Node* n, std::string& out) {
  switch (n->op) {
    case Op::kConst:
      if (n->value < 0.0 || std::signbit(n->value)) {
        out += "(" + format_number(n->value) + ")";
      } else {
        out += format_number(n->value);
      }
      return;
    case Op::kVar: out += "x" + std::to_string(n->index + 1); return;
    case Op::kNeg:
      out += "(-";
      print(n->lhs.get(), out);
      out += ")";
      return;
    case Op::kPow:
      out += "(";
      print(n->lhs.get(), out);
      out += ")^";
      out += n->index < 0 ? "(" + std::to_string(n->index) + ")" : std::to_string(n->index);
      return;
    case Op::kSin:
    case Op::kCos:
    case Op::kExp:
      out += n->op == Op::kSin ? "sin(" : n->op == Op::kCos ? "cos(" : "exp(";
      print(n->lhs.get(), out);
      out += ")";
      return;
    default: break;
  }
  const char* sym = n->op == Op::kAdd ? " + " : n->op == Op::kSub ? " - " : n->op == Op::kMul ? "*" : "/";
  out += "(";
  print(n->lhs.get(), out);
  out += sym;
  print(n->rhs.get(), out);
  out += ")";
}

}  // namespace

Expression::Expression() : node_(zero()) {}

Expression::Expression(double c) : node_(c == 0.0 ? zero() : c == 1.0 ? one() : constant(c)) {
  if (!std::isfinite(c)) throw ShapeError("expression constants must be finite");
}

Expression Expression::variable(int axis) {
  if (axis < 0 || axis >= kDim) throw ShapeError("variable axis must be 0, 1 or 2");
  return Expression(make_node(Op::kVar, nullptr, nullptr, 0.0, axis));
}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

double Expression::evaluate(const Point& x) const {
  if (node_->op == Op::kConst) return node_->value;
  const Expression roots[] = {*this};
  return Program(roots).evaluate(x)[0];
}

Expression Expression::derivative(int axis) const { return Differentiator{}(*this, axis); }

bool Expression::is_constant() const noexcept { return node_->op == Op::kConst; }

std::optional<double> Expression::constant_value() const noexcept {
  if (node_->op == Op::kConst) return node_->value;
  return std::nullopt;
}

bool Expression::is_zero() const noexcept { return node_->op == Op::kConst && node_->value == 0.0; }

std::string Expression::to_string() const {
  std::string out;
  print(node_.get(), out);
  return out;
}

Expression operator+(const Expression& a, const Expression& b) { return Expression(add(a.node_, b.node_)); }
Expression operator-(const Expression& a, const Expression& b) { return Expression(sub(a.node_, b.node_)); }
Expression operator*(const Expression& a, const Expression& b) { return Expression(mul(a.node_, b.node_)); }
Expression operator/(const Expression& a, const Expression& b) { return Expression(div(a.node_, b.node_)); }
Expression operator-(const Expression& a) { return Expression(neg(a.node_)); }
Expression pow(const Expression& a, int exponent) { return Expression(power(a.node_, exponent)); }
Expression sin(const Expression& a) { return Expression(unary(Op::kSin, a.node_)); }
Expression cos(const Expression& a) { return Expression(unary(Op::kCos, a.node_)); }
Expression exp(const Expression& a) { return Expression(unary(Op::kExp, a.node_)); }

Expression Differentiator::operator()(const Expression& e, int axis) {
  if (axis < 0 || axis >= kDim) throw ShapeError("derivative axis must be 0, 1 or 2");
  return Expression(diff(e.shared_node(), axis));
}

NodePtr Differentiator::diff(const NodePtr& n, int axis) {
  auto& memo = memo_[axis];
  if (auto it = memo.find(n.get()); it != memo.end()) return it->second.second;

  NodePtr d;
  switch (n->op) {
    case Op::kConst: d = zero(); break;
    case Op::kVar: d = n->index == axis ? one() : zero(); break;
    case Op::kAdd: d = add(diff(n->lhs, axis), diff(n->rhs, axis)); break;
    case Op::kSub: d = sub(diff(n->lhs, axis), diff(n->rhs, axis)); break;
    case Op::kMul: d = add(mul(diff(n->lhs, axis), n->rhs), mul(n->lhs, diff(n->rhs, axis))); break;
    case Op::kDiv: {
      const NodePtr da = diff(n->lhs, axis);
      const NodePtr db = diff(n->rhs, axis);
      d = sub(div(da, n->rhs), div(mul(n->lhs, db), mul(n->rhs, n->rhs)));
      break;
    }
    case Op::kNeg: d = neg(diff(n->lhs, axis)); break;
    case Op::kPow:
      d = mul(mul(constant(n->index), power(n->lhs, n->index - 1)), diff(n->lhs, axis));
      break;
    case Op::kSin: d = mul(unary(Op::kCos, n->lhs), diff(n->lhs, axis)); break;
    case Op::kCos: d = neg(mul(unary(Op::kSin, n->lhs), diff(n->lhs, axis))); break;
    case Op::kExp: d = mul(n, diff(n->lhs, axis)); break;
  }
  memo.emplace(n.get(), std::make_pair(n, d));
  return d;
}

Program::Program(std::span<const Expression> roots) {
  std::unordered_map<const Node*, int> slot;
  struct Frame {
    const Node* node;
    bool expanded;
  };
  std::vector<Frame> stack;
  for (const auto& root : roots) {
    stack.push_back({root.node(), false});
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (slot.contains(f.node)) continue;
      if (!f.expanded) {
        stack.push_back({f.node, true});
        if (f.node->rhs && !slot.contains(f.node->rhs.get())) stack.push_back({f.node->rhs.get(), false});
        if (f.node->lhs && !slot.contains(f.node->lhs.get())) stack.push_back({f.node->lhs.get(), false});
        continue;
      }
      const int lhs = f.node->lhs ? slot.at(f.node->lhs.get()) : -1;
      const int rhs = f.node->rhs ? slot.at(f.node->rhs.get()) : -1;
      slot.emplace(f.node, static_cast<int>(code_.size()));
      code_.push_back({f.node->op, f.node->value, f.node->index, lhs, rhs});
    }
    outputs_.push_back(slot.at(root.node()));
  }
}

void Program::evaluate(const Point& x, std::span<double> out) const {
  if (out.size() != outputs_.size()) throw ShapeError("program output span has the wrong size");
  std::vector<double> reg(code_.size());
  for (std::size_t k = 0; k < code_.size(); ++k) {
    const Instruction& in = code_[k];
    double v = 0.0;
    switch (in.op) {
      case Op::kConst: v = in.value; break;
      case Op::kVar: v = x[in.index]; break;
      case Op::kAdd: v = reg[in.lhs] + reg[in.rhs]; break;
      case Op::kSub: v = reg[in.lhs] - reg[in.rhs]; break;
      case Op::kMul: v = reg[in.lhs] * reg[in.rhs]; break;
      case Op::kDiv: v = reg[in.lhs] / reg[in.rhs]; break;
      case Op::kNeg: v = -reg[in.lhs]; break;
      case Op::kPow: v = std::pow(reg[in.lhs], in.index); break;
      case Op::kSin: v = std::sin(reg[in.lhs]); break;
      case Op::kCos: v = std::cos(reg[in.lhs]); break;
      case Op::kExp: v = std::exp(reg[in.lhs]); break;
    }
    reg[k] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = reg[outputs_[k]];
}

std::vector<double> Program::evaluate(const Point& x) const {
  std::vector<double> out(outputs_.size());
  evaluate(x, out);
  return out;
}

}  // namespace micromorph
