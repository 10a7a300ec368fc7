#include "subfinsler/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "subfinsler/errors.hpp"

namespace subfinsler {

enum class Op { Num, X, T, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Abs, Tanh, Sign, Log };

struct Expression::Node {
  Op op;
  double value = 0.0;
  std::size_t offset = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, std::size_t off, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->offset = off;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr num(double v, std::size_t off = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Num;
  n->value = v;
  n->offset = off;
  return n;
}

bool is_num(const NodePtr& n, double v) { return n->op == Op::Num && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::Num; }

struct Function {
  const char* name;
  Op op;
};
constexpr Function kFunctions[] = {{"sin", Op::Sin},   {"cos", Op::Cos}, {"exp", Op::Exp},
                                   {"sqrt", Op::Sqrt}, {"abs", Op::Abs}, {"tanh", Op::Tanh}};

double apply(Op op, double v, std::size_t off) {
  switch (op) {
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Exp: return std::exp(v);
    case Op::Sqrt:
      if (v < 0.0) throw ExpressionError(ErrorKind::EvaluationError, off, "sqrt of negative value " + std::to_string(v));
      return std::sqrt(v);
    case Op::Abs: return std::abs(v);
    case Op::Tanh: return std::tanh(v);
    case Op::Sign: return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    case Op::Log:
      if (!(v > 0.0)) throw ExpressionError(ErrorKind::EvaluationError, off, "log of non-positive value " + std::to_string(v));
      return std::log(v);
    default: break;
  }
  return 0.0;
}

// Constant-folding constructors used by both the parser and differentiation.
NodePtr add(NodePtr a, NodePtr b, std::size_t off) {
  if (is_const(a) && is_const(b)) return num(a->value + b->value, off);
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return make(Op::Add, off, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a, std::size_t off) {
  if (is_const(a)) return num(-a->value, off);
  if (a->op == Op::Neg) return a->a;
  return make(Op::Neg, off, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b, std::size_t off) {
  if (is_const(a) && is_const(b)) return num(a->value - b->value, off);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return neg(std::move(b), off);
  return make(Op::Sub, off, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b, std::size_t off) {
  if (is_const(a) && is_const(b)) return num(a->value * b->value, off);
  if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0, off);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a, -1.0)) return neg(std::move(b), off);
  if (is_num(b, -1.0)) return neg(std::move(a), off);
  return make(Op::Mul, off, std::move(a), std::move(b));
}

// Division by a literal zero is kept so that evaluation reports it.
NodePtr div(NodePtr a, NodePtr b, std::size_t off) {
  if (is_const(a) && is_const(b) && b->value != 0.0) return num(a->value / b->value, off);
  if (is_num(a, 0.0) && !is_num(b, 0.0)) return num(0.0, off);
  if (is_num(b, 1.0)) return a;
  return make(Op::Div, off, std::move(a), std::move(b));
}

NodePtr pow_node(NodePtr a, NodePtr b, std::size_t off) {
  if (is_num(b, 1.0)) return a;
  if (is_num(b, 0.0)) return num(1.0, off);
  return make(Op::Pow, off, std::move(a), std::move(b));
}

NodePtr func(Op op, NodePtr a, std::size_t off) {
  // Fold only where the value cannot fail.
  if (is_const(a) && op != Op::Sqrt && op != Op::Log) return num(apply(op, a->value, off), off);
  return make(op, off, std::move(a));
}

class Parser {
 public:
  explicit Parser(std::string_view src) : s_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("expected operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError(ErrorKind::SyntaxError, pos_, what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = add(lhs, term(), at);
      } else if (accept('-')) {
        lhs = sub(lhs, term(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = mul(lhs, factor(), at);
      } else if (accept('/')) {
        lhs = div(lhs, factor(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() { return unary(); }

  NodePtr unary() {
    skip();
    const std::size_t at = pos_;
    if (accept('-')) return neg(unary(), at);
    if (accept('+')) return unary();
    return power();
  }

  // The exponent may carry its own sign: 2^-1.
  NodePtr power() {
    NodePtr b = base();
    skip();
    const std::size_t at = pos_;
    if (accept('^')) return pow_node(b, unary(), at);
    return b;
  }

  NodePtr base() {
    skip();
    const std::size_t at = pos_;
    if (pos_ >= s_.size()) fail("expected number, x, t, function or '('");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return num(v, at);
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string_view name = s_.substr(pos_, end - pos_);
      if (name == "x" || name == "t") {
        pos_ = end;
        return make(name == "x" ? Op::X : Op::T, at);
      }
      for (const Function& f : kFunctions) {
        if (name == f.name) {
          pos_ = end;
          if (!accept('(')) fail("expected '(' after " + std::string(name));
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          return func(f.op, arg, at);
        }
      }
      fail("unknown identifier '" + std::string(name) + "'; expected x, t or one of sin cos exp sqrt abs tanh");
    }
    fail("expected number, x, t, function or '('");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const NodePtr& n, double x, double t) {
  switch (n->op) {
    case Op::Num: return n->value;
    case Op::X: return x;
    case Op::T: return t;
    case Op::Add: return eval(n->a, x, t) + eval(n->b, x, t);
    case Op::Sub: return eval(n->a, x, t) - eval(n->b, x, t);
    case Op::Mul: return eval(n->a, x, t) * eval(n->b, x, t);
    case Op::Div: {
      const double d = eval(n->b, x, t);
      if (d == 0.0) throw ExpressionError(ErrorKind::EvaluationError, n->offset, "division by zero");
      return eval(n->a, x, t) / d;
    }
    case Op::Pow: {
      const double base = eval(n->a, x, t), e = eval(n->b, x, t);
      const double v = std::pow(base, e);
      if (!std::isfinite(v)) {
        throw ExpressionError(ErrorKind::EvaluationError, n->offset,
                              "power " + std::to_string(base) + "^" + std::to_string(e) + " is undefined");
      }
      return v;
    }
    case Op::Neg: return -eval(n->a, x, t);
    default: break;
  }
  const double v = apply(n->op, eval(n->a, x, t), n->offset);
  if (!std::isfinite(v)) throw ExpressionError(ErrorKind::EvaluationError, n->offset, "non-finite value");
  return v;
}

bool depends(const NodePtr& n, Op var) {
  if (!n) return false;
  if (n->op == var) return true;
  return depends(n->a, var) || depends(n->b, var);
}

bool contains(const NodePtr& n, Op op) {
  if (!n) return false;
  return n->op == op || contains(n->a, op) || contains(n->b, op);
}

NodePtr diff(const NodePtr& n, Op var) {
  const std::size_t o = n->offset;
  switch (n->op) {
    case Op::Num: return num(0.0, o);
    case Op::X:
    case Op::T: return num(n->op == var ? 1.0 : 0.0, o);
    case Op::Add: return add(diff(n->a, var), diff(n->b, var), o);
    case Op::Sub: return sub(diff(n->a, var), diff(n->b, var), o);
    case Op::Neg: return neg(diff(n->a, var), o);
    case Op::Mul: return add(mul(diff(n->a, var), n->b, o), mul(n->a, diff(n->b, var), o), o);
    case Op::Div: {
      // (a'b - ab') / b^2
      const NodePtr top = sub(mul(diff(n->a, var), n->b, o), mul(n->a, diff(n->b, var), o), o);
      return div(top, mul(n->b, n->b, o), o);
    }
    case Op::Pow: {
      if (!depends(n->b, Op::X) && !depends(n->b, Op::T)) {
        // b a^(b-1) a'
        return mul(mul(n->b, pow_node(n->a, sub(n->b, num(1.0, o), o), o), o), diff(n->a, var), o);
      }
      // a^b (b' log a + b a' / a)
      const NodePtr inner = add(mul(diff(n->b, var), func(Op::Log, n->a, o), o),
                                div(mul(n->b, diff(n->a, var), o), n->a, o), o);
      return mul(n, inner, o);
    }
    case Op::Sin: return mul(func(Op::Cos, n->a, o), diff(n->a, var), o);
    case Op::Cos: return mul(neg(func(Op::Sin, n->a, o), o), diff(n->a, var), o);
    case Op::Exp: return mul(n, diff(n->a, var), o);
    case Op::Sqrt: return div(diff(n->a, var), mul(num(2.0, o), n, o), o);
    case Op::Abs: return mul(func(Op::Sign, n->a, o), diff(n->a, var), o);
    case Op::Tanh: {
      const NodePtr th = func(Op::Tanh, n->a, o);
      return mul(sub(num(1.0, o), mul(th, th, o), o), diff(n->a, var), o);
    }
    case Op::Sign: return num(0.0, o);
    case Op::Log: return div(diff(n->a, var), n->a, o);
  }
  return num(0.0, o);
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Tanh: return "tanh";
    case Op::Sign: return "sign";
    case Op::Log: return "log";
    default: return "?";
  }
}

void render(const NodePtr& n, std::ostringstream& os) {
  switch (n->op) {
    case Op::Num: {
      std::ostringstream v;
      v.precision(17);
      v << n->value;
      if (n->value < 0) os << "(" << v.str() << ")"; else os << v.str();
      return;
    }
    case Op::X: os << "x"; return;
    case Op::T: os << "t"; return;
    case Op::Neg: os << "(-"; render(n->a, os); os << ")"; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      const char sym = n->op == Op::Add ? '+' : n->op == Op::Sub ? '-' : n->op == Op::Mul ? '*' : n->op == Op::Div ? '/' : '^';
      os << "(";
      render(n->a, os);
      os << " " << sym << " ";
      render(n->b, os);
      os << ")";
      return;
    }
    default:
      os << func_name(n->op) << "(";
      render(n->a, os);
      os << ")";
  }
}

}  // namespace

Expression Expression::parse(std::string_view source) {
  return Expression(Parser(source).parse(), std::string(source));
}

Expression Expression::constant(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return Expression(num(value), os.str());
}

double Expression::eval(double x, double t) const { return subfinsler::eval(root_, x, t); }

Expression Expression::dx() const {
  Expression e(diff(root_, Op::X), "");
  e.source_ = e.to_string();
  return e;
}

Expression Expression::dt() const {
  Expression e(diff(root_, Op::T), "");
  e.source_ = e.to_string();
  return e;
}

std::string Expression::to_string() const {
  std::ostringstream os;
  render(root_, os);
  return os.str();
}

bool Expression::uses_abs() const { return contains(root_, Op::Abs); }
bool Expression::depends_on_x() const { return depends(root_, Op::X); }
bool Expression::depends_on_t() const { return depends(root_, Op::T); }

GraphField expression_field(const Domain& domain, const Expression& u) {
  const Expression ux = u.dx(), ut = u.dt();
  return GraphField::analytic(domain, [u, ux, ut](double x, double t) {
    return FieldSample{u.eval(x, t), ux.eval(x, t), ut.eval(x, t)};
  });
}

}  // namespace subfinsler
