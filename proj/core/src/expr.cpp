#include "effdyn/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "effdyn/error.hpp"

namespace effdyn {

struct ExprPotential1D::Node {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Cos, Sin };
  Kind kind = Kind::Const;
  double value = 0.0;
  int exponent = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = ExprPotential1D::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(Node::Kind kind, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr make_unary(Node::Kind kind, NodePtr arg, int exponent = 0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(arg);
  n->exponent = exponent;
  return n;
}

NodePtr make_binary(Node::Kind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_ws();
    if (at_end()) throw SyntaxError("empty expression", pos_);
    NodePtr root = expr();
    skip_ws();
    if (!at_end()) {
      throw SyntaxError(std::string("unexpected character '") + text_[pos_] + "'",
                        pos_);
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  NodePtr expr() {
    NodePtr acc = term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      NodePtr rhs = term();
      acc = make_binary(c == '+' ? Node::Kind::Add : Node::Kind::Sub, acc, rhs);
    }
  }

  NodePtr term() {
    NodePtr acc = factor();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return acc;
      ++pos_;
      NodePtr rhs = factor();
      acc = make_binary(c == '*' ? Node::Kind::Mul : Node::Kind::Div, acc, rhs);
    }
  }

  NodePtr factor() {
    skip_ws();
    bool negate = false;
    if (peek() == '-') {
      negate = true;
      ++pos_;
    }
    NodePtr b = base();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      b = make_unary(Node::Kind::Pow, b, integer());
    }
    return negate ? make_unary(Node::Kind::Neg, b) : b;
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    std::size_t end = pos_;
    if (end < text_.size() && (text_[end] == '-' || text_[end] == '+')) ++end;
    const std::size_t digits = end;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    if (end == digits) throw SyntaxError("expected integer exponent", start);
    int value = 0;
    const char* first = text_.data() + start + (text_[start] == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(first, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) {
      throw SyntaxError("integer exponent out of range", start);
    }
    pos_ = end;
    return value;
  }

  NodePtr base() {
    skip_ws();
    if (at_end()) throw SyntaxError("unexpected end of input", pos_);
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        end = exp_end;
        digits();
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) {
      throw SyntaxError("malformed number", start);
    }
    pos_ = end;
    return make_leaf(Node::Kind::Const, value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return make_leaf(Node::Kind::Var);

    Node::Kind kind;
    if (name == "exp") {
      kind = Node::Kind::Exp;
    } else if (name == "cos") {
      kind = Node::Kind::Cos;
    } else if (name == "sin") {
      kind = Node::Kind::Sin;
    } else {
      throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
    }

    skip_ws();
    if (peek() != '(') throw SyntaxError("expected '(' after " + std::string(name), pos_);
    ++pos_;
    skip_ws();
    if (peek() == ')') {
      throw SyntaxError("arity mismatch: " + std::string(name) + " takes 1 argument, got 0",
                        pos_);
    }
    NodePtr arg = expr();
    skip_ws();
    if (peek() == ',') {
      throw SyntaxError("arity mismatch: " + std::string(name) + " takes 1 argument", pos_);
    }
    expect(')');
    return make_unary(kind, arg);
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      if (at_end()) throw SyntaxError(std::string("expected '") + c + "'", pos_);
      throw SyntaxError(std::string("expected '") + c + "' but found '" + peek() + "'", pos_);
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Trivial twin of Dual2 so the evaluation stack is not zero-filled per call.
struct D {
  double v, d1, d2;
};

D mul(const D& a, const D& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

D div(const D& a, const D& b) {
  // a * (1/b), with (1/b)' = -b'/b^2 and (1/b)'' = 2b'^2/b^3 - b''/b^2
  const double inv = 1.0 / b.v;
  const D r{inv, -b.d1 * inv * inv, (2.0 * b.d1 * b.d1 * inv - b.d2) * inv * inv};
  return mul(a, r);
}

// Exponentiation by squaring; std::pow dominates evaluation otherwise.
double powi(double x, int n) {
  if (n < 0) return 1.0 / powi(x, -n);
  double r = 1.0;
  for (; n > 0; n >>= 1, x *= x) {
    if (n & 1) r *= x;
  }
  return r;
}

D ipow(const D& a, int n) {
  if (n == 0) return {1.0, 0.0, 0.0};
  if (n == 1) return a;
  const double pn2 = powi(a.v, n - 2);
  const double pn1 = pn2 * a.v;
  const double pn = pn1 * a.v;
  return {pn, n * pn1 * a.d1, n * (n - 1) * pn2 * a.d1 * a.d1 + n * pn1 * a.d2};
}

// Postfix form of the tree: operands are pushed, operators pop.
struct Instr {
  Node::Kind kind;
  double value;
  int exponent;
};

int flatten(const Node& n, std::vector<Instr>& code) {
  int depth = 0;
  if (n.lhs) depth = flatten(*n.lhs, code);
  if (n.rhs) depth = std::max(depth, 1 + flatten(*n.rhs, code));
  code.push_back({n.kind, n.value, n.exponent});
  return std::max(depth, 1);
}

}  // namespace

struct ExprPotential1D::Program {
  std::vector<Instr> code;
  int depth = 0;

  D run(double x, D* stack) const;
};

D ExprPotential1D::Program::run(double x, D* stack) const {
  using K = Node::Kind;
  D* top = stack - 1;  // last pushed entry
  for (const Instr& in : code) {
    switch (in.kind) {
      case K::Const:
        *++top = {in.value, 0.0, 0.0};
        break;
      case K::Var:
        *++top = {x, 1.0, 0.0};
        break;
      case K::Add: {
        const D b = *top--;
        *top = {top->v + b.v, top->d1 + b.d1, top->d2 + b.d2};
        break;
      }
      case K::Sub: {
        const D b = *top--;
        *top = {top->v - b.v, top->d1 - b.d1, top->d2 - b.d2};
        break;
      }
      case K::Mul: {
        const D b = *top--;
        *top = mul(*top, b);
        break;
      }
      case K::Div: {
        const D b = *top--;
        *top = div(*top, b);
        break;
      }
      case K::Neg:
        *top = {-top->v, -top->d1, -top->d2};
        break;
      case K::Pow:
        *top = ipow(*top, in.exponent);
        break;
      case K::Exp: {
        const D a = *top;
        const double e = std::exp(a.v);
        *top = {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
        break;
      }
      case K::Cos: {
        const D a = *top;
        const double c = std::cos(a.v);
        const double s = std::sin(a.v);
        *top = {c, -s * a.d1, -c * a.d1 * a.d1 - s * a.d2};
        break;
      }
      case K::Sin: {
        const D a = *top;
        const double c = std::cos(a.v);
        const double s = std::sin(a.v);
        *top = {s, c * a.d1, -s * a.d1 * a.d1 + c * a.d2};
        break;
      }
    }
  }
  return *top;
}

ExprPotential1D ExprPotential1D::parse(std::string_view text) {
  Parser parser(text);
  const NodePtr root = parser.parse();
  auto program = std::make_shared<Program>();
  program->depth = flatten(*root, program->code);
  return ExprPotential1D(std::move(program), std::string(text));
}

Dual2 ExprPotential1D::eval(double x) const {
  constexpr int kInline = 32;
  D r;
  if (program_->depth <= kInline) {
    D stack[kInline];
    r = program_->run(x, stack);
  } else {
    std::vector<D> stack(static_cast<std::size_t>(program_->depth));
    r = program_->run(x, stack.data());
  }
  return {r.v, r.d1, r.d2};
}

}  // namespace effdyn
