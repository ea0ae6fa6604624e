#include "weylkit/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>

#include "weylkit/errors.hpp"
#include "weylkit/format.hpp"

namespace weylkit {

enum class Kind {
  kConst,
  kCoord,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPow,
  kSin,
  kCos,
  kExp,
  kLn,
  kSqrt,
  kTanh
};

struct ScalarExpr::Node {
  Kind kind;
  double value = 0.0;  // kConst
  int index = 0;       // kCoord: coordinate index; kPow: integer exponent
  int min_dim = 0;     // 1 + highest coordinate index in the subtree
  NodePtr a;
  NodePtr b;
};

namespace {

using Node = ScalarExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr const_node(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kConst;
  n->value = v;
  return n;
}

NodePtr coord_node(int index) {
  if (index < 0) throw Error("coordinate index must be non-negative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kCoord;
  n->index = index;
  n->min_dim = index + 1;
  return n;
}

bool is_const(const NodePtr& n) { return n->kind == Kind::kConst; }
bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::kConst && n->value == v;
}

// Integer power by repeated squaring; callers reject 0^negative first.
double powi(double base, int exponent) {
  long long e = exponent;
  const bool inv = e < 0;
  if (inv) e = -e;
  double acc = 1.0;
  double b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return inv ? 1.0 / acc : acc;
}

double eval_node(const Node& n, std::span<const double> point) {
  double r = 0.0;
  switch (n.kind) {
    case Kind::kConst:
      return n.value;
    case Kind::kCoord:
      if (n.index >= static_cast<int>(point.size()))
        throw ShapeError("coordinate index " + std::to_string(n.index) +
                         " out of range for point of length " +
                         std::to_string(point.size()));
      r = point[static_cast<std::size_t>(n.index)];
      break;
    case Kind::kAdd:
      r = eval_node(*n.a, point) + eval_node(*n.b, point);
      break;
    case Kind::kSub:
      r = eval_node(*n.a, point) - eval_node(*n.b, point);
      break;
    case Kind::kMul:
      r = eval_node(*n.a, point) * eval_node(*n.b, point);
      break;
    case Kind::kDiv: {
      const double num = eval_node(*n.a, point);
      const double den = eval_node(*n.b, point);
      if (den == 0.0) throw DomainError("division by zero");
      r = num / den;
      break;
    }
    case Kind::kNeg:
      r = -eval_node(*n.a, point);
      break;
    case Kind::kPow: {
      const double base = eval_node(*n.a, point);
      if (base == 0.0 && n.index < 0)
        throw DomainError("division by zero (zero base, negative exponent)");
      r = powi(base, n.index);
      break;
    }
    case Kind::kSin:
      r = std::sin(eval_node(*n.a, point));
      break;
    case Kind::kCos:
      r = std::cos(eval_node(*n.a, point));
      break;
    case Kind::kExp:
      r = std::exp(eval_node(*n.a, point));
      break;
    case Kind::kLn: {
      const double u = eval_node(*n.a, point);
      if (u <= 0.0) throw DomainError("ln of non-positive value");
      r = std::log(u);
      break;
    }
    case Kind::kSqrt: {
      const double u = eval_node(*n.a, point);
      if (u < 0.0) throw DomainError("sqrt of negative value");
      r = std::sqrt(u);
      break;
    }
    case Kind::kTanh:
      r = std::tanh(eval_node(*n.a, point));
      break;
  }
  if (!std::isfinite(r)) throw DomainError("non-finite result in evaluation");
  return r;
}

NodePtr raw_node(Kind kind, NodePtr a, NodePtr b, int index = 0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->index = index;
  n->min_dim = 0;
  if (a) n->min_dim = a->min_dim;
  if (b && b->min_dim > n->min_dim) n->min_dim = b->min_dim;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// Constant folding: collapse coordinate-free subtrees whose value is clean
// (finite, no domain fault). Anything else keeps its node so the fault
// surfaces at eval time.
NodePtr fold(NodePtr n) {
  if (n->min_dim == 0 && n->kind != Kind::kConst) {
    try {
      return const_node(eval_node(*n, {}));
    } catch (const Error&) {
    }
  }
  return n;
}

NodePtr make_neg(NodePtr a) {
  if (is_const(a)) return const_node(-a->value);
  if (a->kind == Kind::kNeg) return a->a;
  return raw_node(Kind::kNeg, std::move(a), nullptr);
}

NodePtr make_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return fold(raw_node(Kind::kAdd, std::move(a), std::move(b)));
}

NodePtr make_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  return fold(raw_node(Kind::kSub, std::move(a), std::move(b)));
}

NodePtr make_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return const_node(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return fold(raw_node(Kind::kMul, std::move(a), std::move(b)));
}

NodePtr make_div(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  return fold(raw_node(Kind::kDiv, std::move(a), std::move(b)));
}

NodePtr make_pow(NodePtr a, int exponent) {
  if (exponent == 0) return const_node(1.0);
  if (exponent == 1) return a;
  return fold(raw_node(Kind::kPow, std::move(a), nullptr, exponent));
}

NodePtr make_fn(Kind kind, NodePtr a) {
  return fold(raw_node(kind, std::move(a), nullptr));
}

NodePtr diff_node(const NodePtr& n, int k) {
  switch (n->kind) {
    case Kind::kConst:
      return const_node(0.0);
    case Kind::kCoord:
      return const_node(n->index == k ? 1.0 : 0.0);
    case Kind::kAdd:
      return make_add(diff_node(n->a, k), diff_node(n->b, k));
    case Kind::kSub:
      return make_sub(diff_node(n->a, k), diff_node(n->b, k));
    case Kind::kMul:
      return make_add(make_mul(diff_node(n->a, k), n->b),
                      make_mul(n->a, diff_node(n->b, k)));
    case Kind::kDiv:
      return make_div(make_sub(make_mul(diff_node(n->a, k), n->b),
                               make_mul(n->a, diff_node(n->b, k))),
                      make_pow(n->b, 2));
    case Kind::kNeg:
      return make_neg(diff_node(n->a, k));
    case Kind::kPow:
      return make_mul(make_mul(const_node(static_cast<double>(n->index)),
                               make_pow(n->a, n->index - 1)),
                      diff_node(n->a, k));
    case Kind::kSin:
      return make_mul(make_fn(Kind::kCos, n->a), diff_node(n->a, k));
    case Kind::kCos:
      return make_mul(make_neg(make_fn(Kind::kSin, n->a)), diff_node(n->a, k));
    case Kind::kExp:
      return make_mul(make_fn(Kind::kExp, n->a), diff_node(n->a, k));
    case Kind::kLn:
      return make_div(diff_node(n->a, k), n->a);
    case Kind::kSqrt:
      return make_div(diff_node(n->a, k),
                      make_mul(const_node(2.0), make_fn(Kind::kSqrt, n->a)));
    case Kind::kTanh:
      return make_mul(
          make_sub(const_node(1.0), make_pow(make_fn(Kind::kTanh, n->a), 2)),
          diff_node(n->a, k));
  }
  throw Error("unreachable expression kind");
}

// --- printing ---

const char* fn_name(Kind k) {
  switch (k) {
    case Kind::kSin: return "sin";
    case Kind::kCos: return "cos";
    case Kind::kExp: return "exp";
    case Kind::kLn: return "ln";
    case Kind::kSqrt: return "sqrt";
    case Kind::kTanh: return "tanh";
    default: return "";
  }
}

// Parenthesization levels; a negative constant prints like a unary minus.
int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::kAdd:
    case Kind::kSub:
      return 1;
    case Kind::kMul:
    case Kind::kDiv:
      return 2;
    case Kind::kNeg:
      return 3;
    case Kind::kPow:
      return 4;
    case Kind::kConst:
      return std::signbit(n.value) ? 3 : 5;
    default:
      return 5;
  }
}

void print_node(const Node& n, const Chart* chart, std::string& out);

void print_child(const Node& child, const Chart* chart, std::string& out,
                 int min_prec) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, chart, out);
    out += ')';
  } else {
    print_node(child, chart, out);
  }
}

void print_node(const Node& n, const Chart* chart, std::string& out) {
  switch (n.kind) {
    case Kind::kConst:
      out += format_double(n.value);
      return;
    case Kind::kCoord:
      if (chart && n.index < chart->dim) {
        out += chart->coords[static_cast<std::size_t>(n.index)];
      } else {
        out += "x" + std::to_string(n.index);
      }
      return;
    case Kind::kAdd:
      print_child(*n.a, chart, out, 1);
      out += " + ";
      print_child(*n.b, chart, out, 2);
      return;
    case Kind::kSub:
      print_child(*n.a, chart, out, 1);
      out += " - ";
      print_child(*n.b, chart, out, 2);
      return;
    case Kind::kMul:
      print_child(*n.a, chart, out, 2);
      out += "*";
      print_child(*n.b, chart, out, 3);
      return;
    case Kind::kDiv:
      print_child(*n.a, chart, out, 2);
      out += "/";
      print_child(*n.b, chart, out, 3);
      return;
    case Kind::kNeg:
      out += "-";
      print_child(*n.a, chart, out, 3);
      return;
    case Kind::kPow:
      print_child(*n.a, chart, out, 5);
      out += "^" + std::to_string(n.index);
      return;
    default:
      out += fn_name(n.kind);
      out += '(';
      print_node(*n.a, chart, out);
      out += ')';
      return;
  }
}

// --- parser ---

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::size_t pos = 0;
  double number = 0.0;
  bool is_integer = false;
  long long int_value = 0;
  std::string text;
};

[[noreturn]] void fail(const std::string& msg, std::size_t pos) {
  throw ParseError("parse error at byte " + std::to_string(pos) + ": " + msg,
                   pos);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ >= src_.size()) {
      t.type = Tok::kEnd;
      return t;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': ++pos_; t.type = Tok::kPlus; return t;
      case '-': ++pos_; t.type = Tok::kMinus; return t;
      case '*': ++pos_; t.type = Tok::kStar; return t;
      case '/': ++pos_; t.type = Tok::kSlash; return t;
      case '^': ++pos_; t.type = Tok::kCaret; return t;
      case '(': ++pos_; t.type = Tok::kLParen; return t;
      case ')': ++pos_; t.type = Tok::kRParen; return t;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident();
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

 private:
  Token lex_number() {
    Token t;
    t.type = Tok::kNumber;
    t.pos = pos_;
    const std::size_t start = pos_;
    bool has_digits = false;
    bool integral = true;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
      has_digits = true;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      integral = false;
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        has_digits = true;
      }
    }
    if (!has_digits) fail("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      integral = false;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        fail("malformed number", start);
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    const std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    t.number = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(t.number))
      fail("malformed number", start);
    t.is_integer = integral && text.size() <= 18;
    if (t.is_integer) t.int_value = std::strtoll(text.c_str(), nullptr, 10);
    return t;
  }

  Token lex_ident() {
    Token t;
    t.type = Tok::kIdent;
    t.pos = pos_;
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

Kind function_kind(std::string_view name) {
  if (name == "sin") return Kind::kSin;
  if (name == "cos") return Kind::kCos;
  if (name == "exp") return Kind::kExp;
  if (name == "ln") return Kind::kLn;
  if (name == "sqrt") return Kind::kSqrt;
  if (name == "tanh") return Kind::kTanh;
  return Kind::kConst;  // sentinel: not a function
}

bool is_function_name(std::string_view name) {
  return name == "sin" || name == "cos" || name == "exp" || name == "ln" ||
         name == "sqrt" || name == "tanh";
}

class Parser {
 public:
  Parser(std::string_view src, const Chart& chart) : lex_(src), chart_(chart) {
    advance();
  }

  NodePtr parse() {
    NodePtr root = expression();
    if (cur_.type != Tok::kEnd) fail("unexpected trailing input", cur_.pos);
    return root;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (cur_.type == Tok::kPlus) {
        advance();
        lhs = make_add(std::move(lhs), term());
      } else if (cur_.type == Tok::kMinus) {
        advance();
        lhs = make_sub(std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (cur_.type == Tok::kStar) {
        advance();
        lhs = make_mul(std::move(lhs), unary());
      } else if (cur_.type == Tok::kSlash) {
        advance();
        lhs = make_div(std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (cur_.type == Tok::kMinus) {
      advance();
      return make_neg(unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    while (cur_.type == Tok::kCaret) {
      advance();
      long long sign = 1;
      if (cur_.type == Tok::kMinus) {
        advance();
        sign = -1;
      }
      if (cur_.type != Tok::kNumber || !cur_.is_integer)
        fail("exponent must be an integer literal", cur_.pos);
      const long long e = sign * cur_.int_value;
      if (e > std::numeric_limits<int>::max() || e < std::numeric_limits<int>::min())
        fail("exponent out of range", cur_.pos);
      advance();
      base = make_pow(std::move(base), static_cast<int>(e));
    }
    return base;
  }

  NodePtr atom() {
    if (cur_.type == Tok::kNumber) {
      const double v = cur_.number;
      advance();
      return const_node(v);
    }
    if (cur_.type == Tok::kIdent) {
      const Token tok = cur_;
      advance();
      if (is_function_name(tok.text)) {
        if (cur_.type != Tok::kLParen)
          fail("expected '(' after function '" + tok.text + "'", cur_.pos);
        advance();
        NodePtr arg = expression();
        if (cur_.type != Tok::kRParen) fail("expected ')'", cur_.pos);
        advance();
        return make_fn(function_kind(tok.text), std::move(arg));
      }
      const int idx = chart_.index_of(tok.text);
      if (idx < 0) fail("unknown identifier '" + tok.text + "'", tok.pos);
      return coord_node(idx);
    }
    if (cur_.type == Tok::kLParen) {
      advance();
      NodePtr inner = expression();
      if (cur_.type != Tok::kRParen) fail("expected ')'", cur_.pos);
      advance();
      return inner;
    }
    fail("expected expression", cur_.pos);
  }

  Lexer lex_;
  const Chart& chart_;
  Token cur_;
};

}  // namespace

// --- ScalarExpr ---

ScalarExpr::ScalarExpr() : node_(const_node(0.0)) {}
ScalarExpr::ScalarExpr(NodePtr node) : node_(std::move(node)) {}

ScalarExpr ScalarExpr::constant(double value) {
  return ScalarExpr(const_node(value));
}

ScalarExpr ScalarExpr::coordinate(int index) {
  return ScalarExpr(coord_node(index));
}

ScalarExpr ScalarExpr::parse(std::string_view text, const Chart& chart) {
  Parser p(text, chart);
  return ScalarExpr(p.parse());
}

double ScalarExpr::eval(std::span<const double> point) const {
  return eval_node(*node_, point);
}

ScalarExpr ScalarExpr::differentiate(int coord) const {
  if (coord < 0) throw Error("derivative coordinate must be non-negative");
  return ScalarExpr(diff_node(node_, coord));
}

std::string ScalarExpr::to_string() const {
  std::string out;
  print_node(*node_, nullptr, out);
  return out;
}

std::string ScalarExpr::to_string(const Chart& chart) const {
  std::string out;
  print_node(*node_, &chart, out);
  return out;
}

bool ScalarExpr::is_constant() const { return node_->kind == Kind::kConst; }

double ScalarExpr::constant_value() const {
  if (!is_constant()) throw Error("expression is not a constant");
  return node_->value;
}

int ScalarExpr::min_dim() const { return node_->min_dim; }

ScalarExpr ScalarExpr::pow(int exponent) const {
  return ScalarExpr(make_pow(node_, exponent));
}

ScalarExpr ScalarExpr::operator-() const { return ScalarExpr(make_neg(node_)); }

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_add(a.node_, b.node_));
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_sub(a.node_, b.node_));
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_mul(a.node_, b.node_));
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_div(a.node_, b.node_));
}

ScalarExpr sin(const ScalarExpr& a) {
  return ScalarExpr(make_fn(Kind::kSin, a.node_));
}
ScalarExpr cos(const ScalarExpr& a) {
  return ScalarExpr(make_fn(Kind::kCos, a.node_));
}
ScalarExpr exp(const ScalarExpr& a) {
  return ScalarExpr(make_fn(Kind::kExp, a.node_));
}
ScalarExpr ln(const ScalarExpr& a) {
  return ScalarExpr(make_fn(Kind::kLn, a.node_));
}
ScalarExpr sqrt(const ScalarExpr& a) {
  return ScalarExpr(make_fn(Kind::kSqrt, a.node_));
}
ScalarExpr tanh(const ScalarExpr& a) {
  return ScalarExpr(make_fn(Kind::kTanh, a.node_));
}

}  // namespace weylkit
