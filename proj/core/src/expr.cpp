#include <dualflow/expr.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dualflow {

struct AngularExpr::Node {
  enum class Op { number, theta, add, sub, mul, div, neg, cos, sin } op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = AngularExpr::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+')) {
        lhs = make(Op::add, lhs, term());
      } else if (consume('-')) {
        lhs = make(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*')) {
        lhs = make(Op::mul, lhs, factor());
      } else if (consume('/')) {
        lhs = make(Op::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make(Op::neg, factor());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::number, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string word = text_.substr(start, pos_ - start);
      if (word == "theta") return make(Op::theta);
      if (word == "pi") return make(Op::number, nullptr, nullptr, std::numbers::pi);
      if (word == "cos" || word == "sin") {
        if (!consume('(')) fail("expected '(' after " + word);
        NodePtr arg = expr();
        if (!consume(')')) fail("expected ')'");
        return make(word == "cos" ? Op::cos : Op::sin, std::move(arg));
      }
      pos_ = start;
      fail("unknown name '" + word + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, double theta) {
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::theta:
      return theta;
    case Op::add:
      return eval_node(*n.lhs, theta) + eval_node(*n.rhs, theta);
    case Op::sub:
      return eval_node(*n.lhs, theta) - eval_node(*n.rhs, theta);
    case Op::mul:
      return eval_node(*n.lhs, theta) * eval_node(*n.rhs, theta);
    case Op::div:
      return eval_node(*n.lhs, theta) / eval_node(*n.rhs, theta);
    case Op::neg:
      return -eval_node(*n.lhs, theta);
    case Op::cos:
      return std::cos(eval_node(*n.lhs, theta));
    default:
      return std::sin(eval_node(*n.lhs, theta));
  }
}

}  // namespace

AngularExpr::AngularExpr(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

AngularExpr AngularExpr::parse(const std::string& text) {
  Parser p(text);
  return AngularExpr(text, p.run());
}

double AngularExpr::eval(double theta) const { return eval_node(*root_, theta); }

}  // namespace dualflow
