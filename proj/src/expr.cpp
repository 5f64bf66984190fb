// SPDX-License-Identifier: Apache-2.0
#include "lqomor/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lqomor {

namespace {

struct Node {
  virtual ~Node() = default;
  virtual double eval(double t) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Constant : Node {
  double value;
  explicit Constant(double v) : value(v) {}
  double eval(double) const override { return value; }
};

struct Variable : Node {
  double eval(double t) const override { return t; }
};

struct Unary : Node {
  double (*fn)(double);
  NodePtr arg;
  Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
  double eval(double t) const override { return fn(arg->eval(t)); }
};

struct Binary : Node {
  char op;
  NodePtr lhs, rhs;
  Binary(char o, NodePtr l, NodePtr r)
      : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
  double eval(double t) const override {
    const double a = lhs->eval(t);
    const double b = rhs->eval(t);
    switch (op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      case '/': return a / b;
      case '^': return std::pow(a, b);
    }
    return 0.0;
  }
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expression();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("input expression: " + what + " at position " +
                                std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expression() {
    NodePtr node = term();
    while (true) {
      if (consume('+')) {
        node = std::make_unique<Binary>('+', std::move(node), term());
      } else if (consume('-')) {
        node = std::make_unique<Binary>('-', std::move(node), term());
      } else {
        return node;
      }
    }
  }

  NodePtr term() {
    NodePtr node = unary();
    while (true) {
      if (consume('*')) {
        node = std::make_unique<Binary>('*', std::move(node), unary());
      } else if (consume('/')) {
        node = std::make_unique<Binary>('/', std::move(node), unary());
      } else {
        return node;
      }
    }
  }

  NodePtr unary() {
    if (consume('-')) {
      return std::make_unique<Binary>('-', std::make_unique<Constant>(0.0),
                                      unary());
    }
    consume('+');
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (consume('^')) {
      // right associative
      return std::make_unique<Binary>('^', std::move(base), unary());
    }
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return identifier();
    }
    if (consume('(')) {
      NodePtr inner = expression();
      if (!consume(')')) fail("missing ')'");
      return inner;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    size_t end = pos_;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) ||
            text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E')))) {
      ++end;
    }
    try {
      size_t used = 0;
      const double v = std::stod(text_.substr(pos_, end - pos_), &used);
      pos_ += used;
      return std::make_unique<Constant>(v);
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }

  NodePtr identifier() {
    size_t end = pos_;
    while (end < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    const std::string name = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "t") return std::make_unique<Variable>();
    if (name == "pi") return std::make_unique<Constant>(M_PI);

    static const std::pair<const char*, double (*)(double)> table[] = {
        {"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},
        {"exp", std::exp}, {"sqrt", std::sqrt}, {"abs", std::fabs},
        {"tanh", std::tanh}};
    for (const auto& [fname, fn] : table) {
      if (name == fname) {
        if (!consume('(')) fail("expected '(' after " + name);
        NodePtr arg = expression();
        if (!consume(')')) fail("missing ')'");
        return std::make_unique<Unary>(fn, std::move(arg));
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

std::function<double(double)> parse_input_expression(const std::string& text) {
  Parser parser(text);
  std::shared_ptr<Node> root{parser.parse()};
  return [root](double t) { return root->eval(t); };
}

}  // namespace lqomor
