#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "optdom/error.hpp"

namespace optdom {

/// Arithmetic expression in the variables i and j, e.g. "2^(-i) * (j <= i)".
///
/// Grammar: comparisons (< <= > >= == !=, yielding 1 or 0) bind loosest,
/// then + -, then * /, then unary -, then right-associative ^. Functions:
/// abs sqrt exp log sin cos floor min max pow.
class Expression {
 public:
  explicit Expression(std::string source) : source_(std::move(source)) {
    Parser p{source_, 0};
    root_ = p.comparison();
    p.skip();
    if (p.pos != source_.size()) p.fail("unexpected trailing input");
  }

  double operator()(double i, double j) const { return root_->eval(i, j); }
  const std::string& source() const { return source_; }

 private:
  struct Node {
    virtual ~Node() = default;
    virtual double eval(double i, double j) const = 0;
  };
  using Ptr = std::shared_ptr<const Node>;

  struct Number : Node {
    double v;
    explicit Number(double x) : v(x) {}
    double eval(double, double) const override { return v; }
  };
  struct Variable : Node {
    bool is_i;
    explicit Variable(bool i) : is_i(i) {}
    double eval(double i, double j) const override { return is_i ? i : j; }
  };
  struct Unary : Node {
    char op;
    Ptr a;
    Unary(char o, Ptr x) : op(o), a(std::move(x)) {}
    double eval(double i, double j) const override { return op == '-' ? -a->eval(i, j) : a->eval(i, j); }
  };
  struct Binary : Node {
    std::string op;
    Ptr a, b;
    Binary(std::string o, Ptr x, Ptr y) : op(std::move(o)), a(std::move(x)), b(std::move(y)) {}
    double eval(double i, double j) const override {
      const double x = a->eval(i, j), y = b->eval(i, j);
      if (op == "+") return x + y;
      if (op == "-") return x - y;
      if (op == "*") return x * y;
      if (op == "/") return x / y;
      if (op == "^") return std::pow(x, y);
      if (op == "<") return x < y;
      if (op == "<=") return x <= y;
      if (op == ">") return x > y;
      if (op == ">=") return x >= y;
      if (op == "==") return x == y;
      return x != y;
    }
  };
  struct Call : Node {
    std::string name;
    std::vector<Ptr> args;
    Call(std::string n, std::vector<Ptr> a) : name(std::move(n)), args(std::move(a)) {}
    double eval(double i, double j) const override {
      const double x = args[0]->eval(i, j);
      if (name == "abs") return std::abs(x);
      if (name == "sqrt") return std::sqrt(x);
      if (name == "exp") return std::exp(x);
      if (name == "log") return std::log(x);
      if (name == "sin") return std::sin(x);
      if (name == "cos") return std::cos(x);
      if (name == "floor") return std::floor(x);
      const double y = args[1]->eval(i, j);
      if (name == "min") return std::min(x, y);
      if (name == "max") return std::max(x, y);
      return std::pow(x, y);
    }
  };

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw InvalidArgument("expression \"" + s + "\" at offset " + std::to_string(pos) + ": " + msg);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(const std::string& tok) {
      skip();
      if (s.compare(pos, tok.size(), tok) == 0) {
        pos += tok.size();
        return true;
      }
      return false;
    }

    Ptr comparison() {
      Ptr left = additive();
      for (;;) {
        std::string op;
        for (const char* cand : {"<=", ">=", "==", "!=", "<", ">"})
          if (eat(cand)) {
            op = cand;
            break;
          }
        if (op.empty()) return left;
        left = std::make_shared<Binary>(op, left, additive());
      }
    }
    Ptr additive() {
      Ptr left = multiplicative();
      for (;;) {
        if (eat("+")) left = std::make_shared<Binary>("+", left, multiplicative());
        else if (eat("-")) left = std::make_shared<Binary>("-", left, multiplicative());
        else return left;
      }
    }
    Ptr multiplicative() {
      Ptr left = unary();
      for (;;) {
        if (eat("*")) left = std::make_shared<Binary>("*", left, unary());
        else if (eat("/")) left = std::make_shared<Binary>("/", left, unary());
        else return left;
      }
    }
    Ptr unary() {
      if (eat("-")) return std::make_shared<Unary>('-', unary());
      if (eat("+")) return unary();
      return power();
    }
    Ptr power() {
      Ptr base = primary();
      if (eat("^")) return std::make_shared<Binary>("^", base, unary());
      return base;
    }
    Ptr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      if (eat("(")) {
        Ptr e = comparison();
        if (!eat(")")) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        const double v = std::stod(s.substr(pos), &used);
        pos += used;
        return std::make_shared<Number>(v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "i" || name == "j") return std::make_shared<Variable>(name == "i");
        if (name == "pi") return std::make_shared<Number>(3.14159265358979323846);
        const bool two = name == "min" || name == "max" || name == "pow";
        const bool one = name == "abs" || name == "sqrt" || name == "exp" || name == "log" ||
                         name == "sin" || name == "cos" || name == "floor";
        if (!one && !two) fail("unknown identifier '" + name + "'");
        if (!eat("(")) fail("expected '(' after " + name);
        std::vector<Ptr> args{comparison()};
        if (two) {
          if (!eat(",")) fail("expected ',' in " + name);
          args.push_back(comparison());
        }
        if (!eat(")")) fail("expected ')' after arguments of " + name);
        return std::make_shared<Call>(name, std::move(args));
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  std::string source_;
  Ptr root_;
};

}  // namespace optdom
