#include "svi/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace svi {

enum class Op { number, var_p, var_x, add, sub, mul, div, pow, neg, abs, sqrt, min, max };

struct Expression::Node {
  Op op = Op::number;
  double value = 0.0;  // literal, or 0-based component index for variables
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  int p_arity = 0;
  int x_arity = 0;
  bool continuous = true;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "expression error at position " << (pos_ + 1) << ": " << msg << " in \"" << s_ << "\"";
    throw InputError(os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) lhs = make(Op::add, {lhs, term()});
      else if (accept('-')) lhs = make(Op::sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = make(Op::mul, {lhs, unary()});
      } else if (accept('/')) {
        continuous = false;
        lhs = make(Op::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      NodePtr ex = unary();
      const bool safe = ex->op == Op::number && ex->value >= 0.0 && std::floor(ex->value) == ex->value;
      if (!safe) continuous = false;
      return make(Op::pow, {base, ex});
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return make(Op::number, {}, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));

    if (name == "abs" || name == "sqrt" || name == "min" || name == "max") {
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      expect(')');
      const bool binary = name == "min" || name == "max";
      if (args.size() != (binary ? 2u : 1u)) {
        pos_ = start;
        fail(name + " takes " + (binary ? "2" : "1") + " argument(s)");
      }
      if (name == "sqrt") continuous = false;  // undefined for negative arguments
      const Op op = name == "abs" ? Op::abs : name == "sqrt" ? Op::sqrt : name == "min" ? Op::min : Op::max;
      return make(op, std::move(args));
    }

    if (name.empty() || (name[0] != 'p' && name[0] != 'x')) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    int index = 1;
    if (name.size() == 2 && name[1] >= '1' && name[1] <= '0' + kMaxDim) {
      index = name[1] - '0';
    } else if (name.size() != 1) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (name[0] == 'p') {
      p_arity = std::max(p_arity, index);
      return make(Op::var_p, {}, index - 1);
    }
    x_arity = std::max(x_arity, index);
    return make(Op::var_x, {}, index - 1);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& n, const Vector& p, const Vector& x) {
  auto arg = [&](std::size_t i) { return eval_node(*n.args[i], p, x); };
  switch (n.op) {
    case Op::number: return n.value;
    case Op::var_p: {
      const auto i = static_cast<Eigen::Index>(n.value);
      if (i >= p.size()) throw InputError("expression uses a p component beyond the parameter dimension");
      return p[i];
    }
    case Op::var_x: {
      const auto i = static_cast<Eigen::Index>(n.value);
      if (i >= x.size()) throw InputError("expression uses an x component beyond the decision dimension");
      return x[i];
    }
    case Op::add: return arg(0) + arg(1);
    case Op::sub: return arg(0) - arg(1);
    case Op::mul: return arg(0) * arg(1);
    case Op::div: return arg(0) / arg(1);
    case Op::pow: return std::pow(arg(0), arg(1));
    case Op::neg: return -arg(0);
    case Op::abs: return std::abs(arg(0));
    case Op::sqrt: return std::sqrt(arg(0));
    case Op::min: return std::min(arg(0), arg(1));
    case Op::max: return std::max(arg(0), arg(1));
  }
  return std::nan("");
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser parser(text);
  Expression e;
  e.text_ = std::string(text);
  e.root_ = parser.parse_all();
  e.p_arity_ = parser.p_arity;
  e.x_arity_ = parser.x_arity;
  e.continuous_ = parser.continuous;
  return e;
}

double Expression::eval(const Vector& p, const Vector& x) const { return eval_node(*root_, p, x); }

}  // namespace svi
