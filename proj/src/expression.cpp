#include "ucp/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <map>

namespace ucp {

struct ExprNode {
  enum class Kind { number, variable, add, sub, mul, div, pow, neg, call };
  Kind kind = Kind::number;
  double number = 0.0;
  int var = 0;
  std::string fn;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(ExprNode::Kind k, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args = std::move(args);
  return n;
}

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->number = v;
  return n;
}

NodePtr make_variable(int i) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::variable;
  n->var = i;
  return n;
}

const std::map<std::string, int>& known_functions() {
  static const std::map<std::string, int> f = {{"sqrt", 1}, {"exp", 1}, {"log", 1}, {"sin", 1},
                                               {"cos", 1},  {"tanh", 1}, {"abs", 1}, {"norm", -1}};
  return f;
}

class Parser {
 public:
  Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + msg);
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
    while (true) {
      if (accept('+')) lhs = make(ExprNode::Kind::add, {lhs, term()});
      else if (accept('-')) lhs = make(ExprNode::Kind::sub, {lhs, term()});
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) lhs = make(ExprNode::Kind::mul, {lhs, unary()});
      else if (accept('/')) lhs = make(ExprNode::Kind::div, {lhs, unary()});
      else return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(ExprNode::Kind::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(ExprNode::Kind::pow, {base, unary()});
    return base;
  }

  std::string identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  int variable_index(const std::string& name) {
    auto index_after = [&](size_t prefix) -> int {
      if (name.size() <= prefix) return -1;
      for (size_t i = prefix; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
      return std::stoi(name.substr(prefix));
    };
    if (name == "t") return 0;
    if (name[0] == 'x') {
      const int k = index_after(1);
      if (k >= 1 && k <= dim_) return k - 1;
    }
    if (name[0] == 'y') {
      const int k = index_after(1);
      if (k >= 1 && k <= dim_ - 1) return k;
    }
    return -1;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<size_t>(end - begin);
      return make_number(v);
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string name = identifier();
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') return call(name);
      if (name == "pi") return make_number(M_PI);
      const int v = variable_index(name);
      if (v < 0) fail("unknown variable '" + name + "'");
      return make_variable(v);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr call(const std::string& name) {
    auto it = known_functions().find(name);
    if (it == known_functions().end()) fail("unknown function '" + name + "'");
    accept('(');
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::call;
    n->fn = name;
    if (!accept(')')) {
      do {
        skip();
        const size_t save = pos_;
        if (name == "norm" && identifier() == "y") {
          skip();
          if (pos_ < s_.size() && (s_[pos_] == ',' || s_[pos_] == ')')) {
            for (int k = 1; k < dim_; ++k) n->args.push_back(make_variable(k));
            continue;
          }
        }
        pos_ = save;
        n->args.push_back(expr());
      } while (accept(','));
      if (!accept(')')) fail("expected ')' after arguments of " + name);
    }
    if (it->second >= 0 && static_cast<int>(n->args.size()) != it->second)
      fail(name + " takes " + std::to_string(it->second) + " argument(s)");
    if (n->args.empty()) fail(name + " needs arguments");
    return n;
  }

  const std::string& s_;
  int dim_;
  size_t pos_ = 0;
};

// Chain rule for f(a) given f, f', f''.
Jet compose(const Jet& a, double f, double f1, double f2) {
  return Jet{f, f1 * a.g, f1 * a.h + f2 * a.g * a.g.transpose()};
}

Jet multiply(const Jet& a, const Jet& b) {
  return Jet{a.v * b.v, a.v * b.g + b.v * a.g,
             a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose()};
}

Jet reciprocal(const Jet& a) {
  const double v = a.v;
  return compose(a, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

Jet evaluate(const ExprNode& n, const Point& x) {
  const int dim = static_cast<int>(x.size());
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::number:
      return Jet{n.number, Vec::Zero(dim), Mat::Zero(dim, dim)};
    case K::variable: {
      Jet j{x[n.var], Vec::Zero(dim), Mat::Zero(dim, dim)};
      j.g[n.var] = 1.0;
      return j;
    }
    case K::add: {
      Jet a = evaluate(*n.args[0], x), b = evaluate(*n.args[1], x);
      return Jet{a.v + b.v, a.g + b.g, a.h + b.h};
    }
    case K::sub: {
      Jet a = evaluate(*n.args[0], x), b = evaluate(*n.args[1], x);
      return Jet{a.v - b.v, a.g - b.g, a.h - b.h};
    }
    case K::neg: {
      Jet a = evaluate(*n.args[0], x);
      return Jet{-a.v, -a.g, -a.h};
    }
    case K::mul:
      return multiply(evaluate(*n.args[0], x), evaluate(*n.args[1], x));
    case K::div:
      return multiply(evaluate(*n.args[0], x), reciprocal(evaluate(*n.args[1], x)));
    case K::pow: {
      const Jet a = evaluate(*n.args[0], x);
      const ExprNode& e = *n.args[1];
      if (e.kind == K::number) {
        const double c = e.number;
        if (c == 0.0) return Jet{1.0, Vec::Zero(dim), Mat::Zero(dim, dim)};
        return compose(a, std::pow(a.v, c), c * std::pow(a.v, c - 1.0),
                       c * (c - 1.0) * std::pow(a.v, c - 2.0));
      }
      // a^b = exp(b log a)
      const Jet la = compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
      const Jet p = multiply(evaluate(e, x), la);
      const double ev = std::exp(p.v);
      return compose(p, ev, ev, ev);
    }
    case K::call: {
      if (n.fn == "norm") {
        Jet s{0.0, Vec::Zero(dim), Mat::Zero(dim, dim)};
        for (const auto& arg : n.args) {
          const Jet a = evaluate(*arg, x);
          const Jet sq = multiply(a, a);
          s.v += sq.v;
          s.g += sq.g;
          s.h += sq.h;
        }
        const double r = std::sqrt(s.v);
        return compose(s, r, 0.5 / r, -0.25 / (r * s.v));
      }
      const Jet a = evaluate(*n.args[0], x);
      const double v = a.v;
      if (n.fn == "sqrt") {
        const double r = std::sqrt(v);
        return compose(a, r, 0.5 / r, -0.25 / (r * v));
      }
      if (n.fn == "exp") {
        const double e = std::exp(v);
        return compose(a, e, e, e);
      }
      if (n.fn == "log") return compose(a, std::log(v), 1.0 / v, -1.0 / (v * v));
      if (n.fn == "sin") return compose(a, std::sin(v), std::cos(v), -std::sin(v));
      if (n.fn == "cos") return compose(a, std::cos(v), -std::sin(v), -std::cos(v));
      if (n.fn == "tanh") {
        const double th = std::tanh(v), s2 = 1.0 - th * th;
        return compose(a, th, s2, -2.0 * th * s2);
      }
      if (n.fn == "abs") return compose(a, std::abs(v), v < 0.0 ? -1.0 : 1.0, 0.0);
      break;
    }
  }
  throw InternalInconsistency("expression: unhandled node");
}

double evaluate_value(const ExprNode& n, const Point& x) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::number: return n.number;
    case K::variable: return x[n.var];
    case K::add: return evaluate_value(*n.args[0], x) + evaluate_value(*n.args[1], x);
    case K::sub: return evaluate_value(*n.args[0], x) - evaluate_value(*n.args[1], x);
    case K::neg: return -evaluate_value(*n.args[0], x);
    case K::mul: return evaluate_value(*n.args[0], x) * evaluate_value(*n.args[1], x);
    case K::div: return evaluate_value(*n.args[0], x) / evaluate_value(*n.args[1], x);
    case K::pow: return std::pow(evaluate_value(*n.args[0], x), evaluate_value(*n.args[1], x));
    case K::call: {
      if (n.fn == "norm") {
        double s = 0.0;
        for (const auto& a : n.args) {
          const double v = evaluate_value(*a, x);
          s += v * v;
        }
        return std::sqrt(s);
      }
      const double v = evaluate_value(*n.args[0], x);
      if (n.fn == "sqrt") return std::sqrt(v);
      if (n.fn == "exp") return std::exp(v);
      if (n.fn == "log") return std::log(v);
      if (n.fn == "sin") return std::sin(v);
      if (n.fn == "cos") return std::cos(v);
      if (n.fn == "tanh") return std::tanh(v);
      if (n.fn == "abs") return std::abs(v);
      break;
    }
  }
  throw InternalInconsistency("expression: unhandled node");
}

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
  require(dim >= 1, "Expression::parse: dimension must be positive");
  Expression e;
  e.root_ = Parser(text, dim).parse();
  e.text_ = text;
  e.dim_ = dim;
  return e;
}

double Expression::value(const Point& x) const {
  require(x.size() == dim_, "Expression: point dimension mismatch");
  return evaluate_value(*root_, x);
}

Jet Expression::jet(const Point& x) const {
  require(x.size() == dim_, "Expression: point dimension mismatch");
  return evaluate(*root_, x);
}

ScalarField Expression::field() const {
  const Expression self = *this;
  return ScalarField([self](const Point& x) { return self.value(x); },
                     [self](const Point& x) { return self.jet(x).g; },
                     [self](const Point& x) { return self.jet(x).h; });
}

}  // namespace ucp
