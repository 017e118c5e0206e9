#pragma once

// Minimal arithmetic expressions in one variable x with derivatives to third
// order by forward-mode propagation of truncated Taylor jets.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | sinh | cosh | tanh | exp | ln

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "qes/error.hpp"
#include "qes/funcspace.hpp"

namespace qes {

/// Value and first three derivatives with respect to x.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;

  static Jet constant(double c) { return {c, 0.0, 0.0, 0.0}; }
  static Jet variable(double x) { return {x, 1.0, 0.0, 0.0}; }

  bool is_constant() const { return d1 == 0.0 && d2 == 0.0 && d3 == 0.0; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2, -a.d3}; }

inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}

/// f(u) given f, f', f'', f''' at u.v (Faà di Bruno to third order).
inline Jet compose(const Jet& u, double f0, double f1, double f2, double f3) {
  return {f0, f1 * u.d1, f2 * u.d1 * u.d1 + f1 * u.d2,
          f3 * u.d1 * u.d1 * u.d1 + 3.0 * f2 * u.d1 * u.d2 + f1 * u.d3};
}

inline Jet reciprocal(const Jet& u) {
  const double r = 1.0 / u.v;
  return compose(u, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet exp(const Jet& u) {
  const double e = std::exp(u.v);
  return compose(u, e, e, e, e);
}

inline Jet log(const Jet& u) {
  const double r = 1.0 / u.v;
  return compose(u, std::log(u.v), r, -r * r, 2.0 * r * r * r);
}

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return compose(u, s, c, -s, -c);
}

inline Jet cos(const Jet& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return compose(u, c, -s, -c, s);
}

inline Jet sinh(const Jet& u) {
  const double s = std::sinh(u.v), c = std::cosh(u.v);
  return compose(u, s, c, s, c);
}

inline Jet cosh(const Jet& u) {
  const double s = std::sinh(u.v), c = std::cosh(u.v);
  return compose(u, c, s, c, s);
}

inline Jet tanh(const Jet& u) {
  const double t = std::tanh(u.v);
  const double s = 1.0 - t * t;
  return compose(u, t, s, -2.0 * t * s, -2.0 * s * (1.0 - 3.0 * t * t));
}

/// u^c for constant c. Falling-factorial coefficients that vanish are kept as
/// exact zeros so that e.g. x^2 has a finite third derivative at x = 0.
inline Jet pow(const Jet& u, double c) {
  double f[4];
  double coef = 1.0;
  for (int k = 0; k < 4; ++k) {
    f[k] = coef == 0.0 ? 0.0 : coef * std::pow(u.v, c - k);
    coef *= (c - k);
  }
  return compose(u, f[0], f[1], f[2], f[3]);
}

inline Jet pow(const Jet& base, const Jet& exponent) {
  if (exponent.is_constant()) return pow(base, exponent.v);
  return exp(exponent * log(base));
}

/// Parsed expression tree; immutable and shareable.
class Expression {
 public:
  static Expression parse(std::string_view text) {
    Parser p{text, 0};
    auto root = p.parse_expr();
    p.skip_space();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    return Expression(std::string(text), std::move(root));
  }

  Jet eval(double x) const { return root_->eval(Jet::variable(x)); }
  double value(double x) const { return eval(x).v; }
  const std::string& text() const noexcept { return text_; }

 private:
  enum class Kind { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Func };
  enum class Fn { Sin, Cos, Sinh, Cosh, Tanh, Exp, Ln };

  struct Node {
    Kind kind;
    double number = 0.0;
    Fn fn = Fn::Exp;
    std::shared_ptr<const Node> lhs, rhs;

    Jet eval(const Jet& x) const {
      switch (kind) {
        case Kind::Number: return Jet::constant(number);
        case Kind::Variable: return x;
        case Kind::Add: return lhs->eval(x) + rhs->eval(x);
        case Kind::Sub: return lhs->eval(x) - rhs->eval(x);
        case Kind::Mul: return lhs->eval(x) * rhs->eval(x);
        case Kind::Div: return lhs->eval(x) / rhs->eval(x);
        case Kind::Pow: return pow(lhs->eval(x), rhs->eval(x));
        case Kind::Neg: return -lhs->eval(x);
        case Kind::Func: {
          const Jet u = lhs->eval(x);
          switch (fn) {
            case Fn::Sin: return sin(u);
            case Fn::Cos: return cos(u);
            case Fn::Sinh: return sinh(u);
            case Fn::Cosh: return cosh(u);
            case Fn::Tanh: return tanh(u);
            case Fn::Exp: return exp(u);
            case Fn::Ln: return log(u);
          }
        }
      }
      return Jet{};
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ParameterError("expression error at position " + std::to_string(pos) + ": " + msg);
    }

    void skip_space() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_space();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
      return std::make_shared<const Node>(Node{k, 0.0, Fn::Exp, std::move(a), std::move(b)});
    }

    NodePtr parse_expr() {
      NodePtr lhs = parse_term();
      for (;;) {
        if (accept('+')) {
          lhs = binary(Kind::Add, lhs, parse_term());
        } else if (accept('-')) {
          lhs = binary(Kind::Sub, lhs, parse_term());
        } else {
          return lhs;
        }
      }
    }

    NodePtr parse_term() {
      NodePtr lhs = parse_unary();
      for (;;) {
        if (accept('*')) {
          lhs = binary(Kind::Mul, lhs, parse_unary());
        } else if (accept('/')) {
          lhs = binary(Kind::Div, lhs, parse_unary());
        } else {
          return lhs;
        }
      }
    }

    NodePtr parse_unary() {
      if (accept('-')) return binary(Kind::Neg, parse_unary(), nullptr);
      if (accept('+')) return parse_unary();
      return parse_power();
    }

    NodePtr parse_power() {
      NodePtr base = parse_primary();
      if (accept('^')) return binary(Kind::Pow, base, parse_unary());
      return base;
    }

    NodePtr parse_primary() {
      skip_space();
      if (pos >= s.size()) fail("unexpected end of expression");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::string rest(s.substr(pos));
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(rest, &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos += used;
        return std::make_shared<const Node>(Node{Kind::Number, v, Fn::Exp, nullptr, nullptr});
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string_view name = s.substr(start, pos - start);
        if (name == "x") {
          return std::make_shared<const Node>(Node{Kind::Variable, 0.0, Fn::Exp, nullptr, nullptr});
        }
        if (name == "pi") {
          return std::make_shared<const Node>(
              Node{Kind::Number, std::numbers::pi, Fn::Exp, nullptr, nullptr});
        }
        Fn fn;
        if (name == "sin") fn = Fn::Sin;
        else if (name == "cos") fn = Fn::Cos;
        else if (name == "sinh") fn = Fn::Sinh;
        else if (name == "cosh") fn = Fn::Cosh;
        else if (name == "tanh") fn = Fn::Tanh;
        else if (name == "exp") fn = Fn::Exp;
        else if (name == "ln") fn = Fn::Ln;
        else {
          pos = start;
          fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return std::make_shared<const Node>(Node{Kind::Func, 0.0, fn, std::move(arg), nullptr});
      }
      if (accept('(')) {
        NodePtr inner = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  Expression(std::string text, NodePtr root) : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  NodePtr root_;
};

/// GeneratorFunction whose derivatives come from the expression's jets.
inline GeneratorFunction to_generator(const Expression& e, double scale_hint) {
  return make_analytic([e](double x) { return e.eval(x).v; },
                       [e](double x) { return e.eval(x).d1; },
                       [e](double x) { return e.eval(x).d2; },
                       [e](double x) { return e.eval(x).d3; }, scale_hint, e.text());
}

}  // namespace qes
