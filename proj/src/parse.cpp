#include <cctype>
#include <limits>
#include <cstdint>
#include <optional>
#include <string>

#include "linearize4/expr.hpp"

namespace lin4 {
namespace {

std::optional<KernelTag> kernel_by_name(const std::string& name) {
  if (name == "sin") return KernelTag::Sin;
  if (name == "cos") return KernelTag::Cos;
  if (name == "tan") return KernelTag::Tan;
  if (name == "sec") return KernelTag::Sec;
  if (name == "tanh") return KernelTag::Tanh;
  if (name == "exp") return KernelTag::Exp;
  if (name == "ln") return KernelTag::Ln;
  return std::nullopt;
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, pos); }

  Expr parse_sum() {
    Expr acc = parse_product();
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos;
        acc = acc + parse_product();
      } else if (c == '-') {
        ++pos;
        acc = acc - parse_product();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_product() {
    Expr acc = parse_unary();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos;
        acc = acc * parse_unary();
      } else if (c == '/') {
        ++pos;
        acc = acc / parse_unary();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_unary() {
    char c = peek();
    if (c == '-') {
      ++pos;
      return Expr::number(-1) * parse_unary();
    }
    if (c == '+') {
      ++pos;
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek() != '^') return base;
    ++pos;
    skip_ws();
    std::size_t at = pos;
    Expr e = parse_unary();  // right-associative, sign allowed
    if (!e.is_number())
      throw SyntaxError("exponent must be a rational constant", at);
    const Rational& r = e.number_value();
    if (r.den != 1 && r.den != 2)
      throw SyntaxError("exponent must be integer or half-integer", at);
    return Expr::pow(std::move(base), r);
  }

  Expr parse_primary() {
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    if (c == '(') {
      ++pos;
      Expr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character");
  }

  Expr parse_number() {
    std::size_t start = pos;
    std::int64_t ipart = 0;
    bool any = false;
    auto push_digit = [&](std::int64_t& v, char d) {
      if (v > (std::numeric_limits<std::int64_t>::max() - (d - '0')) / 10)
        throw SyntaxError("numeric literal too large", start);
      v = v * 10 + (d - '0');
    };
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      push_digit(ipart, text[pos]);
      ++pos;
      any = true;
    }
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      std::int64_t fpart = 0;
      std::int64_t scale = 1;
      bool frac = false;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos]))) {
        push_digit(fpart, text[pos]);
        if (scale > std::numeric_limits<std::int64_t>::max() / 10)
          throw SyntaxError("numeric literal too large", start);
        scale *= 10;
        ++pos;
        frac = true;
      }
      if (!any && !frac) fail("malformed number");
      try {
        Rational whole(ipart);
        return Expr::number(whole + Rational(fpart, scale));
      } catch (const std::overflow_error&) {
        throw SyntaxError("numeric literal too large", start);
      }
    }
    if (!any) fail("malformed number");
    return Expr::number(ipart);
  }

  Expr parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name(text.substr(start, pos - start));
    auto tag = kernel_by_name(name);
    bool is_sqrt = name == "sqrt";
    if (tag || is_sqrt) {
      if (peek() != '(')
        throw SyntaxError("expected '(' after function name '" + name + "'", pos);
      ++pos;
      Expr arg = parse_sum();
      if (peek() == ',')
        throw ArityError("function '" + name + "' takes exactly one argument", pos);
      if (!eat(')')) fail("expected ')'");
      return is_sqrt ? Expr::sqrt(std::move(arg))
                     : Expr::kernel(*tag, std::move(arg));
    }
    if (peek() == '(')
      throw SyntaxError("unknown function '" + name + "'", start);
    return Expr::symbol(std::move(name));
  }
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p{text};
  Expr e = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("unexpected trailing input");
  return e;
}

}  // namespace lin4
