#include <string>
#include <utility>
#include <vector>

#include "linearize4/expr.hpp"

namespace lin4 {
namespace {

void print_top(std::string& out, const Expr& e);

// Splits a canonical term into (sign, magnitude) for `a - b` style printing.
std::pair<bool, Expr> split_sign(const Expr& t) {
  if (t.is_number() && t.number_value().is_negative())
    return {true, Expr::number(-t.number_value())};
  if (t.kind() == Kind::Mul && t.operands().front().is_number() &&
      t.operands().front().number_value().is_negative()) {
    std::vector<Expr> kids = t.operands();
    kids[0] = Expr::number(-kids[0].number_value());
    return {true, Expr::mul(std::move(kids))};
  }
  return {false, t};
}

// Operand in a base/argument position: parenthesized unless atomic.
void print_operand(std::string& out, const Expr& e) {
  if (e.kind() == Kind::Symbol) {
    out += e.symbol_name();
    return;
  }
  if (e.kind() == Kind::Kernel) {
    out += kernel_name(e.kernel_tag());
    out += '(';
    print_top(out, e.kernel_arg());
    out += ')';
    return;
  }
  if (e.is_number() && !e.number_value().is_negative() &&
      e.number_value().is_integer()) {
    out += e.number_value().str();
    return;
  }
  out += '(';
  print_top(out, e);
  out += ')';
}

// base^exp with exp > 0; half-integer exponents spell through sqrt().
void print_pow_factor(std::string& out, const Expr& base, const Rational& exp) {
  if (exp.is_one()) {
    print_operand(out, base);
    return;
  }
  if (exp.den == 2) {
    out += "sqrt(";
    print_top(out, base);
    out += ')';
    if (exp.num != 1) {
      out += '^';
      out += std::to_string(exp.num);
    }
    return;
  }
  print_operand(out, base);
  out += '^';
  out += std::to_string(exp.num);
}

// A sign-free term: factors joined by `*`, negative powers folded into a
// trailing chain of `/` (left associativity groups them as one denominator).
void print_product(std::string& out, const Expr& t) {
  std::vector<Expr> factors;
  if (t.kind() == Kind::Mul)
    factors = t.operands();
  else
    factors = {t};

  Rational coeff(1);
  std::vector<Expr> nums;
  std::vector<std::pair<Expr, Rational>> dens;
  std::vector<std::pair<Expr, Rational>> neg_pows;  // (sum)^(-n), n >= 2
  for (const Expr& f : factors) {
    if (f.is_number()) {
      coeff = f.number_value();
    } else if (f.kind() == Kind::Pow && f.pow_exp().is_negative()) {
      // `a/(s)^n` would reparse with the power expanded; sums keep the
      // explicit negative exponent instead
      if (f.pow_base().kind() == Kind::Add && f.pow_exp().is_integer() &&
          f.pow_exp().num <= -2)
        neg_pows.emplace_back(f.pow_base(), f.pow_exp());
      else
        dens.emplace_back(f.pow_base(), -f.pow_exp());
    } else {
      nums.push_back(f);
    }
  }

  bool wrote = false;
  if (!coeff.is_one() || (nums.empty() && neg_pows.empty())) {
    out += coeff.str();
    wrote = true;
  }
  for (const Expr& f : nums) {
    if (wrote) out += '*';
    if (f.kind() == Kind::Pow)
      print_pow_factor(out, f.pow_base(), f.pow_exp());
    else
      print_operand(out, f);
    wrote = true;
  }
  for (const auto& [base, exp] : neg_pows) {
    if (wrote) out += '*';
    out += '(';
    print_top(out, base);
    out += ")^(";
    out += std::to_string(exp.num);
    out += ')';
    wrote = true;
  }
  for (const auto& [base, exp] : dens) {
    out += '/';
    print_pow_factor(out, base, exp);
  }
}

void print_top(std::string& out, const Expr& e) {
  if (e.kind() == Kind::Add) {
    bool first = true;
    for (const Expr& term : e.operands()) {
      auto [neg, mag] = split_sign(term);
      if (first) {
        if (neg) out += '-';
        first = false;
      } else {
        out += neg ? " - " : " + ";
      }
      print_product(out, mag);
    }
    return;
  }
  auto [neg, mag] = split_sign(e);
  if (neg) out += '-';
  print_product(out, mag);
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_top(out, e);
  return out;
}

}  // namespace lin4
