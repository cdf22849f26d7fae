#include "linearize4/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace lin4 {

namespace {

constexpr double kSingularTol = 1e-12;

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Positive rational content of a canonical sum: gcd of the term
// coefficients over the lcm of their denominators. Returns 1 when the lcm
// would overflow.
Rational add_content(const Expr& sum) {
  std::int64_t num_gcd = 0;
  std::int64_t den_lcm = 1;
  for (const Expr& term : sum.operands()) {
    Rational c(1);
    if (term.is_number())
      c = term.number_value();
    else if (term.kind() == Kind::Mul && term.operands().front().is_number())
      c = term.operands().front().number_value();
    num_gcd = gcd64(num_gcd, c.num);
    __int128 lcm = static_cast<__int128>(den_lcm / gcd64(den_lcm, c.den)) * c.den;
    if (lcm > std::numeric_limits<std::int64_t>::max()) return Rational(1);
    den_lcm = static_cast<std::int64_t>(lcm);
  }
  if (num_gcd == 0) return Rational(1);
  return Rational(num_gcd, den_lcm);
}

}  // namespace

struct Expr::Node {
  Kind kind = Kind::Number;
  Rational value;  // Number payload, or Pow exponent
  std::string name;
  KernelTag tag = KernelTag::Sin;
  std::vector<Expr> kids;  // Kernel: {arg}; Pow: {base}; Add/Mul: operands
};

const char* kernel_name(KernelTag tag) {
  switch (tag) {
    case KernelTag::Sin: return "sin";
    case KernelTag::Cos: return "cos";
    case KernelTag::Tan: return "tan";
    case KernelTag::Sec: return "sec";
    case KernelTag::Tanh: return "tanh";
    case KernelTag::Exp: return "exp";
    case KernelTag::Ln: return "ln";
  }
  return "?";
}

Expr Expr::make(Node&& node) {
  return Expr(std::make_shared<const Node>(std::move(node)));
}

Expr::Expr() : Expr(number(Rational(0))) {}

Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::number_value() const { return node_->value; }
const std::string& Expr::symbol_name() const { return node_->name; }
KernelTag Expr::kernel_tag() const { return node_->tag; }
const Expr& Expr::kernel_arg() const { return node_->kids[0]; }
const Expr& Expr::pow_base() const { return node_->kids[0]; }
const Rational& Expr::pow_exp() const { return node_->value; }
const std::vector<Expr>& Expr::operands() const { return node_->kids; }

bool Expr::is_zero() const {
  return node_->kind == Kind::Number && node_->value.is_zero();
}
bool Expr::is_one() const {
  return node_->kind == Kind::Number && node_->value.is_one();
}

Expr Expr::number(Rational v) {
  Node n;
  n.kind = Kind::Number;
  n.value = v;
  return make(std::move(n));
}

Expr Expr::symbol(std::string name) {
  if (name.empty()) throw EngineError("empty symbol name");
  Node n;
  n.kind = Kind::Symbol;
  n.name = std::move(name);
  return make(std::move(n));
}

Expr Expr::kernel(KernelTag tag, Expr argument) {
  Node n;
  n.kind = Kind::Kernel;
  n.tag = tag;
  n.kids = {std::move(argument)};
  return make(std::move(n));
}

Expr Expr::pow(Expr base, Rational exponent) {
  if (exponent.den != 1 && exponent.den != 2)
    throw EngineError("exponent must be integer or half-integer: " +
                      exponent.str());
  if (exponent.is_zero()) return number(1);
  if (exponent.is_one()) return base;

  if (base.is_number()) {
    const Rational& b = base.number_value();
    if (exponent.is_integer()) {
      if (b.is_zero() && exponent.is_negative())
        throw DomainError("zero raised to a negative power");
      try {
        return number(rat_pow(b, exponent.num));
      } catch (const std::overflow_error&) {
        // keep symbolic
      }
    } else {
      if (b.is_zero()) {
        if (exponent.is_negative())
          throw DomainError("zero raised to a negative power");
        return number(0);
      }
      if (auto r = rat_sqrt(b)) {
        try {
          return number(rat_pow(*r, exponent.num));
        } catch (const std::overflow_error&) {
        }
      }
    }
  }

  if (base.kind() == Kind::Pow && exponent.is_integer())
    return pow(base.pow_base(), base.pow_exp() * exponent);

  if (base.kind() == Kind::Mul && exponent.is_integer()) {
    std::vector<Expr> factors;
    factors.reserve(base.operands().size());
    for (const Expr& kid : base.operands()) factors.push_back(pow(kid, exponent));
    return mul(std::move(factors));
  }

  // Sums under a power shed their rational content, so bases that differ
  // only by a rational scale land on one primitive form and cancel.
  if (base.kind() == Kind::Add) {
    Rational content = add_content(base);
    if (!content.is_one()) {
      Expr primitive = mul({number(Rational(content.den, content.num)), base});
      return mul({pow(number(content), exponent),
                  pow(std::move(primitive), exponent)});
    }
  }

  // Negative powers of sec/cos canonicalize to positive powers of the
  // reciprocal kernel, keeping both spellings on one normal form.
  if (base.kind() == Kind::Kernel && exponent.is_negative()) {
    if (base.kernel_tag() == KernelTag::Sec)
      return pow(kernel(KernelTag::Cos, base.kernel_arg()), -exponent);
    if (base.kernel_tag() == KernelTag::Cos)
      return pow(kernel(KernelTag::Sec, base.kernel_arg()), -exponent);
  }

  Node n;
  n.kind = Kind::Pow;
  n.value = exponent;
  n.kids = {std::move(base)};
  return make(std::move(n));
}

Expr Expr::raw_mul_tail(const std::vector<Expr>& kids) {
  if (kids.size() == 2) return kids[1];
  Node n;
  n.kind = Kind::Mul;
  n.kids.assign(kids.begin() + 1, kids.end());
  return make(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
  for (int pass = 0; pass < 64; ++pass) {
    std::vector<Expr> flat;
    flat.reserve(factors.size());
    for (const Expr& f : factors) {
      if (f.kind() == Kind::Mul)
        flat.insert(flat.end(), f.operands().begin(), f.operands().end());
      else
        flat.push_back(f);
    }

    // Distribute over the first sum, if any.
    for (std::size_t i = 0; i < flat.size(); ++i) {
      if (flat[i].kind() != Kind::Add) continue;
      Expr sum = flat[i];
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(i));
      std::vector<Expr> terms;
      terms.reserve(sum.operands().size());
      for (const Expr& t : sum.operands()) {
        std::vector<Expr> rest = flat;
        rest.push_back(t);
        terms.push_back(mul(std::move(rest)));
      }
      return add(std::move(terms));
    }

    Rational coeff(1);
    std::map<Expr, Rational, ExprLess> groups;
    for (const Expr& f : flat) {
      if (f.is_number()) {
        coeff = coeff * f.number_value();
      } else if (f.kind() == Kind::Pow) {
        auto [it, inserted] = groups.emplace(f.pow_base(), f.pow_exp());
        if (!inserted) it->second = it->second + f.pow_exp();
      } else {
        auto [it, inserted] = groups.emplace(f, Rational(1));
        if (!inserted) it->second = it->second + Rational(1);
      }
    }
    if (coeff.is_zero()) return number(0);

    std::vector<Expr> rebuilt;
    rebuilt.reserve(groups.size());
    bool rescan = false;
    for (const auto& [base, e] : groups) {
      if (e.is_zero()) continue;
      Expr r = pow(base, e);
      if (r.is_number()) {
        coeff = coeff * r.number_value();
      } else {
        if (r.kind() == Kind::Mul || r.kind() == Kind::Add) rescan = true;
        rebuilt.push_back(r);
      }
    }
    if (coeff.is_zero()) return number(0);
    if (rescan) {
      rebuilt.push_back(number(coeff));
      factors = std::move(rebuilt);
      continue;
    }

    std::sort(rebuilt.begin(), rebuilt.end(), ExprLess{});
    if (rebuilt.empty()) return number(coeff);
    if (coeff.is_one() && rebuilt.size() == 1) return rebuilt[0];

    std::vector<Expr> kids;
    kids.reserve(rebuilt.size() + 1);
    if (!coeff.is_one()) kids.push_back(number(coeff));
    kids.insert(kids.end(), rebuilt.begin(), rebuilt.end());
    if (kids.size() == 1) return kids[0];
    Node n;
    n.kind = Kind::Mul;
    n.kids = std::move(kids);
    return make(std::move(n));
  }
  throw EngineError("product normalization did not converge");
}

Expr Expr::add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (const Expr& t : terms) {
    if (t.kind() == Kind::Add)
      flat.insert(flat.end(), t.operands().begin(), t.operands().end());
    else
      flat.push_back(t);
  }

  Rational csum(0);
  std::map<Expr, Rational, ExprLess> collected;  // monomial part -> coefficient
  for (const Expr& t : flat) {
    if (t.is_number()) {
      csum = csum + t.number_value();
      continue;
    }
    Rational coeff(1);
    Expr rest = t;
    if (t.kind() == Kind::Mul && t.operands().front().is_number()) {
      coeff = t.operands().front().number_value();
      rest = raw_mul_tail(t.operands());
    }
    auto [it, inserted] = collected.emplace(std::move(rest), coeff);
    if (!inserted) it->second = it->second + coeff;
  }

  std::vector<Expr> out;
  out.reserve(collected.size() + 1);
  for (const auto& [rest, coeff] : collected) {
    if (coeff.is_zero()) continue;
    out.push_back(coeff.is_one() ? rest : mul({number(coeff), rest}));
  }
  if (!csum.is_zero()) out.push_back(number(csum));

  std::sort(out.begin(), out.end(), ExprLess{});
  if (out.empty()) return number(0);
  if (out.size() == 1) return out[0];
  Node n;
  n.kind = Kind::Add;
  n.kids = std::move(out);
  return make(std::move(n));
}

namespace {

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Number: return 0;
    case Kind::Symbol: return 1;
    case Kind::Kernel: return 2;
    case Kind::Pow: return 3;
    case Kind::Mul: return 4;
    case Kind::Add: return 5;
  }
  return 6;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  int ra = kind_rank(a.kind());
  int rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Kind::Number:
      return compare(a.number_value(), b.number_value());
    case Kind::Symbol: {
      int c = a.symbol_name().compare(b.symbol_name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Kernel: {
      if (a.kernel_tag() != b.kernel_tag())
        return static_cast<int>(a.kernel_tag()) < static_cast<int>(b.kernel_tag())
                   ? -1
                   : 1;
      return compare(a.kernel_arg(), b.kernel_arg());
    }
    case Kind::Pow: {
      int c = compare(a.pow_base(), b.pow_base());
      if (c != 0) return c;
      return compare(a.pow_exp(), b.pow_exp());
    }
    case Kind::Mul:
    case Kind::Add: {
      const auto& ka = a.operands();
      const auto& kb = b.operands();
      std::size_t n = std::min(ka.size(), kb.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(ka[i], kb[i]);
        if (c != 0) return c;
      }
      if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  struct Walker {
    std::set<std::string>& out;
    void walk(const Expr& e) {
      switch (e.kind()) {
        case Kind::Number:
          return;
        case Kind::Symbol:
          out.insert(e.symbol_name());
          return;
        case Kind::Kernel:
          walk(e.kernel_arg());
          return;
        case Kind::Pow:
          walk(e.pow_base());
          return;
        case Kind::Mul:
        case Kind::Add:
          for (const Expr& k : e.operands()) walk(k);
          return;
      }
    }
  } w{out};
  w.walk(e);
  return out;
}

Expr substitute(const Expr& e, std::string_view symbol, const Expr& replacement) {
  switch (e.kind()) {
    case Kind::Number:
      return e;
    case Kind::Symbol:
      return e.symbol_name() == symbol ? replacement : e;
    case Kind::Kernel:
      return Expr::kernel(e.kernel_tag(),
                          substitute(e.kernel_arg(), symbol, replacement));
    case Kind::Pow:
      return Expr::pow(substitute(e.pow_base(), symbol, replacement),
                       e.pow_exp());
    case Kind::Mul:
    case Kind::Add: {
      std::vector<Expr> kids;
      kids.reserve(e.operands().size());
      bool changed = false;
      for (const Expr& k : e.operands()) {
        kids.push_back(substitute(k, symbol, replacement));
        changed = changed || compare(kids.back(), k) != 0;
      }
      if (!changed) return e;
      return e.kind() == Kind::Mul ? Expr::mul(std::move(kids))
                                   : Expr::add(std::move(kids));
    }
  }
  return e;
}

Expr normalize(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol:
      return e;
    case Kind::Kernel:
      return Expr::kernel(e.kernel_tag(), normalize(e.kernel_arg()));
    case Kind::Pow:
      return Expr::pow(normalize(e.pow_base()), e.pow_exp());
    case Kind::Mul:
    case Kind::Add: {
      std::vector<Expr> kids;
      kids.reserve(e.operands().size());
      for (const Expr& k : e.operands()) kids.push_back(normalize(k));
      return e.kind() == Kind::Mul ? Expr::mul(std::move(kids))
                                   : Expr::add(std::move(kids));
    }
  }
  return e;
}

Expr differentiate(const Expr& e, std::string_view variable) {
  switch (e.kind()) {
    case Kind::Number:
      return Expr::number(0);
    case Kind::Symbol:
      return Expr::number(e.symbol_name() == variable ? 1 : 0);
    case Kind::Kernel: {
      const Expr& u = e.kernel_arg();
      Expr du = differentiate(u, variable);
      if (du.is_zero()) return du;
      switch (e.kernel_tag()) {
        case KernelTag::Sin:
          return Expr::kernel(KernelTag::Cos, u) * du;
        case KernelTag::Cos:
          return Expr::number(-1) * Expr::kernel(KernelTag::Sin, u) * du;
        case KernelTag::Tan:
          return pow(Expr::kernel(KernelTag::Sec, u), 2) * du;
        case KernelTag::Sec:
          return Expr::kernel(KernelTag::Sec, u) *
                 Expr::kernel(KernelTag::Tan, u) * du;
        case KernelTag::Tanh:
          return (Expr::number(1) - pow(Expr::kernel(KernelTag::Tanh, u), 2)) * du;
        case KernelTag::Exp:
          return Expr::kernel(KernelTag::Exp, u) * du;
        case KernelTag::Ln:
          return du / u;
      }
      return Expr::number(0);
    }
    case Kind::Pow: {
      Expr db = differentiate(e.pow_base(), variable);
      if (db.is_zero()) return db;
      return Expr::number(e.pow_exp()) *
             Expr::pow(e.pow_base(), e.pow_exp() - Rational(1)) * db;
    }
    case Kind::Add: {
      std::vector<Expr> parts;
      parts.reserve(e.operands().size());
      for (const Expr& k : e.operands()) parts.push_back(differentiate(k, variable));
      return Expr::add(std::move(parts));
    }
    case Kind::Mul: {
      std::vector<Expr> parts;
      const auto& kids = e.operands();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        Expr dk = differentiate(kids[i], variable);
        if (dk.is_zero()) continue;
        std::vector<Expr> factors = kids;
        factors[i] = dk;
        parts.push_back(Expr::mul(std::move(factors)));
      }
      return Expr::add(std::move(parts));
    }
  }
  return Expr::number(0);
}

double evaluate(const Expr& e, const Bindings& bindings) {
  double result = 0.0;
  switch (e.kind()) {
    case Kind::Number:
      result = e.number_value().to_double();
      break;
    case Kind::Symbol: {
      auto it = bindings.find(e.symbol_name());
      if (it == bindings.end()) throw UnboundSymbolError(e.symbol_name());
      result = it->second;
      break;
    }
    case Kind::Kernel: {
      double a = evaluate(e.kernel_arg(), bindings);
      switch (e.kernel_tag()) {
        case KernelTag::Sin:
          result = std::sin(a);
          break;
        case KernelTag::Cos:
          result = std::cos(a);
          break;
        case KernelTag::Tan:
        case KernelTag::Sec: {
          double c = std::cos(a);
          if (std::fabs(c) < kSingularTol)
            throw DomainError("trigonometric pole", to_string(e));
          result = e.kernel_tag() == KernelTag::Tan ? std::sin(a) / c : 1.0 / c;
          break;
        }
        case KernelTag::Tanh:
          result = std::tanh(a);
          break;
        case KernelTag::Exp:
          result = std::exp(a);
          break;
        case KernelTag::Ln:
          if (a <= 0.0)
            throw DomainError("logarithm of a non-positive value", to_string(e));
          result = std::log(a);
          break;
      }
      break;
    }
    case Kind::Pow: {
      double b = evaluate(e.pow_base(), bindings);
      const Rational& r = e.pow_exp();
      if (r.is_negative() && std::fabs(b) < kSingularTol)
        throw DomainError("singular denominator", to_string(e.pow_base()));
      if (!r.is_integer() && b < 0.0)
        throw DomainError("negative radicand", to_string(e.pow_base()));
      result = std::pow(b, r.to_double());
      break;
    }
    case Kind::Mul: {
      result = 1.0;
      for (const Expr& k : e.operands()) result *= evaluate(k, bindings);
      break;
    }
    case Kind::Add: {
      for (const Expr& k : e.operands()) result += evaluate(k, bindings);
      break;
    }
  }
  if (!std::isfinite(result))
    throw DomainError("non-finite value", to_string(e));
  return result;
}

}  // namespace lin4
