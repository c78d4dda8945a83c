#include "g2roll/hpoly.hpp"

#include <cassert>
#include <charconv>
#include <stdexcept>

namespace g2roll {

Rational parse_rational(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("not a rational: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    ++i;
  }
  auto digits = [&](std::size_t from, std::size_t to) {
    if (from >= to) throw bad();
    for (std::size_t k = from; k < to; ++k)
      if (text[k] < '0' || text[k] > '9') throw bad();
    return mpz_class(std::string(text.substr(from, to - from)));
  };
  const auto slash = text.find('/');
  mpz_class num, den(1);
  if (slash == std::string_view::npos) {
    num = digits(i, text.size());
  } else {
    num = digits(i, slash);
    den = digits(slash + 1, text.size());
    if (den == 0) throw bad();
  }
  Rational r(neg ? mpz_class(-num) : num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

HPoly::HPoly(const Rational& constant) {
  if (constant != 0) coeffs_.push_back(constant);
}

HPoly::HPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

HPoly HPoly::monomial(const Rational& coeff, unsigned degree) {
  if (coeff == 0) return {};
  std::vector<Rational> c(degree + 1);
  c[degree] = coeff;
  return HPoly(std::move(c));
}

void HPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

bool HPoly::is_one() const { return coeffs_.size() == 1 && coeffs_[0] == 1; }

bool HPoly::is_monomial() const {
  if (coeffs_.empty()) return false;
  for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i)
    if (coeffs_[i] != 0) return false;
  return true;
}

unsigned HPoly::valuation() const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0) return static_cast<unsigned>(i);
  return 0;
}

HPoly HPoly::operator-() const {
  HPoly r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

HPoly& HPoly::operator+=(const HPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

HPoly& HPoly::operator-=(const HPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

HPoly& HPoly::operator*=(const Rational& s) {
  if (s == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& c : coeffs_) c *= s;
  return *this;
}

HPoly operator*(const HPoly& a, const HPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.coeffs_.size() == 1) return b * a.coeffs_[0];
  if (b.coeffs_.size() == 1) return a * b.coeffs_[0];
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  Rational t;
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      if (b.coeffs_[j] == 0) continue;
      t = a.coeffs_[i] * b.coeffs_[j];
      c[i + j] += t;
    }
  }
  return HPoly(std::move(c));
}

void HPoly::divmod(const HPoly& a, const HPoly& b, HPoly& quot, HPoly& rem) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  rem = a;
  if (a.degree() < b.degree()) {
    quot = HPoly();
    return;
  }
  std::vector<Rational> q(a.coeffs_.size() - b.coeffs_.size() + 1);
  const Rational& lb = b.lead();
  while (!rem.is_zero() && rem.degree() >= b.degree()) {
    const auto shift = static_cast<std::size_t>(rem.degree() - b.degree());
    Rational f = rem.lead() / lb;
    q[shift] = f;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) rem.coeffs_[shift + j] -= f * b.coeffs_[j];
    rem.trim();
  }
  quot = HPoly(std::move(q));
}

HPoly HPoly::divided_by(const HPoly& b) const {
  if (b.is_constant()) {
    HPoly r = *this;
    r *= Rational(1) / b.coeffs_.at(0);
    return r;
  }
  if (b.is_monomial()) {
    HPoly r = shifted_down(static_cast<unsigned>(b.degree()));
    r *= Rational(1) / b.lead();
    return r;
  }
  HPoly q, r;
  divmod(*this, b, q, r);
  assert(r.is_zero());
  return q;
}

HPoly HPoly::shifted_down(unsigned n) const {
  if (n == 0 || is_zero()) return *this;
  assert(n <= valuation());
  return HPoly(std::vector<Rational>(coeffs_.begin() + n, coeffs_.end()));
}

HPoly HPoly::make_monic() const {
  if (is_zero() || lead() == 1) return *this;
  HPoly r = *this;
  r *= Rational(1) / lead();
  return r;
}

HPoly HPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> c(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) c[i - 1] = coeffs_[i] * static_cast<long>(i);
  return HPoly(std::move(c));
}

double HPoly::eval(double h) const {
  double r = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * h + it->get_d();
  return r;
}

Rational HPoly::eval(const Rational& h) const {
  Rational r = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * h + *it;
  return r;
}

std::string HPoly::str(std::string_view var) const {
  if (is_zero()) return "0";
  std::string out;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    const Rational& c = coeffs_[k];
    if (c == 0) continue;
    Rational a = abs(c);
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (k == 0) {
      out += a.get_str();
      continue;
    }
    if (a != 1) out += a.get_str() + "*";
    out += var;
    if (k > 1) out += "^" + std::to_string(k);
  }
  return out;
}

HPoly gcd(const HPoly& a, const HPoly& b) {
  if (a.is_zero()) return b.make_monic();
  if (b.is_zero()) return a.make_monic();
  if (a.is_constant() || b.is_constant()) return HPoly(Rational(1));
  // h^n against anything: only the power of h can be shared.
  if (a.is_monomial() || b.is_monomial()) {
    const unsigned n = std::min(a.valuation(), b.valuation());
    return HPoly::monomial(1, n);
  }
  HPoly x = a.make_monic(), y = b.make_monic();
  // Pull out the common power of h first; the cofactors are then coprime to h.
  const unsigned shared = std::min(x.valuation(), y.valuation());
  x = x.shifted_down(x.valuation());
  y = y.shifted_down(y.valuation());
  if (x.degree() < y.degree()) std::swap(x, y);
  HPoly q, r;
  while (!y.is_zero() && y.degree() > 0) {
    HPoly::divmod(x, y, q, r);
    x = std::move(y);
    y = r.make_monic();
  }
  HPoly g = y.is_zero() ? x.make_monic() : HPoly(Rational(1));
  if (shared == 0) return g;
  return g * HPoly::monomial(1, shared);
}

RatFunc::RatFunc(HPoly num, HPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  if (num_.is_zero()) {
    den_ = HPoly(Rational(1));
    return;
  }
  if (!den_.is_constant()) {
    HPoly g = gcd(num_, den_);
    if (!g.is_one()) {
      num_ = num_.divided_by(g);
      den_ = den_.divided_by(g);
    }
  }
  if (den_.lead() != 1) {
    Rational s = Rational(1) / den_.lead();
    num_ *= s;
    den_ *= s;
  }
}

Rational RatFunc::constant() const {
  assert(is_constant());
  return num_.coeff(0) / den_.coeff(0);
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) {
    HPoly n = a.num_ + b.num_;
    if (a.den_.is_one()) return RatFunc(std::move(n));
    return RatFunc(std::move(n), a.den_);
  }
  HPoly g = gcd(a.den_, b.den_);
  HPoly bd = b.den_.divided_by(g);
  HPoly ad = a.den_.divided_by(g);
  return RatFunc(a.num_ * bd + b.num_ * ad, a.den_ * bd);
}

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.den_.is_one() && b.den_.is_one()) return RatFunc(a.num_ * b.num_);
  // Cross-cancel so the product needs no further reduction.
  HPoly g1 = gcd(a.num_, b.den_);
  HPoly g2 = gcd(b.num_, a.den_);
  HPoly n = a.num_.divided_by(g1) * b.num_.divided_by(g2);
  HPoly d = a.den_.divided_by(g2) * b.den_.divided_by(g1);
  Rational l = d.lead();
  if (l != 1) {
    n *= Rational(1) / l;
    d *= Rational(1) / l;
  }
  return RatFunc(std::move(n), std::move(d), RatFunc::Reduced{});
}

RatFunc operator*(const RatFunc& a, const Rational& s) {
  if (s == 0 || a.is_zero()) return {};
  return RatFunc(a.num_ * s, a.den_, RatFunc::Reduced{});
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.is_zero()) throw std::domain_error("division by zero rational function");
  HPoly bn = b.num_;
  HPoly bd = b.den_;
  Rational l = bn.lead();
  bn *= Rational(1) / l;
  bd *= Rational(1) / l;
  return a * RatFunc(std::move(bd), std::move(bn), RatFunc::Reduced{});
}

RatFunc RatFunc::derivative() const {
  if (den_.is_one()) return RatFunc(num_.derivative());
  return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

double RatFunc::eval(double h) const {
  const double d = den_.eval(h);
  if (d == 0.0) throw std::domain_error("pole of coefficient at h = " + std::to_string(h));
  return num_.eval(h) / d;
}

Rational RatFunc::eval(const Rational& h) const {
  Rational d = den_.eval(h);
  if (d == 0) throw std::domain_error("pole of coefficient at h = " + h.get_str());
  return num_.eval(h) / d;
}

}  // namespace g2roll
