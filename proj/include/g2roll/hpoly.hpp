#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace g2roll {

using Rational = mpq_class;

/// Parses "p", "-p" or "p/q" into a canonical rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

/// Dense univariate polynomial in h with rational coefficients; coeffs_[i] multiplies h^i.
/// Trailing zeros are always trimmed, so the zero polynomial has no coefficients.
class HPoly {
public:
  HPoly() = default;
  HPoly(const Rational& constant);
  explicit HPoly(std::vector<Rational> coeffs);

  static HPoly monomial(const Rational& coeff, unsigned degree);

  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  bool is_one() const;
  /// Single nonzero coefficient (a*h^n).
  bool is_monomial() const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// Index of the lowest nonzero coefficient; 0 for the zero polynomial.
  unsigned valuation() const;
  const Rational& lead() const { return coeffs_.back(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(unsigned i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

  HPoly operator-() const;
  HPoly& operator+=(const HPoly& o);
  HPoly& operator-=(const HPoly& o);
  HPoly& operator*=(const Rational& s);
  friend HPoly operator+(HPoly a, const HPoly& b) { return a += b; }
  friend HPoly operator-(HPoly a, const HPoly& b) { return a -= b; }
  friend HPoly operator*(const HPoly& a, const HPoly& b);
  friend HPoly operator*(HPoly a, const Rational& s) { return a *= s; }
  friend bool operator==(const HPoly& a, const HPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Euclidean division; divisor must be nonzero.
  static void divmod(const HPoly& a, const HPoly& b, HPoly& quot, HPoly& rem);
  /// Exact division (asserts zero remainder).
  HPoly divided_by(const HPoly& b) const;
  /// Divides by h^n (caller guarantees n <= valuation()).
  HPoly shifted_down(unsigned n) const;
  HPoly make_monic() const;
  HPoly derivative() const;

  double eval(double h) const;
  Rational eval(const Rational& h) const;

  std::string str(std::string_view var = "h") const;

private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Monic gcd; gcd(0, 0) = 0.
HPoly gcd(const HPoly& a, const HPoly& b);

/// Reduced rational function in h: gcd(num, den) = 1 and den monic.
class RatFunc {
public:
  RatFunc() : den_(Rational(1)) {}
  RatFunc(const Rational& c) : num_(c), den_(Rational(1)) {}
  RatFunc(HPoly num) : num_(std::move(num)), den_(Rational(1)) {}
  /// Reduces; throws std::domain_error on a zero denominator.
  RatFunc(HPoly num, HPoly den);

  const HPoly& num() const { return num_; }
  const HPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  /// Value of a constant RatFunc.
  Rational constant() const;

  RatFunc operator-() const { return RatFunc(-num_, den_, Reduced{}); }
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator*(const RatFunc& a, const Rational& s);
  /// Throws std::domain_error when b is zero.
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  RatFunc derivative() const;
  double eval(double h) const;
  Rational eval(const Rational& h) const;

private:
  struct Reduced {};
  RatFunc(HPoly num, HPoly den, Reduced) : num_(std::move(num)), den_(std::move(den)) {}
  HPoly num_;
  HPoly den_;
};

}  // namespace g2roll
