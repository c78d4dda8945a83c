#pragma once

#include "g2roll/hpoly.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace g2roll {

/// Slots of the 5-dimensional chart. Polynomial variables are theta, phi, q and psi;
/// h is the only variable allowed in denominators. Harmonics cos(k psi), sin(k psi)
/// always refer to the psi slot.
enum class Coord : std::uint8_t { Theta = 0, Phi = 1, H = 2, Q = 3, Psi = 4 };
inline constexpr std::size_t kDim = 5;
inline constexpr std::array<Coord, kDim> kAllCoords{Coord::Theta, Coord::Phi, Coord::H, Coord::Q, Coord::Psi};
inline constexpr std::size_t idx(Coord c) { return static_cast<std::size_t>(c); }

/// Session constants. c must be nonzero.
struct Params {
  Rational kappa{0};
  Rational c{1};
  Rational alpha{0};

  Params() = default;
  Params(Rational kappa_, Rational c_, Rational alpha_ = 0);
  std::string str() const;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class SingularSubstitution : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Pole of some coefficient at the evaluation point.
class PoleError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

enum class Harmonic : std::uint8_t { Cos = 0, Sin = 1 };

/// Monomial theta^a phi^b q^c psi^d times cos(k psi) or sin(k psi), packed so that
/// the integer order is the canonical term order. cos(0 psi) is the constant harmonic.
struct Monomial {
  std::array<std::uint8_t, 4> exps{};  // theta, phi, q, psi
  std::uint8_t k = 0;
  Harmonic kind = Harmonic::Cos;

  std::uint64_t key() const {
    return (std::uint64_t(exps[0]) << 40) | (std::uint64_t(exps[1]) << 32) | (std::uint64_t(exps[2]) << 24) |
           (std::uint64_t(exps[3]) << 16) | (std::uint64_t(k) << 8) | std::uint64_t(kind);
  }
  bool is_unit() const { return key() == 0; }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.key() == b.key(); }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.key() < b.key(); }
};

struct Term {
  Monomial mono;
  RatFunc coeff;
};

/// Point of the chart for floating evaluation, indexed by Coord.
using Point = std::array<double, kDim>;

/// Exact evaluation point. The psi slot value feeds the polynomial psi powers while
/// (cos_psi, sin_psi) feed the harmonics; choosing them independently is sound for
/// identities of the ring because psi and its harmonics are algebraically independent.
struct RationalPoint {
  std::array<Rational, kDim> x;
  Rational cos_psi{1};
  Rational sin_psi{0};

  /// Rational point on the unit circle from the stereographic parameter t.
  static std::pair<Rational, Rational> circle(const Rational& t);
};

/// Element of Q(h)[theta, phi, q, psi] tensored with trigonometric polynomials in psi,
/// kept in canonical form: strictly increasing monomials, no zero coefficients.
class Expr {
public:
  Expr() = default;
  Expr(const Rational& c);
  Expr(RatFunc c);
  Expr(long c) : Expr(Rational(c)) {}

  static Expr var(Coord c);
  static Expr harmonic(Harmonic kind, unsigned k);
  static Expr from_terms(std::vector<Term> terms);  // normalizes

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// True when the expression is a function of h alone.
  bool is_pure_h() const;
  /// The coefficient of a pure-h expression (zero expression gives 0).
  RatFunc as_ratfunc() const;
  bool depends_on(Coord c) const;
  std::size_t size() const { return terms_.size(); }

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const RatFunc& s);
  friend Expr operator*(const RatFunc& s, const Expr& a) { return a * s; }
  friend Expr operator*(const Expr& a, const Rational& s);
  friend Expr operator*(const Rational& s, const Expr& a) { return a * s; }
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr pow(unsigned n) const;
  Expr derive(Coord c) const;

  double eval(const Point& p) const;
  Rational eval(const RationalPoint& p) const;

  /// Canonical text in the expression grammar. names supplies the identifier used
  /// for each slot (defaults: theta, phi, h, q, psi).
  std::string str() const;
  std::string str(const std::array<std::string, kDim>& names) const;

private:
  static Expr from_sorted(std::vector<Term> terms) {
    Expr e;
    e.terms_ = std::move(terms);
    return e;
  }
  std::vector<Term> terms_;
};

Expr add(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr derive(const Expr& a, Coord c);
bool is_zero(const Expr& a);

/// Simultaneous substitution of slots by expressions. The image of psi must be psi
/// itself whenever a harmonic is present; the image of h must turn every coefficient
/// denominator into a nonzero pure-h expression. Throws SingularSubstitution when a
/// reduced denominator vanishes identically.
using Bindings = std::map<Coord, Expr>;
Expr substitute(const Expr& a, const Bindings& bindings);

/// Floating copy of an Expr for repeated evaluation.
class NumericExpr {
public:
  NumericExpr() = default;
  explicit NumericExpr(const Expr& e);
  double operator()(const Point& p) const;

private:
  struct NTerm {
    std::array<std::uint8_t, 4> exps;
    std::uint8_t k;
    Harmonic kind;
    std::vector<double> num, den;
  };
  std::vector<NTerm> terms_;
  unsigned max_k_ = 0;
};

/// Identifier set of a chart: which name maps to which slot.
struct ChartNames {
  std::array<std::string, kDim> names;  // empty string: slot unused
  std::optional<Coord> lookup(std::string_view id) const;
};
const ChartNames& default_names();

/// Parses the expression grammar; kappa and c become the rationals of params.
Expr parse(std::string_view text, const Params& params);
Expr parse(std::string_view text, const Params& params, const ChartNames& chart);

}  // namespace g2roll
