#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "g2roll/expr.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace g2roll;

namespace {

const Params k0c1(0, 1);

Expr P(const char* text, const Params& p = k0c1) { return parse(text, p); }

/// Small random element of the ring: a few terms with rational coefficients, low powers,
/// one harmonic each and occasionally a 1/(h + a) factor.
Expr random_expr(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(-4, 4), expo(0, 2), kk(0, 3), coin(0, 3), den(1, 5);
  Expr e;
  for (int t = 0; t < 3; ++t) {
    Rational coef(small(rng), den(rng));
    coef.canonicalize();
    Expr term(coef);
    term = term * Expr::var(Coord::Theta).pow(static_cast<unsigned>(expo(rng)));
    term = term * Expr::var(Coord::Q).pow(static_cast<unsigned>(expo(rng)));
    if (coin(rng) == 0) term = term * Expr::var(Coord::Psi);
    if (coin(rng) == 0) term = term * Expr::var(Coord::Phi);
    const unsigned k = static_cast<unsigned>(kk(rng));
    term = term * Expr::harmonic(coin(rng) < 2 || k == 0 ? Harmonic::Cos : Harmonic::Sin, k);
    const int hp = expo(rng);
    term = term * Expr::var(Coord::H).pow(static_cast<unsigned>(hp));
    if (coin(rng) == 0) term = term * Expr(RatFunc(HPoly(Rational(1)), HPoly({Rational(den(rng)), Rational(1)})));
    e += term;
  }
  return e;
}

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-2, 2), h(0.5, 1.5), ang(0, 2 * std::numbers::pi);
  return {box(rng), box(rng), h(rng), box(rng), ang(rng)};
}

}  // namespace

TEST_CASE("parse normalizes trigonometric and rational input") {
  CHECK(P("sin(psi)^2 + cos(psi)^2") == Expr(1));
  CHECK(P("(kappa*c^2 - h^2)/(2*c^3)") == Rational(-1, 2) * Expr::var(Coord::H).pow(2));
  const Params k2c1(2, 1);
  CHECK(P("2*c*q + kappa*psi", k2c1) == Rational(2) * Expr::var(Coord::Q) + Rational(2) * Expr::var(Coord::Psi));
  CHECK(P("2*theta - theta - theta").is_zero());
}

TEST_CASE("parse reports the byte offset of a syntax error") {
  try {
    (void)P("theta + * phi");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 8);
  }
  CHECK_THROWS_AS(P("cos(psi"), ParseError);
  CHECK_THROWS_AS(P("theta $"), ParseError);
}

TEST_CASE("division only by pure h-polynomials") {
  CHECK_NOTHROW(P("theta/(h^2 + 1)"));
  CHECK_THROWS(P("1/theta"));
  CHECK_THROWS(P("1/(h + q)"));
  CHECK_THROWS(P("1/sin(psi)"));
}

TEST_CASE("product-to-sum on harmonics") {
  const Expr s1 = Expr::harmonic(Harmonic::Sin, 1), c1 = Expr::harmonic(Harmonic::Cos, 1);
  CHECK(s1 * s1 == Rational(1, 2) - Rational(1, 2) * Expr::harmonic(Harmonic::Cos, 2));
  CHECK(Expr::harmonic(Harmonic::Sin, 2) * c1 == Rational(1, 2) * s1 + Rational(1, 2) * Expr::harmonic(Harmonic::Sin, 3));
  CHECK(Expr::harmonic(Harmonic::Cos, 0) == Expr(1));
  CHECK(Expr::harmonic(Harmonic::Sin, 0).is_zero());
}

TEST_CASE("rational-in-h coefficients cancel") {
  CHECK(P("(1/h)*h^2") == Expr::var(Coord::H));
  CHECK(P("(h^2 - 1)/(h - 1)") == P("h + 1"));
  CHECK(P("(h^2 - 1)/(h - 1)").is_pure_h());
}

TEST_CASE("derivatives") {
  CHECK(P("psi*sin(psi)").derive(Coord::Psi) == P("sin(psi) + psi*cos(psi)"));
  CHECK(P("1/h").derive(Coord::H) == P("-1/h^2"));
  CHECK(P("h^3*cos(3*psi)").derive(Coord::Psi) == P("-3*h^3*sin(3*psi)"));
  CHECK(P("theta^2*q").derive(Coord::Q) == P("theta^2"));
  CHECK(P("theta^2*q").derive(Coord::Phi).is_zero());
}

TEST_CASE("substitution") {
  const Bindings h0{{Coord::H, Expr()}};
  CHECK(substitute(P("h^2"), h0).is_zero());
  const Params k2c3(2, 3);
  const Expr c3 = parse("2*c^3*q + kappa*c^2*psi", k2c3);
  const Expr q_on_locus = parse("-kappa/(2*c)*psi", k2c3);
  CHECK(substitute(c3, {{Coord::Q, q_on_locus}}).is_zero());
  CHECK_THROWS_AS(substitute(P("1/h"), h0), SingularSubstitution);
  // A removable pole is fine once reduced.
  CHECK(substitute(P("(h^2 + h)/h"), h0) == Expr(1));
}

TEST_CASE("evaluation") {
  Point p{0, 0, 1, 0, std::numbers::pi / 4};
  CHECK(P("sin(2*psi)").eval(p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(P("theta*h + q").eval(Point{2, 0, 3, -1, 0}) == doctest::Approx(5.0));
  CHECK_THROWS_AS((void)P("1/(h - 1)").eval(Point{0, 0, 1, 0, 0}), PoleError);
}

TEST_CASE("print round-trips") {
  for (const char* text : {"h^3*cos(3*psi)", "theta*phi - 1/2*q^2*sin(psi)", "psi*cos(2*psi)/(h^2 + 1)",
                           "-(kappa*c^2 - h^2)/(2*c^3*h)*sin(psi)"}) {
    const Expr e = P(text, Params(3, 2));
    CHECK(parse(e.str(), Params(3, 2)) == e);
  }
  CHECK(P("h^3*cos(3*psi)").str() == "h^3*cos(3*psi)");
}

TEST_CASE("ring axioms on random expressions") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    const Expr a = random_expr(rng), b = random_expr(rng), c = random_expr(rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK(a + b == b + a);
    CHECK((a - a).is_zero());
  }
}

TEST_CASE("Leibniz rule in every slot") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 25; ++i) {
    const Expr a = random_expr(rng), b = random_expr(rng);
    for (Coord c : kAllCoords) CHECK((a * b).derive(c) == a.derive(c) * b + a * b.derive(c));
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    const Expr a = random_expr(rng), b = random_expr(rng);
    const Expr ab = a * b, sum = a + b;
    const NumericExpr na(a), nb(b), nab(ab);
    for (int k = 0; k < 20; ++k) {
      const Point p = random_point(rng);
      const double x = na(p), y = nb(p);
      CHECK(nab(p) == doctest::Approx(x * y).epsilon(1e-10).scale(1.0));
      CHECK(sum.eval(p) == doctest::Approx(x + y).epsilon(1e-10).scale(1.0));
      ++checked;
    }
  }
  CHECK(checked == 1000);
}

TEST_CASE("NumericExpr agrees with exact rational evaluation") {
  std::mt19937_64 rng(31);
  const Expr e = P("theta^2*h*sin(2*psi) - q/(h + 2)*cos(psi) + psi*phi");
  const NumericExpr n(e);
  for (int i = 0; i < 20; ++i) {
    const Rational t(static_cast<long>(rng() % 7) - 3, 5);
    RationalPoint rp;
    rp.x = {Rational(1, 3), Rational(-2, 7), Rational(5, 4), Rational(3, 2), Rational(1, 2)};
    std::tie(rp.cos_psi, rp.sin_psi) = RationalPoint::circle(t);
    // A consistent float point needs psi = atan2(sin, cos); the psi power uses the same value.
    const double psi = std::atan2(rp.sin_psi.get_d(), rp.cos_psi.get_d());
    rp.x[idx(Coord::Psi)] = Rational(psi);
    const Point p{rp.x[0].get_d(), rp.x[1].get_d(), rp.x[2].get_d(), rp.x[3].get_d(), psi};
    CHECK(e.eval(rp).get_d() == doctest::Approx(n(p)).epsilon(1e-12));
  }
}

TEST_CASE("canonical form is idempotent") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 30; ++i) {
    const Expr a = random_expr(rng);
    const Expr again = Expr::from_terms(a.terms());
    CHECK(again == a);
    CHECK(Expr::from_terms(again.terms()) == again);
  }
  // Duplicate and zero terms collapse.
  const Monomial m{};
  CHECK(Expr::from_terms({{m, RatFunc(Rational(2))}, {m, RatFunc(Rational(-2))}}).is_zero());
}

TEST_CASE("Params rejects c = 0") {
  CHECK_THROWS(Params(1, 0));
  CHECK(Params(Rational(1, 2), 3).str() == "kappa=1/2 c=3 alpha=0");
}

TEST_CASE("HPoly gcd and RatFunc reduction") {
  const HPoly a({Rational(-1), Rational(0), Rational(1)});  // h^2 - 1
  const HPoly b({Rational(1), Rational(1)});                 // h + 1
  CHECK(gcd(a, b) == b);
  const RatFunc r(a * Rational(3), b * Rational(6));
  CHECK(r.num() == HPoly({Rational(-1, 2), Rational(1, 2)}));
  CHECK(r.den() == HPoly(Rational(1)));
  CHECK_THROWS_AS(RatFunc(a, HPoly()), std::domain_error);
  CHECK(parse_rational("-6/4") == Rational(-3, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
}
