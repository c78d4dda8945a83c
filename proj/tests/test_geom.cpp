#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "g2roll/g2alg.hpp"
#include "g2roll/geom.hpp"
#include "g2roll/numcheck.hpp"
#include "g2roll/rolling.hpp"

#include <cmath>
#include <random>

using namespace g2roll;

namespace {

VectorField vf(const Params& p, std::initializer_list<std::pair<Coord, const char*>> comps) {
  VectorField v;
  for (const auto& [c, text] : comps) v[c] = parse(text, p);
  return v;
}

VectorField d(Coord c) { return VectorField::coordinate(c); }

}  // namespace

TEST_CASE("coordinate fields commute") {
  CHECK(lie_bracket(d(Coord::Theta), d(Coord::Phi)).is_zero());
  CHECK(lie_bracket(d(Coord::H), d(Coord::Psi)).is_zero());
}

TEST_CASE("[S1, S2] is the listed S4 for c = 1, kappa = 0") {
  const Params p(0, 1);
  const auto S = an_generators(p);
  const VectorField S4 = vf(p, {{Coord::Q, "1"}, {Coord::Theta, "sin(psi)*h"}, {Coord::Phi, "cos(psi)*h"}});
  CHECK(lie_bracket(S[0], S[1]) == S4);
}

TEST_CASE("[H1, H2] = 0 for general parameters") {
  for (const Params& p : {Params(0, 1), Params(Rational(3, 2), -2)}) {
    const auto H = listed_cartan(p);
    CHECK(lie_bracket(H[0], H[1]).is_zero());
  }
}

TEST_CASE("bracket is bilinear and antisymmetric") {
  const Params p(1, 2);
  const VectorField U = vf(p, {{Coord::Theta, "q*h"}, {Coord::Psi, "sin(psi)/h"}});
  const VectorField V = vf(p, {{Coord::Phi, "theta^2"}, {Coord::H, "cos(2*psi)"}, {Coord::Q, "psi"}});
  const VectorField W = vf(p, {{Coord::Q, "h^2*phi"}, {Coord::Psi, "theta"}});
  const Expr f = parse("h*cos(psi)", p);
  CHECK(lie_bracket(U, V) == Rational(-1) * lie_bracket(V, U));
  CHECK(lie_bracket(U + V, W) == lie_bracket(U, W) + lie_bracket(V, W));
  CHECK(lie_bracket(Rational(5, 3) * U, W) == Rational(5, 3) * lie_bracket(U, W));
  // [U, fW] = U(f) W + f [U, W]
  CHECK(lie_bracket(U, f * W) == U.apply(f) * W + f * lie_bracket(U, W));
}

TEST_CASE("Jacobi identity on random triples of the listed fields") {
  const auto fields = listed_c1k0();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, fields.size() - 1);
  for (int t = 0; t < 12; ++t) {
    const auto& U = fields[pick(rng)].field;
    const auto& V = fields[pick(rng)].field;
    const auto& W = fields[pick(rng)].field;
    const VectorField j = lie_bracket(U, lie_bracket(V, W)) + lie_bracket(V, lie_bracket(W, U)) +
                          lie_bracket(W, lie_bracket(U, V));
    CHECK(j.is_zero());
  }
}

TEST_CASE("pairings of the coframe with the distribution") {
  CHECK(pair(OneForm::coordinate(Coord::Theta), d(Coord::Theta)) == Expr(1));
  for (const Params& p : {Params(0, 1), Params(2, 1), Params(-1, 2)}) {
    const AnChart a = build_chart(p);
    for (int i = 0; i < 3; ++i)
      for (const auto& X : a.X) CHECK(pair(a.omega[i], X).is_zero());
    const auto S = an_generators(p);
    for (const auto& th : a.Theta) {
      CHECK(pair(th, S[0]).is_zero());
      CHECK(pair(th, S[1]).is_zero());
    }
    // The completing forms are dual to D: their pairing block is nondegenerate.
    const Expr det = pair(a.omega[3], a.X[0]) * pair(a.omega[4], a.X[1]) -
                     pair(a.omega[3], a.X[1]) * pair(a.omega[4], a.X[0]);
    CHECK_FALSE(det.is_zero());
  }
}

TEST_CASE("Theta forms pulled back through the c-map") {
  for (const Params& p : {Params(0, 1), Params(1, 1), Params(-1, 2), Params(Rational(1, 3), Rational(-1, 2))}) {
    const AnChart a = build_chart(p);
    const OneForm expected1 =
        parse("6*c^3", p) * a.omega[0] + parse("h*sin(psi)*(kappa*c^2 - h^2)", p) * a.omega[2];
    CHECK(a.Theta[0] == expected1);
    CHECK(a.Theta[2] == parse("-(h^2 - kappa*c^2)", p) * a.omega[2]);
  }
}

TEST_CASE("flat metric pulled back through the r-map") {
  for (const Params& p : {Params(0, 1), Params(2, 1)}) {
    const AnChart a = build_chart(p);
    CHECK(pullback_metric(a.rmap, engel_flat_metric()) == parse("6*c^6/(kappa*c^2 - h^2)", p) * a.gtilde);
  }
}

TEST_CASE("pullback through the identity map") {
  const AnChart a = build_chart(Params(1, 3));
  CoordMap id;
  id.source = id.target = main_chart();
  for (Coord c : kAllCoords) id.images[idx(c)] = Expr::var(c);
  CHECK(pullback_metric(id, a.gtilde) == a.gtilde);
  CHECK(pullback_oneform(id, a.omega[2]) == a.omega[2]);
}

TEST_CASE("pullback is natural with respect to pushforward") {
  // (m* w)(V) = w(m_* V) o m, spot-checked numerically.
  const Params p(1, 1);
  const AnChart a = build_chart(p);
  const OneForm w = a.Theta_c[0] + a.Theta_c[2];
  const OneForm pulled = pullback_oneform(a.cmap, w);
  const VectorField V = vf(p, {{Coord::Theta, "q"}, {Coord::H, "h*sin(psi)"}, {Coord::Psi, "1 + theta"}});
  const Expr lhs = pair(pulled, V);
  const VectorField pushed = pushforward(a.cmap, V);
  OneForm w_on_source;
  for (Coord c : kAllCoords) w_on_source[c] = substitute(w[c], a.cmap.target_bindings());
  const Expr rhs = pair(w_on_source, pushed);
  const NumericExpr nl(lhs), nr(rhs);
  for (const Point& x : generic_points(p, 100, 8)) CHECK(nl(x) == doctest::Approx(nr(x)).epsilon(1e-9).scale(1.0));
}

TEST_CASE("rank of the derived flags of D") {
  for (const Params& p : {Params(0, 1), Params(1, 1)}) {
    const AnChart a = build_chart(p);
    const VectorField X3 = lie_bracket(a.X[0], a.X[1]);
    const VectorField X4 = lie_bracket(a.X[0], X3), X5 = lie_bracket(a.X[1], X3);
    for (const Point& x : generic_points(p, 10, 4)) {
      CHECK(rank_at({a.X[0], a.X[1]}, x) == 2);
      CHECK(rank_at({a.X[0], a.X[1], X3}, x) == 3);
      CHECK(rank_at({a.X[0], a.X[1], X3, X4, X5}, x) == 5);
    }
  }
  CHECK(numeric_rank({{1, 0, 0, 0, 0}, {2, 0, 0, 0, 0}}) == 1);
  CHECK(numeric_rank({{1, 0, 0, 0, 0}, {0, 1e-12, 0, 0, 0}}) == 1);
}

TEST_CASE("projection through pi") {
  const Params p(0, 1);
  const AnChart a = build_chart(p);
  const auto listed = listed_c1k0();
  auto field = [&](const char* name) {
    for (const auto& f : listed)
      if (f.name == name) return f.field;
    throw std::logic_error("no field");
  };
  CHECK(related_through(a.pi, field("L1")) == Rational(-1) * d(Coord::Theta));
  VectorField L3;
  L3[Coord::Psi] = parse("-6*sin(psi)^2", p);
  L3[Coord::Phi] = parse("6*theta", p);
  CHECK(related_through(a.pi, field("L3")) == L3);
  try {
    (void)related_through(a.pi, field("S4"));
    FAIL("S4 is not tangent to the locus");
  } catch (const NotRelated& e) {
    CHECK(std::string(e.what()).find("q") != std::string::npos);
  }
}

TEST_CASE("SymTensor products are symmetric") {
  const Params p(1, 1);
  const AnChart a = build_chart(p);
  const SymTensor t = SymTensor::product(a.omega[0], a.omega[2]);
  for (Coord i : kAllCoords)
    for (Coord j : kAllCoords) CHECK(t(i, j) == t(j, i));
  CHECK(SymTensor::product(a.omega[0], a.omega[2]) == SymTensor::product(a.omega[2], a.omega[0]));
}
