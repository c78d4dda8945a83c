#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "g2roll/g2alg.hpp"
#include "g2roll/numcheck.hpp"
#include "g2roll/rolling.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace g2roll;

namespace {

const std::vector<Params> sweep{Params(0, 1), Params(1, 1), Params(2, 1), Params(-1, 2)};

Eigen::Matrix<double, 5, 5> numeric(const SymTensor& g, const Point& p) {
  Eigen::Matrix<double, 5, 5> m;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) m(i, j) = g(kAllCoords[i], kAllCoords[j]).eval(p);
  return m;
}

}  // namespace

TEST_CASE("S1 and S2 are multiples of the distribution fields") {
  for (const Params& p : sweep) {
    const AnChart a = build_chart(p);
    const auto S = an_generators(p);
    const Expr f = parse("(kappa*c^2 - h^2)/(2*c^3)", p);
    CHECK(S[0] == f * a.X[1]);
    CHECK(S[1] == f * a.X[0]);
  }
}

TEST_CASE("Engel coordinates reproduce the Theta forms") {
  for (const Params& p : sweep) {
    const AnChart a = build_chart(p);
    const Chart& R = r_chart();
    auto r = [&](const char* id) { return a.rmap.images[idx(R.slot(id))]; };
    auto dr = [&](const char* id) { return OneForm::differential(r(id)); };
    CHECK(dr("r3") + r("r1") * dr("r2") - r("r2") * dr("r1") == a.Theta[2]);
    CHECK(Rational(2) * (dr("r5") + Rational(1, 2) * (r("r2") * dr("r3") - r("r3") * dr("r2"))) == a.Theta[0]);
  }
}

TEST_CASE("the t-form annihilators vanish on D") {
  // cos(psi) t3 - (sin(psi) + 1) t1 and cos(psi) t2 + (sin(psi) + 1) t4.
  for (const Params& p : sweep) {
    const AnChart a = build_chart(p);
    const Expr cp = parse("cos(psi)", p), sp1 = parse("sin(psi) + 1", p);
    const OneForm A = cp * a.t[2] - sp1 * a.t[0];
    const OneForm B = cp * a.t[1] + sp1 * a.t[3];
    for (const auto& X : a.X) {
      CHECK(pair(A, X).is_zero());
      CHECK(pair(B, X).is_zero());
    }
  }
}

TEST_CASE("gtilde is symmetric and degenerates on the plane-circle locus") {
  for (const Params& p : sweep) {
    const AnChart a = build_chart(p);
    for (Coord i : kAllCoords)
      for (Coord j : kAllCoords) CHECK(a.gtilde(i, j) == a.gtilde(j, i));
    CHECK(pullback_metric(a.iota, a.gtilde).is_zero());
  }
}

TEST_CASE("gtilde has split signature, oriented by the conformal factor") {
  // pullback(flat) = 6c^6/(kappa c^2 - h^2) gtilde and the flat metric is (3,2), so gtilde
  // is (3,2) where kappa c^2 > h^2 and (2,3) beyond it.
  const Params p(1, 1);
  const AnChart a = build_chart(p);
  int seen_inside = 0, seen_outside = 0;
  for (const Point& x : generic_points(p, 20, 2)) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(numeric(a.gtilde, x));
    int pos = 0, neg = 0;
    for (int i = 0; i < 5; ++i) (es.eigenvalues()(i) > 0 ? pos : neg) += 1;
    const double h = x[idx(Coord::H)];
    const bool inside = 1 - h * h > 0;
    (inside ? seen_inside : seen_outside) += 1;
    CHECK(pos == (inside ? 3 : 2));
    CHECK(neg == (inside ? 2 : 3));
  }
  CHECK(seen_inside > 0);
  CHECK(seen_outside > 0);
}

TEST_CASE("cubic roots") {
  {
    const auto s = solve_h(Params(0, 1), -4.0 / 3.0);
    REQUIRE(s.roots.size() == 1);
    CHECK(s.roots[0].value == doctest::Approx(2.0).epsilon(1e-14));
  }
  {
    const auto s = solve_h(Params(0, 1), 0.0);
    REQUIRE(s.roots.size() == 1);
    CHECK(s.roots[0].value == doctest::Approx(0.0).scale(1.0));
    CHECK(s.roots[0].multiplicity == 3);
    CHECK(s.has_multiple_root());
  }
  {
    const auto s = solve_h(Params(1, 1), 0.0);
    REQUIRE(s.roots.size() == 3);
    CHECK(s.roots[0].value == doctest::Approx(-std::sqrt(3.0)));
    CHECK(s.roots[1].value == doctest::Approx(0.0).scale(1.0));
    CHECK(s.roots[2].value == doctest::Approx(std::sqrt(3.0)));
  }
}

TEST_CASE("every returned root satisfies the cubic") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-5, 5);
  for (const Params& p : {Params(0, 1), Params(1, 1), Params(-2, 3, Rational(1, 2)), Params(5, Rational(1, 2))}) {
    const double k = p.kappa.get_d(), c = p.c.get_d(), al = p.alpha.get_d();
    for (int i = 0; i < 200; ++i) {
      const double x = xs(rng);
      const auto s = solve_h(p, x);
      REQUIRE_FALSE(s.roots.empty());
      for (const auto& r : s.roots) {
        const double h = r.value;
        const double val = h * h * h - 3 * k * c * c * h + 6 * c * c * c * (x + al);
        const double scale = std::abs(h * h * h) + std::abs(3 * k * c * c * h) + std::abs(6 * c * c * c * (x + al));
        CHECK(std::abs(val) <= 1e-12 * std::max(scale, 1.0));
      }
    }
  }
}

TEST_CASE("first integrals on the h = 2 solution") {
  const auto I = first_integrals(2.0, -0.5, -0.25, Params(0, 1));
  CHECK(I.I1 == doctest::Approx(1.0));
  CHECK(I.I2 == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(first_integrals(1.0, 1.0, 0.0, Params(0, 1)), DegenerateProfile);
}

TEST_CASE("first integrals along a numerically integrated branch") {
  // Integrate h' = 2c^3/(kappa c^2 - h^2) by RK4 from the cubic root near sqrt(3) - 0.2 and
  // compare I1, I2 computed from finite differences of the numeric solution.
  const Params p(1, 1);
  auto f = [](double h) { return 2.0 / (1.0 - h * h); };
  double h = std::sqrt(3.0) - 0.2;
  const double step = -1e-4;  // towards larger h, away from the pole at h = 1
  for (int i = 0; i < 2000; ++i) {
    const double k1 = f(h), k2 = f(h + step / 2 * k1), k3 = f(h + step / 2 * k2), k4 = f(h + step * k3);
    h += step / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const double d1 = f(h);
  const double d2 = (f(h + 1e-5 * d1) - f(h - 1e-5 * d1)) / 2e-5;  // d/dx f(h(x))
  const auto I = first_integrals(h, d1, d2, p);
  CHECK(I.I1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(I.I2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("lambda and mu for the sphere") {
  const auto s = sphere_profile();
  const LambdaMu at_top = lambda_mu(s, std::numbers::pi / 2);
  CHECK(at_top.lambda == doctest::Approx(-3.0));
  CHECK(at_top.mu == doctest::Approx(0.0).scale(1.0));
  for (double x : {0.2, 0.9, 1.3, 2.8}) {
    const LambdaMu lm = lambda_mu(s, x);
    CHECK(std::abs(3 * std::sin(x) * std::sin(x) * std::sin(x) + lm.lambda) < 1e-10);
    CHECK(std::abs(lm.mu) < 1e-10);
  }
  CHECK_THROWS_AS(lambda_mu(s, 0.0), DegenerateProfile);
}

TEST_CASE("lambda vanishes on An-Nurowski profiles") {
  for (const Params& p : sweep) {
    const auto sol = solve_h(p, 0.7);
    for (const auto& r : sol.roots) {
      const double kc2 = p.kappa.get_d() * p.c.get_d() * p.c.get_d();
      if (std::abs(kc2 - r.value * r.value) < 0.2 || std::abs(r.value) < 0.1) continue;
      const GeneralSurface s = an_nurowski_profile(p, 0.7, r.value);
      const LambdaMu lm = lambda_mu(s, 0.7);
      const double scale = std::abs(s.d3h(0.7) * s.dh(0.7) * s.h(0.7)) + 1;
      CHECK(std::abs(lm.lambda) / scale < 1e-9);
    }
  }
}

TEST_CASE("sphere coframe reproduces the closed-form rescaled metric") {
  const auto s = sphere_profile();
  for (const Point& x : generic_profile_points(s, 0.2, 2.9, 20, 12)) {
    const NurowskiCoframe cf = nurowski_coframe_general(s, x);
    const double psi = x[idx(Coord::Psi)], hx = std::sin(x[idx(Coord::H)]), dh = std::cos(x[idx(Coord::H)]);
    // chi and omega rows written out independently in the basis (dtheta, dphi, dx, dq, dpsi).
    Eigen::Matrix<double, 5, 1> chi1, chi2, chi3, chi4, w1, w2, w3;
    chi1 << 1, 0, 0, 0, 0;
    chi2 << 0, 1, 0, 0, 0;
    chi3 << 0, 0, 1, 0, 0;
    chi4 << 0, 0, 0, hx, 0;
    w1 = chi1 - std::cos(psi) * chi3 - std::sin(psi) * chi4;
    w2 = chi2 + std::sin(psi) * chi3 - std::cos(psi) * chi4;
    w3 << 0, 0, 0, dh, 1;  // dpsi + (h'/h) chi4
    const Eigen::Matrix<double, 5, 5> expected = chi1 * chi1.transpose() + chi2 * chi2.transpose() -
                                                 chi3 * chi3.transpose() - chi4 * chi4.transpose() -
                                                 0.4 * (w1 * w1.transpose() + w2 * w2.transpose()) -
                                                 (4.0 / 3.0) * w3 * w3.transpose();
    CHECK((cf.gtilde - expected).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((rescaled_metric_closed_form(s, x) - cf.gtilde).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("theta3 at the top of the sphere uses the real cube root") {
  const Point x{0.1, 0.2, std::numbers::pi / 2, 0.3, 0.4};
  const NurowskiCoframe cf = nurowski_coframe_general(sphere_profile(), x);
  CHECK((cf.theta.row(2) + cf.omega.row(2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(real_cbrt(-8.0) == doctest::Approx(-2.0));
}

TEST_CASE("general coframe agrees with the exact An-Nurowski metric") {
  for (const Params& p : {Params(0, 1), Params(1, 1), Params(-1, 2)}) {
    const AnChart a = build_chart(p);
    for (const Point& hp : generic_points(p, 8, 21)) {
      const double h = hp[idx(Coord::H)];
      // Derivatives of h blow up like powers of 1/(kappa c^2 - h^2); close to the pole mu is
      // pure cancellation noise, so compare only where the frame is well conditioned.
      if (std::abs(p.kappa.get_d() * p.c.get_d() * p.c.get_d() - h * h) < 0.3) continue;
      // x from the cubic, then a profile following that branch.
      const double k = p.kappa.get_d(), c = p.c.get_d();
      const double x = -(h * h * h - 3 * k * c * c * h) / (6 * c * c * c);
      const GeneralSurface s = an_nurowski_profile(p, x, h);
      Point xp = hp;
      xp[idx(Coord::H)] = x;
      const auto gx = nurowski_coframe_general(s, xp).gtilde;
      const auto gh = x_to_h_chart(gx, p, h);
      const auto exact = numeric(a.gtilde, hp);
      CHECK((gh - exact).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, exact.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("Gauss curvatures") {
  CHECK(std::abs(gauss_curvature(plane_metric(), 0.7)) < 1e-12);
  CHECK(gauss_curvature(profile_metric(sphere_profile()), 1.1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(an_nurowski_gauss_curvature(Params(0, 1), 2.0) == doctest::Approx(0.125));
  CHECK(gauss_curvature(an_nurowski_surface_metric(Params(0, 1)), 2.0) == doctest::Approx(0.125).epsilon(1e-8));
  for (const Params& p : {Params(1, 1), Params(-1, 2)})
    for (double h : {0.5, 0.7, 1.4}) {
      const double exact = an_nurowski_gauss_curvature(p, h);
      CHECK(gauss_curvature(an_nurowski_surface_metric(p), h) == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("the flat profile breaks genericity") {
  const GeneralSurface flat = flat_profile();
  CHECK_THROWS_AS(lambda_mu(flat, 1.0), DegenerateProfile);
}
