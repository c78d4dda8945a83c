#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "g2roll/numcheck.hpp"

#include "json.hpp"

#include <cmath>
#include <numbers>

using namespace g2roll;

namespace {

/// Round sphere of radius 1 times a flat R^3 in signature (3,2)... not conformally flat, and
/// small enough to check against closed-form curvature: g = dx^2 + sin(x)^2 dy^2 on the
/// first two slots, -dz^2 - dw^2 + dv^2 on the rest. Its Riemann tensor is that of S^2.
MetricCallback sphere_times_flat() {
  MetricCallback m;
  m.name = "S2 x R(1,2)";
  m.g = [](const Point& p) {
    Mat5 g = Mat5::Zero();
    g(0, 0) = 1;
    g(1, 1) = std::sin(p[0]) * std::sin(p[0]);
    g(2, 2) = -1;
    g(3, 3) = -1;
    g(4, 4) = 1;
    return g;
  };
  m.singular = [](const Point& p) { return std::abs(std::sin(p[0])) < 1e-2; };
  return m;
}

/// A conformally flat metric e^{2f} (flat split metric), f linear plus quadratic.
MetricCallback conformally_flat() {
  MetricCallback flat = flat_engel_metric();
  return conformal_rescale(flat, [](const Point& p) { return std::exp(0.3 * p[0] - 0.2 * p[2] + 0.1 * p[4] * p[1]); });
}

}  // namespace

TEST_CASE("the flat split metric has no curvature") {
  const auto r = weyl_at(flat_engel_metric(), Point{0.2, -1.0, 0.5, 1.5, 3.0});
  CHECK(r.max_riemann < 1e-12);
  CHECK(r.max_weyl < 1e-8);
  CHECK(r.christoffel.size() == 125);
  CHECK(r.riemann.size() == 625);
  CHECK(r.ricci.size() == 25);
}

TEST_CASE("curvature of a product with a round sphere") {
  const double x = 1.1;
  const auto r = weyl_at(sphere_times_flat(), Point{x, 0.3, 0.0, 0.0, 0.0});
  // R_0101 = K (g00 g11 - g01^2) = sin^2 x with K = 1; Ricci = g on the sphere block; scalar 2.
  const double s2 = std::sin(x) * std::sin(x);
  CHECK(r.riemann[((0 * 5 + 1) * 5 + 0) * 5 + 1] == doctest::Approx(s2).epsilon(1e-7));
  CHECK(r.ricci[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.ricci[6] == doctest::Approx(s2).epsilon(1e-7));
  CHECK(r.scalar == doctest::Approx(2.0).epsilon(1e-7));
  // Gamma^0_11 = -sin x cos x, Gamma^1_01 = cot x.
  CHECK(r.christoffel[(0 * 5 + 1) * 5 + 1] == doctest::Approx(-std::sin(x) * std::cos(x)).epsilon(1e-9));
  CHECK(r.christoffel[(1 * 5 + 0) * 5 + 1] == doctest::Approx(std::cos(x) / std::sin(x)).epsilon(1e-9));
  CHECK(r.relative_weyl > 1e-2);
  CHECK(r.riemann_asymmetry < 1e-6);
  CHECK(r.weyl_trace < 1e-6);
  CHECK_FALSE(r.step_failure);
}

TEST_CASE("a conformally flat metric has vanishing Weyl tensor") {
  const auto r = weyl_at(conformally_flat(), Point{0.1, 0.4, -0.3, 0.2, 0.5});
  CHECK(r.max_riemann > 1e-3);
  CHECK(r.relative_weyl < 1e-6);
}

TEST_CASE("gtilde is conformally flat") {
  for (const Params& p : {Params(0, 1), Params(1, 1)}) {
    const auto m = an_metric(build_chart(p));
    for (const auto& r : weyl_sweep(m, generic_points(p, 10, 77), Exec::Parallel)) {
      CHECK(r.relative_weyl < 1e-6);
      CHECK(r.riemann_asymmetry < 1e-6);
      CHECK(r.weyl_trace < 1e-6);
    }
  }
}

TEST_CASE("the sphere example is not conformally flat") {
  const auto s = sphere_profile();
  for (const auto& r : weyl_sweep(general_metric(s, "sphere"), generic_profile_points(s, 0.2, 2.9, 8, 4), Exec::Serial))
    CHECK(r.relative_weyl > 1e-2);
}

TEST_CASE("Weyl tensor is conformally covariant") {
  const auto s = sphere_profile();
  const auto m = general_metric(s, "sphere");
  const auto omega = [](const Point& x) { return 1 + 0.3 * x[idx(Coord::H)]; };
  const auto mr = conformal_rescale(m, omega);
  for (const Point& p : generic_profile_points(s, 0.3, 2.8, 4, 6)) {
    const auto a = weyl_at(m, p), b = weyl_at(mr, p);
    const double w2 = omega(p) * omega(p);
    double err = 0, mx = 0;
    for (std::size_t i = 0; i < a.weyl.size(); ++i) {
      err = std::max(err, std::abs(b.weyl[i] - w2 * a.weyl[i]));
      mx = std::max(mx, std::abs(w2 * a.weyl[i]));
    }
    CHECK(err / mx < 1e-5);
  }
}

TEST_CASE("serial and parallel sweeps agree") {
  const Params p(2, 1);
  const auto m = an_metric(build_chart(p));
  const auto pts = generic_points(p, 6, 3);
  const auto a = weyl_sweep(m, pts, Exec::Serial), b = weyl_sweep(m, pts, Exec::Parallel);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(a[i].weyl == b[i].weyl);
}

TEST_CASE("singular points are refused") {
  const Params p(1, 1);
  const auto m = an_metric(build_chart(p));
  CHECK_THROWS_AS(weyl_at(m, Point{0, 0, 1.0, 0, 0}), SingularPoint);
  CHECK_THROWS_AS(weyl_sweep(m, {Point{0, 0, 0.0, 0, 0}}, Exec::Parallel), SingularPoint);
}

TEST_CASE("JSON lines report") {
  const auto r = weyl_at(flat_engel_metric(), Point{0, 0, 0, 0, 0});
  const std::string line = to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["weyl"].size() == 625);
  CHECK(j["point"].size() == 5);
  CHECK(j["step_failure"] == false);
}

TEST_CASE("generic points respect the sampling box") {
  const Params p(1, 1);
  for (const Point& x : generic_points(p, 200, 1)) {
    CHECK(std::abs(x[0]) <= 2);
    CHECK(x[idx(Coord::H)] >= 0.5);
    CHECK(x[idx(Coord::H)] <= 1.5);
    CHECK(std::abs(1 - x[idx(Coord::H)] * x[idx(Coord::H)]) > 0.1);
    CHECK(x[idx(Coord::Psi)] >= 0);
    CHECK(x[idx(Coord::Psi)] < 2 * std::numbers::pi);
  }
  CHECK(generic_points(p, 5, 9) == generic_points(p, 5, 9));
}

TEST_CASE("growth vector") {
  for (const Params& p : {Params(0, 1), Params(-1, 2)}) {
    const auto g = growth_vector(build_chart(p), generic_points(p, 50, 13), Exec::Parallel);
    for (const auto& r : g) CHECK(r.is_235());
  }
  const auto s = sphere_profile();
  for (const auto& r : growth_vector(s, generic_profile_points(s, 0.2, 2.9, 50, 5), Exec::Parallel)) CHECK(r.is_235());
  // h = x: the first bracket already stays inside D.
  const auto flat = flat_profile();
  for (const auto& r : growth_vector(flat, generic_points(Params(0, 1), 10, 2), Exec::Serial)) {
    CHECK(r.ranks[0] == 2);
    CHECK(r.ranks[1] == 2);
    CHECK(r.ranks[2] == 2);
  }
}

TEST_CASE("ODE residual along the cubic branches") {
  for (const Params& p : {Params(0, 1), Params(1, 1), Params(2, 1), Params(-1, 2)}) {
    const OdeReport r = ode_residual(p, 50, 3);
    CHECK(r.samples == 50);
    CHECK(r.max_rel_residual < 1e-9);
    CHECK(r.max_I1_error < 1e-8);
    CHECK(r.max_I2_error < 1e-8);
  }
}

TEST_CASE("the sphere does not solve the profile ODE") {
  const auto s = sphere_profile();
  for (double x : {0.8, 1.3, 2.2}) {
    const double res = profile_ode_residual(s, {x});
    CHECK(res == doctest::Approx(3 * std::pow(std::sin(x), 3)));
    CHECK(res > 0.1);
  }
  CHECK(ode_residual_at(2.0, -0.5, -0.25, -0.3125) == doctest::Approx(0.0).scale(1.0));
}
