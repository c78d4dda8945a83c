#include "g2roll/numcheck.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

namespace g2roll {

namespace {

constexpr int N = 5;
using Christoffel = std::array<Mat5, N>;  // G[a](b, c) = Gamma^a_bc

inline std::size_t i3(int a, int b, int c) { return static_cast<std::size_t>((a * N + b) * N + c); }
inline std::size_t i4(int a, int b, int c, int d) { return static_cast<std::size_t>(((a * N + b) * N + c) * N + d); }

Point shifted(const Point& p, int k, double s) {
  Point q = p;
  q[static_cast<std::size_t>(k)] += s;
  return q;
}

/// Central difference with one Richardson level: (4 D(s/2) - D(s)) / 3.
template <class F>
auto richardson(const F& f, const Point& p, int k, double s) {
  auto D = [&](double t) { return ((f(shifted(p, k, t)) - f(shifted(p, k, -t))) / (2 * t)).eval(); };
  const auto coarse = D(s);
  const auto fine = D(s / 2);
  return ((4 * fine - coarse) / 3).eval();
}

Christoffel christoffel(const MetricCallback& m, const Point& p, double step) {
  const Mat5 g = m.g(p);
  const Mat5 ginv = g.inverse();
  std::array<Mat5, N> dg;  // dg[k] = d_k g
  for (int k = 0; k < N; ++k) dg[static_cast<std::size_t>(k)] = richardson(m.g, p, k, step);
  Christoffel G;
  for (int a = 0; a < N; ++a) {
    Mat5 ga = Mat5::Zero();
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c) {
        double s = 0;
        for (int d = 0; d < N; ++d)
          s += ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        ga(b, c) = 0.5 * s;
      }
    G[static_cast<std::size_t>(a)] = ga;
  }
  return G;
}

/// Christoffels as one 125 x 1 vector so that the Richardson helper can difference them.
using Vec125 = Eigen::Matrix<double, N * N * N, 1>;

Vec125 flatten(const Christoffel& G) {
  Vec125 v;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c) v(static_cast<Eigen::Index>(i3(a, b, c))) = G[a](b, c);
  return v;
}

}  // namespace

CurvatureReport weyl_at(const MetricCallback& m, const Point& p, const FiniteDifference& fd) {
  if (m.singular(p)) throw SingularPoint("weyl_at: point on the singular locus of " + m.name);
  CurvatureReport r;
  r.point = p;

  const Mat5 g = m.g(p);
  const Mat5 ginv = g.inverse();
  const Christoffel G = christoffel(m, p, fd.metric_step);
  auto gamma_vec = [&](const Point& x) { return flatten(christoffel(m, x, fd.metric_step)); };
  std::array<Vec125, N> dG;
  for (int k = 0; k < N; ++k) dG[static_cast<std::size_t>(k)] = richardson(gamma_vec, p, k, fd.christoffel_step);
  auto dGamma = [&](int k, int a, int b, int c) { return dG[k](static_cast<Eigen::Index>(i3(a, b, c))); };

  r.christoffel.resize(N * N * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c) r.christoffel[i3(a, b, c)] = G[a](b, c);

  // R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
  std::vector<double> up(N * N * N * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          double v = dGamma(c, a, d, b) - dGamma(d, a, c, b);
          for (int e = 0; e < N; ++e) v += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
          up[i4(a, b, c, d)] = v;
        }
  r.riemann.assign(N * N * N * N, 0.0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          double v = 0;
          for (int e = 0; e < N; ++e) v += g(a, e) * up[i4(e, b, c, d)];
          r.riemann[i4(a, b, c, d)] = v;
        }

  r.ricci.assign(N * N, 0.0);
  for (int b = 0; b < N; ++b)
    for (int d = 0; d < N; ++d) {
      double v = 0;
      for (int a = 0; a < N; ++a) v += up[i4(a, b, a, d)];
      r.ricci[static_cast<std::size_t>(b * N + d)] = v;
    }
  auto Ric = [&](int b, int d) { return r.ricci[static_cast<std::size_t>(b * N + d)]; };
  r.scalar = 0;
  for (int b = 0; b < N; ++b)
    for (int d = 0; d < N; ++d) r.scalar += ginv(b, d) * Ric(b, d);

  const double n = N;
  r.weyl.assign(N * N * N * N, 0.0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          const double ric_part =
              g(a, c) * Ric(b, d) - g(a, d) * Ric(b, c) + g(b, d) * Ric(a, c) - g(b, c) * Ric(a, d);
          const double gg = g(a, c) * g(b, d) - g(a, d) * g(b, c);
          r.weyl[i4(a, b, c, d)] =
              r.riemann[i4(a, b, c, d)] - ric_part / (n - 2) + r.scalar * gg / ((n - 1) * (n - 2));
        }

  for (double v : r.riemann) r.max_riemann = std::max(r.max_riemann, std::abs(v));
  for (double v : r.weyl) r.max_weyl = std::max(r.max_weyl, std::abs(v));
  const bool flat = r.max_riemann < 1e-12;
  const double scale = flat ? 1.0 : r.max_riemann;
  r.relative_weyl = r.max_weyl / scale;

  double asym = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          const double R = r.riemann[i4(a, b, c, d)];
          asym = std::max({asym, std::abs(R + r.riemann[i4(b, a, c, d)]), std::abs(R + r.riemann[i4(a, b, d, c)]),
                           std::abs(R - r.riemann[i4(c, d, a, b)])});
        }
  r.riemann_asymmetry = asym / scale;

  double trace = 0;
  for (int b = 0; b < N; ++b)
    for (int d = 0; d < N; ++d) {
      double v = 0;
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) v += ginv(a, c) * r.weyl[i4(a, b, c, d)];
      trace = std::max(trace, std::abs(v));
    }
  r.weyl_trace = trace / scale;
  r.step_failure = r.riemann_asymmetry > 1e-6;
  return r;
}

std::vector<CurvatureReport> weyl_sweep(const MetricCallback& m, const std::vector<Point>& points, Exec exec,
                                        const FiniteDifference& fd) {
  std::vector<CurvatureReport> out(points.size());
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = weyl_at(m, points[i], fd);
    return out;
  }
  std::vector<std::exception_ptr> errors(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = weyl_at(m, points[k], fd);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string to_json_line(const CurvatureReport& r) {
  nlohmann::ordered_json j;
  j["point"] = r.point;
  j["christoffel"] = r.christoffel;
  j["riemann"] = r.riemann;
  j["ricci"] = r.ricci;
  j["scalar"] = r.scalar;
  j["weyl"] = r.weyl;
  j["max_riemann"] = r.max_riemann;
  j["max_weyl"] = r.max_weyl;
  j["relative_weyl"] = r.relative_weyl;
  j["riemann_asymmetry"] = r.riemann_asymmetry;
  j["weyl_trace"] = r.weyl_trace;
  j["step_failure"] = r.step_failure;
  return j.dump();
}

MetricCallback an_metric(const AnChart& chart) {
  auto comps = std::make_shared<std::array<std::array<NumericExpr, N>, N>>();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      (*comps)[i][j] = NumericExpr(chart.gtilde(kAllCoords[i], kAllCoords[j]));
  const double k = chart.params.kappa.get_d();
  const double c = chart.params.c.get_d();
  MetricCallback m;
  m.name = "gtilde(kappa=" + chart.params.kappa.get_str() + ", c=" + chart.params.c.get_str() + ")";
  m.g = [comps](const Point& p) {
    Mat5 g;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g(i, j) = (*comps)[i][j](p);
    return g;
  };
  m.singular = [k, c](const Point& p) {
    const double h = p[idx(Coord::H)];
    return std::abs(h) < 1e-2 || std::abs(k * c * c - h * h) < 1e-2;
  };
  return m;
}

MetricCallback flat_engel_metric() {
  MetricCallback m;
  m.name = "2 dr1 dr5 + 2 dr2 dr4 + dr3^2";
  m.g = [](const Point&) {
    Mat5 g = Mat5::Zero();
    g(0, 4) = g(4, 0) = 1;
    g(1, 3) = g(3, 1) = 1;
    g(2, 2) = 1;
    return g;
  };
  return m;
}

MetricCallback general_metric(const GeneralSurface& s, std::string name) {
  MetricCallback m;
  m.name = std::move(name);
  m.g = [s](const Point& p) { return nurowski_coframe_general(s, p).gtilde; };
  m.singular = [s](const Point& p) {
    const double x = p[idx(Coord::H)];
    return std::abs(s.h(x)) < 1e-2 || std::abs(s.dh(x)) < 1e-2 || std::abs(s.d2h(x)) < 1e-2;
  };
  return m;
}

MetricCallback conformal_rescale(const MetricCallback& m, std::function<double(const Point&)> omega) {
  MetricCallback r;
  r.name = "rescaled " + m.name;
  r.g = [g = m.g, omega](const Point& p) {
    const double w = omega(p);
    return Mat5(w * w * g(p));
  };
  r.singular = m.singular;
  return r;
}

std::vector<Point> generic_points(const Params& params, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0), angle(0.0, 2 * std::numbers::pi), hs(0.5, 1.5);
  const double kc2 = Rational(params.kappa * params.c * params.c).get_d();
  std::vector<Point> out;
  out.reserve(n);
  while (out.size() < n) {
    Point p;
    p[idx(Coord::Theta)] = box(rng);
    p[idx(Coord::Phi)] = box(rng);
    p[idx(Coord::H)] = hs(rng);
    p[idx(Coord::Q)] = box(rng);
    p[idx(Coord::Psi)] = angle(rng);
    const double h = p[idx(Coord::H)];
    if (std::abs(kc2 - h * h) <= 0.1) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<Point> generic_profile_points(const GeneralSurface& s, double lo, double hi, std::size_t n,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0), angle(0.0, 2 * std::numbers::pi), xs(lo, hi);
  std::vector<Point> out;
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 100 * n + 1000) throw std::invalid_argument("generic_profile_points: no generic x in range");
    Point p;
    p[idx(Coord::Theta)] = box(rng);
    p[idx(Coord::Phi)] = box(rng);
    p[idx(Coord::H)] = xs(rng);
    p[idx(Coord::Q)] = box(rng);
    p[idx(Coord::Psi)] = angle(rng);
    const double x = p[idx(Coord::H)];
    if (std::abs(s.h(x)) < 0.1 || std::abs(s.dh(x)) < 0.1 || std::abs(s.d2h(x)) < 0.1) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<GrowthResult> growth_vector(const AnChart& chart, const std::vector<Point>& points, Exec exec) {
  const VectorField& X1 = chart.X[0];
  const VectorField& X2 = chart.X[1];
  const VectorField X3 = lie_bracket(X1, X2);
  const VectorField X4 = lie_bracket(X1, X3);
  const VectorField X5 = lie_bracket(X2, X3);
  const std::vector<VectorField> d1{X1, X2}, d2{X1, X2, X3}, d3{X1, X2, X3, X4, X5};
  std::vector<GrowthResult> out(points.size());
  auto one = [&](std::size_t i) {
    out[i].point = points[i];
    out[i].ranks = {rank_at(d1, points[i]), rank_at(d2, points[i]), rank_at(d3, points[i])};
  };
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<GrowthResult> growth_vector(const GeneralSurface& s, const std::vector<Point>& points, Exec exec) {
  std::vector<GrowthResult> out(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  auto one = [&](std::size_t i) {
    try {
      const auto V = general_distribution_jets(s, points[i]);
      const JetField V3 = jet_bracket(V[0], V[1]);
      const JetField V4 = jet_bracket(V[0], V3);
      const JetField V5 = jet_bracket(V[1], V3);
      auto row = [](const JetField& f) {
        std::array<double, kDim> r{};
        for (std::size_t k = 0; k < kDim; ++k) r[k] = f[k].value();
        return r;
      };
      std::vector<std::array<double, kDim>> rows{row(V[0]), row(V[1])};
      out[i].point = points[i];
      out[i].ranks[0] = numeric_rank(rows);
      rows.push_back(row(V3));
      out[i].ranks[1] = numeric_rank(rows);
      rows.push_back(row(V4));
      rows.push_back(row(V5));
      out[i].ranks[2] = numeric_rank(rows);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double ode_residual_at(double h, double d1, double d2, double d3) {
  return d3 * d1 * h - 3 * d2 * d2 * h - d2 * d1 * d1;
}

OdeReport ode_residual(const Params& params, std::size_t samples, std::uint64_t seed) {
  const double k = params.kappa.get_d();
  const double c = params.c.get_d();
  const double kc2 = k * c * c;
  const double guard = 0.1 * std::max(1.0, std::abs(kc2));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  OdeReport rep;
  std::size_t attempts = 0;
  while (rep.samples < samples) {
    if (++attempts > 100 * samples + 1000) throw std::runtime_error("ode_residual: sampling exhausted");
    const double x = xs(rng);
    const CubicSolution sol = solve_h(params, x);
    bool used = false;
    for (const auto& root : sol.roots) {
      const double h = root.value;
      if (root.multiplicity > 1 || std::abs(kc2 - h * h) < guard || std::abs(h) < 0.05) {
        ++rep.skipped;
        continue;
      }
      // The root must sit on a continuous branch: following it from a nearby x must
      // land back on it, otherwise two branches are about to cross.
      const double dx = 1e-6;
      const double next = follow_branch(params, x + dx, h);
      const ProfileDerivatives d = an_nurowski_derivatives(params, h);
      if (std::abs(next - h - d.d1 * dx) > 1e-6 * (1 + std::abs(h))) {
        ++rep.skipped;
        continue;
      }
      const double res = ode_residual_at(h, d.d1, d.d2, d.d3);
      const double scale =
          std::abs(d.d3 * d.d1 * h) + 3 * std::abs(d.d2 * d.d2 * h) + std::abs(d.d2 * d.d1 * d.d1);
      rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
      rep.max_rel_residual = std::max(rep.max_rel_residual, std::abs(res) / scale);
      const FirstIntegrals I = first_integrals(h, d.d1, d.d2, params);
      rep.max_I1_error = std::max(rep.max_I1_error, std::abs(I.I1 - c * c * c) / std::abs(c * c * c));
      rep.max_I2_error = std::max(rep.max_I2_error, std::abs(I.I2 - k) / std::max(1.0, std::abs(k)));
      used = true;
    }
    if (used) ++rep.samples;
  }
  return rep;
}

double profile_ode_residual(const GeneralSurface& s, const std::vector<double>& xs) {
  double worst = 0;
  for (double x : xs) worst = std::max(worst, std::abs(ode_residual_at(s.h(x), s.dh(x), s.d2h(x), s.d3h(x))));
  return worst;
}

}  // namespace g2roll
