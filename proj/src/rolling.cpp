#include "g2roll/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace g2roll {

namespace {

OneForm form(const Chart& chart, const Params& p, std::initializer_list<std::pair<const char*, const char*>> comps) {
  OneForm w;
  for (const auto& [name, text] : comps) w[chart.slot(name)] = parse(text, p, chart.names);
  return w;
}

VectorField field(const Chart& chart, const Params& p,
                  std::initializer_list<std::pair<const char*, const char*>> comps) {
  VectorField v;
  for (const auto& [name, text] : comps) v[chart.slot(name)] = parse(text, p, chart.names);
  return v;
}

}  // namespace

GeneralSurface sphere_profile() {
  return {[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
          [](double x) { return -std::sin(x); }, [](double x) { return -std::cos(x); },
          [](double x) { return std::sin(x); }};
}

GeneralSurface flat_profile() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Expr AnChart::dx_dh() const { return parse("(kappa*c^2 - h^2)/(2*c^3)", params); }

AnChart build_chart(const Params& params) {
  const Chart& M = main_chart();
  const Chart& C = c_chart();
  AnChart a;
  a.params = params;
  const Expr dxdh = a.dx_dh();
  const Expr s = Expr::harmonic(Harmonic::Sin, 1);
  const Expr c = Expr::harmonic(Harmonic::Cos, 1);
  const Expr h = Expr::var(Coord::H);

  a.chi[0] = OneForm::coordinate(Coord::Theta);
  a.chi[1] = OneForm::coordinate(Coord::Phi);
  a.chi[2] = dxdh * OneForm::coordinate(Coord::H);
  a.chi[3] = h * OneForm::coordinate(Coord::Q);

  a.omega[0] = form(M, params, {{"theta", "1"}, {"h", "-cos(psi)*(kappa*c^2 - h^2)/(2*c^3)"}, {"q", "-sin(psi)*h"}});
  a.omega[1] = form(M, params, {{"phi", "1"}, {"h", "sin(psi)*(kappa*c^2 - h^2)/(2*c^3)"}, {"q", "-cos(psi)*h"}});
  a.omega[2] = form(M, params, {{"psi", "1"}, {"q", "2*c^3/(kappa*c^2 - h^2)"}});
  a.omega[3] = s * a.chi[2] - c * a.chi[3];
  a.omega[4] = c * a.chi[2] + s * a.chi[3];

  const OneForm dphi = OneForm::coordinate(Coord::Phi), dtheta = OneForm::coordinate(Coord::Theta);
  a.t[0] = dphi + a.chi[2];
  a.t[1] = dphi - a.chi[2];
  a.t[2] = dtheta + a.chi[3];
  a.t[3] = dtheta - a.chi[3];

  a.X[0] = field(M, params,
                 {{"theta", "1"},
                  {"h", "2*c^3/(kappa*c^2 - h^2)*cos(psi)"},
                  {"q", "sin(psi)/h"},
                  {"psi", "-sin(psi)/h*2*c^3/(kappa*c^2 - h^2)"}});
  a.X[1] = field(M, params,
                 {{"phi", "1"},
                  {"h", "-2*c^3/(kappa*c^2 - h^2)*sin(psi)"},
                  {"q", "cos(psi)/h"},
                  {"psi", "-cos(psi)/h*2*c^3/(kappa*c^2 - h^2)"}});

  a.cmap.source = M;
  a.cmap.target = C;
  a.cmap.images[idx(C.slot("c1"))] =
      parse("6*c^3*theta - 4*h*(2*c^3*q + kappa*c^2*psi)*sin(psi) - h*(3*c^2*kappa - h^2)*cos(psi)", params);
  a.cmap.images[idx(C.slot("c2"))] =
      parse("6*c^3*phi - 4*h*(2*c^3*q + kappa*c^2*psi)*cos(psi) + h*(3*c^2*kappa - h^2)*sin(psi)", params);
  a.cmap.images[idx(C.slot("c3"))] = parse("2*c^3*q + kappa*c^2*psi", params);
  a.cmap.images[idx(C.slot("c4"))] = parse("-sin(psi)*h", params);
  a.cmap.images[idx(C.slot("c5"))] = parse("cos(psi)*h", params);

  a.Theta_c[0] = form(C, params, {{"c1", "1"}, {"c3", "-2*c4"}, {"c4", "-4*c3"}});
  a.Theta_c[1] = form(C, params, {{"c2", "1"}, {"c3", "2*c5"}, {"c5", "4*c3"}});
  a.Theta_c[2] = form(C, params, {{"c3", "1"}, {"c4", "c5"}, {"c5", "-c4"}});
  for (std::size_t i = 0; i < 3; ++i) a.Theta[i] = pullback_oneform(a.cmap, a.Theta_c[i]);

  // Engel coordinates as polynomials in the c's, composed with the c map.
  const Chart& R = r_chart();
  a.rmap.source = M;
  a.rmap.target = R;
  const auto cb = a.cmap.target_bindings();
  auto via_c = [&](const char* text) { return substitute(parse(text, params, C.names), cb); };
  a.rmap.images[idx(R.slot("r1"))] = via_c("c5");
  a.rmap.images[idx(R.slot("r2"))] = via_c("c4");
  a.rmap.images[idx(R.slot("r3"))] = via_c("c3");
  a.rmap.images[idx(R.slot("r4"))] = via_c("1/2*(c2 + 3*c3*c5)");
  a.rmap.images[idx(R.slot("r5"))] = via_c("1/2*(c1 - 3*c3*c4)");

  const auto sq = [](const OneForm& w) { return SymTensor::square(w); };
  const auto pr = [](const OneForm& u, const OneForm& v) { return SymTensor::product(u, v); };
  const Expr mixed = parse("-2*(kappa*c^2 - h^2)*h/(2*c^3)", params);
  const Expr w3sq = parse("(kappa*c^2 - h^2)^3/(6*c^6)", params);
  a.gtilde = sq(a.chi[0]) + sq(a.chi[1]) - sq(a.chi[2]) - sq(a.chi[3]) +
             mixed * (s * pr(a.omega[0], a.omega[2]) + c * pr(a.omega[1], a.omega[2])) + w3sq * sq(a.omega[2]) -
             sq(a.omega[0]) - sq(a.omega[1]);

  const Chart& P = plane_circle_chart();
  const Expr q_on_locus = parse("-kappa/(2*c)*psi", params);
  a.iota.source = P;
  a.iota.target = M;
  a.iota.images = {Expr::var(Coord::Theta), Expr::var(Coord::Phi), Expr(), q_on_locus, Expr::var(Coord::Psi)};

  a.pi.source = M;
  a.pi.target = P;
  a.pi.images[idx(Coord::Theta)] = Expr::var(Coord::Theta);
  a.pi.images[idx(Coord::Phi)] = Expr::var(Coord::Phi);
  a.pi.images[idx(Coord::Psi)] = Expr::var(Coord::Psi);
  a.pi.constraints = {Expr::var(Coord::H), Expr::var(Coord::Q) - q_on_locus};
  // q first: terms such as q^2/h only lose their pole once q is replaced.
  a.pi.locus = {Bindings{{Coord::Q, q_on_locus}}, Bindings{{Coord::H, Expr()}}};
  return a;
}

SymTensor engel_flat_metric() {
  const Chart& R = r_chart();
  auto d = [&](const char* n) { return OneForm::coordinate(R.slot(n)); };
  return Rational(2) * SymTensor::product(d("r1"), d("r5")) + Rational(2) * SymTensor::product(d("r2"), d("r4")) +
         SymTensor::square(d("r3"));
}

LambdaMu lambda_mu(const GeneralSurface& s, double x) {
  const double h = s.h(x), h1 = s.dh(x), h2 = s.d2h(x), h3 = s.d3h(x), h4 = s.d4h(x);
  if (h2 == 0.0) throw DegenerateProfile("h'' = 0: genericity condition fails");
  LambdaMu r;
  r.lambda = h3 * h1 * h - h2 * h1 * h1 - 3.0 * h2 * h2 * h;
  r.dlambda = h4 * h1 * h - 5.0 * h2 * h3 * h - 5.0 * h2 * h2 * h1;
  r.mu = 15.0 * r.lambda * h2 * h2 * h - 3.0 * h1 * h2 * (r.dlambda * h - 3.0 * r.lambda * h1) +
         5.0 * r.lambda * r.lambda;
  return r;
}

bool CubicSolution::has_multiple_root() const {
  return std::any_of(roots.begin(), roots.end(), [](const CubicRoot& r) { return r.multiplicity > 1; });
}

CubicSolution solve_h(const Params& params, double x) {
  const double kappa = params.kappa.get_d(), c = params.c.get_d(), alpha = params.alpha.get_d();
  const double p = -3.0 * kappa * c * c;
  const double q = 6.0 * c * c * c * (x + alpha);
  const auto f = [&](double t) { return (t * t + p) * t + q; };
  const auto df = [&](double t) { return 3.0 * t * t + p; };
  const auto scale = [&](double t) { return std::abs(t * t * t) + std::abs(p * t) + std::abs(q); };
  const auto polish = [&](double t) {
    for (int it = 0; it < 50; ++it) {
      const double d = df(t);
      if (d == 0.0) break;
      const double next = t - f(t) / d;
      if (!std::isfinite(next) || std::abs(f(next)) >= std::abs(f(t))) break;
      t = next;
    }
    return t;
  };

  CubicSolution sol;
  std::vector<double> roots;
  if (p == 0.0 && q == 0.0) {
    sol.roots.push_back({0.0, 3});
    sol.relative_residuals.push_back(0.0);
    return sol;
  }
  const double disc = -(4.0 * p * p * p + 27.0 * q * q);
  double r;
  if (disc > 0.0) {
    // Three distinct real roots; the k = 0 trigonometric root has the largest magnitude.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    r = m * std::cos(std::acos(arg) / 3.0);
  } else {
    const double s = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double A = -std::copysign(std::cbrt(std::abs(q) / 2.0 + s), q);
    const double B = A != 0.0 ? -p / (3.0 * A) : 0.0;
    r = A + B;
  }
  r = polish(r);
  roots.push_back(r);
  // Deflate to t^2 + r t + (r^2 + p).
  const double b = r, cc = r * r + p;
  const double qd = b * b - 4.0 * cc;
  if (qd >= 0.0) {
    const double sq = std::sqrt(qd);
    const double t1 = -0.5 * (b + std::copysign(sq, b));
    if (t1 != 0.0) {
      roots.push_back(polish(t1));
      roots.push_back(polish(cc / t1));
    } else {
      roots.push_back(0.0);
      roots.push_back(0.0);
    }
  } else if (qd > -1e-12 * std::max(1.0, b * b)) {
    roots.push_back(polish(-b / 2.0));
    roots.push_back(polish(-b / 2.0));
  }
  std::sort(roots.begin(), roots.end());
  const double merge_tol = 1e-7 * std::max(1.0, std::cbrt(std::abs(q)) + std::sqrt(std::abs(p)));
  for (double t : roots) {
    if (!sol.roots.empty() && std::abs(sol.roots.back().value - t) <= merge_tol) {
      auto& last = sol.roots.back();
      last.value = (last.value * last.multiplicity + t) / (last.multiplicity + 1);
      last.multiplicity += 1;
      continue;
    }
    sol.roots.push_back({t, 1});
  }
  for (auto& root : sol.roots) {
    const double sc = scale(root.value);
    sol.relative_residuals.push_back(sc == 0.0 ? 0.0 : std::abs(f(root.value)) / sc);
  }
  return sol;
}

double follow_branch(const Params& params, double x, double previous) {
  const auto sol = solve_h(params, x);
  double best = sol.roots.front().value;
  for (const auto& r : sol.roots)
    if (std::abs(r.value - previous) < std::abs(best - previous)) best = r.value;
  return best;
}

FirstIntegrals first_integrals(double h, double dh, double d2h, const Params& params) {
  if (d2h == 0.0) throw DegenerateProfile("first integrals: h'' = 0");
  if (dh == 0.0) throw DegenerateProfile("first integrals: h' = 0");
  const double c = params.c.get_d();
  return {h * dh * dh * dh / d2h, h * h / (c * c) + 2.0 * c / dh};
}

namespace {

// h' = 2c^3/(kappa c^2 - h^2) and its iterated derivatives along x, as exact functions of h.
struct AnDerivativeTable {
  std::array<RatFunc, 4> d;

  explicit AnDerivativeTable(const Params& p) {
    const Rational c3 = p.c * p.c * p.c;
    const RatFunc f(HPoly(Rational(2) * c3), HPoly({p.kappa * p.c * p.c, Rational(0), Rational(-1)}));
    d[0] = f;
    for (std::size_t i = 1; i < 4; ++i) d[i] = f * d[i - 1].derivative();
  }

  ProfileDerivatives at(double h) const {
    return {d[0].eval(h), d[1].eval(h), d[2].eval(h), d[3].eval(h)};
  }
};

}  // namespace

ProfileDerivatives an_nurowski_derivatives(const Params& params, double h) {
  return AnDerivativeTable(params).at(h);
}

GeneralSurface an_nurowski_profile(const Params& params, double x0, double h0) {
  auto table = std::make_shared<const AnDerivativeTable>(params);
  const double slope = table->at(h0).d1;
  auto hx = [params, x0, h0, slope](double x) { return follow_branch(params, x, h0 + slope * (x - x0)); };
  GeneralSurface s;
  s.h = hx;
  s.dh = [table, hx](double x) { return table->at(hx(x)).d1; };
  s.d2h = [table, hx](double x) { return table->at(hx(x)).d2; };
  s.d3h = [table, hx](double x) { return table->at(hx(x)).d3; };
  s.d4h = [table, hx](double x) { return table->at(hx(x)).d4; };
  return s;
}

double real_cbrt(double v) { return std::cbrt(v); }

namespace {

using Row = Eigen::Matrix<double, 1, 5>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

Mat5 sym(const Row& a, const Row& b) { return 0.5 * (a.transpose() * b + b.transpose() * a); }

Row unit(Coord c) {
  Row r = Row::Zero();
  r(static_cast<Eigen::Index>(idx(c))) = 1.0;
  return r;
}

struct GeneralFrame {
  double h, h1, h2, sp, cp;
  LambdaMu lm;
  std::array<Row, 4> chi;
  std::array<Row, 5> omega;
};

GeneralFrame general_frame(const GeneralSurface& s, const XPoint& p) {
  GeneralFrame f;
  const double x = p[idx(Coord::H)];
  f.h = s.h(x);
  f.h1 = s.dh(x);
  f.h2 = s.d2h(x);
  if (f.h == 0.0) throw DegenerateProfile("h = 0");
  if (f.h1 == 0.0) throw DegenerateProfile("h' = 0: the coframe divides by h'");
  f.lm = lambda_mu(s, x);
  f.sp = std::sin(p[idx(Coord::Psi)]);
  f.cp = std::cos(p[idx(Coord::Psi)]);
  f.chi = {unit(Coord::Theta), unit(Coord::Phi), unit(Coord::H), f.h * unit(Coord::Q)};
  f.omega[0] = f.chi[0] - f.cp * f.chi[2] - f.sp * f.chi[3];
  f.omega[1] = f.chi[1] + f.sp * f.chi[2] - f.cp * f.chi[3];
  f.omega[2] = unit(Coord::Psi) + f.h1 * unit(Coord::Q);
  f.omega[3] = f.sp * f.chi[2] - f.cp * f.chi[3];
  f.omega[4] = f.cp * f.chi[2] + f.sp * f.chi[3];
  return f;
}

}  // namespace

NurowskiCoframe nurowski_coframe_general(const GeneralSurface& s, const XPoint& p) {
  const GeneralFrame f = general_frame(s, p);
  const double h = f.h, h1 = f.h1, h2 = f.h2, lambda = f.lm.lambda, mu = f.lm.mu;
  const double sp = f.sp, cp = f.cp;
  const double k = real_cbrt(h2 / h);
  const double kinv = real_cbrt(h / h2);
  const double a = lambda / (10.0 * h * h2 * h2);
  const double m = mu / (30.0 * h * h1 * h1 * h2 * h2 * h2);
  const double b = (3.0 * h * h2 * h2 + lambda) / (3.0 * h1 * h2 * h2);

  NurowskiCoframe out;
  std::array<Row, 5> th;
  th[0] = f.omega[0];
  th[1] = f.omega[1];
  th[2] = kinv * f.omega[2];
  th[3] = k * (f.omega[3] + (a - m * cp * cp) * f.omega[1] + b * cp * f.omega[2]);
  th[4] = k * (f.omega[4] - (a - m * sp * sp) * f.omega[0] + 2.0 * m * cp * sp * f.omega[1] - b * sp * f.omega[2]);
  for (int i = 0; i < 5; ++i) {
    out.theta.row(i) = th[static_cast<std::size_t>(i)];
    out.omega.row(i) = f.omega[static_cast<std::size_t>(i)];
  }
  out.g = 2.0 * sym(th[0], th[4]) - 2.0 * sym(th[1], th[3]) + (4.0 / 3.0) * sym(th[2], th[2]);
  out.gtilde = kinv * out.g;
  return out;
}

Eigen::Matrix<double, 5, 5> rescaled_metric_closed_form(const GeneralSurface& s, const XPoint& p) {
  const GeneralFrame f = general_frame(s, p);
  const double h = f.h, h1 = f.h1, h2 = f.h2, lambda = f.lm.lambda, mu = f.lm.mu;
  const auto& w = f.omega;
  const auto& chi = f.chi;
  Mat5 g = sym(chi[0], chi[0]) + sym(chi[1], chi[1]) - sym(chi[2], chi[2]) - sym(chi[3], chi[3]);
  g -= (lambda / (5.0 * h * h2 * h2) + 1.0) * (sym(w[0], w[0]) + sym(w[1], w[1]));
  const Row mix = f.sp * w[0] + f.cp * w[1];
  g += mu / (15.0 * h * h1 * h1 * h2 * h2 * h2) * sym(mix, mix);
  g -= 2.0 * (3.0 * h * h2 * h2 + lambda) / (3.0 * h1 * h2 * h2) * (f.sp * sym(w[0], w[2]) + f.cp * sym(w[1], w[2]));
  g += 4.0 * h / (3.0 * h2) * sym(w[2], w[2]);
  return g;
}

Eigen::Matrix<double, 5, 5> x_to_h_chart(const Eigen::Matrix<double, 5, 5>& gx, const Params& params, double h) {
  const double kappa = params.kappa.get_d(), c = params.c.get_d();
  Mat5 J = Mat5::Identity();
  J(2, 2) = (kappa * c * c - h * h) / (2.0 * c * c * c);
  return J.transpose() * gx * J;
}

WarpedMetric an_nurowski_surface_metric(const Params& params) {
  const double kappa = params.kappa.get_d(), c = params.c.get_d();
  return {[=](double h) { return (kappa * c * c - h * h) / (2.0 * c * c * c); }, [](double h) { return h; }};
}

WarpedMetric plane_metric() {
  return {[](double) { return 1.0; }, [](double) { return 1.0; }};
}

WarpedMetric profile_metric(const GeneralSurface& s) {
  return {[](double) { return 1.0; }, s.h};
}

namespace {

double richardson_derivative(const std::function<double(double)>& fn, double u, double step) {
  const auto central = [&](double s) { return (fn(u + s) - fn(u - s)) / (2.0 * s); };
  return (4.0 * central(step / 2.0) - central(step)) / 3.0;
}

}  // namespace

double gauss_curvature(const WarpedMetric& m, double u) {
  const double f = m.f(u), w = m.w(u);
  if (f == 0.0 || w == 0.0) throw DegenerateProfile("gauss_curvature: singular point of the metric");
  const std::function<double(double)> inner = [&](double v) {
    return richardson_derivative(m.w, v, 1e-4) / m.f(v);
  };
  return -richardson_derivative(inner, u, 2e-3) / (f * w);
}

double an_nurowski_gauss_curvature(const Params& params, double h) {
  const double kappa = params.kappa.get_d(), c = params.c.get_d();
  const double d = kappa * c * c - h * h;
  return -8.0 * std::pow(c, 6) / (d * d * d);
}

std::array<JetField, 2> general_distribution_jets(const GeneralSurface& s, const XPoint& p) {
  const double x = p[idx(Coord::H)];
  const double h = s.h(x), h1 = s.dh(x), h2 = s.d2h(x), h3 = s.d3h(x);
  if (h == 0.0) throw DegenerateProfile("h = 0");
  const Jet xj = Jet::variable(x, idx(Coord::H));
  const Jet psi = Jet::variable(p[idx(Coord::Psi)], idx(Coord::Psi));
  const Jet hj = Jet::compose(xj, h, h1, h2);
  const Jet dhj = Jet::compose(xj, h1, h2, h3);
  const Jet inv_h = reciprocal(hj);
  const Jet sp = sin(psi), cp = cos(psi);
  const Jet one = Jet::constant(1.0), zero = Jet::constant(0.0);

  JetField v1{one, zero, cp, sp * inv_h, -(sp * dhj * inv_h)};
  JetField v2{zero, one, -sp, cp * inv_h, -(cp * dhj * inv_h)};
  return {v1, v2};
}

}  // namespace g2roll
