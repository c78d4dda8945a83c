#pragma once

#include "g2roll/geom.hpp"
#include "g2roll/jet.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace g2roll {

/// Profile of a surface of revolution dx^2 + h(x)^2 dq^2 together with enough
/// derivatives to evaluate the Nurowski coframe (the fourth one enters through lambda').
struct GeneralSurface {
  std::function<double(double)> h, dh, d2h, d3h, d4h;
};

GeneralSurface sphere_profile();
/// h(x) = x: a flat cone, h'' = 0 everywhere.
GeneralSurface flat_profile();

/// The exact objects of the rolling distribution of an An-Nurowski surface on the
/// plane, written in the chart (theta, phi, h, q, psi).
struct AnChart {
  Params params;
  std::array<OneForm, 4> chi;    // chi1..chi4
  std::array<OneForm, 5> omega;  // omega1..omega5
  std::array<OneForm, 4> t;      // t1..t4 on the product of the two surfaces
  std::array<OneForm, 3> Theta;  // pulled back from the c coordinates
  std::array<OneForm, 3> Theta_c;  // the same forms written in the c chart
  std::array<VectorField, 2> X;
  SymTensor gtilde;
  CoordMap cmap;  // M -> (c1..c5)
  CoordMap rmap;  // M -> (r1..r5)
  CoordMap iota;  // (theta, phi, psi) -> M onto {h = 0, q = -kappa psi / 2c}
  CoordMap pi;    // M -> (theta, phi, psi), defined on the same locus

  /// (kappa c^2 - h^2) / (2 c^3), i.e. dx/dh.
  Expr dx_dh() const;
};

AnChart build_chart(const Params& params);

/// The flat split-signature metric 2 dr1 dr5 + 2 dr2 dr4 + dr3^2 in the r chart.
SymTensor engel_flat_metric();

struct LambdaMu {
  double lambda;
  double dlambda;
  double mu;
};

class DegenerateProfile : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// lambda = h'''h'h - h''h'^2 - 3h''^2 h, its x-derivative, and mu.
LambdaMu lambda_mu(const GeneralSurface& s, double x);

struct CubicRoot {
  double value;
  int multiplicity;
};

/// Real roots of h^3 - 3 kappa c^2 h + 6 c^3 (x + alpha) = 0, ascending.
struct CubicSolution {
  std::vector<CubicRoot> roots;
  /// |residual| / (|h|^3 + |p h| + |q|) for each root.
  std::vector<double> relative_residuals;
  /// True when a repeated root is present (the profile degenerates there).
  bool has_multiple_root() const;
};

CubicSolution solve_h(const Params& params, double x);

/// Root nearest to `previous`; used to follow one branch of the cubic.
double follow_branch(const Params& params, double x, double previous);

struct FirstIntegrals {
  double I1;  // h h'^3 / h'', equals c^3 on solutions
  double I2;  // h^2 / c^2 + 2c / h', equals kappa on solutions
};

FirstIntegrals first_integrals(double h, double dh, double d2h, const Params& params);

/// Derivatives h', h'', h''', h'''' of an An-Nurowski profile as functions of h,
/// from h' = 2c^3 / (kappa c^2 - h^2).
struct ProfileDerivatives {
  double d1, d2, d3, d4;
};
ProfileDerivatives an_nurowski_derivatives(const Params& params, double h);

/// An-Nurowski profile following the cubic branch through (x0, h0).
GeneralSurface an_nurowski_profile(const Params& params, double x0, double h0);

/// Point in the chart (theta, phi, x, q, psi); x takes the h slot.
using XPoint = Point;

struct NurowskiCoframe {
  Eigen::Matrix<double, 5, 5> theta;   // rows theta1..theta5 in the basis (dtheta, dphi, dx, dq, dpsi)
  Eigen::Matrix<double, 5, 5> omega;   // rows omega1..omega5
  Eigen::Matrix<double, 5, 5> g;       // 2 theta1 theta5 - 2 theta2 theta4 + 4/3 theta3^2
  Eigen::Matrix<double, 5, 5> gtilde;  // g rescaled by (h''/h)^(-1/3)
};

/// Sign-preserving real cube root.
double real_cbrt(double v);

NurowskiCoframe nurowski_coframe_general(const GeneralSurface& s, const XPoint& p);

/// Closed form of the rescaled metric in terms of chi, omega, lambda, mu.
Eigen::Matrix<double, 5, 5> rescaled_metric_closed_form(const GeneralSurface& s, const XPoint& p);

/// Transformation of an x-chart tensor to the h-chart of an An-Nurowski profile.
Eigen::Matrix<double, 5, 5> x_to_h_chart(const Eigen::Matrix<double, 5, 5>& gx, const Params& params, double h);

/// Metric f(u)^2 du^2 + w(u)^2 dq^2 on a surface of revolution.
struct WarpedMetric {
  std::function<double(double)> f;
  std::function<double(double)> w;
};

WarpedMetric an_nurowski_surface_metric(const Params& params);
WarpedMetric plane_metric();
WarpedMetric profile_metric(const GeneralSurface& s);

/// Gauss curvature -1/(f w) d/du (w'/f), by Richardson-extrapolated differences.
double gauss_curvature(const WarpedMetric& m, double u);

/// Exact closed form -8c^6 / (kappa c^2 - h^2)^3.
double an_nurowski_gauss_curvature(const Params& params, double h);

/// The rolling distribution V1, V2 for a general profile as second-order jets at p
/// (chart theta, phi, x, q, psi). Throws DegenerateProfile when h(x) = 0.
std::array<JetField, 2> general_distribution_jets(const GeneralSurface& s, const XPoint& p);

}  // namespace g2roll
