#pragma once

#include "g2roll/g2alg.hpp"
#include "g2roll/rolling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace g2roll {

using Mat5 = Eigen::Matrix<double, 5, 5>;

struct MetricCallback {
  std::string name;
  std::function<Mat5(const Point&)> g;
  /// True on (or too close to) the excluded locus.
  std::function<bool(const Point&)> singular = [](const Point&) { return false; };
};

class SingularPoint : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Curvature at a point. Arrays are flat, row-major in their index order:
/// christoffel[a][b][c] = Gamma^a_bc, riemann[a][b][c][d] = R_abcd (all lower),
/// ricci[b][d], weyl[a][b][c][d] = C_abcd.
struct CurvatureReport {
  Point point{};
  std::vector<double> christoffel;
  std::vector<double> riemann;
  std::vector<double> ricci;
  double scalar = 0;
  std::vector<double> weyl;
  double max_riemann = 0;
  double max_weyl = 0;
  /// max |C| / max |R|, or max |C| when the Riemann tensor vanishes.
  double relative_weyl = 0;
  /// Largest violation of R_abcd = -R_bacd = -R_abdc = R_cdab, relative to max |R|.
  double riemann_asymmetry = 0;
  /// Largest |g^ac C_abcd|, relative to max |R|.
  double weyl_trace = 0;
  bool step_failure = false;
};

struct FiniteDifference {
  double metric_step = 1e-4;       // Christoffels from the metric
  double christoffel_step = 1e-3;  // Riemann from the Christoffels
};

CurvatureReport weyl_at(const MetricCallback& m, const Point& p, const FiniteDifference& fd = {});
std::vector<CurvatureReport> weyl_sweep(const MetricCallback& m, const std::vector<Point>& points, Exec exec,
                                        const FiniteDifference& fd = {});

std::string to_json_line(const CurvatureReport& r);

// Metric callbacks.

/// The exact rescaled metric of an An chart, evaluated in the (theta, phi, h, q, psi) chart.
MetricCallback an_metric(const AnChart& chart);
/// 2 dr1 dr5 + 2 dr2 dr4 + dr3^2.
MetricCallback flat_engel_metric();
/// Rescaled Nurowski metric of a profile in the (theta, phi, x, q, psi) chart, via the coframe.
MetricCallback general_metric(const GeneralSurface& s, std::string name);
/// Omega^2 g.
MetricCallback conformal_rescale(const MetricCallback& m, std::function<double(const Point&)> omega);

// Sampling.

/// Generic points: theta, phi, q in [-2, 2], psi in [0, 2pi), h in [0.5, 1.5] with
/// |kappa c^2 - h^2| > 0.1.
std::vector<Point> generic_points(const Params& params, std::size_t n, std::uint64_t seed);
/// Points of the x chart for a general profile; x drawn from [lo, hi] avoiding h, h', h'' near 0.
std::vector<Point> generic_profile_points(const GeneralSurface& s, double lo, double hi, std::size_t n,
                                          std::uint64_t seed);

// Growth vector.

struct GrowthResult {
  Point point{};
  std::array<int, 3> ranks{};  // rank of D, D + [D,D], D + [D,D] + [D,[D,D]]
  bool is_235() const { return ranks == std::array<int, 3>{2, 3, 5}; }
};

std::vector<GrowthResult> growth_vector(const AnChart& chart, const std::vector<Point>& points, Exec exec);
std::vector<GrowthResult> growth_vector(const GeneralSurface& s, const std::vector<Point>& points, Exec exec);

// Profile ODE h'''h'h - 3h''^2 h - h''h'^2 = 0.

struct OdeReport {
  std::size_t samples = 0;
  std::size_t skipped = 0;  // near-singular samples or branch jumps
  double max_abs_residual = 0;
  double max_rel_residual = 0;  // relative to |h'''h'h| + 3|h''^2 h| + |h''h'^2|
  double max_I1_error = 0;  // relative to c^3
  double max_I2_error = 0;  // relative to max(1, |kappa|)
};

/// Residual h'''h'h - 3h''^2 h - h''h'^2.
double ode_residual_at(double h, double d1, double d2, double d3);
/// Samples x along the cubic branches and evaluates the residual and first integrals.
OdeReport ode_residual(const Params& params, std::size_t samples, std::uint64_t seed = 1);
/// Residual of an arbitrary profile at the given x values (absolute residual).
double profile_ode_residual(const GeneralSurface& s, const std::vector<double>& xs);

}  // namespace g2roll
