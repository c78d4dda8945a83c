#pragma once

#include "g2roll/geom.hpp"
#include "g2roll/linalg.hpp"
#include "g2roll/rolling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace g2roll {

enum class Exec { Serial, Parallel };

struct NamedField {
  std::string name;
  VectorField field;
};

/// c[i][j][k]: [b_i, b_j] = sum_k c[i][j][k] b_k.
class StructureConstants {
public:
  StructureConstants() = default;
  explicit StructureConstants(std::size_t n) : n_(n), c_(n * n * n) {}
  std::size_t dim() const { return n_; }
  Rational& operator()(std::size_t i, std::size_t j, std::size_t k) { return c_[(i * n_ + j) * n_ + k]; }
  const Rational& operator()(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * n_ + j) * n_ + k]; }
  friend bool operator==(const StructureConstants& a, const StructureConstants& b) {
    return a.n_ == b.n_ && a.c_ == b.c_;
  }

private:
  std::size_t n_ = 0;
  std::vector<Rational> c_;
};

struct LieAlgebra {
  Chart chart;
  std::vector<std::string> names;
  std::vector<VectorField> basis;
  StructureConstants structure;

  std::size_t index(std::string_view name) const;
  const VectorField& field(std::string_view name) const { return basis[index(name)]; }
};

/// A bracket that does not lie in the span of the basis.
class ClosureFailure : public std::runtime_error {
public:
  ClosureFailure(std::string bracket, std::string residual);
  const std::string& bracket() const { return bracket_; }
  const std::string& residual() const { return residual_; }

private:
  std::string bracket_, residual_;
};

struct SamplingOptions {
  std::uint64_t seed = 20240611;
  std::size_t points = 20;
  Exec exec = Exec::Parallel;
};

/// The basis order used throughout: S1..S6, L1..L6, H1, H2.
const std::vector<std::string>& g2_names();

/// S4..S6, L1..L6, H1, H2 from the generators by the fixed bracket scheme; checks that
/// the 14 fields are independent over R and that every bracket closes exactly.
LieAlgebra generate_g2(const VectorField& S1, const VectorField& S2, const VectorField& S3, const Chart& chart,
                       const SamplingOptions& opts = {});

/// [b_i, b_j] for i < j in lexicographic pair order.
std::vector<VectorField> bracket_table(const std::vector<VectorField>& basis, Exec exec);

/// Exact rank over Q of the fields evaluated and stacked at sampled rational points.
std::size_t sampled_rank(const std::vector<VectorField>& fields, const SamplingOptions& opts);

/// Exact structure constants; every candidate is verified by ring subtraction.
StructureConstants structure_constants(const std::vector<VectorField>& basis, const std::vector<std::string>& names,
                                       const SamplingOptions& opts);

bool is_antisymmetric(const StructureConstants& c);
bool jacobi_holds(const StructureConstants& c);

/// Matrix of ad(b_i): column k holds the coordinates of [b_i, b_k].
QMatrix ad_matrix(const StructureConstants& c, std::size_t i);
QMatrix killing_form(const StructureConstants& c);
/// Dimension of the common centralizer of the given basis elements.
std::size_t centralizer_dim(const StructureConstants& c, const std::vector<std::size_t>& elements);

struct RootEntry {
  std::string name;
  Rational l1, l2;  // eigenvalues of ad H1, ad H2
  Rational length2;  // Killing-dual squared length
  bool is_long = false;
  double x = 0, y = 0;  // Killing-orthonormal frame, short roots of unit length
  double fig_x = 0, fig_y = 0;  // ((l2 - l1)/4, sqrt(3)(l1 + l2)/12)
};

struct RootDatum {
  std::vector<RootEntry> roots;  // 12 entries in basis order
  std::vector<std::pair<std::string, std::string>> antipodal;  // pairs (a, b) with root(a) = -root(b)
  bool exact_eigenvectors = false;  // checked by ring brackets, not only by structure constants
  QMatrix cartan_gram;  // Killing form on span{H1, H2}
  Rational long_short_ratio;
  std::size_t n_long = 0, n_short = 0;
  double max_angle_defect = 0;  // distance of pairwise angles from multiples of 30 degrees
  QMatrix cartan_matrix;  // from a short and a long simple root, expected [[2,-1],[-3,2]]
  std::size_t cartan_dim = 0;  // centralizer of {H1, H2}
};

RootDatum root_decomposition(const LieAlgebra& g);

/// True iff V preserves the distribution: Theta_k([V, X^j]) = 0 exactly.
bool symmetry_check(const VectorField& V, const AnChart& chart);

struct Sl3Data {
  std::vector<std::string> names;  // L1..L6, H1, H2
  std::vector<VectorField> fields;
  Chart chart;
  StructureConstants structure;
};

/// Restriction of the c-chart fields L1..L6, H1, H2 to {c3 = 0}. Throws NotRelated when a
/// field is not tangent to the hypersurface.
Sl3Data sl3_restrict(const LieAlgebra& c_algebra, const SamplingOptions& opts = {});

/// Projection of the main-chart fields L1..L6, H1, H2 through pi onto (theta, phi, psi).
Sl3Data project_to_plane_circle(const LieAlgebra& main_algebra, const AnChart& chart,
                                const SamplingOptions& opts = {});

/// Sub-tensor of the structure constants on the given index subset, or nullopt when the
/// subset does not close.
std::optional<StructureConstants> restrict_structure(const StructureConstants& c, const std::vector<std::size_t>& idx);

// Transcribed fields.

/// S1, S2, S3 in the main chart for general (kappa, c).
std::array<VectorField, 3> an_generators(const Params& params);
/// S1, S2, S3 built from Z1, Z2, Z3 in the c chart.
std::array<VectorField, 3> cdist_generators();
/// Z1, Z2, Z3 in the c chart.
std::array<VectorField, 3> z_fields();
/// H1, H2 in the main chart for general (kappa, c).
std::array<VectorField, 2> listed_cartan(const Params& params);
/// All 14 fields for c = 1, kappa = 0, in basis order.
std::vector<NamedField> listed_c1k0();
/// L1..L6, H1, H2 on {c3 = 0} in the c3zero chart.
std::vector<NamedField> listed_sl3_c3zero();
/// L1..L6, H1, H2 on (theta, phi, psi) for c = 1.
std::vector<NamedField> listed_sl3_projected();

// The conformal inversion on {c3 = 0}.

using Quad = std::array<Rational, 4>;  // (c1, c2, c4, c5)

/// phi(c1, c2, c4, c5) = (c6/(3 c4), c5/c4, c1/c4, -3/c4), c6 = c1 c5 + c2 c4; nullopt when c4 = 0.
std::optional<Quad> phi_map(const Quad& p);
Quad swap_map(const Quad& p);
/// phi as an exact coordinate map of the c3zero chart.
CoordMap phi_coordmap();
/// 2 dc1 dc5 + 2 dc2 dc4 in the c3zero chart.
SymTensor split_metric_4d();

/// swap(c1, c2, c4, c5) = (c2, c1, c5, c4) as an exact coordinate map.
CoordMap swap_coordmap();

/// Permutation j = perm[i] with m_* L_i = lambda_i L_j o m for the six long-root fields of
/// the restricted sl3; nullopt when some image is not proportional to a long-root field.
std::optional<std::array<int, 6>> induced_root_permutation(const CoordMap& m, std::uint64_t seed = 7);

struct DihedralReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;  // orbits hitting c4 = 0
  bool phi6_identity = false;
  std::size_t phi_order = 0;
  /// Number of distinct point maps found among words in phi and swap, exploring at most
  /// group_bound elements; point_group_finite is false when the bound was hit.
  std::size_t point_group_order = 0;
  std::size_t group_bound = 0;
  bool point_group_finite = false;
  /// Order of phi o swap as a point map (0 when larger than the search bound).
  std::size_t phi_swap_order = 0;
  std::optional<std::array<int, 6>> phi_on_roots, swap_on_roots;
  /// Order of the permutation group generated on the six long-root lines.
  std::size_t root_group_order = 0;
  bool rescaling_identity = false;
};

DihedralReport dihedral_check(std::uint64_t seed, std::size_t points = 100, std::size_t group_bound = 200);

// Exports.

/// {"basis": [...], "brackets": [{"i":, "j":, "coeffs": {name: "p/q"}}]} for i < j.
std::string brackets_json(const LieAlgebra& g);
std::string killing_csv(const QMatrix& b);
std::string root_svg(const RootDatum& r);

}  // namespace g2roll
