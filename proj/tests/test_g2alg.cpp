#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "g2roll/g2alg.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace g2roll;

namespace {

const LieAlgebra& algebra_k0c1() {
  static const LieAlgebra g = [] {
    const auto S = an_generators(Params(0, 1));
    return generate_g2(S[0], S[1], S[2], main_chart());
  }();
  return g;
}

const LieAlgebra& c_algebra() {
  static const LieAlgebra g = [] {
    const auto S = cdist_generators();
    return generate_g2(S[0], S[1], S[2], c_chart());
  }();
  return g;
}

QMatrix q(std::initializer_list<std::initializer_list<long>> rows) {
  QMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("exact linear algebra") {
  const QMatrix a = q({{2, 1, 0}, {4, 3, 1}, {0, 1, 5}});
  CHECK(determinant(a) == 8);  // 2(15 - 1) - 1(20 - 0)
  const auto inv = inverse(a);
  REQUIRE(inv);
  CHECK(a * *inv == QMatrix::identity(3));
  CHECK(rank(q({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}})) == 2);
  CHECK_FALSE(inverse(q({{1, 2}, {2, 4}})));
  const QMatrix ns = null_space(q({{1, 2, 3}, {2, 4, 6}}));
  CHECK(ns.cols() == 2);
  CHECK(q({{1, 2, 3}}) * ns == QMatrix(1, 2));
}

TEST_CASE("signature by congruence") {
  const Signature hyperbolic = signature(q({{0, 1}, {1, 0}}));
  CHECK(hyperbolic.positive == 1);
  CHECK(hyperbolic.negative == 1);
  const Signature s = signature(q({{1, 2, 0}, {2, 1, 0}, {0, 0, 0}}));  // eigenvalues 3, -1, 0
  CHECK(s.positive == 1);
  CHECK(s.negative == 1);
  CHECK(s.zero == 1);
  CHECK_THROWS(signature(q({{1, 2}, {3, 1}})));
}

TEST_CASE("generated fields match the listed ones for c = 1, kappa = 0") {
  const LieAlgebra& g = algebra_k0c1();
  REQUIRE(g.basis.size() == 14);
  CHECK(g.names == g2_names());
  for (const auto& f : listed_c1k0()) {
    INFO(f.name);
    CHECK(g.field(f.name) == f.field);
  }
  CHECK(lie_bracket(g.field("H1"), g.field("H2")).is_zero());
}

TEST_CASE("structure constants") {
  const StructureConstants& c = algebra_k0c1().structure;
  const std::size_t s1 = 0, s2 = 1, s4 = 3;
  for (std::size_t k = 0; k < 14; ++k) CHECK(c(s1, s2, k) == (k == s4 ? 1 : 0));
  CHECK(is_antisymmetric(c));
  CHECK(jacobi_holds(c));
  // Every structure constant reproduces the bracket exactly.
  const LieAlgebra& g = algebra_k0c1();
  for (std::size_t i = 0; i < 14; i += 3)
    for (std::size_t j = 0; j < 14; j += 2) {
      VectorField sum;
      for (std::size_t k = 0; k < 14; ++k)
        if (sgn(c(i, j, k)) != 0) sum = sum + c(i, j, k) * g.basis[k];
      CHECK(lie_bracket(g.basis[i], g.basis[j]) == sum);
    }
}

TEST_CASE("the structure constants do not depend on kappa, c or the chart") {
  const StructureConstants& ref = c_algebra().structure;
  CHECK(algebra_k0c1().structure == ref);
  for (const Params& p : {Params(1, 1), Params(Rational(-3, 2), Rational(1, 3))}) {
    const auto S = an_generators(p);
    CHECK(generate_g2(S[0], S[1], S[2], main_chart()).structure == ref);
  }
}

TEST_CASE("serial and parallel bracket tables agree") {
  const auto& basis = algebra_k0c1().basis;
  const auto serial = bracket_table(basis, Exec::Serial);
  CHECK(serial.size() == 91);
  CHECK(serial == bracket_table(basis, Exec::Parallel));
}

TEST_CASE("Killing form") {
  const StructureConstants& c = algebra_k0c1().structure;
  const QMatrix B = killing_form(c);
  CHECK(B.is_symmetric());
  // Independent route: tr(ad X ad Y) from explicit matrix products.
  for (std::size_t i = 0; i < 14; i += 5)
    for (std::size_t j = 0; j < 14; j += 3) {
      const QMatrix prod = ad_matrix(c, i) * ad_matrix(c, j);
      Rational tr = 0;
      for (std::size_t k = 0; k < 14; ++k) tr += prod(k, k);
      CHECK(B(i, j) == tr);
    }
  CHECK(determinant(B) != 0);
  const Signature s = signature(B);
  CHECK(s.positive == 8);
  CHECK(s.negative == 6);
  CHECK(s.zero == 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.to_double());
  CHECK((es.eigenvalues().array() > 0).count() == 8);
  CHECK(centralizer_dim(c, {12, 13}) == 2);
}

TEST_CASE("root system of type G2") {
  const RootDatum rd = root_decomposition(algebra_k0c1());
  REQUIRE(rd.roots.size() == 12);
  CHECK(rd.exact_eigenvectors);
  CHECK(rd.n_long == 6);
  CHECK(rd.n_short == 6);
  CHECK(rd.long_short_ratio == 3);
  CHECK(rd.max_angle_defect < 1e-10);
  CHECK(rd.cartan_dim == 2);
  REQUIRE(rd.cartan_matrix.rows() == 2);
  CHECK(rd.cartan_matrix == q({{2, -1}, {-3, 2}}));

  const std::set<std::pair<std::string, std::string>> figure{{"S1", "S5"}, {"S2", "S6"}, {"S3", "S4"},
                                                             {"L1", "L4"}, {"L2", "L5"}, {"L3", "L6"}};
  std::set<std::pair<std::string, std::string>> found;
  for (auto [a, b] : rd.antipodal) found.insert(a < b ? std::pair{a, b} : std::pair{b, a});
  CHECK(found == figure);

  for (const auto& r : rd.roots) {
    INFO(r.name);
    CHECK(r.is_long == (r.name[0] == 'L'));
    // The Killing-orthonormal frame reproduces the figure's coordinates.
    CHECK(r.x == doctest::Approx(r.fig_x).scale(1.0));
    CHECK(r.y == doctest::Approx(r.fig_y).scale(1.0));
    CHECK(std::hypot(r.x, r.y) == doctest::Approx(r.is_long ? std::sqrt(3.0) : 1.0));
  }
}

TEST_CASE("distribution symmetries") {
  const Params p(0, 1);
  const AnChart chart = build_chart(p);
  const LieAlgebra& g = algebra_k0c1();
  CHECK(symmetry_check(g.field("L1"), chart));  // -d_theta
  CHECK(symmetry_check(g.field("H1"), chart));
  CHECK(symmetry_check(g.field("H2"), chart));
  CHECK_FALSE(symmetry_check(VectorField::coordinate(Coord::H), chart));
  // S1 and S2 are sections of D whose bracket S4 leaves D; a section of D cannot
  // preserve D unless it brackets every other section back into D.
  const VectorField S4 = lie_bracket(g.field("S1"), g.field("S2"));
  CHECK_FALSE(pair(chart.Theta[2], S4).is_zero());
  CHECK_FALSE(symmetry_check(g.field("S1"), chart));
  CHECK_FALSE(symmetry_check(g.field("S2"), chart));
}

TEST_CASE("sl3 on the hypersurface c3 = 0") {
  const Sl3Data d = sl3_restrict(c_algebra());
  REQUIRE(d.fields.size() == 8);
  const Chart& C = c3zero_chart();
  const Params none;
  auto e = [&](const char* t) { return parse(t, none, C.names); };
  VectorField L3;
  L3[C.slot("c2")] = e("6*c1");
  L3[C.slot("c5")] = e("-6*c4");
  CHECK(d.fields[2] == L3);
  VectorField H1;
  H1[C.slot("c2")] = e("-6*c2");
  H1[C.slot("c4")] = e("2*c4");
  H1[C.slot("c5")] = e("-4*c5");
  CHECK(d.fields[6] == H1);
  const auto listed = listed_sl3_c3zero();
  for (std::size_t i = 0; i < 8; ++i) CHECK(d.fields[i] == listed[i].field);
  std::vector<std::size_t> idx;
  for (const auto& n : d.names) idx.push_back(c_algebra().index(n));
  const auto sub = restrict_structure(c_algebra().structure, idx);
  REQUIRE(sub);
  CHECK(*sub == d.structure);
  // The S-fields do not close among themselves.
  CHECK_FALSE(restrict_structure(c_algebra().structure, {0, 1, 2}));
}

TEST_CASE("projection to the plane-circle manifold") {
  for (const Params& p : {Params(0, 1), Params(1, 1), Params(-2, 1)}) {
    const auto S = an_generators(p);
    const LieAlgebra g = generate_g2(S[0], S[1], S[2], main_chart());
    const Sl3Data d = project_to_plane_circle(g, build_chart(p));
    const auto listed = listed_sl3_projected();
    for (std::size_t i = 0; i < 8; ++i) {
      INFO(listed[i].name);
      CHECK(d.fields[i] == listed[i].field);
    }
    std::vector<std::size_t> idx;
    for (const auto& n : d.names) idx.push_back(g.index(n));
    CHECK(*restrict_structure(g.structure, idx) == d.structure);
  }
  const Params one;
  VectorField H2;
  H2[Coord::Theta] = parse("-6*theta", one);
  H2[Coord::Phi] = parse("-6*phi", one);
  CHECK(listed_sl3_projected()[7].field == H2);
}

TEST_CASE("the conformal inversion") {
  const auto img = phi_map({1, 1, 1, 1});
  REQUIRE(img);
  CHECK(*img == Quad{Rational(2, 3), 1, 1, -3});
  CHECK_FALSE(phi_map({1, 1, 0, 1}));
  CHECK(swap_map({1, 2, 3, 4}) == Quad{2, 1, 4, 3});

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  int identity = 0, tried = 0;
  while (tried < 100) {
    Quad p;
    for (auto& v : p) {
      v = Rational(num(rng), den(rng));
      v.canonicalize();
    }
    std::optional<Quad> cur = p;
    for (int k = 0; k < 6 && cur; ++k) cur = phi_map(*cur);
    if (!cur) continue;
    ++tried;
    identity += *cur == p;
  }
  CHECK(identity == 100);

  const DihedralReport r = dihedral_check(5, 50);
  CHECK(r.phi6_identity);
  CHECK(r.phi_order == 6);
  CHECK(r.rescaling_identity);
  CHECK(r.root_group_order == 12);
  REQUIRE(r.phi_on_roots);
  REQUIRE(r.swap_on_roots);
}

TEST_CASE("closure failures are reported") {
  const Params p;
  VectorField a = VectorField::coordinate(Coord::Theta);
  VectorField b;
  b[Coord::Phi] = parse("theta^3", p);
  VectorField c;
  c[Coord::Q] = parse("phi", p);
  CHECK_THROWS(generate_g2(a, b, c, main_chart()));
}

TEST_CASE("exports") {
  const LieAlgebra& g = algebra_k0c1();
  const auto j = nlohmann::json::parse(brackets_json(g));
  CHECK(j["basis"].size() == 14);
  CHECK(j["brackets"].size() == 91);
  const auto& first = j["brackets"][0];
  CHECK(first["i"] == 0);
  CHECK(first["j"] == 1);
  CHECK(first["coeffs"] == nlohmann::json{{"S4", "1"}});

  const std::string csv = killing_csv(killing_form(g.structure));
  std::istringstream in(csv);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  REQUIRE(rows.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) {
    REQUIRE(rows[i].size() == 14);
    for (std::size_t k = 0; k < 14; ++k) CHECK(rows[i][k] == rows[k][i]);
  }

  const std::string svg = root_svg(root_decomposition(g));
  std::size_t arrows = 0;
  for (std::size_t pos = svg.find("<line class=\"root"); pos != std::string::npos;
       pos = svg.find("<line class=\"root", pos + 1))
    ++arrows;
  CHECK(arrows == 12);
  for (const char* name : {"S1", "S6", "L1", "L6"}) CHECK(svg.find(std::string(">") + name + "<") != std::string::npos);
}
