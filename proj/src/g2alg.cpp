#include "g2roll/g2alg.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace g2roll {

namespace {

using Comps = std::initializer_list<std::pair<const char*, const char*>>;

VectorField field(const Chart& chart, const Params& p, Comps comps) {
  VectorField v;
  for (const auto& [name, text] : comps) v[chart.slot(name)] = parse(text, p, chart.names);
  return v;
}

std::string truncate(std::string s, std::size_t n = 400) {
  if (s.size() > n) s = s.substr(0, n) + " ...";
  return s;
}

Rational random_rational(std::mt19937_64& rng, int max_num, int max_den) {
  std::uniform_int_distribution<int> num(-max_num, max_num), den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

RationalPoint random_rational_point(std::mt19937_64& rng) {
  RationalPoint p;
  for (Coord c : kAllCoords) p.x[idx(c)] = random_rational(rng, 20, 7);
  // h in [1/2, 3/2]: away from h = 0 and the usual kappa c^2 = h^2 poles for small kappa.
  std::uniform_int_distribution<int> hnum(7, 20);
  p.x[idx(Coord::H)] = Rational(hnum(rng), 13);
  p.x[idx(Coord::H)].canonicalize();
  std::tie(p.cos_psi, p.sin_psi) = RationalPoint::circle(random_rational(rng, 9, 5));
  return p;
}

/// Evaluates every field at every point; points hitting a pole are replaced.
std::vector<std::vector<Rational>> evaluate_stacked(const std::vector<const VectorField*>& fields,
                                                    const SamplingOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<std::vector<Rational>> cols(fields.size());
  std::size_t accepted = 0, attempts = 0;
  while (accepted < opts.points) {
    if (++attempts > opts.points * 50) throw std::runtime_error("could not sample pole-free rational points");
    const RationalPoint p = random_rational_point(rng);
    std::vector<std::array<Rational, kDim>> vals(fields.size());
    bool ok = true;
    for (std::size_t f = 0; f < fields.size() && ok; ++f) {
      try {
        for (std::size_t i = 0; i < kDim; ++i) vals[f][i] = fields[f]->comp[i].eval(p);
      } catch (const std::domain_error&) {
        ok = false;
      }
    }
    if (!ok) continue;
    for (std::size_t f = 0; f < fields.size(); ++f)
      cols[f].insert(cols[f].end(), vals[f].begin(), vals[f].end());
    ++accepted;
  }
  return cols;
}

VectorField combination(const std::vector<VectorField>& basis, const std::vector<Rational>& coeffs) {
  VectorField r;
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (sgn(coeffs[k]) != 0) r = r + coeffs[k] * basis[k];
  return r;
}

}  // namespace

ClosureFailure::ClosureFailure(std::string bracket, std::string residual)
    : std::runtime_error("bracket " + bracket + " does not close: " + truncate(residual)),
      bracket_(std::move(bracket)),
      residual_(std::move(residual)) {}

std::size_t LieAlgebra::index(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw std::out_of_range("no basis element named " + std::string(name));
}

const std::vector<std::string>& g2_names() {
  static const std::vector<std::string> names{"S1", "S2", "S3", "S4", "S5", "S6", "L1",
                                              "L2", "L3", "L4", "L5", "L6", "H1", "H2"};
  return names;
}

std::vector<VectorField> bracket_table(const std::vector<VectorField>& basis, Exec exec) {
  const std::size_t n = basis.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<VectorField> out(pairs.size());
  const long m = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (long t = 0; t < m; ++t) {
    const auto [i, j] = pairs[static_cast<std::size_t>(t)];
    out[static_cast<std::size_t>(t)] = lie_bracket(basis[i], basis[j]);
  }
  return out;
}

std::size_t sampled_rank(const std::vector<VectorField>& fields, const SamplingOptions& opts) {
  std::vector<const VectorField*> ptrs;
  for (const auto& f : fields) ptrs.push_back(&f);
  const auto cols = evaluate_stacked(ptrs, opts);
  if (cols.empty()) return 0;
  QMatrix m(cols.front().size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r) m(r, c) = cols[c][r];
  return rank(std::move(m));
}

StructureConstants structure_constants(const std::vector<VectorField>& basis, const std::vector<std::string>& names,
                                       const SamplingOptions& opts) {
  const std::size_t n = basis.size();
  const auto table = bracket_table(basis, opts.exec);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<const VectorField*> ptrs;
  for (const auto& f : basis) ptrs.push_back(&f);
  for (const auto& f : table) ptrs.push_back(&f);
  const auto cols = evaluate_stacked(ptrs, opts);

  // One elimination of [basis | brackets] solves all systems at once.
  QMatrix m(cols.front().size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r) m(r, c) = cols[c][r];
  const auto piv = rref(m);
  std::size_t basis_rank = 0;
  while (basis_rank < piv.size() && piv[basis_rank] < n) ++basis_rank;
  if (basis_rank < n)
    throw std::runtime_error("basis is linearly dependent: sampled rank " + std::to_string(basis_rank) + " < " +
                             std::to_string(n));
  for (std::size_t r = n; r < piv.size(); ++r) {
    const auto [i, j] = pairs[piv[r] - n];
    throw ClosureFailure("[" + names[i] + "," + names[j] + "]", "not in the span at sampled points");
  }

  StructureConstants c(n);
  std::vector<std::vector<Rational>> coeffs(pairs.size(), std::vector<Rational>(n));
  for (std::size_t t = 0; t < pairs.size(); ++t)
    for (std::size_t k = 0; k < n; ++k) coeffs[t][k] = m(k, n + t);

  // Exact verification in the ring.
  std::vector<std::string> failures(pairs.size());
  const long np = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::Parallel)
  for (long t = 0; t < np; ++t) {
    const auto u = static_cast<std::size_t>(t);
    const VectorField residual = table[u] - combination(basis, coeffs[u]);
    if (!residual.is_zero()) failures[u] = residual.str();
  }
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto [i, j] = pairs[t];
    if (!failures[t].empty()) throw ClosureFailure("[" + names[i] + "," + names[j] + "]", failures[t]);
    for (std::size_t k = 0; k < n; ++k) {
      c(i, j, k) = coeffs[t][k];
      c(j, i, k) = -coeffs[t][k];
    }
  }
  return c;
}

LieAlgebra generate_g2(const VectorField& S1, const VectorField& S2, const VectorField& S3, const Chart& chart,
                       const SamplingOptions& opts) {
  std::array<VectorField, 14> b;
  b[0] = S1;
  b[1] = S2;
  b[2] = S3;
  // Index pairs into b for each generated element, in dependency order.
  static constexpr std::array<std::array<int, 3>, 3> level1{{{3, 0, 1}, {4, 1, 2}, {5, 2, 0}}};
  static constexpr std::array<std::array<int, 3>, 8> level2{{{6, 0, 3},
                                                             {7, 1, 3},
                                                             {8, 1, 4},
                                                             {9, 2, 4},
                                                             {10, 2, 5},
                                                             {11, 0, 5},
                                                             {12, 1, 5},
                                                             {13, 3, 2}}};
#pragma omp parallel for if (opts.exec == Exec::Parallel)
  for (int t = 0; t < 3; ++t) {
    const auto& e = level1[static_cast<std::size_t>(t)];
    b[static_cast<std::size_t>(e[0])] = lie_bracket(b[static_cast<std::size_t>(e[1])], b[static_cast<std::size_t>(e[2])]);
  }
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::Parallel)
  for (int t = 0; t < 8; ++t) {
    const auto& e = level2[static_cast<std::size_t>(t)];
    b[static_cast<std::size_t>(e[0])] = lie_bracket(b[static_cast<std::size_t>(e[1])], b[static_cast<std::size_t>(e[2])]);
  }
  LieAlgebra g;
  g.chart = chart;
  g.names = g2_names();
  g.basis.assign(b.begin(), b.end());
  g.structure = structure_constants(g.basis, g.names, opts);
  return g;
}

bool is_antisymmetric(const StructureConstants& c) {
  const std::size_t n = c.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (c(i, j, k) != -c(j, i, k)) return false;
  return true;
}

bool jacobi_holds(const StructureConstants& c) {
  const std::size_t n = c.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m) {
          Rational s = 0;
          for (std::size_t l = 0; l < n; ++l)
            s += c(i, j, l) * c(l, k, m) + c(j, k, l) * c(l, i, m) + c(k, i, l) * c(l, j, m);
          if (sgn(s) != 0) return false;
        }
  return true;
}

QMatrix ad_matrix(const StructureConstants& c, std::size_t i) {
  const std::size_t n = c.dim();
  QMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) m(l, k) = c(i, k, l);
  return m;
}

QMatrix killing_form(const StructureConstants& c) {
  const std::size_t n = c.dim();
  QMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Rational s = 0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) s += c(i, k, l) * c(j, l, k);
      b(i, j) = s;
      b(j, i) = s;
    }
  return b;
}

std::size_t centralizer_dim(const StructureConstants& c, const std::vector<std::size_t>& elements) {
  const std::size_t n = c.dim();
  QMatrix stacked(n * elements.size(), n);
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const QMatrix ad = ad_matrix(c, elements[e]);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t col = 0; col < n; ++col) stacked(e * n + r, col) = ad(r, col);
  }
  return null_space(std::move(stacked)).cols();
}

RootDatum root_decomposition(const LieAlgebra& g) {
  const auto& c = g.structure;
  const std::size_t h1 = g.index("H1"), h2 = g.index("H2");
  RootDatum rd;
  rd.cartan_dim = centralizer_dim(c, {h1, h2});
  const QMatrix B = killing_form(c);
  rd.cartan_gram = QMatrix(2, 2);
  rd.cartan_gram(0, 0) = B(h1, h1);
  rd.cartan_gram(0, 1) = B(h1, h2);
  rd.cartan_gram(1, 0) = B(h2, h1);
  rd.cartan_gram(1, 1) = B(h2, h2);
  const auto ginv_opt = inverse(rd.cartan_gram);
  if (!ginv_opt) throw std::runtime_error("Killing form is degenerate on the Cartan subalgebra");
  const QMatrix& Gi = *ginv_opt;
  auto inner = [&](const Rational& a1, const Rational& a2, const Rational& b1, const Rational& b2) -> Rational {
    return a1 * (Gi(0, 0) * b1 + Gi(0, 1) * b2) + a2 * (Gi(1, 0) * b1 + Gi(1, 1) * b2);
  };

  rd.exact_eigenvectors = true;
  for (std::size_t b = 0; b < g.basis.size(); ++b) {
    if (b == h1 || b == h2) continue;
    RootEntry e;
    e.name = g.names[b];
    for (std::size_t k = 0; k < g.basis.size(); ++k) {
      if (k == b) continue;
      if (sgn(c(h1, b, k)) != 0 || sgn(c(h2, b, k)) != 0)
        throw std::runtime_error(e.name + " is not a simultaneous eigenvector of ad H1, ad H2");
    }
    e.l1 = c(h1, b, b);
    e.l2 = c(h2, b, b);
    if (lie_bracket(g.basis[h1], g.basis[b]) != e.l1 * g.basis[b] ||
        lie_bracket(g.basis[h2], g.basis[b]) != e.l2 * g.basis[b])
      rd.exact_eigenvectors = false;
    e.length2 = inner(e.l1, e.l2, e.l1, e.l2);
    rd.roots.push_back(e);
  }

  // Antipodal pairs.
  for (std::size_t a = 0; a < rd.roots.size(); ++a)
    for (std::size_t b = a + 1; b < rd.roots.size(); ++b)
      if (rd.roots[a].l1 == -rd.roots[b].l1 && rd.roots[a].l2 == -rd.roots[b].l2)
        rd.antipodal.emplace_back(rd.roots[a].name, rd.roots[b].name);

  // Long and short roots.
  std::set<Rational> lengths;
  for (const auto& r : rd.roots) lengths.insert(r.length2);
  if (lengths.size() == 2 && sgn(*lengths.begin()) > 0) {
    const Rational short2 = *lengths.begin(), long2 = *lengths.rbegin();
    rd.long_short_ratio = long2 / short2;
    for (auto& r : rd.roots) {
      r.is_long = r.length2 == long2;
      (r.is_long ? rd.n_long : rd.n_short) += 1;
    }
  }

  // Killing-orthonormal frame of the Cartan subalgebra: e1 along H2 - H1, e2 towards H1 + H2.
  const Eigen::Matrix2d G = rd.cartan_gram.to_double();
  auto gnorm = [&](const Eigen::Vector2d& v) { return std::sqrt(v.dot(G * v)); };
  Eigen::Vector2d e1(-1.0, 1.0);
  e1 /= gnorm(e1);
  Eigen::Vector2d e2(1.0, 1.0);
  e2 -= e1.dot(G * e2) * e1;
  e2 /= gnorm(e2);
  const double unit = lengths.empty() ? 1.0 : std::sqrt(lengths.begin()->get_d());
  for (auto& r : rd.roots) {
    const Eigen::Vector2d lam(r.l1.get_d(), r.l2.get_d());
    r.x = lam.dot(e1) / unit;
    r.y = lam.dot(e2) / unit;
    r.fig_x = (r.l2.get_d() - r.l1.get_d()) / 4.0;
    r.fig_y = std::sqrt(3.0) * (r.l1.get_d() + r.l2.get_d()) / 12.0;
  }
  const double step = std::numbers::pi / 6.0;
  for (std::size_t a = 0; a < rd.roots.size(); ++a)
    for (std::size_t b = a + 1; b < rd.roots.size(); ++b) {
      const auto& ra = rd.roots[a];
      const auto& rb = rd.roots[b];
      const double cosang = (ra.x * rb.x + ra.y * rb.y) / (std::hypot(ra.x, ra.y) * std::hypot(rb.x, rb.y));
      const double ang = std::acos(std::clamp(cosang, -1.0, 1.0));
      rd.max_angle_defect = std::max(rd.max_angle_defect, std::abs(ang - step * std::round(ang / step)));
    }

  // Cartan matrix from a short simple root and a long root at 150 degrees.
  for (const auto& a : rd.roots) {
    if (a.is_long || rd.cartan_matrix.rows() != 0) continue;
    for (const auto& b : rd.roots) {
      if (!b.is_long) continue;
      const Rational ab = inner(a.l1, a.l2, b.l1, b.l2);
      const Rational a12 = 2 * ab / b.length2, a21 = 2 * ab / a.length2;
      if (a12 == -1 && a21 == -3) {
        rd.cartan_matrix = QMatrix(2, 2);
        rd.cartan_matrix(0, 0) = 2;
        rd.cartan_matrix(0, 1) = a12;
        rd.cartan_matrix(1, 0) = a21;
        rd.cartan_matrix(1, 1) = 2;
        break;
      }
    }
  }
  return rd;
}

bool symmetry_check(const VectorField& V, const AnChart& chart) {
  for (const auto& X : chart.X) {
    const VectorField b = lie_bracket(V, X);
    for (const auto& theta : chart.Theta)
      if (!pair(theta, b).is_zero()) return false;
  }
  return true;
}

std::optional<StructureConstants> restrict_structure(const StructureConstants& c,
                                                     const std::vector<std::size_t>& sub) {
  StructureConstants r(sub.size());
  for (std::size_t a = 0; a < sub.size(); ++a)
    for (std::size_t b = 0; b < sub.size(); ++b) {
      for (std::size_t k = 0; k < c.dim(); ++k) {
        if (sgn(c(sub[a], sub[b], k)) == 0) continue;
        if (std::find(sub.begin(), sub.end(), k) == sub.end()) return std::nullopt;
      }
      for (std::size_t k = 0; k < sub.size(); ++k) r(a, b, k) = c(sub[a], sub[b], sub[k]);
    }
  return r;
}

namespace {

const std::vector<std::string>& sl3_names() {
  static const std::vector<std::string> names{"L1", "L2", "L3", "L4", "L5", "L6", "H1", "H2"};
  return names;
}

}  // namespace

Sl3Data sl3_restrict(const LieAlgebra& c_algebra, const SamplingOptions& opts) {
  const Coord c3 = c_chart().slot("c3");
  const Bindings on_hypersurface{{c3, Expr()}};
  Sl3Data d;
  d.names = sl3_names();
  d.chart = c3zero_chart();
  for (const auto& name : d.names) {
    const VectorField& v = c_algebra.field(name);
    const Expr normal = substitute(v[c3], on_hypersurface);
    if (!normal.is_zero())
      throw NotRelated(name + " is not tangent to {c3 = 0}: d_c3 component " + normal.str(c_chart().names.names));
    VectorField r;
    for (Coord s : d.chart.coords) r[s] = substitute(v[s], on_hypersurface);
    d.fields.push_back(std::move(r));
  }
  d.structure = structure_constants(d.fields, d.names, opts);
  return d;
}

Sl3Data project_to_plane_circle(const LieAlgebra& main_algebra, const AnChart& chart, const SamplingOptions& opts) {
  Sl3Data d;
  d.names = sl3_names();
  d.chart = plane_circle_chart();
  for (const auto& name : d.names) {
    try {
      d.fields.push_back(related_through(chart.pi, main_algebra.field(name)));
    } catch (const NotRelated& e) {
      throw NotRelated(name + ": " + e.what());
    }
  }
  d.structure = structure_constants(d.fields, d.names, opts);
  return d;
}

// ---------------------------------------------------------------------------
// Transcriptions.

std::array<VectorField, 3> an_generators(const Params& p) {
  const Chart& M = main_chart();
  VectorField s1 = field(M, p,
                         {{"phi", "(kappa*c^2 - h^2)/(2*c^3)"},
                          {"q", "cos(psi)*(kappa*c^2 - h^2)/(2*c^3*h)"},
                          {"psi", "-cos(psi)/h"},
                          {"h", "-sin(psi)"}});
  VectorField s2 = field(M, p,
                         {{"theta", "(kappa*c^2 - h^2)/(2*c^3)"},
                          {"q", "sin(psi)*(kappa*c^2 - h^2)/(2*c^3*h)"},
                          {"psi", "-sin(psi)/h"},
                          {"h", "cos(psi)"}});
  VectorField s3 = field(
      M, p,
      {{"theta",
        "-3*(h^2 - kappa*c^2)*phi - 2*h/c*(kappa*c^2 - h^2)*(2*c*q + kappa*psi)*cos(psi)"
        " - h/(2*c^3)*(2*c^4*(2*c*q + kappa*psi)^2 - (3*kappa*c^2 - h^2)*(kappa*c^2 - h^2))*sin(psi)"},
       {"phi",
        "3*(h^2 - kappa*c^2)*theta - h/(2*c^3)*(2*c^4*(2*c*q + kappa*psi)^2 - (3*kappa*c^2 - h^2)*(kappa*c^2 - h^2))*cos(psi)"
        " + 2*h/c*(kappa*c^2 - h^2)*(2*c*q + kappa*psi)*sin(psi)"},
       {"h", "-4*c^2*h*(kappa*psi + 2*c*q) + 6*c^3*phi*cos(psi) + 6*c^3*theta*sin(psi)"},
       {"q",
        "-1/(2*c^3)*(c^4*(2*c*q + kappa*psi)^2 - (3*kappa*c^2 - h^2)*(kappa*c^2 - h^2))"
        " + 3/h*(h^2 - c^2*kappa)*theta*cos(psi) - 3/h*(h^2 - kappa*c^2)*phi*sin(psi)"},
       {"psi", "-(3*kappa*c^2 - h^2) + 6*theta*c^3/h*cos(psi) - 6*c^3*phi/h*sin(psi)"}});
  return {s1, s2, s3};
}

std::array<VectorField, 3> z_fields() {
  const Chart& C = c_chart();
  const Params p;
  return {field(C, p, {{"c3", "1"}, {"c2", "2*c5"}, {"c1", "-2*c4"}}),
          field(C, p, {{"c4", "1"}, {"c1", "4*c3"}, {"c3", "-2*c5"}}),
          field(C, p, {{"c5", "1"}, {"c3", "2*c4"}, {"c2", "-4*c3"}})};
}

std::array<VectorField, 3> cdist_generators() {
  const Chart& C = c_chart();
  const Params p;
  const auto z = z_fields();
  auto e = [&](const char* text) { return parse(text, p, C.names); };
  return {z[1] + e("c5") * z[0], z[2] - e("c4") * z[0],
          e("-c1") * z[1] + e("c2") * z[2] - e("c1*c5 + c2*c4 + c3^2") * z[0]};
}

std::array<VectorField, 2> listed_cartan(const Params& p) {
  const Chart& M = main_chart();
  return {field(M, p,
                {{"theta", "h/(2*c^3)*(3*h^2 - 4*kappa*c^2)*cos(psi) + h^3/(2*c^3)*cos(3*psi)"},
                 {"phi", "-6*phi + h/(2*c^3)*(3*h^2 - 8*kappa*c^2)*sin(psi) - h^3/(2*c^3)*sin(3*psi)"},
                 {"h", "-h - 3*cos(2*psi)*h"},
                 {"q", "-(2*c*q + kappa*psi)/c - 3*kappa/(2*c)*sin(2*psi)"},
                 {"psi", "3*sin(2*psi)"}}),
          field(M, p,
                {{"theta", "-6*theta + 2*h*kappa/c*cos(psi)"},
                 {"phi", "-6*phi - 2*h*kappa/c*sin(psi)"},
                 {"h", "-2*h"},
                 {"q", "-2/c*(2*c*q + kappa*psi)"}})};
}

std::vector<NamedField> listed_c1k0() {
  const Chart& M = main_chart();
  const Params p(0, 1);
  std::vector<NamedField> out;
  auto add = [&](const char* name, Comps comps) { out.push_back({name, field(M, p, comps)}); };
  add("S1", {{"phi", "-h^2/2"}, {"q", "-cos(psi)*h/2"}, {"psi", "-cos(psi)/h"}, {"h", "-sin(psi)"}});
  add("S2", {{"theta", "-h^2/2"}, {"q", "-sin(psi)*h/2"}, {"psi", "-sin(psi)/h"}, {"h", "cos(psi)"}});
  add("S3", {{"theta", "-3*h^2*phi + 4*h^3*q*cos(psi) - h/2*(8*q^2 - h^4)*sin(psi)"},
             {"phi", "3*h^2*theta - h/2*(8*q^2 - h^4)*cos(psi) - 4*h^3*q*sin(psi)"},
             {"h", "-8*h*q + 6*phi*cos(psi) + 6*theta*sin(psi)"},
             {"q", "-1/2*(4*q^2 - h^4) + 3*h*theta*cos(psi) - 3*h*phi*sin(psi)"},
             {"psi", "h^2 + 6*theta/h*cos(psi) - 6*phi/h*sin(psi)"}});
  add("S4", {{"q", "1"}, {"theta", "sin(psi)*h"}, {"phi", "cos(psi)*h"}});
  add("S5", {{"theta", "2*q*h^2 + 6*theta*h*sin(psi) + 2*cos(2*psi)*q*h^2"},
             {"phi", "-(4*q^2 - h^4) + 6*theta*h*cos(psi) - 2*sin(2*psi)*q*h^2"},
             {"h", "2*h^2*sin(psi) - 8*q*cos(psi)"},
             {"q", "6*theta - 2*q*h*sin(psi) + h^3*cos(psi)"},
             {"psi", "8*q/h*sin(psi)"}});
  add("S6", {{"theta", "-(4*q^2 - h^4) - 6*phi*h*sin(psi) + 2*sin(2*psi)*q*h^2"},
             {"phi", "-2*q*h^2 - 6*phi*h*cos(psi) + 2*cos(2*psi)*q*h^2"},
             {"h", "-2*h^2*cos(psi) - 8*q*sin(psi)"},
             {"q", "-6*phi + 2*q*h*cos(psi) + h^3*sin(psi)"},
             {"psi", "-8*q/h*cos(psi)"}});
  add("L1", {{"theta", "-1"}});
  add("L2", {{"phi", "1"}});
  add("L3", {{"theta", "-h^3/2*(3*sin(psi) + sin(3*psi))"},
             {"phi", "6*theta + h^3/2*(3*cos(psi) - cos(3*psi))"},
             {"h", "3*sin(2*psi)*h"},
             {"psi", "-3 + 3*cos(2*psi)"}});
  add("L4", {{"theta",
              "h^6 + 36*theta^2 - 9*h^3*phi*sin(psi) + 9*h^3*theta*cos(psi) + 6*q*h^4*sin(2*psi)"
              " + 12*q^2*h^2*cos(2*psi) + 3*h^3*theta*cos(3*psi) - 3*h^3*phi*sin(3*psi)"},
             {"phi",
              "-2*q*(8*q^2 + 3*h^4) + 36*phi*theta + 9*h^3*theta*sin(psi) + 9*h^3*phi*cos(psi)"
              " - 12*q^2*h^2*sin(2*psi) + 6*q*h^4*cos(2*psi) - 3*h^3*phi*cos(3*psi) - 3*h^3*theta*sin(3*psi)"},
             {"h", "18*theta*h - 24*q*h^2*sin(psi) - 24*q^2*cos(psi) + 18*h*phi*sin(2*psi) - 18*h*theta*cos(2*psi)"},
             {"q", "36*theta*q - 24*q^2*h*sin(psi) + 6*q*h^3*cos(psi)"},
             {"psi", "-18*phi + 6/h*(h^4 + 4*q^2)*sin(psi) + 18*theta*sin(2*psi) + 18*phi*cos(2*psi)"}});
  add("L5", {{"theta",
              "-2*q*(8*q^2 + 3*h^4) - 36*phi*theta + 9*h^3*phi*cos(psi) + 9*h^3*theta*sin(psi)"
              " - 6*q*h^4*cos(2*psi) + 12*q^2*h^2*sin(2*psi) + 3*h^3*phi*cos(3*psi) + 3*h^3*theta*sin(3*psi)"},
             {"phi",
              "-(h^6 + 36*phi^2) - 9*h^3*theta*cos(psi) + 9*h^3*phi*sin(psi) + 12*q^2*h^2*cos(2*psi)"
              " + 6*q*h^4*sin(2*psi) + 3*h^3*theta*cos(3*psi) - 3*h^3*phi*sin(3*psi)"},
             {"h", "-18*phi*h + 24*h^2*q*cos(psi) - 24*q^2*sin(psi) - 18*h*phi*cos(2*psi) - 18*h*theta*sin(2*psi)"},
             {"q", "-36*phi*q + 24*q^2*h*cos(psi) + 6*q*h^3*sin(psi)"},
             {"psi", "-18*theta - 6/h*(h^4 + 4*q^2)*cos(psi) - 18*theta*cos(2*psi) + 18*phi*sin(2*psi)"}});
  add("L6", {{"theta", "6*phi - h^3/2*(3*sin(psi) + sin(3*psi))"},
             {"phi", "h^3/2*(3*cos(psi) - cos(3*psi))"},
             {"h", "3*sin(2*psi)*h"},
             {"psi", "3 + 3*cos(2*psi)"}});
  add("H1", {{"theta", "3*h^3/2*cos(psi) + h^3/2*cos(3*psi)"},
             {"phi", "-6*phi + 3*h^3/2*sin(psi) - h^3/2*sin(3*psi)"},
             {"h", "-h - 3*cos(2*psi)*h"},
             {"q", "-2*q"},
             {"psi", "3*sin(2*psi)"}});
  add("H2", {{"theta", "-6*theta"}, {"phi", "-6*phi"}, {"h", "-2*h"}, {"q", "-4*q"}});
  return out;
}

std::vector<NamedField> listed_sl3_c3zero() {
  const Chart& C = c3zero_chart();
  const Params p;
  std::vector<NamedField> out;
  auto add = [&](const char* name, Comps comps) { out.push_back({name, field(C, p, comps)}); };
  add("L1", {{"c1", "-6"}});
  add("L2", {{"c2", "6"}});
  add("L3", {{"c2", "6*c1"}, {"c5", "-6*c4"}});
  add("L4", {{"c1", "6*c1^2"}, {"c2", "6*c1*c2"}, {"c4", "6*c1*c4"}, {"c5", "-6*c2*c4"}});
  add("L5", {{"c1", "-6*c2*c1"}, {"c2", "-6*c2^2"}, {"c5", "-6*c2*c5"}, {"c4", "6*c1*c5"}});
  add("L6", {{"c1", "6*c2"}, {"c4", "-6*c5"}});
  add("H1", {{"c2", "-6*c2"}, {"c4", "2*c4"}, {"c5", "-4*c5"}});
  add("H2", {{"c1", "-6*c1"}, {"c2", "-6*c2"}, {"c4", "-2*c4"}, {"c5", "-2*c5"}});
  return out;
}

std::vector<NamedField> listed_sl3_projected() {
  const Chart& P = plane_circle_chart();
  const Params p(0, 1);
  std::vector<NamedField> out;
  auto add = [&](const char* name, Comps comps) { out.push_back({name, field(P, p, comps)}); };
  add("L1", {{"theta", "-1"}});
  add("L2", {{"phi", "1"}});
  add("L3", {{"psi", "-6*sin(psi)^2"}, {"phi", "6*theta"}});
  add("L4", {{"psi", "-36*(sin(psi)*phi - cos(psi)*theta)*sin(psi)"},
             {"theta", "36*theta*theta"},
             {"phi", "36*theta*phi"}});
  add("L5", {{"psi", "36*(sin(psi)*phi - cos(psi)*theta)*cos(psi)"},
             {"theta", "-36*phi*theta"},
             {"phi", "-36*phi*phi"}});
  add("L6", {{"psi", "6*cos(psi)^2"}, {"theta", "6*phi"}});
  add("H1", {{"psi", "6*cos(psi)*sin(psi)"}, {"phi", "-6*phi"}});
  add("H2", {{"theta", "-6*theta"}, {"phi", "-6*phi"}});
  return out;
}

// ---------------------------------------------------------------------------
// Conformal inversion.

std::optional<Quad> phi_map(const Quad& p) {
  const auto& [c1, c2, c4, c5] = p;
  if (sgn(c4) == 0) return std::nullopt;
  const Rational c6 = c1 * c5 + c2 * c4;
  return Quad{c6 / (3 * c4), c5 / c4, c1 / c4, Rational(-3) / c4};
}

Quad swap_map(const Quad& p) { return {p[1], p[0], p[3], p[2]}; }

CoordMap phi_coordmap() {
  const Chart& C = c3zero_chart();
  const Params p;
  CoordMap m;
  m.source = C;
  m.target = C;
  auto e = [&](const char* text) { return parse(text, p, C.names); };
  m.images[idx(C.slot("c1"))] = e("(c1*c5 + c2*c4)/(3*c4)");
  m.images[idx(C.slot("c2"))] = e("c5/c4");
  m.images[idx(C.slot("c4"))] = e("c1/c4");
  m.images[idx(C.slot("c5"))] = e("-3/c4");
  return m;
}

SymTensor split_metric_4d() {
  const Chart& C = c3zero_chart();
  auto d = [&](const char* n) { return OneForm::coordinate(C.slot(n)); };
  return Rational(2) * SymTensor::product(d("c1"), d("c5")) + Rational(2) * SymTensor::product(d("c2"), d("c4"));
}

CoordMap swap_coordmap() {
  const Chart& C = c3zero_chart();
  CoordMap m;
  m.source = C;
  m.target = C;
  m.images[idx(C.slot("c1"))] = Expr::var(C.slot("c2"));
  m.images[idx(C.slot("c2"))] = Expr::var(C.slot("c1"));
  m.images[idx(C.slot("c4"))] = Expr::var(C.slot("c5"));
  m.images[idx(C.slot("c5"))] = Expr::var(C.slot("c4"));
  return m;
}

std::optional<std::array<int, 6>> induced_root_permutation(const CoordMap& m, std::uint64_t seed) {
  const auto listed = listed_sl3_c3zero();
  std::mt19937_64 rng(seed);
  RationalPoint p = random_rational_point(rng);
  std::array<int, 6> perm{};
  for (std::size_t i = 0; i < 6; ++i) {
    const VectorField pushed = pushforward(m, listed[i].field);
    perm[i] = -1;
    for (std::size_t j = 0; j < 6 && perm[i] < 0; ++j) {
      const VectorField target = compose(listed[j].field, m);
      // Candidate scalar from one nonzero component at a sample point, then exact check.
      std::optional<Rational> lambda;
      for (std::size_t k = 0; k < kDim && !lambda; ++k) {
        const Rational w = target.comp[k].eval(p);
        if (sgn(w) != 0) lambda = Rational(pushed.comp[k].eval(p) / w);
      }
      if (lambda && sgn(*lambda) != 0 && pushed == *lambda * target) perm[i] = static_cast<int>(j);
    }
    if (perm[i] < 0) return std::nullopt;
  }
  return perm;
}

namespace {

std::size_t permutation_group_order(const std::vector<std::array<int, 6>>& gens) {
  std::array<int, 6> id{0, 1, 2, 3, 4, 5};
  std::vector<std::array<int, 6>> group{id};
  for (std::size_t i = 0; i < group.size(); ++i)
    for (const auto& g : gens) {
      std::array<int, 6> next{};
      for (std::size_t k = 0; k < 6; ++k) next[k] = g[static_cast<std::size_t>(group[i][k])];
      if (std::find(group.begin(), group.end(), next) == group.end()) group.push_back(next);
    }
  return group.size();
}

}  // namespace

DihedralReport dihedral_check(std::uint64_t seed, std::size_t points, std::size_t group_bound) {
  std::mt19937_64 rng(seed);
  DihedralReport r;
  r.group_bound = group_bound;
  auto random_quad = [&] {
    return Quad{random_rational(rng, 9, 5), random_rational(rng, 9, 5), random_rational(rng, 9, 5),
                random_rational(rng, 9, 5)};
  };
  auto iterate = [](Quad q, int n) -> std::optional<Quad> {
    for (int i = 0; i < n; ++i) {
      auto next = phi_map(q);
      if (!next) return std::nullopt;
      q = *next;
    }
    return q;
  };

  r.phi6_identity = true;
  while (r.checked < points) {
    const Quad q = random_quad();
    const auto image = iterate(q, 6);
    if (!image) {
      ++r.skipped;
      continue;
    }
    ++r.checked;
    if (*image != q) r.phi6_identity = false;
  }

  // Point maps are identified by their action on a few sample points.
  std::vector<Quad> samples;
  while (samples.size() < 4) {
    const Quad q = random_quad();
    bool ok = true;
    for (const Quad& s : {q, swap_map(q)}) ok = ok && iterate(s, 6).has_value();
    if (ok) samples.push_back(q);
  }
  using Action = std::vector<Quad>;
  auto apply = [](const Action& a, bool use_phi) -> std::optional<Action> {
    Action out;
    for (const Quad& q : a) {
      if (use_phi) {
        auto n = phi_map(q);
        if (!n) return std::nullopt;
        out.push_back(*n);
      } else {
        out.push_back(swap_map(q));
      }
    }
    return out;
  };
  auto order_of = [&](bool with_swap) -> std::size_t {
    Action a = samples;
    for (std::size_t n = 1; n <= group_bound; ++n) {
      if (with_swap) a = *apply(a, false);
      auto next = apply(a, true);
      if (!next) return 0;
      a = *next;
      if (a == samples) return n;
    }
    return 0;
  };
  r.phi_order = order_of(false);
  r.phi_swap_order = order_of(true);

  std::vector<Action> group{samples};
  for (std::size_t i = 0; i < group.size() && group.size() < group_bound; ++i) {
    for (bool use_phi : {true, false}) {
      auto next = apply(group[i], use_phi);
      if (!next) continue;
      if (std::find(group.begin(), group.end(), *next) == group.end()) group.push_back(*next);
    }
  }
  r.point_group_order = group.size();
  r.point_group_finite = group.size() < group_bound;

  r.phi_on_roots = induced_root_permutation(phi_coordmap());
  r.swap_on_roots = induced_root_permutation(swap_coordmap());
  if (r.phi_on_roots && r.swap_on_roots)
    r.root_group_order = permutation_group_order({*r.phi_on_roots, *r.swap_on_roots});

  const Expr conformal = parse("1/c4^2", Params(), c3zero_chart().names);
  const SymTensor dS2 = split_metric_4d();
  r.rescaling_identity = pullback_metric(phi_coordmap(), dS2) == conformal * dS2;
  return r;
}

// ---------------------------------------------------------------------------
// Exports.

std::string brackets_json(const LieAlgebra& g) {
  nlohmann::ordered_json j;
  j["basis"] = g.names;
  j["brackets"] = nlohmann::ordered_json::array();
  const std::size_t n = g.basis.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < n; ++k)
        if (sgn(g.structure(a, b, k)) != 0) coeffs[g.names[k]] = to_string(g.structure(a, b, k));
      j["brackets"].push_back({{"i", a}, {"j", b}, {"coeffs", coeffs}});
    }
  return j.dump(2) + "\n";
}

std::string killing_csv(const QMatrix& b) {
  std::ostringstream out;
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) out << (j ? "," : "") << to_string(b(i, j));
    out << "\n";
  }
  return out.str();
}

std::string root_svg(const RootDatum& r) {
  constexpr double size = 480, centre = size / 2, scale = 110;
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n"
      << "  <defs><marker id=\"tip\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
         "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& root : r.roots) {
    const double x = centre + scale * root.x, y = centre - scale * root.y;
    const double lx = centre + scale * 1.16 * root.x, ly = centre - scale * 1.16 * root.y;
    out << "  <line class=\"root " << (root.is_long ? "long" : "short") << "\" x1=\"" << centre << "\" y1=\""
        << centre << "\" x2=\"" << x << "\" y2=\"" << y << "\" stroke=\"black\" marker-end=\"url(#tip)\"/>\n"
        << "  <text class=\"label\" x=\"" << lx << "\" y=\"" << ly
        << "\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << root.name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace g2roll
