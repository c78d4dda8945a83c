#include "g2roll/geom.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <sstream>

namespace g2roll {

bool Chart::has(Coord c) const { return std::find(coords.begin(), coords.end(), c) != coords.end(); }

Coord Chart::slot(std::string_view id) const {
  if (auto s = names.lookup(id)) return *s;
  throw std::out_of_range("chart " + name + " has no coordinate " + std::string(id));
}

const Chart& main_chart() {
  static const Chart chart{"M", default_names(), {Coord::Theta, Coord::Phi, Coord::H, Coord::Q, Coord::Psi}};
  return chart;
}

const Chart& c_chart() {
  static const Chart chart{
      "C", ChartNames{{"c1", "c2", "c4", "c3", "c5"}}, {Coord::Theta, Coord::Phi, Coord::Q, Coord::H, Coord::Psi}};
  return chart;
}

const Chart& r_chart() {
  static const Chart chart{
      "R", ChartNames{{"r1", "r2", "r4", "r3", "r5"}}, {Coord::Theta, Coord::Phi, Coord::Q, Coord::H, Coord::Psi}};
  return chart;
}

const Chart& c3zero_chart() {
  static const Chart chart{
      "C|c3=0", ChartNames{{"c1", "c2", "c4", "", "c5"}}, {Coord::Theta, Coord::Phi, Coord::H, Coord::Psi}};
  return chart;
}

const Chart& plane_circle_chart() {
  static const Chart chart{
      "R2xS1", ChartNames{{"theta", "phi", "", "", "psi"}}, {Coord::Theta, Coord::Phi, Coord::Psi}};
  return chart;
}

namespace {

template <class A>
std::string component_sum(const A& comp, const Chart& chart, const char* prefix) {
  std::ostringstream out;
  bool first = true;
  for (Coord c : chart.coords) {
    const Expr& e = comp[idx(c)];
    if (e.is_zero()) continue;
    out << (first ? "" : " + ") << "(" << e.str(chart.names.names) << ")*" << prefix
        << chart.names.names[idx(c)];
    first = false;
  }
  return first ? "0" : out.str();
}

}  // namespace

VectorField VectorField::coordinate(Coord c) {
  VectorField v;
  v[c] = Expr(Rational(1));
  return v;
}

bool VectorField::is_zero() const {
  return std::all_of(comp.begin(), comp.end(), [](const Expr& e) { return e.is_zero(); });
}

Expr VectorField::apply(const Expr& f) const {
  Expr r;
  for (Coord c : kAllCoords) {
    if (comp[idx(c)].is_zero()) continue;
    Expr df = f.derive(c);
    if (!df.is_zero()) r += comp[idx(c)] * df;
  }
  return r;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = a.comp[i] + b.comp[i];
  return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = a.comp[i] - b.comp[i];
  return r;
}

VectorField operator*(const Expr& f, const VectorField& v) {
  VectorField r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = f * v.comp[i];
  return r;
}

VectorField operator*(const Rational& s, const VectorField& v) {
  VectorField r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = v.comp[i] * s;
  return r;
}

std::string VectorField::str(const Chart& chart) const { return component_sum(comp, chart, "d_"); }

OneForm OneForm::differential(const Expr& f) {
  OneForm w;
  for (Coord c : kAllCoords) w[c] = f.derive(c);
  return w;
}

bool OneForm::is_zero() const {
  return std::all_of(comp.begin(), comp.end(), [](const Expr& e) { return e.is_zero(); });
}

OneForm operator+(const OneForm& a, const OneForm& b) {
  OneForm r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = a.comp[i] + b.comp[i];
  return r;
}

OneForm operator-(const OneForm& a, const OneForm& b) {
  OneForm r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = a.comp[i] - b.comp[i];
  return r;
}

OneForm operator*(const Expr& f, const OneForm& w) {
  OneForm r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = f * w.comp[i];
  return r;
}

OneForm operator*(const Rational& s, const OneForm& w) {
  OneForm r;
  for (std::size_t i = 0; i < kDim; ++i) r.comp[i] = w.comp[i] * s;
  return r;
}

std::string OneForm::str(const Chart& chart) const { return component_sum(comp, chart, "d"); }

SymTensor SymTensor::product(const OneForm& a, const OneForm& b) {
  SymTensor g;
  static const Rational half(1, 2);
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      Expr v = a.comp[i] * b.comp[j] + a.comp[j] * b.comp[i];
      v = v * half;
      g.m_[i][j] = v;
      g.m_[j][i] = v;
    }
  }
  return g;
}

void SymTensor::set(Coord i, Coord j, const Expr& v) {
  m_[idx(i)][idx(j)] = v;
  m_[idx(j)][idx(i)] = v;
}

bool SymTensor::is_zero() const {
  for (const auto& row : m_)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

SymTensor operator+(const SymTensor& a, const SymTensor& b) {
  SymTensor r;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) r.m_[i][j] = a.m_[i][j] + b.m_[i][j];
  return r;
}

SymTensor operator-(const SymTensor& a, const SymTensor& b) {
  SymTensor r;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) r.m_[i][j] = a.m_[i][j] - b.m_[i][j];
  return r;
}

SymTensor operator*(const Expr& f, const SymTensor& g) {
  SymTensor r;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = i; j < kDim; ++j) {
      r.m_[i][j] = f * g.m_[i][j];
      r.m_[j][i] = r.m_[i][j];
    }
  return r;
}

SymTensor operator*(const Rational& s, const SymTensor& g) {
  SymTensor r;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) r.m_[i][j] = g.m_[i][j] * s;
  return r;
}

std::string SymTensor::str(const Chart& chart) const {
  std::ostringstream out;
  bool first = true;
  for (std::size_t a = 0; a < chart.coords.size(); ++a) {
    for (std::size_t b = a; b < chart.coords.size(); ++b) {
      const Coord i = chart.coords[a], j = chart.coords[b];
      const Expr& e = m_[idx(i)][idx(j)];
      if (e.is_zero()) continue;
      const Expr coeff = i == j ? e : e * Rational(2);
      out << (first ? "" : " + ") << "(" << coeff.str(chart.names.names) << ")*d"
          << chart.names.names[idx(i)] << "*d" << chart.names.names[idx(j)];
      first = false;
    }
  }
  return first ? "0" : out.str();
}

std::array<std::array<Expr, kDim>, kDim> CoordMap::jacobian() const {
  std::array<std::array<Expr, kDim>, kDim> j;
  for (Coord t : target.coords)
    for (Coord s : source.coords) j[idx(t)][idx(s)] = images[idx(t)].derive(s);
  return j;
}

Bindings CoordMap::target_bindings() const {
  Bindings b;
  for (Coord t : target.coords) b[t] = images[idx(t)];
  return b;
}

Expr CoordMap::restrict_to_locus(const Expr& e) const {
  Expr r = e;
  for (const auto& step : locus) r = substitute(r, step);
  return r;
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  VectorField r;
  for (Coord i : kAllCoords) {
    Expr acc;
    for (Coord j : kAllCoords) {
      if (!v[j].is_zero() && !w[i].is_zero()) acc += v[j] * w[i].derive(j);
      if (!w[j].is_zero() && !v[i].is_zero()) acc -= w[j] * v[i].derive(j);
    }
    r[i] = std::move(acc);
  }
  return r;
}

Expr pair(const OneForm& w, const VectorField& v) {
  Expr r;
  for (Coord c : kAllCoords)
    if (!w[c].is_zero() && !v[c].is_zero()) r += w[c] * v[c];
  return r;
}

OneForm pullback_oneform(const CoordMap& m, const OneForm& w) {
  const auto b = m.target_bindings();
  const auto jac = m.jacobian();
  OneForm r;
  for (Coord t : m.target.coords) {
    if (w[t].is_zero()) continue;
    const Expr wt = substitute(w[t], b);
    for (Coord s : m.source.coords) {
      const Expr& d = jac[idx(t)][idx(s)];
      if (!d.is_zero()) r[s] += wt * d;
    }
  }
  return r;
}

SymTensor pullback_metric(const CoordMap& m, const SymTensor& g) {
  const auto b = m.target_bindings();
  const auto jac = m.jacobian();
  std::array<std::array<Expr, kDim>, kDim> gs;
  for (Coord t : m.target.coords)
    for (Coord u : m.target.coords)
      if (idx(u) >= idx(t)) gs[idx(t)][idx(u)] = substitute(g(t, u), b);
  auto gsub = [&](Coord t, Coord u) -> const Expr& {
    return idx(u) >= idx(t) ? gs[idx(t)][idx(u)] : gs[idx(u)][idx(t)];
  };
  SymTensor r;
  for (Coord s1 : m.source.coords) {
    for (Coord s2 : m.source.coords) {
      if (idx(s2) < idx(s1)) continue;
      Expr acc;
      for (Coord t : m.target.coords) {
        const Expr& j1 = jac[idx(t)][idx(s1)];
        if (j1.is_zero()) continue;
        for (Coord u : m.target.coords) {
          const Expr& j2 = jac[idx(u)][idx(s2)];
          const Expr& guv = gsub(t, u);
          if (j2.is_zero() || guv.is_zero()) continue;
          acc += guv * j1 * j2;
        }
      }
      r.set(s1, s2, acc);
    }
  }
  return r;
}

VectorField pushforward(const CoordMap& m, const VectorField& v) {
  VectorField r;
  for (Coord t : m.target.coords) r[t] = v.apply(m.images[idx(t)]);
  return r;
}

VectorField compose(const VectorField& w, const CoordMap& m) {
  const auto b = m.target_bindings();
  VectorField r;
  for (Coord t : m.target.coords) r[t] = substitute(w[t], b);
  return r;
}

bool is_related(const CoordMap& m, const VectorField& v, const VectorField& w) {
  return pushforward(m, v) == compose(w, m);
}

VectorField related_through(const CoordMap& m, const VectorField& v) {
  for (std::size_t a = 0; a < m.constraints.size(); ++a) {
    Expr t = m.restrict_to_locus(v.apply(m.constraints[a]));
    if (!t.is_zero())
      throw NotRelated("not tangent to the locus: V(" + m.constraints[a].str() + ") = " + t.str() +
                       " on the locus");
  }
  VectorField r;
  for (Coord t : m.target.coords) {
    Expr e = m.restrict_to_locus(v.apply(m.images[idx(t)]));
    for (Coord s : m.source.coords) {
      if (m.target.has(s)) continue;
      if (e.depends_on(s))
        throw NotRelated("component " + m.target.names.names[idx(t)] + " depends on fibre coordinate " +
                         m.source.names.names[idx(s)] + ": " + e.str());
    }
    r[t] = std::move(e);
  }
  return r;
}

int numeric_rank(const std::vector<std::array<double, kDim>>& rows, double rel_tol) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kDim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < kDim; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

int rank_at(const std::vector<VectorField>& fields, const Point& p) {
  std::vector<std::array<double, kDim>> rows;
  rows.reserve(fields.size());
  for (const auto& f : fields) {
    std::array<double, kDim> row{};
    for (std::size_t i = 0; i < kDim; ++i) row[i] = f.comp[i].eval(p);
    rows.push_back(row);
  }
  return numeric_rank(rows);
}

}  // namespace g2roll
