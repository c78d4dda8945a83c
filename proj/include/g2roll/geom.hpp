#pragma once

#include "g2roll/expr.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace g2roll {

/// A named coordinate system living on the 5 ring slots. Charts of lower dimension
/// leave some slots inactive; charts other than the main one relabel the slots
/// (e.g. c4 lives in the h slot because it is the only coordinate that the conformal
/// inversion ever divides by).
struct Chart {
  std::string name;
  ChartNames names;
  std::vector<Coord> coords;  // natural coordinate order, e.g. c1..c5

  bool has(Coord c) const;
  /// Slot of the coordinate called id; throws std::out_of_range.
  Coord slot(std::string_view id) const;
  std::size_t dim() const { return coords.size(); }
};

/// (theta, phi, h, q, psi): the configuration space of the rolling surface.
const Chart& main_chart();
/// (c1, c2, c3, c4, c5): flat Cartan/Engel model coordinates.
const Chart& c_chart();
/// (r1, ..., r5): coordinates in which the conformal structure is 2dr1dr5 + 2dr2dr4 + dr3^2.
const Chart& r_chart();
/// (c1, c2, c4, c5) on the hypersurface c3 = 0.
const Chart& c3zero_chart();
/// (theta, phi, psi) on the plane-circle submanifold.
const Chart& plane_circle_chart();

struct VectorField {
  std::array<Expr, kDim> comp;

  VectorField() = default;
  explicit VectorField(std::array<Expr, kDim> c) : comp(std::move(c)) {}
  static VectorField coordinate(Coord c);

  const Expr& operator[](Coord c) const { return comp[idx(c)]; }
  Expr& operator[](Coord c) { return comp[idx(c)]; }
  bool is_zero() const;

  /// Directional derivative V(f).
  Expr apply(const Expr& f) const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator*(const Expr& f, const VectorField& v);
  friend VectorField operator*(const Rational& s, const VectorField& v);
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.comp == b.comp; }
  friend bool operator!=(const VectorField& a, const VectorField& b) { return !(a == b); }

  std::string str(const Chart& chart = main_chart()) const;
};

struct OneForm {
  std::array<Expr, kDim> comp;

  OneForm() = default;
  explicit OneForm(std::array<Expr, kDim> c) : comp(std::move(c)) {}
  static OneForm differential(const Expr& f);
  static OneForm coordinate(Coord c) { return differential(Expr::var(c)); }

  const Expr& operator[](Coord c) const { return comp[idx(c)]; }
  Expr& operator[](Coord c) { return comp[idx(c)]; }
  bool is_zero() const;

  friend OneForm operator+(const OneForm& a, const OneForm& b);
  friend OneForm operator-(const OneForm& a, const OneForm& b);
  friend OneForm operator*(const Expr& f, const OneForm& w);
  friend OneForm operator*(const Rational& s, const OneForm& w);
  friend bool operator==(const OneForm& a, const OneForm& b) { return a.comp == b.comp; }
  friend bool operator!=(const OneForm& a, const OneForm& b) { return !(a == b); }

  std::string str(const Chart& chart = main_chart()) const;
};

/// Symmetric 2-tensor; products of 1-forms are symmetrized, so a*b means (a(x)b + b(x)a)/2
/// and a*a = a(x)a.
class SymTensor {
public:
  SymTensor() = default;
  static SymTensor product(const OneForm& a, const OneForm& b);
  static SymTensor square(const OneForm& a) { return product(a, a); }

  const Expr& operator()(Coord i, Coord j) const { return m_[idx(i)][idx(j)]; }
  void set(Coord i, Coord j, const Expr& v);
  bool is_zero() const;

  friend SymTensor operator+(const SymTensor& a, const SymTensor& b);
  friend SymTensor operator-(const SymTensor& a, const SymTensor& b);
  friend SymTensor operator*(const Expr& f, const SymTensor& g);
  friend SymTensor operator*(const Rational& s, const SymTensor& g);
  friend bool operator==(const SymTensor& a, const SymTensor& b) { return a.m_ == b.m_; }
  friend bool operator!=(const SymTensor& a, const SymTensor& b) { return !(a == b); }

  std::string str(const Chart& chart = main_chart()) const;

private:
  std::array<std::array<Expr, kDim>, kDim> m_;
};

/// Target coordinates as functions of the source coordinates (images indexed by the
/// target slot). When constraints are present the map is only defined on the locus
/// {constraints = 0}; locus lists the substitutions, applied in order, that restrict a
/// source expression to that locus.
struct CoordMap {
  Chart source;
  Chart target;
  std::array<Expr, kDim> images;
  std::vector<Expr> constraints;
  std::vector<Bindings> locus;

  /// Jacobian J[target slot][source slot].
  std::array<std::array<Expr, kDim>, kDim> jacobian() const;
  Bindings target_bindings() const;
  Expr restrict_to_locus(const Expr& e) const;
};

class NotRelated : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

VectorField lie_bracket(const VectorField& v, const VectorField& w);
Expr pair(const OneForm& w, const VectorField& v);
OneForm pullback_oneform(const CoordMap& m, const OneForm& w);
SymTensor pullback_metric(const CoordMap& m, const SymTensor& g);
/// Components m_*V expressed in source coordinates, indexed by target slot.
VectorField pushforward(const CoordMap& m, const VectorField& v);
/// Target field composed with the map: W(m(x)).
VectorField compose(const VectorField& w, const CoordMap& m);
/// True iff m_*V = W o m exactly.
bool is_related(const CoordMap& m, const VectorField& v, const VectorField& w);
/// Pushforward through a projection with constraints: checks tangency to the locus,
/// then that the restricted components only involve target coordinates.
/// Throws NotRelated naming the offending component.
VectorField related_through(const CoordMap& m, const VectorField& v);

/// Numeric rank of the component matrix with threshold 1e-9 * largest singular value.
int rank_at(const std::vector<VectorField>& fields, const Point& p);
/// Rank of an explicit numeric matrix (rows = vectors) with the same threshold rule.
int numeric_rank(const std::vector<std::array<double, kDim>>& rows, double rel_tol = 1e-9);

}  // namespace g2roll
