#pragma once

#include <array>
#include <cstddef>

namespace g2roll {

/// Second-order Taylor jet at a base point of R^5: f0 + g.d + d^T H d / 2.
/// order records how many derivative levels are still valid (2, 1 or 0); each partial
/// derivative consumes one level. Used to bracket vector fields whose coefficients are
/// only known through a profile h and its derivatives.
class Jet {
public:
  static constexpr std::size_t N = 5;

  Jet() = default;
  static Jet constant(double v, int order = 2);
  static Jet variable(double value, std::size_t i);
  /// Composition f(u) given f, f', f'' at u's base value.
  static Jet compose(const Jet& u, double f, double df, double d2f);

  int order() const { return order_; }
  double value() const { return f0_; }
  double gradient(std::size_t i) const { return g_[i]; }
  double hessian(std::size_t i, std::size_t j) const { return h_[i][j]; }

  Jet derive(std::size_t i) const;

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(double s, const Jet& a);
  Jet operator-() const { return (-1.0) * *this; }

private:
  int order_ = 2;
  double f0_ = 0.0;
  std::array<double, N> g_{};
  std::array<std::array<double, N>, N> h_{};
};

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet reciprocal(const Jet& u);

using JetField = std::array<Jet, Jet::N>;
JetField jet_bracket(const JetField& v, const JetField& w);

}  // namespace g2roll
