#include "g2roll/jet.hpp"

#include <algorithm>
#include <cmath>

namespace g2roll {

Jet Jet::constant(double v, int order) {
  Jet j;
  j.order_ = order;
  j.f0_ = v;
  return j;
}

Jet Jet::variable(double value, std::size_t i) {
  Jet j;
  j.f0_ = value;
  j.g_[i] = 1.0;
  return j;
}

Jet Jet::compose(const Jet& u, double f, double df, double d2f) {
  Jet r;
  r.order_ = u.order_;
  r.f0_ = f;
  for (std::size_t i = 0; i < N; ++i) r.g_[i] = df * u.g_[i];
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r.h_[i][j] = df * u.h_[i][j] + d2f * u.g_[i] * u.g_[j];
  return r;
}

Jet Jet::derive(std::size_t i) const {
  Jet r;
  r.order_ = std::max(order_ - 1, -1);
  r.f0_ = g_[i];
  for (std::size_t j = 0; j < N; ++j) r.g_[j] = h_[i][j];
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.order_ = std::min(a.order_, b.order_);
  r.f0_ = a.f0_ + b.f0_;
  for (std::size_t i = 0; i < Jet::N; ++i) {
    r.g_[i] = a.g_[i] + b.g_[i];
    for (std::size_t j = 0; j < Jet::N; ++j) r.h_[i][j] = a.h_[i][j] + b.h_[i][j];
  }
  return r;
}

Jet operator-(const Jet& a, const Jet& b) { return a + (-1.0) * b; }

Jet operator*(double s, const Jet& a) {
  Jet r = a;
  r.f0_ *= s;
  for (std::size_t i = 0; i < Jet::N; ++i) {
    r.g_[i] *= s;
    for (std::size_t j = 0; j < Jet::N; ++j) r.h_[i][j] *= s;
  }
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.order_ = std::min(a.order_, b.order_);
  r.f0_ = a.f0_ * b.f0_;
  for (std::size_t i = 0; i < Jet::N; ++i) {
    r.g_[i] = a.f0_ * b.g_[i] + b.f0_ * a.g_[i];
    for (std::size_t j = 0; j < Jet::N; ++j)
      r.h_[i][j] = a.f0_ * b.h_[i][j] + b.f0_ * a.h_[i][j] + a.g_[i] * b.g_[j] + b.g_[i] * a.g_[j];
  }
  return r;
}

Jet sin(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return Jet::compose(u, s, c, -s);
}

Jet cos(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return Jet::compose(u, c, -s, -c);
}

Jet reciprocal(const Jet& u) {
  const double v = u.value();
  return Jet::compose(u, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

JetField jet_bracket(const JetField& v, const JetField& w) {
  JetField r;
  for (std::size_t i = 0; i < Jet::N; ++i) {
    Jet acc = Jet::constant(0.0);
    for (std::size_t j = 0; j < Jet::N; ++j) acc = acc + v[j] * w[i].derive(j) - w[j] * v[i].derive(j);
    r[i] = acc;
  }
  return r;
}

}  // namespace g2roll
