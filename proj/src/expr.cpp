#include "g2roll/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace g2roll {

namespace {

// Position of a polynomial coordinate inside Monomial::exps; -1 for h.
int exp_slot(Coord c) {
  switch (c) {
    case Coord::Theta: return 0;
    case Coord::Phi: return 1;
    case Coord::Q: return 2;
    case Coord::Psi: return 3;
    case Coord::H: return -1;
  }
  return -1;
}

struct HarmonicPiece {
  int sign;  // +1 / -1 times the half factor
  bool half;
  std::uint8_t k;
  Harmonic kind;
};

// Product-to-sum for cos/sin(a psi) * cos/sin(b psi); writes up to two pieces.
int harmonic_product(const Monomial& x, const Monomial& y, HarmonicPiece out[2]) {
  if (x.k == 0) {
    out[0] = {1, false, y.k, y.kind};
    return 1;
  }
  if (y.k == 0) {
    out[0] = {1, false, x.k, x.kind};
    return 1;
  }
  const int a = x.k, b = y.k;
  const auto sum = static_cast<std::uint8_t>(a + b);
  const auto diff = static_cast<std::uint8_t>(std::abs(a - b));
  const int dsign = a > b ? 1 : (a < b ? -1 : 0);
  int n = 0;
  if (x.kind == Harmonic::Cos && y.kind == Harmonic::Cos) {
    out[n++] = {1, true, diff, Harmonic::Cos};
    out[n++] = {1, true, sum, Harmonic::Cos};
  } else if (x.kind == Harmonic::Sin && y.kind == Harmonic::Sin) {
    out[n++] = {1, true, diff, Harmonic::Cos};
    out[n++] = {-1, true, sum, Harmonic::Cos};
  } else if (x.kind == Harmonic::Sin) {
    // sin a cos b = (sin(a+b) + sin(a-b)) / 2
    out[n++] = {1, true, sum, Harmonic::Sin};
    if (dsign != 0) out[n++] = {dsign, true, diff, Harmonic::Sin};
  } else {
    // cos a sin b = (sin(a+b) - sin(a-b)) / 2
    out[n++] = {1, true, sum, Harmonic::Sin};
    if (dsign != 0) out[n++] = {-dsign, true, diff, Harmonic::Sin};
  }
  return n;
}

const Rational kHalf(1, 2);
const Rational kMinusHalf(-1, 2);

}  // namespace

Params::Params(Rational kappa_, Rational c_, Rational alpha_)
    : kappa(std::move(kappa_)), c(std::move(c_)), alpha(std::move(alpha_)) {
  if (c == 0) throw std::invalid_argument("Params: c must be non-zero");
}

std::string Params::str() const {
  return "kappa=" + kappa.get_str() + " c=" + c.get_str() + " alpha=" + alpha.get_str();
}

std::pair<Rational, Rational> RationalPoint::circle(const Rational& t) {
  Rational d = 1 + t * t;
  return {(1 - t * t) / d, (2 * t) / d};
}

Expr::Expr(const Rational& c) {
  if (c != 0) terms_.push_back({Monomial{}, RatFunc(c)});
}

Expr::Expr(RatFunc c) {
  if (!c.is_zero()) terms_.push_back({Monomial{}, std::move(c)});
}

Expr Expr::var(Coord c) {
  if (c == Coord::H) return Expr(RatFunc(HPoly::monomial(1, 1)));
  Monomial m;
  m.exps[exp_slot(c)] = 1;
  return from_sorted({{m, RatFunc(Rational(1))}});
}

Expr Expr::harmonic(Harmonic kind, unsigned k) {
  if (k == 0) return kind == Harmonic::Cos ? Expr(Rational(1)) : Expr();
  Monomial m;
  m.k = static_cast<std::uint8_t>(k);
  m.kind = kind;
  return from_sorted({{m, RatFunc(Rational(1))}});
}

Expr Expr::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.mono < b.mono; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (t.coeff.is_zero()) continue;
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().coeff = out.back().coeff + t.coeff;
      if (out.back().coeff.is_zero()) out.pop_back();
    } else {
      out.push_back(std::move(t));
    }
  }
  return from_sorted(std::move(out));
}

bool Expr::is_pure_h() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_unit()); }

RatFunc Expr::as_ratfunc() const {
  if (!is_pure_h()) throw std::logic_error("as_ratfunc on an expression that is not pure in h");
  return terms_.empty() ? RatFunc() : terms_[0].coeff;
}

bool Expr::depends_on(Coord c) const {
  const int s = exp_slot(c);
  for (const auto& t : terms_) {
    if (s < 0) {
      if (!t.coeff.is_constant()) return true;
    } else {
      if (t.mono.exps[s] != 0) return true;
      if (c == Coord::Psi && t.mono.k != 0) return true;
    }
  }
  return false;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Term> out;
  out.reserve(a.terms_.size() + b.terms_.size());
  auto i = a.terms_.begin(), j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->mono < j->mono)) {
      out.push_back(*i++);
    } else if (i == a.terms_.end() || j->mono < i->mono) {
      out.push_back(*j++);
    } else {
      RatFunc s = i->coeff + j->coeff;
      if (!s.is_zero()) out.push_back({i->mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  return Expr::from_sorted(std::move(out));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size() * 2);
  HarmonicPiece pieces[2];
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      RatFunc prod = x.coeff * y.coeff;
      Monomial m;
      for (int v = 0; v < 4; ++v) m.exps[v] = static_cast<std::uint8_t>(x.mono.exps[v] + y.mono.exps[v]);
      const int n = harmonic_product(x.mono, y.mono, pieces);
      for (int p = 0; p < n; ++p) {
        m.k = pieces[p].k;
        m.kind = pieces[p].kind;
        if (!pieces[p].half) {
          out.push_back({m, prod});
        } else {
          out.push_back({m, prod * (pieces[p].sign > 0 ? kHalf : kMinusHalf)});
        }
      }
    }
  }
  return Expr::from_terms(std::move(out));
}

Expr operator*(const Expr& a, const RatFunc& s) {
  if (s.is_zero()) return {};
  std::vector<Term> out;
  out.reserve(a.terms_.size());
  for (const auto& t : a.terms_) out.push_back({t.mono, t.coeff * s});
  return Expr::from_sorted(std::move(out));
}

Expr operator*(const Expr& a, const Rational& s) {
  if (s == 0) return {};
  std::vector<Term> out;
  out.reserve(a.terms_.size());
  for (const auto& t : a.terms_) out.push_back({t.mono, t.coeff * s});
  return Expr::from_sorted(std::move(out));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].mono == b.terms_[i].mono) || !(a.terms_[i].coeff == b.terms_[i].coeff)) return false;
  }
  return true;
}

Expr Expr::pow(unsigned n) const {
  Expr result(Rational(1));
  Expr base = *this;
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

Expr Expr::derive(Coord c) const {
  std::vector<Term> out;
  out.reserve(terms_.size() * 2);
  if (c == Coord::H) {
    for (const auto& t : terms_) out.push_back({t.mono, t.coeff.derivative()});
    return from_terms(std::move(out));
  }
  const int s = exp_slot(c);
  for (const auto& t : terms_) {
    if (t.mono.exps[s] > 0) {
      Monomial m = t.mono;
      m.exps[s] -= 1;
      out.push_back({m, t.coeff * Rational(t.mono.exps[s])});
    }
    if (c == Coord::Psi && t.mono.k > 0) {
      Monomial m = t.mono;
      if (t.mono.kind == Harmonic::Cos) {
        m.kind = Harmonic::Sin;
        out.push_back({m, t.coeff * Rational(-static_cast<long>(t.mono.k))});
      } else {
        m.kind = Harmonic::Cos;
        out.push_back({m, t.coeff * Rational(static_cast<long>(t.mono.k))});
      }
    }
  }
  return from_terms(std::move(out));
}

double Expr::eval(const Point& p) const { return NumericExpr(*this)(p); }

Rational Expr::eval(const RationalPoint& p) const {
  unsigned max_k = 0;
  for (const auto& t : terms_) max_k = std::max<unsigned>(max_k, t.mono.k);
  std::vector<Rational> ck(max_k + 1), sk(max_k + 1);
  ck[0] = 1;
  sk[0] = 0;
  for (unsigned k = 1; k <= max_k; ++k) {
    ck[k] = ck[k - 1] * p.cos_psi - sk[k - 1] * p.sin_psi;
    sk[k] = sk[k - 1] * p.cos_psi + ck[k - 1] * p.sin_psi;
  }
  static constexpr std::array<Coord, 4> poly_vars{Coord::Theta, Coord::Phi, Coord::Q, Coord::Psi};
  Rational sum = 0, term, pw;
  for (const auto& t : terms_) {
    try {
      term = t.coeff.eval(p.x[idx(Coord::H)]);
    } catch (const std::domain_error& e) {
      throw PoleError(e.what());
    }
    for (int v = 0; v < 4; ++v) {
      if (t.mono.exps[v] == 0) continue;
      mpz_class zn, zd;
      const Rational& base = p.x[idx(poly_vars[v])];
      mpz_pow_ui(zn.get_mpz_t(), base.get_num_mpz_t(), t.mono.exps[v]);
      mpz_pow_ui(zd.get_mpz_t(), base.get_den_mpz_t(), t.mono.exps[v]);
      term *= Rational(zn, zd);
    }
    term *= t.mono.kind == Harmonic::Cos ? ck[t.mono.k] : sk[t.mono.k];
    sum += term;
  }
  return sum;
}

Expr add(const Expr& a, const Expr& b) { return a + b; }
Expr mul(const Expr& a, const Expr& b) { return a * b; }
Expr derive(const Expr& a, Coord c) { return a.derive(c); }
bool is_zero(const Expr& a) { return a.is_zero(); }

Expr substitute(const Expr& a, const Bindings& bindings) {
  if (bindings.empty()) return a;
  static constexpr std::array<Coord, 4> poly_vars{Coord::Theta, Coord::Phi, Coord::Q, Coord::Psi};
  const auto h_it = bindings.find(Coord::H);
  const auto psi_it = bindings.find(Coord::Psi);
  const bool psi_identity = psi_it == bindings.end() || psi_it->second == Expr::var(Coord::Psi);

  // Cached powers of each bound image.
  std::array<std::vector<Expr>, kDim> powers;
  auto power_of = [&](Coord c, unsigned n) -> const Expr& {
    auto& cache = powers[idx(c)];
    if (cache.empty()) cache.push_back(Expr(Rational(1)));
    while (cache.size() <= n) cache.push_back(cache.back() * bindings.at(c));
    return cache[n];
  };
  auto poly_at = [&](const HPoly& p) {
    Expr r;
    const auto& cs = p.coeffs();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i] != 0) r += power_of(Coord::H, static_cast<unsigned>(i)) * cs[i];
    }
    return r;
  };

  Expr result;
  for (const auto& t : a.terms()) {
    Expr piece;
    if (h_it != bindings.end()) {
      Expr den = poly_at(t.coeff.den());
      if (den.is_zero()) {
        throw SingularSubstitution("denominator " + t.coeff.den().str() + " vanishes under the substitution");
      }
      if (!den.is_pure_h()) {
        throw SingularSubstitution("denominator " + t.coeff.den().str() +
                                   " does not stay a function of h under the substitution");
      }
      piece = poly_at(t.coeff.num()) * (RatFunc(Rational(1)) / den.as_ratfunc());
    } else {
      piece = Expr(t.coeff);
    }
    Monomial rest;
    for (int v = 0; v < 4; ++v) {
      if (bindings.count(poly_vars[v])) continue;
      rest.exps[v] = t.mono.exps[v];
    }
    if (t.mono.k != 0) {
      if (!psi_identity) throw std::invalid_argument("substitute: harmonic present while psi is rebound");
      rest.k = t.mono.k;
      rest.kind = t.mono.kind;
    }
    piece = piece * Expr::from_terms({{rest, RatFunc(Rational(1))}});
    for (int v = 0; v < 4; ++v) {
      if (t.mono.exps[v] == 0 || !bindings.count(poly_vars[v])) continue;
      piece = piece * power_of(poly_vars[v], t.mono.exps[v]);
    }
    result += piece;
  }
  return result;
}

NumericExpr::NumericExpr(const Expr& e) {
  terms_.reserve(e.size());
  for (const auto& t : e.terms()) {
    NTerm n;
    n.exps = t.mono.exps;
    n.k = t.mono.k;
    n.kind = t.mono.kind;
    for (const auto& c : t.coeff.num().coeffs()) n.num.push_back(c.get_d());
    for (const auto& c : t.coeff.den().coeffs()) n.den.push_back(c.get_d());
    max_k_ = std::max<unsigned>(max_k_, n.k);
    terms_.push_back(std::move(n));
  }
}

double NumericExpr::operator()(const Point& p) const {
  const double h = p[idx(Coord::H)];
  const double vars[4] = {p[idx(Coord::Theta)], p[idx(Coord::Phi)], p[idx(Coord::Q)], p[idx(Coord::Psi)]};
  double ck[64], sk[64];
  const unsigned kmax = std::min(max_k_, 63u);
  for (unsigned k = 0; k <= kmax; ++k) {
    ck[k] = std::cos(k * vars[3]);
    sk[k] = std::sin(k * vars[3]);
  }
  auto horner = [h](const std::vector<double>& c) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * h + *it;
    return r;
  };
  double sum = 0.0;
  for (const auto& t : terms_) {
    const double d = horner(t.den);
    if (d == 0.0) throw PoleError("pole of coefficient at h = " + std::to_string(h));
    double v = horner(t.num) / d;
    for (int i = 0; i < 4; ++i)
      for (int e = 0; e < t.exps[i]; ++e) v *= vars[i];
    v *= t.kind == Harmonic::Cos ? ck[t.k] : sk[t.k];
    sum += v;
  }
  return sum;
}

const ChartNames& default_names() {
  static const ChartNames names{{"theta", "phi", "h", "q", "psi"}};
  return names;
}

std::optional<Coord> ChartNames::lookup(std::string_view id) const {
  for (std::size_t i = 0; i < kDim; ++i)
    if (!names[i].empty() && names[i] == id) return static_cast<Coord>(i);
  return std::nullopt;
}

std::string Expr::str() const { return str(default_names().names); }

std::string Expr::str(const std::array<std::string, kDim>& names) const {
  if (terms_.empty()) return "0";
  auto name = [&](Coord c) -> const std::string& {
    const auto& n = names[idx(c)];
    return n.empty() ? default_names().names[idx(c)] : n;
  };
  static constexpr std::array<Coord, 4> poly_vars{Coord::Theta, Coord::Phi, Coord::Q, Coord::Psi};
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    std::vector<std::string> factors;
    bool negative = false;
    const HPoly& num = t.coeff.num();
    if (num.is_monomial()) {
      Rational a = num.lead();
      negative = a < 0;
      a = abs(a);
      if (a != 1) factors.push_back(a.get_str());
      const int d = num.degree();
      if (d == 1) factors.push_back(name(Coord::H));
      if (d > 1) factors.push_back(name(Coord::H) + "^" + std::to_string(d));
    } else {
      factors.push_back("(" + num.str(name(Coord::H)) + ")");
    }
    for (int v = 0; v < 4; ++v) {
      const unsigned e = t.mono.exps[v];
      if (e == 0) continue;
      factors.push_back(name(poly_vars[v]) + (e > 1 ? "^" + std::to_string(e) : ""));
    }
    if (t.mono.k != 0) {
      std::string f = t.mono.kind == Harmonic::Cos ? "cos(" : "sin(";
      if (t.mono.k != 1) f += std::to_string(t.mono.k) + "*";
      factors.push_back(f + name(Coord::Psi) + ")");
    }
    std::string body;
    for (std::size_t i = 0; i < factors.size(); ++i) body += (i ? "*" : "") + factors[i];
    if (body.empty()) body = "1";
    const HPoly& den = t.coeff.den();
    if (!den.is_one()) {
      if (den.is_monomial())
        body += "/" + den.str(name(Coord::H));
      else
        body += "/(" + den.str(name(Coord::H)) + ")";
    }
    if (first) {
      out << (negative ? "-" : "") << body;
    } else {
      out << (negative ? " - " : " + ") << body;
    }
    first = false;
  }
  return out.str();
}

}  // namespace g2roll
