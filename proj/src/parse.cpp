#include "g2roll/expr.hpp"

#include <cctype>

namespace g2roll {

namespace {

class Parser {
public:
  Parser(std::string_view text, const Params& params, const ChartNames& chart)
      : text_(text), params_(params), chart_(chart) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char ch) {
    if (!accept(ch)) fail(std::string("expected '") + ch + "'");
  }

  bool peek_digit() {
    skip_ws();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  mpz_class uint_literal() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected unsigned integer");
    return mpz_class(std::string(text_.substr(start, pos_ - start)));
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr expr() {
    Expr result;
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    result = term();
    if (negate) result = -result;
    while (true) {
      if (accept('+')) {
        result += term();
      } else if (accept('-')) {
        result -= term();
      } else {
        break;
      }
    }
    return result;
  }

  Expr term() {
    Expr result = factor();
    while (true) {
      if (accept('*')) {
        result = result * factor();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        if (!d.is_pure_h()) throw ParseError("divisor is not a polynomial in h", at);
        result = result * (RatFunc(Rational(1)) / d.as_ratfunc());
      } else {
        break;
      }
    }
    return result;
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      mpz_class n = uint_literal();
      if (!n.fits_uint_p() || n > 255) fail("exponent too large");
      b = b.pow(static_cast<unsigned>(n.get_ui()));
    }
    return b;
  }

  Expr harmonic(Harmonic kind) {
    expect('(');
    unsigned k = 1;
    if (peek_digit()) {
      mpz_class n = uint_literal();
      if (!n.fits_uint_p() || n > 255) fail("harmonic order too large");
      k = static_cast<unsigned>(n.get_ui());
      expect('*');
    }
    const std::size_t at = pos_;
    const std::string id = identifier();
    const auto slot = chart_.lookup(id);
    if (!slot || *slot != Coord::Psi) throw ParseError("harmonic argument must be the psi coordinate", at);
    expect(')');
    return Expr::harmonic(kind, k);
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Expr e = expr();
      expect(')');
      return e;
    }
    if (peek_digit()) {
      mpz_class num = uint_literal();
      mpz_class den(1);
      // int "/" uint is a rational literal; "/" followed by anything else is division.
      const std::size_t save = pos_;
      if (accept('/') && peek_digit()) {
        den = uint_literal();
        if (den == 0) fail("zero denominator in rational literal");
      } else {
        pos_ = save;
      }
      Rational r(num, den);
      r.canonicalize();
      return Expr(r);
    }
    const std::size_t at = pos_;
    const std::string id = identifier();
    if (id.empty()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    if (id == "kappa") return Expr(params_.kappa);
    if (id == "c") return Expr(params_.c);
    if (id == "sin") return harmonic(Harmonic::Sin);
    if (id == "cos") return harmonic(Harmonic::Cos);
    if (auto slot = chart_.lookup(id)) return Expr::var(*slot);
    throw ParseError("unknown identifier '" + id + "'", at);
  }

  std::string_view text_;
  const Params& params_;
  const ChartNames& chart_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const Params& params) { return parse(text, params, default_names()); }

Expr parse(std::string_view text, const Params& params, const ChartNames& chart) {
  return Parser(text, params, chart).run();
}

}  // namespace g2roll
