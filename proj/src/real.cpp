#include "nfba/real.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "nfba/error.hpp"

namespace nfba {

namespace {

mpfr_prec_t clamp_prec(int precision) {
  return static_cast<mpfr_prec_t>(std::max(precision, 2));
}

int joint(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

Real::Real(int precision) {
  mpfr_init2(value_, clamp_prec(precision));
  mpfr_set_zero(value_, 1);
}

Real::Real(double v, int precision) {
  mpfr_init2(value_, clamp_prec(precision));
  mpfr_set_d(value_, v, MPFR_RNDN);
}

Real::Real(long v, int precision) {
  mpfr_init2(value_, clamp_prec(precision));
  mpfr_set_si(value_, v, MPFR_RNDN);
}

Real::Real(const Integer& v, int precision) {
  mpfr_init2(value_, clamp_prec(precision));
  mpfr_set_z(value_, v.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const Rational& v, int precision) {
  mpfr_init2(value_, clamp_prec(precision));
  mpfr_set_q(value_, v.get_mpq_t(), MPFR_RNDN);
}

Real Real::parse(std::string_view text, int precision) {
  Real out(precision);
  std::string s(text);
  while (!s.empty() && (s.front() == ' ' || s.front() == '+')) s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty() || mpfr_set_str(out.value_, s.c_str(), 10, MPFR_RNDN) != 0) {
    fail(ErrorKind::Parse, "not a decimal number: '" + std::string(text) + "'");
  }
  return out;
}

Real Real::pi(int precision) {
  Real out(precision);
  mpfr_const_pi(out.value_, MPFR_RNDN);
  return out;
}

Real::Real(const Real& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::with_precision(int precision) const {
  Real out(precision);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

Real& Real::operator+=(const Real& rhs) { return *this = *this + rhs; }
Real& Real::operator-=(const Real& rhs) { return *this = *this - rhs; }
Real& Real::operator*=(const Real& rhs) { return *this = *this * rhs; }
Real& Real::operator/=(const Real& rhs) { return *this = *this / rhs; }
Real& Real::operator*=(double rhs) {
  mpfr_mul_d(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real out(precision());
  mpfr_neg(out.value_, value_, MPFR_RNDN);
  return out;
}

std::string Real::to_string() const {
  // digits needed for a decimal round trip at p bits
  int digits = 1 + static_cast<int>(std::ceil(precision() * 0.30102999566398120));
  return to_string(digits);
}

std::string Real::to_string(int significant_digits) const {
  if (is_zero()) return "0";
  if (!is_finite()) return mpfr_nan_p(value_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", std::max(significant_digits - 1, 0), value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Integer Real::round_to_integer() const {
  Integer out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDN);
  return out;
}

Integer Real::floor_to_integer() const {
  Integer out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDD);
  return out;
}

Integer Real::ceil_to_integer() const {
  Integer out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDU);
  return out;
}

Real operator+(const Real& a, const Real& b) {
  Real out(joint(a, b));
  mpfr_add(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Real operator-(const Real& a, const Real& b) {
  Real out(joint(a, b));
  mpfr_sub(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Real operator*(const Real& a, const Real& b) {
  Real out(joint(a, b));
  mpfr_mul(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Real operator/(const Real& a, const Real& b) {
  Real out(joint(a, b));
  mpfr_div(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Real operator+(const Real& a, double b) {
  Real out(a.precision());
  mpfr_add_d(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

Real operator-(const Real& a, double b) {
  Real out(a.precision());
  mpfr_sub_d(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

Real operator-(double a, const Real& b) {
  Real out(b.precision());
  mpfr_d_sub(out.value_, a, b.value_, MPFR_RNDN);
  return out;
}

Real operator*(const Real& a, double b) {
  Real out(a.precision());
  mpfr_mul_d(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

Real operator/(const Real& a, double b) {
  Real out(a.precision());
  mpfr_div_d(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

Real operator/(double a, const Real& b) {
  Real out(b.precision());
  mpfr_d_div(out.value_, a, b.value_, MPFR_RNDN);
  return out;
}

Real operator*(const Real& a, const Integer& b) {
  Real out(a.precision());
  mpfr_mul_z(out.value_, a.value_, b.get_mpz_t(), MPFR_RNDN);
  return out;
}

Real operator+(const Real& a, const Integer& b) {
  Real out(a.precision());
  mpfr_add_z(out.value_, a.value_, b.get_mpz_t(), MPFR_RNDN);
  return out;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const Real& a, double b) {
  if (mpfr_nan_p(a.value_) || std::isnan(b)) return std::partial_ordering::unordered;
  int c = mpfr_cmp_d(a.value_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

#define NFBA_UNARY(name, fn)                          \
  Real name(const Real& x) {                          \
    Real out(x.precision());                          \
    fn(out.get(), x.get(), MPFR_RNDN);                \
    return out;                                       \
  }

NFBA_UNARY(abs, mpfr_abs)
NFBA_UNARY(sqrt, mpfr_sqrt)
NFBA_UNARY(exp, mpfr_exp)
NFBA_UNARY(log, mpfr_log)
NFBA_UNARY(log2, mpfr_log2)
NFBA_UNARY(cos, mpfr_cos)
NFBA_UNARY(sin, mpfr_sin)

#undef NFBA_UNARY

Real pow(const Real& base, const Real& exponent) {
  Real out(joint(base, exponent));
  mpfr_pow(out.get(), base.get(), exponent.get(), MPFR_RNDN);
  return out;
}

Real pow(const Real& base, long exponent) {
  Real out(base.precision());
  mpfr_pow_si(out.get(), base.get(), exponent, MPFR_RNDN);
  return out;
}

Real min(const Real& a, const Real& b) { return a <= b ? a.with_precision(joint(a, b)) : b.with_precision(joint(a, b)); }
Real max(const Real& a, const Real& b) { return a >= b ? a.with_precision(joint(a, b)) : b.with_precision(joint(a, b)); }

Real atan2(const Real& y, const Real& x) {
  Real out(joint(y, x));
  mpfr_atan2(out.get(), y.get(), x.get(), MPFR_RNDN);
  return out;
}

Real Complex::modulus() const {
  Real out(precision());
  mpfr_hypot(out.get(), re.get(), im.get(), MPFR_RNDN);
  return out;
}

Complex& Complex::operator+=(const Complex& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& rhs) {
  re -= rhs.re;
  im -= rhs.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& rhs) {
  Real r = re * rhs.re - im * rhs.im;
  Real i = re * rhs.im + im * rhs.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex operator/(const Complex& a, const Complex& b) {
  Real den = b.norm_squared();
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Budget: return "budget exceeded";
    case ErrorKind::InvariantViolation: return "invariant violation";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace nfba
