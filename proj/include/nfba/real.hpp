#ifndef NFBA_REAL_HPP
#define NFBA_REAL_HPP

#include <algorithm>
#include <compare>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

namespace nfba {

using Integer = mpz_class;
using Rational = mpq_class;

inline constexpr int kDefaultPrecision = 128;
inline constexpr int kMinPrecision = 32;

/* Arbitrary-precision binary float on top of mpfr_t.
 *
 * Every value carries its own precision. Binary operations produce a result
 * at the larger of the two operand precisions, so mixing precisions never
 * silently truncates. There is no global default precision state. */
class Real {
 public:
  explicit Real(int precision = kDefaultPrecision);
  Real(double v, int precision);
  Real(long v, int precision);
  Real(int v, int precision) : Real(static_cast<long>(v), precision) {}
  Real(const Integer& v, int precision);
  Real(const Rational& v, int precision);

  /* Parses a decimal string ("1.25", "-3e-40"); throws Error(Parse). */
  static Real parse(std::string_view text, int precision);
  static Real pi(int precision);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  int precision() const { return static_cast<int>(mpfr_get_prec(value_)); }
  /* Same value rounded to a new precision. */
  Real with_precision(int precision) const;

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);
  Real& operator*=(double rhs);
  Real operator-() const;

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /* Shortest decimal that reads back to the same value at this precision. */
  std::string to_string() const;
  std::string to_string(int significant_digits) const;

  Integer round_to_integer() const;
  Integer floor_to_integer() const;
  Integer ceil_to_integer() const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator+(const Real& a, double b);
  friend Real operator-(const Real& a, double b);
  friend Real operator-(double a, const Real& b);
  friend Real operator*(const Real& a, double b);
  friend Real operator*(double a, const Real& b) { return b * a; }
  friend Real operator/(const Real& a, double b);
  friend Real operator/(double a, const Real& b);
  friend Real operator*(const Real& a, const Integer& b);
  friend Real operator+(const Real& a, const Integer& b);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.value_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, double b);

 private:
  mpfr_t value_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real log2(const Real& x);
Real pow(const Real& base, const Real& exponent);
Real pow(const Real& base, long exponent);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real atan2(const Real& y, const Real& x);
Real cos(const Real& x);
Real sin(const Real& x);

/* Complex number over Real; used for the value at a complex place. */
struct Complex {
  Real re;
  Real im;

  explicit Complex(int precision = kDefaultPrecision) : re(precision), im(precision) {}
  Complex(Real real, Real imag) : re(std::move(real)), im(std::move(imag)) {}
  explicit Complex(Real real) : re(std::move(real)), im(re.precision()) {}

  int precision() const { return std::max(re.precision(), im.precision()); }
  Real norm_squared() const { return re * re + im * im; }
  Real modulus() const;
  Complex conj() const { return {re, -im}; }

  Complex& operator+=(const Complex& rhs);
  Complex& operator-=(const Complex& rhs);
  Complex& operator*=(const Complex& rhs);
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator*(const Complex& a, const Real& s) { return {a.re * s, a.im * s}; }
  friend Complex operator*(const Real& s, const Complex& a) { return a * s; }
  friend Complex operator*(const Complex& a, const Integer& s) { return {a.re * s, a.im * s}; }
  friend Complex operator/(const Complex& a, const Complex& b);
  Complex operator-() const { return {-re, -im}; }
};

}  // namespace nfba

#endif
