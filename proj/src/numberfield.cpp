#include "nfba/numberfield.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "nfba/error.hpp"

namespace nfba {

namespace {

using RatMatrix = std::vector<std::vector<Rational>>;

Rational parse_rational(const nlohmann::json& j, const char* what) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    Rational r;
    if (s.empty() || r.set_str(s, 10) != 0) fail(ErrorKind::Config, std::string("bad rational in ") + what + ": '" + s + "'");
    if (r.get_den() == 0) fail(ErrorKind::Config, std::string("zero denominator in ") + what);
    r.canonicalize();
    return r;
  }
  fail(ErrorKind::Config, std::string("expected integer or \"num/den\" string in ") + what);
}

Integer parse_integer(const nlohmann::json& j, const char* what) {
  Rational r = parse_rational(j, what);
  if (r.get_den() != 1) fail(ErrorKind::Config, std::string("expected an integer in ") + what);
  return r.get_num();
}

std::string rational_string(const Rational& r) {
  return r.get_den() == 1 ? r.get_num().get_str() : r.get_str();
}

nlohmann::json rational_json(const Rational& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
  return rational_string(r);
}

/* Determinant by fraction-exact Gaussian elimination. */
Rational determinant(RatMatrix m) {
  const size_t n = m.size();
  Rational det = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

/* Solves m * x = rhs exactly; nullopt when singular. */
std::optional<std::vector<Rational>> solve(RatMatrix m, std::vector<Rational> rhs) {
  const size_t n = m.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (size_t i = 0; i < n; ++i) rhs[i] /= m[i][i];
  return rhs;
}

std::optional<RatMatrix> invert(const RatMatrix& m) {
  const size_t n = m.size();
  RatMatrix inv(n, std::vector<Rational>(n));
  for (size_t j = 0; j < n; ++j) {
    std::vector<Rational> e(n, 0);
    e[j] = 1;
    auto col = solve(m, e);
    if (!col) return std::nullopt;
    for (size_t i = 0; i < n; ++i) inv[i][j] = (*col)[i];
  }
  return inv;
}

// Polynomials over Q, coefficient i = x^i.
using RatPoly = std::vector<Rational>;

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly poly_mod(RatPoly a, const RatPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return a;
}

RatPoly poly_gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RatPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

bool divides_exactly(const std::vector<Integer>& f, const std::vector<Integer>& g) {
  RatPoly a(f.begin(), f.end()), b(g.begin(), g.end());
  return poly_mod(a, b).empty();
}

int bit_count(unsigned mask) { return std::popcount(mask); }

/* Monic integer polynomials have only monic integer factors (Gauss); look for
 * one of degree <= d/2 among products of numerically computed roots. */
bool is_reducible(const std::vector<Integer>& poly) {
  const int d = static_cast<int>(poly.size()) - 1;
  if (d <= 1) return false;
  auto roots = polynomial_roots(poly, 256);
  std::vector<std::complex<double>> r;
  for (const auto& z : roots) r.emplace_back(z.re.to_double(), z.im.to_double());
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    int k = bit_count(mask);
    if (k > d / 2) continue;
    std::vector<std::complex<double>> prod{1.0};
    for (int i = 0; i < d; ++i) {
      if (!(mask & (1u << i))) continue;
      std::vector<std::complex<double>> next(prod.size() + 1, 0.0);
      for (size_t j = 0; j < prod.size(); ++j) {
        next[j + 1] += prod[j];
        next[j] -= prod[j] * r[i];
      }
      prod = std::move(next);
    }
    std::vector<Integer> candidate;
    bool integral = true;
    for (const auto& c : prod) {
      double rounded = std::round(c.real());
      if (std::abs(c.imag()) > 1e-6 || std::abs(c.real() - rounded) > 1e-6 * std::max(1.0, std::abs(c.real()))) {
        integral = false;
        break;
      }
      candidate.emplace_back(static_cast<long>(rounded));
    }
    if (integral && divides_exactly(poly, candidate)) return true;
  }
  return false;
}

template <class T>
Complex horner(const std::vector<T>& coeffs, const Complex& z, int prec) {
  Complex acc(prec);
  for (size_t i = coeffs.size(); i-- > 0;) {
    acc *= z;
    acc.re += Real(coeffs[i], prec);
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// PlaceLayout, AlgebraicNumber, AlgebraicInteger

int PlaceLayout::degree() const {
  int d = 0;
  for (auto k : kinds) d += nfba::local_degree(k);
  return d;
}

int PlaceLayout::num_real() const {
  return static_cast<int>(std::count(kinds.begin(), kinds.end(), PlaceKind::Real));
}

AlgebraicNumber AlgebraicNumber::constant(int degree, const Rational& value) {
  std::vector<Rational> c(degree, 0);
  if (degree > 0) c[0] = value;
  return AlgebraicNumber(std::move(c));
}

bool AlgebraicNumber::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rational& r) { return r == 0; });
}

std::string AlgebraicNumber::to_string() const {
  std::string out = "[";
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ",";
    out += rational_string(coords_[i]);
  }
  return out + "]";
}

AlgebraicNumber& AlgebraicNumber::operator+=(const AlgebraicNumber& rhs) {
  for (size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
  return *this;
}

AlgebraicNumber& AlgebraicNumber::operator-=(const AlgebraicNumber& rhs) {
  for (size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
  return *this;
}

AlgebraicNumber AlgebraicNumber::operator-() const {
  AlgebraicNumber out = *this;
  for (auto& c : out.coords_) c = -c;
  return out;
}

AlgebraicNumber operator*(const Rational& s, AlgebraicNumber a) {
  for (auto& c : a.coords_) c *= s;
  return a;
}

bool AlgebraicInteger::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](const Integer& c) { return c == 0; });
}

// ---------------------------------------------------------------------------
// SNumber

SNumber::SNumber(PlaceLayout layout, std::vector<Complex> values, int precision_bits)
    : layout_(std::move(layout)), values_(std::move(values)), precision_(precision_bits) {
  if (static_cast<int>(values_.size()) != layout_.size()) {
    fail(ErrorKind::Domain, "S-number needs one value per place");
  }
}

SNumber SNumber::zero(const PlaceLayout& layout, int precision_bits) {
  return SNumber(layout, std::vector<Complex>(layout.size(), Complex(precision_bits)), precision_bits);
}

SNumber SNumber::from_doubles(const PlaceLayout& layout, const std::vector<double>& re,
                              const std::vector<double>& im, int precision_bits) {
  std::vector<Complex> values;
  for (int v = 0; v < layout.size(); ++v) {
    double imag = layout.kinds[v] == PlaceKind::Complex && v < static_cast<int>(im.size()) ? im[v] : 0.0;
    values.emplace_back(Real(re.at(v), precision_bits), Real(imag, precision_bits));
  }
  return SNumber(layout, std::move(values), precision_bits);
}

Real SNumber::sup_norm() const {
  Real best(precision_);
  for (const auto& z : values_) best = max(best, z.modulus());
  return best;
}

bool SNumber::is_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Complex& z) { return z.re.is_zero() && z.im.is_zero(); });
}

SNumber SNumber::with_precision(int precision_bits) const {
  std::vector<Complex> values;
  for (const auto& z : values_) values.emplace_back(z.re.with_precision(precision_bits), z.im.with_precision(precision_bits));
  return SNumber(layout_, std::move(values), precision_bits);
}

SNumber& SNumber::operator+=(const SNumber& rhs) {
  for (size_t v = 0; v < values_.size(); ++v) values_[v] += rhs.values_[v];
  precision_ = std::max(precision_, rhs.precision_);
  return *this;
}

SNumber& SNumber::operator-=(const SNumber& rhs) {
  for (size_t v = 0; v < values_.size(); ++v) values_[v] -= rhs.values_[v];
  precision_ = std::max(precision_, rhs.precision_);
  return *this;
}

SNumber operator*(const SNumber& a, const SNumber& b) {
  std::vector<Complex> values;
  for (int v = 0; v < a.size(); ++v) values.push_back(a.values_[v] * b.values_[v]);
  return SNumber(a.layout_, std::move(values), std::max(a.precision_, b.precision_));
}

SNumber operator*(const SNumber& a, const Real& s) {
  std::vector<Complex> values;
  for (const auto& z : a.values_) values.push_back(z * s);
  return SNumber(a.layout_, std::move(values), a.precision_);
}

Real distance(const SNumber& x, const SNumber& y) { return (x - y).sup_norm(); }

Real SNumberPair::sup_norm() const { return max(first.sup_norm(), second.sup_norm()); }

// ---------------------------------------------------------------------------
// Root finding

std::vector<Complex> polynomial_roots(const std::vector<Integer>& coeffs, int precision_bits) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d < 1) return {};
  if (d == 1) {
    Real root = Real(coeffs[0], precision_bits) / Real(coeffs[1], precision_bits);
    return {Complex(-root)};
  }
  // Aberth iteration in double precision to seed the high-precision pass.
  std::vector<std::complex<double>> c(d + 1);
  for (int i = 0; i <= d; ++i) c[i] = coeffs[i].get_d() / coeffs[d].get_d();
  double bound = 1.0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, 1.0 + std::abs(c[i]));
  std::vector<std::complex<double>> z(d);
  for (int k = 0; k < d; ++k) z[k] = std::polar(0.5 * bound, 2.0 * M_PI * k / d + 0.4);
  auto eval = [&](std::complex<double> x, std::complex<double>& deriv) {
    std::complex<double> p = c[d];
    deriv = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      deriv = deriv * x + p;
      p = p * x + c[i];
    }
    return p;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double worst = 0.0;
    for (int k = 0; k < d; ++k) {
      std::complex<double> dp;
      std::complex<double> p = eval(z[k], dp);
      if (p == 0.0) continue;
      std::complex<double> ratio = p / dp;
      std::complex<double> sum = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      std::complex<double> step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-15) break;
  }

  const int prec = precision_bits + 32;
  std::vector<Complex> roots;
  for (const auto& r : z) roots.emplace_back(Real(r.real(), prec), Real(r.imag(), prec));
  std::vector<Complex> dcoeffs;
  for (int i = 1; i <= d; ++i) dcoeffs.emplace_back(Real(Integer(coeffs[i] * i), prec));
  auto eval_deriv = [&](const Complex& x) {
    Complex acc(prec);
    for (size_t i = dcoeffs.size(); i-- > 0;) {
      acc *= x;
      acc += dcoeffs[i];
    }
    return acc;
  };
  Real tol = pow(Real(2.0, prec), -(prec - 6));
  for (int iter = 0; iter < 200; ++iter) {
    bool converged = true;
    for (int k = 0; k < d; ++k) {
      Complex p = horner(coeffs, roots[k], prec);
      if (p.re.is_zero() && p.im.is_zero()) continue;
      Complex ratio = p / eval_deriv(roots[k]);
      Complex sum(prec);
      for (int j = 0; j < d; ++j)
        if (j != k) sum += Complex(Real(1.0, prec), Real(prec)) / (roots[k] - roots[j]);
      Complex step = ratio / (Complex(Real(1.0, prec), Real(prec)) - ratio * sum);
      roots[k] -= step;
      Real scale = max(Real(1.0, prec), roots[k].modulus());
      if (step.modulus() > tol * scale) converged = false;
    }
    if (converged) break;
  }
  // Snap real roots onto the real line and polish them there.
  Real snap = pow(Real(2.0, prec), -(precision_bits / 2));
  for (auto& r : roots) {
    if (abs(r.im) < snap * max(Real(1.0, prec), abs(r.re))) {
      r.im = Real(prec);
      for (int iter = 0; iter < 8; ++iter) {
        Complex p = horner(coeffs, r, prec);
        Complex dp = eval_deriv(r);
        if (dp.re.is_zero()) break;
        r.re -= p.re / dp.re;
      }
    }
  }
  for (auto& r : roots) r = Complex(r.re.with_precision(precision_bits), r.im.with_precision(precision_bits));
  return roots;
}

// ---------------------------------------------------------------------------
// Embedding

Embedding::Embedding(const NumberField& field, int precision_bits)
    : precision_(precision_bits), degree_(field.degree()), layout_(field.layout()) {
  auto all = polynomial_roots(field.config().min_poly, precision_bits + 32);
  std::vector<Complex> real_roots, complex_roots;
  for (auto& r : all) {
    if (r.im.is_zero())
      real_roots.push_back(r);
    else if (r.im.sign() > 0)
      complex_roots.push_back(r);
  }
  std::sort(real_roots.begin(), real_roots.end(), [](const Complex& a, const Complex& b) { return a.re > b.re; });
  std::sort(complex_roots.begin(), complex_roots.end(), [](const Complex& a, const Complex& b) {
    return a.re != b.re ? a.re > b.re : a.im > b.im;
  });
  const int prec = precision_bits + 32;
  for (auto& r : real_roots) roots_.push_back(r);
  for (auto& r : complex_roots) roots_.push_back(r);
  for (const auto& root : roots_) {
    std::vector<Complex> pw;
    Complex acc(Real(1.0, prec), Real(prec));
    for (int k = 0; k < degree_; ++k) {
      pw.push_back(acc);
      acc *= root;
    }
    powers_.push_back(std::move(pw));
  }
  const auto& basis = field.config().integral_basis;
  for (int v = 0; v < layout_.size(); ++v) {
    std::vector<Complex> row;
    for (int i = 0; i < degree_; ++i) {
      Complex acc(prec);
      for (int k = 0; k < degree_; ++k) {
        if (basis[i][k] == 0) continue;
        acc += powers_[v][k] * Real(basis[i][k], prec);
      }
      row.emplace_back(acc.re.with_precision(precision_bits), acc.im.with_precision(precision_bits));
    }
    basis_.push_back(std::move(row));
  }
}

SNumber Embedding::embed(const AlgebraicNumber& a) const {
  const int prec = precision_ + 32;
  std::vector<Complex> values;
  for (int v = 0; v < layout_.size(); ++v) {
    Complex acc(prec);
    for (int k = 0; k < degree_; ++k) {
      if (a.coords()[k] == 0) continue;
      acc += powers_[v][k] * Real(a.coords()[k], prec);
    }
    values.emplace_back(acc.re.with_precision(precision_), acc.im.with_precision(precision_));
  }
  return SNumber(layout_, std::move(values), precision_);
}

Complex Embedding::embed_at(const AlgebraicInteger& a, int place) const {
  Complex acc(precision_);
  for (int i = 0; i < degree_; ++i) {
    if (a.coords[i] == 0) continue;
    acc += basis_[place][i] * a.coords[i];
  }
  return acc;
}

SNumber Embedding::embed(const AlgebraicInteger& a) const {
  std::vector<Complex> values;
  for (int v = 0; v < layout_.size(); ++v) values.push_back(embed_at(a, v));
  return SNumber(layout_, std::move(values), precision_);
}

// ---------------------------------------------------------------------------
// FieldConfig

FieldConfig FieldConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "field config must be a JSON object");
  FieldConfig cfg;
  cfg.name = j.value("name", std::string("K"));
  if (!j.contains("min_poly") || !j["min_poly"].is_array()) fail(ErrorKind::Config, "field config: missing min_poly");
  for (const auto& c : j["min_poly"]) cfg.min_poly.push_back(parse_integer(c, "min_poly"));
  const int d = static_cast<int>(cfg.min_poly.size()) - 1;
  if (d < 1) fail(ErrorKind::Config, "min_poly must have degree >= 1");

  auto read_vector = [&](const nlohmann::json& row, const char* what) {
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      fail(ErrorKind::Config, std::string(what) + ": expected " + std::to_string(d) + " coordinates");
    std::vector<Rational> out;
    for (const auto& c : row) out.push_back(parse_rational(c, what));
    return out;
  };

  if (j.contains("integral_basis")) {
    for (const auto& row : j["integral_basis"]) cfg.integral_basis.push_back(read_vector(row, "integral_basis"));
  } else {
    for (int i = 0; i < d; ++i) {
      std::vector<Rational> row(d, 0);
      row[i] = 1;
      cfg.integral_basis.push_back(row);
    }
  }
  if (static_cast<int>(cfg.integral_basis.size()) != d) fail(ErrorKind::Config, "integral_basis must be d x d");
  for (const auto& u : j.value("fundamental_units", nlohmann::json::array()))
    cfg.fundamental_units.emplace_back(read_vector(u, "fundamental_units"));
  for (const auto& u : j.value("roots_of_unity", nlohmann::json::array()))
    cfg.roots_of_unity.emplace_back(read_vector(u, "roots_of_unity"));
  if (!j.contains("disc")) fail(ErrorKind::Config, "field config: missing disc");
  cfg.disc = parse_integer(j["disc"], "disc");
  return cfg;
}

nlohmann::json FieldConfig::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  auto& mp = j["min_poly"] = nlohmann::json::array();
  for (const auto& c : min_poly) mp.push_back(rational_json(Rational(c)));
  auto vec = [](const std::vector<Rational>& v) {
    auto out = nlohmann::json::array();
    for (const auto& c : v) out.push_back(rational_json(c));
    return out;
  };
  auto& ib = j["integral_basis"] = nlohmann::json::array();
  for (const auto& row : integral_basis) ib.push_back(vec(row));
  auto& fu = j["fundamental_units"] = nlohmann::json::array();
  for (const auto& u : fundamental_units) fu.push_back(vec(u.coords()));
  auto& ru = j["roots_of_unity"] = nlohmann::json::array();
  for (const auto& u : roots_of_unity) ru.push_back(vec(u.coords()));
  j["disc"] = rational_json(Rational(disc));
  return j;
}

// ---------------------------------------------------------------------------
// NumberField

NumberField::NumberField(FieldConfig config)
    : config_(std::move(config)),
      cache_mutex_(std::make_shared<std::mutex>()),
      cache_(std::make_shared<std::map<int, std::shared_ptr<const Embedding>>>()) {
  const auto& poly = config_.min_poly;
  degree_ = static_cast<int>(poly.size()) - 1;
  if (degree_ < 1) fail(ErrorKind::Config, "min_poly must have degree >= 1");
  if (poly.back() != 1) fail(ErrorKind::Config, "min_poly must be monic");
  {
    RatPoly f(poly.begin(), poly.end()), df;
    for (int i = 1; i <= degree_; ++i) df.push_back(Rational(poly[i] * i));
    if (poly_gcd(f, df).size() > 1) fail(ErrorKind::Config, "min_poly is not squarefree");
  }
  if (is_reducible(poly)) fail(ErrorKind::Config, "min_poly is reducible over Q");

  auto roots = polynomial_roots(poly, 128);
  int r1 = 0, r2 = 0;
  for (const auto& r : roots) {
    if (r.im.is_zero())
      ++r1;
    else if (r.im.sign() > 0)
      ++r2;
  }
  if (r1 + 2 * r2 != degree_) fail(ErrorKind::Config, "root isolation failed to pair complex roots");
  layout_.kinds.assign(r1, PlaceKind::Real);
  layout_.kinds.insert(layout_.kinds.end(), r2, PlaceKind::Complex);

  auto inv = invert(config_.integral_basis);
  if (!inv) fail(ErrorKind::Config, "integral_basis is singular");
  basis_inverse_ = *inv;

  // Closure of O under multiplication.
  std::vector<AlgebraicNumber> beta;
  for (const auto& row : config_.integral_basis) beta.emplace_back(row);
  for (int i = 0; i < degree_; ++i)
    for (int k = i; k < degree_; ++k)
      if (!to_integral(mul(beta[i], beta[k])))
        fail(ErrorKind::Config, "integral_basis is not closed under multiplication");
  for (const auto& b : beta)
    if (!to_integral(b)) fail(ErrorKind::Config, "integral_basis element outside its own span");

  RatMatrix tr(degree_, std::vector<Rational>(degree_));
  for (int i = 0; i < degree_; ++i)
    for (int k = 0; k < degree_; ++k) tr[i][k] = trace(mul(beta[i], beta[k]));
  Rational disc = determinant(tr);
  if (disc != Rational(config_.disc))
    fail(ErrorKind::Config, "disc " + config_.disc.get_str() + " does not match integral basis (" + disc.get_str() + ")");

  if (static_cast<int>(config_.fundamental_units.size()) != unit_rank())
    fail(ErrorKind::Config, "expected " + std::to_string(unit_rank()) + " fundamental units");
  for (const auto& u : config_.fundamental_units) {
    if (u.degree() != degree_) fail(ErrorKind::Config, "unit has wrong number of coordinates");
    if (!to_integral(u)) fail(ErrorKind::Config, "unit " + u.to_string() + " is not an algebraic integer");
    if (abs(norm(u)) != 1) fail(ErrorKind::Config, "unit " + u.to_string() + " has |N| != 1");
  }

  // Expand the roots of unity to the whole group (always containing -1).
  std::vector<AlgebraicNumber> gens = config_.roots_of_unity;
  gens.push_back(from_rational(-1));
  roots_of_unity_ = {one()};
  for (const auto& g : gens) {
    if (g.degree() != degree_ || !to_integral(g)) fail(ErrorKind::Config, "root of unity must be an algebraic integer");
    AlgebraicNumber acc = g;
    int order = 1;
    while (acc != one() && order <= 4 * degree_ * degree_ + 8) {
      acc = mul(acc, g);
      ++order;
    }
    if (acc != one()) fail(ErrorKind::Config, g.to_string() + " is not a root of unity");
  }
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<AlgebraicNumber> current = roots_of_unity_;
    for (const auto& a : current)
      for (const auto& g : gens) {
        auto prod = mul(a, g);
        if (std::find(roots_of_unity_.begin(), roots_of_unity_.end(), prod) == roots_of_unity_.end()) {
          roots_of_unity_.push_back(prod);
          grew = true;
        }
      }
  }

  // Regulator check and the balancing constant for unit reduction.
  if (unit_rank() > 0) {
    auto emb = embedding(128);
    std::vector<std::vector<double>> logs;
    double worst = 0.0;
    std::vector<double> per_place(layout_.size(), 0.0);
    for (const auto& u : config_.fundamental_units) {
      auto e = emb->embed(u);
      std::vector<double> l;
      for (int v = 0; v < layout_.size(); ++v) {
        l.push_back(log(e[v].modulus()).to_double());
        per_place[v] += std::abs(l.back());
      }
      logs.push_back(l);
    }
    // Rank check on the first r places.
    const int r = unit_rank();
    std::vector<std::vector<double>> m(r, std::vector<double>(r));
    for (int i = 0; i < r; ++i)
      for (int v = 0; v < r; ++v) m[i][v] = logs[i][v] * local_degree(layout_.kinds[v]);
    double det = 1.0;
    for (int col = 0; col < r; ++col) {
      int piv = col;
      for (int i = col + 1; i < r; ++i)
        if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
      if (std::abs(m[piv][col]) < 1e-9) {
        det = 0.0;
        break;
      }
      std::swap(m[piv], m[col]);
      det *= m[col][col];
      for (int i = col + 1; i < r; ++i) {
        double f = m[i][col] / m[col][col];
        for (int k = col; k < r; ++k) m[i][k] -= f * m[col][k];
      }
    }
    if (std::abs(det) < 1e-9) fail(ErrorKind::Config, "fundamental units are multiplicatively dependent");
    for (double s : per_place) worst = std::max(worst, s);
    balance_constant_ = std::exp(0.5 * worst);
  }
}

NumberField NumberField::from_json(const nlohmann::json& j) { return NumberField(FieldConfig::from_json(j)); }

NumberField NumberField::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open field config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, "field config " + path.string() + ": " + e.what());
  }
  auto cfg = FieldConfig::from_json(j);
  if (!j.contains("name")) cfg.name = path.stem().string();
  return NumberField(std::move(cfg));
}

namespace {

const std::map<std::string, const char*>& presets() {
  static const std::map<std::string, const char*> table = {
      {"Q", R"J({"name":"Q","min_poly":[0,1],"integral_basis":[[1]],"fundamental_units":[],"roots_of_unity":[],"disc":1})J"},
      {"Q(i)", R"J({"name":"Q(i)","min_poly":[1,0,1],"integral_basis":[[1,0],[0,1]],"fundamental_units":[],"roots_of_unity":[[0,1]],"disc":-4})J"},
      {"Q(sqrt2)", R"J({"name":"Q(sqrt2)","min_poly":[-2,0,1],"integral_basis":[[1,0],[0,1]],"fundamental_units":[[1,1]],"roots_of_unity":[],"disc":8})J"},
      {"Q(sqrt5)", R"J({"name":"Q(sqrt5)","min_poly":[-5,0,1],"integral_basis":[[1,0],["1/2","1/2"]],"fundamental_units":[["1/2","1/2"]],"roots_of_unity":[],"disc":5})J"},
      {"Q(zeta3)", R"J({"name":"Q(zeta3)","min_poly":[1,1,1],"integral_basis":[[1,0],[0,1]],"fundamental_units":[],"roots_of_unity":[[0,-1]],"disc":-3})J"},
      {"Q(zeta8)", R"J({"name":"Q(zeta8)","min_poly":[1,0,0,0,1],"integral_basis":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"fundamental_units":[[1,1,0,-1]],"roots_of_unity":[[0,1,0,0]],"disc":256})J"},
  };
  return table;
}

}  // namespace

NumberField NumberField::preset(const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end()) fail(ErrorKind::Config, "unknown field preset '" + name + "'");
  return from_json(nlohmann::json::parse(it->second));
}

std::vector<std::string> NumberField::preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

AlgebraicInteger NumberField::integer_one() const {
  auto c = to_integral(one());
  if (!c) fail(ErrorKind::Config, "1 is not in the integral basis span");
  return *c;
}

AlgebraicNumber NumberField::mul(const AlgebraicNumber& a, const AlgebraicNumber& b) const {
  const int d = degree_;
  std::vector<Rational> prod(2 * d - 1, 0);
  for (int i = 0; i < d; ++i) {
    if (a.coords()[i] == 0) continue;
    for (int k = 0; k < d; ++k) prod[i + k] += a.coords()[i] * b.coords()[k];
  }
  // x^d = -(c0 + c1 x + ... + c_{d-1} x^{d-1})
  for (int n = 2 * d - 2; n >= d; --n) {
    if (prod[n] == 0) continue;
    Rational top = prod[n];
    prod[n] = 0;
    for (int k = 0; k < d; ++k) prod[n - d + k] -= top * config_.min_poly[k];
  }
  prod.resize(d);
  return AlgebraicNumber(std::move(prod));
}

std::vector<std::vector<Rational>> NumberField::multiplication_matrix(const AlgebraicNumber& a) const {
  RatMatrix m(degree_, std::vector<Rational>(degree_));
  AlgebraicNumber basis = AlgebraicNumber::constant(degree_, 0);
  for (int k = 0; k < degree_; ++k) {
    std::vector<Rational> e(degree_, 0);
    e[k] = 1;
    auto col = mul(a, AlgebraicNumber(e));
    for (int i = 0; i < degree_; ++i) m[i][k] = col.coords()[i];
  }
  return m;
}

Rational NumberField::norm(const AlgebraicNumber& a) const { return determinant(multiplication_matrix(a)); }

Rational NumberField::trace(const AlgebraicNumber& a) const {
  auto m = multiplication_matrix(a);
  Rational t = 0;
  for (int i = 0; i < degree_; ++i) t += m[i][i];
  return t;
}

AlgebraicNumber NumberField::inverse(const AlgebraicNumber& a) const {
  if (a.is_zero()) fail(ErrorKind::Domain, "division by zero in K");
  std::vector<Rational> e(degree_, 0);
  e[0] = 1;
  auto x = solve(multiplication_matrix(a), e);
  if (!x) fail(ErrorKind::Internal, "multiplication matrix of a nonzero element is singular");
  return AlgebraicNumber(std::move(*x));
}

AlgebraicNumber NumberField::div(const AlgebraicNumber& a, const AlgebraicNumber& b) const { return mul(a, inverse(b)); }

AlgebraicNumber NumberField::power(const AlgebraicNumber& a, long exponent) const {
  AlgebraicNumber base = exponent < 0 ? inverse(a) : a;
  unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  AlgebraicNumber acc = one();
  while (e) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return acc;
}

AlgebraicNumber NumberField::from_integral(const AlgebraicInteger& a) const {
  std::vector<Rational> c(degree_, 0);
  for (int i = 0; i < degree_; ++i) {
    if (a.coords[i] == 0) continue;
    for (int k = 0; k < degree_; ++k) c[k] += Rational(a.coords[i]) * config_.integral_basis[i][k];
  }
  return AlgebraicNumber(std::move(c));
}

std::optional<AlgebraicInteger> NumberField::to_integral(const AlgebraicNumber& a) const {
  AlgebraicInteger out;
  for (int i = 0; i < degree_; ++i) {
    Rational z = 0;
    for (int k = 0; k < degree_; ++k) z += a.coords()[k] * basis_inverse_[k][i];
    if (z.get_den() != 1) return std::nullopt;
    out.coords.push_back(z.get_num());
  }
  return out;
}

AlgebraicInteger NumberField::mul(const AlgebraicInteger& a, const AlgebraicInteger& b) const {
  auto c = to_integral(mul(from_integral(a), from_integral(b)));
  if (!c) fail(ErrorKind::Internal, "product of algebraic integers left O");
  return *c;
}

std::shared_ptr<const Embedding> NumberField::embedding(int precision_bits) const {
  if (precision_bits < kMinPrecision) fail(ErrorKind::Precondition, "precision_bits must be >= 32");
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  auto it = cache_->find(precision_bits);
  if (it != cache_->end()) return it->second;
  auto emb = std::make_shared<const Embedding>(*this, precision_bits);
  (*cache_)[precision_bits] = emb;
  return emb;
}

// ---------------------------------------------------------------------------
// Free operations

SNumber embed(const NumberField& field, const AlgebraicNumber& a, int precision_bits) {
  if (a.degree() != field.degree()) fail(ErrorKind::Domain, "element has wrong number of coordinates");
  return field.embedding(precision_bits)->embed(a);
}

Rational field_norm(const NumberField& field, const AlgebraicNumber& a) { return abs(field.norm(a)); }

Real height_s(const SNumber& x) {
  Real h(1.0, x.precision_bits());
  for (int v = 0; v < x.size(); ++v) {
    Real m = x[v].modulus();
    h *= x.layout().local_degree(v) == 2 ? m * m : m;
  }
  return h;
}

Real height_vec(const SNumberPair& z) {
  const int prec = std::max(z.first.precision_bits(), z.second.precision_bits());
  Real h(1.0, prec);
  for (int v = 0; v < z.first.size(); ++v) {
    Real m = max(z.first[v].modulus(), z.second[v].modulus());
    h *= z.first.layout().local_degree(v) == 2 ? m * m : m;
  }
  return h;
}

UnitReduction unit_reduce(const NumberField& field, const SNumberPair& z, int exponent_range) {
  const int prec = std::max(z.first.precision_bits(), z.second.precision_bits());
  Real h = height_vec(z);
  if (h.is_zero()) fail(ErrorKind::Domain, "unit_reduce: zero height");
  const int d = field.degree();
  const int places = field.layout().size();
  Real root_h = pow(h, Real(1.0, prec) / Real(static_cast<long>(d), prec));

  std::vector<double> log_norm(places);
  for (int v = 0; v < places; ++v)
    log_norm[v] = log(max(z.first[v].modulus(), z.second[v].modulus()) / root_h).to_double();

  const int r = field.unit_rank();
  auto emb = field.embedding(prec);
  std::vector<std::vector<double>> unit_logs;
  for (const auto& u : field.fundamental_units()) {
    auto e = emb->embed(u);
    std::vector<double> l;
    for (int v = 0; v < places; ++v) l.push_back(log(e[v].modulus()).to_double());
    unit_logs.push_back(l);
  }
  auto objective = [&](const std::vector<long>& k) {
    double worst = 0.0;
    for (int v = 0; v < places; ++v) {
      double s = log_norm[v];
      for (int j = 0; j < r; ++j) s += static_cast<double>(k[j]) * unit_logs[j][v];
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  };

  std::vector<long> best(r, 0);
  double best_value = objective(best);
  double box = std::pow(2.0 * exponent_range + 1.0, r);
  if (r > 0 && box <= 2e6) {
    std::vector<long> k(r, -exponent_range);
    while (true) {
      double value = objective(k);
      if (value < best_value - 1e-12) {
        best_value = value;
        best = k;
      }
      int j = 0;
      while (j < r && k[j] == exponent_range) k[j++] = -exponent_range;
      if (j == r) break;
      ++k[j];
    }
  } else if (r > 0) {
    // Coordinate descent from the origin for very large boxes.
    for (bool improved = true; improved;) {
      improved = false;
      for (int j = 0; j < r; ++j)
        for (long step : {-1L, 1L}) {
          auto k = best;
          k[j] += step;
          if (std::abs(k[j]) > exponent_range) continue;
          double value = objective(k);
          if (value < best_value - 1e-12) {
            best_value = value;
            best = k;
            improved = true;
          }
        }
    }
  }

  AlgebraicNumber unit = field.one();
  for (int j = 0; j < r; ++j)
    if (best[j] != 0) unit = field.mul(unit, field.power(field.fundamental_units()[j], best[j]));
  SNumber image = emb->embed(unit);
  UnitReduction out{unit, {image * z.first, image * z.second}, Real(1.0, prec), false};
  for (int v = 0; v < places; ++v) {
    Real n = max(out.reduced.first[v].modulus(), out.reduced.second[v].modulus());
    out.achieved_constant = max(out.achieved_constant, max(n / root_h, root_h / n));
  }
  out.boundary_warning = std::any_of(best.begin(), best.end(), [&](long k) { return std::abs(k) == exponent_range; });
  return out;
}

bool hk_family_check(const PlaceLayout& layout, const std::vector<int>& places) {
  int weight = 0;
  for (int v : places) weight += layout.local_degree(v);
  return 2 * weight > layout.degree();
}

std::vector<std::vector<int>> hk_qualifying_subsets(const PlaceLayout& layout) {
  std::vector<std::vector<int>> out;
  const unsigned n = static_cast<unsigned>(layout.size());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> t;
    for (unsigned v = 0; v < n; ++v)
      if (mask & (1u << v)) t.push_back(static_cast<int>(v));
    if (hk_family_check(layout, t)) out.push_back(std::move(t));
  }
  return out;
}

int SubspaceHK::real_dimension(const PlaceLayout& layout) const {
  int weight = 0;
  for (int v : places) weight += layout.local_degree(v);
  return layout.degree() - weight;
}

AlgebraicNumber SubspaceHK::anchor(const NumberField& field) const {
  if (q.is_zero()) fail(ErrorKind::Domain, "subspace anchor has q = 0");
  return field.div(p, q);
}

Real dist_to_subspace(const NumberField& field, const SNumber& x, const SubspaceHK& subspace) {
  SNumber a = embed(field, subspace.anchor(field), x.precision_bits());
  Real best(x.precision_bits());
  for (int v : subspace.places) best = max(best, (x[v] - a[v]).modulus());
  return best;
}

}  // namespace nfba
