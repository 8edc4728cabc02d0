#ifndef NFBA_NUMBERFIELD_HPP
#define NFBA_NUMBERFIELD_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfba/real.hpp"

namespace nfba {

enum class PlaceKind { Real, Complex };

inline int local_degree(PlaceKind kind) { return kind == PlaceKind::Real ? 1 : 2; }

/* The ordered list of archimedean places of K (one representative per
 * conjugate pair of complex embeddings). */
struct PlaceLayout {
  std::vector<PlaceKind> kinds;

  int size() const { return static_cast<int>(kinds.size()); }
  int degree() const;
  int local_degree(int v) const { return nfba::local_degree(kinds[v]); }
  int num_real() const;
  int num_complex() const { return size() - num_real(); }
  friend bool operator==(const PlaceLayout&, const PlaceLayout&) = default;
};

/* Element of K in power-basis coordinates 1, a, ..., a^(d-1). */
class AlgebraicNumber {
 public:
  AlgebraicNumber() = default;
  explicit AlgebraicNumber(std::vector<Rational> coords) : coords_(std::move(coords)) {}
  static AlgebraicNumber constant(int degree, const Rational& value);

  int degree() const { return static_cast<int>(coords_.size()); }
  const std::vector<Rational>& coords() const { return coords_; }
  bool is_zero() const;
  /* "[c0,c1,...]" with rationals as num/den; integers print bare. */
  std::string to_string() const;

  AlgebraicNumber& operator+=(const AlgebraicNumber& rhs);
  AlgebraicNumber& operator-=(const AlgebraicNumber& rhs);
  friend AlgebraicNumber operator+(AlgebraicNumber a, const AlgebraicNumber& b) { return a += b; }
  friend AlgebraicNumber operator-(AlgebraicNumber a, const AlgebraicNumber& b) { return a -= b; }
  AlgebraicNumber operator-() const;
  friend AlgebraicNumber operator*(const Rational& s, AlgebraicNumber a);
  friend bool operator==(const AlgebraicNumber&, const AlgebraicNumber&) = default;

 private:
  std::vector<Rational> coords_;
};

/* Element of O in integral-basis coordinates. */
struct AlgebraicInteger {
  std::vector<Integer> coords;

  bool is_zero() const;
  friend bool operator==(const AlgebraicInteger&, const AlgebraicInteger&) = default;
  friend auto operator<=>(const AlgebraicInteger& a, const AlgebraicInteger& b) {
    return a.coords <=> b.coords;
  }
};

/* Element of K_S: one value per place. Real places keep im == 0. */
class SNumber {
 public:
  SNumber() = default;
  SNumber(PlaceLayout layout, std::vector<Complex> values, int precision_bits);
  static SNumber zero(const PlaceLayout& layout, int precision_bits);
  /* Real places take values[v] (a real), complex places re + i*im. */
  static SNumber from_doubles(const PlaceLayout& layout, const std::vector<double>& re,
                              const std::vector<double>& im, int precision_bits);

  const PlaceLayout& layout() const { return layout_; }
  int size() const { return static_cast<int>(values_.size()); }
  int precision_bits() const { return precision_; }
  const Complex& operator[](int v) const { return values_[v]; }
  Complex& operator[](int v) { return values_[v]; }
  const std::vector<Complex>& values() const { return values_; }

  Real sup_norm() const;
  bool is_zero() const;
  SNumber with_precision(int precision_bits) const;

  SNumber& operator+=(const SNumber& rhs);
  SNumber& operator-=(const SNumber& rhs);
  friend SNumber operator+(SNumber a, const SNumber& b) { return a += b; }
  friend SNumber operator-(SNumber a, const SNumber& b) { return a -= b; }
  /* Componentwise product (the action of K on K_S). */
  friend SNumber operator*(const SNumber& a, const SNumber& b);
  friend SNumber operator*(const SNumber& a, const Real& s);

 private:
  PlaceLayout layout_;
  std::vector<Complex> values_;
  int precision_ = kDefaultPrecision;
};

/* Sup distance between two S-numbers: max_v |x_v - y_v|. */
Real distance(const SNumber& x, const SNumber& y);

struct SNumberPair {
  SNumber first;
  SNumber second;

  Real sup_norm() const;
};

class NumberField;

/* Numeric images of the power basis and of the integral basis at each
 * place, computed once per precision. */
class Embedding {
 public:
  Embedding(const NumberField& field, int precision_bits);

  int precision_bits() const { return precision_; }
  const PlaceLayout& layout() const { return layout_; }
  const std::vector<Complex>& roots() const { return roots_; }

  SNumber embed(const AlgebraicNumber& a) const;
  SNumber embed(const AlgebraicInteger& a) const;
  Complex embed_at(const AlgebraicInteger& a, int place) const;
  /* Image of the i-th integral basis element at place v. */
  const Complex& basis_image(int place, int i) const { return basis_[place][i]; }

 private:
  int precision_;
  int degree_;
  PlaceLayout layout_;
  std::vector<Complex> roots_;
  std::vector<std::vector<Complex>> powers_;  // [place][k] = root^k
  std::vector<std::vector<Complex>> basis_;   // [place][i] = iota_v(beta_i)
};

/* Data describing K, as read from a field config file. */
struct FieldConfig {
  std::string name;
  std::vector<Integer> min_poly;                       // c0..cd, monic
  std::vector<std::vector<Rational>> integral_basis;   // row i = beta_i over power basis
  std::vector<AlgebraicNumber> fundamental_units;      // power-basis coordinates
  std::vector<AlgebraicNumber> roots_of_unity;         // generators, power-basis coordinates
  Integer disc;

  static FieldConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/* A number field K with its ring of integers, unit data and places.
 * Immutable after construction; safe to share across threads. */
class NumberField {
 public:
  /* Validates the config: monic, irreducible, squarefree, basis closed under
   * multiplication, discriminant, unit norms, unit rank. Throws Error(Config). */
  explicit NumberField(FieldConfig config);

  static NumberField from_json(const nlohmann::json& j);
  static NumberField load(const std::filesystem::path& path);
  /* Shipped presets: "Q", "Q(i)", "Q(sqrt2)", "Q(sqrt5)", "Q(zeta3)", "Q(zeta8)". */
  static NumberField preset(const std::string& name);
  static std::vector<std::string> preset_names();

  const FieldConfig& config() const { return config_; }
  const std::string& name() const { return config_.name; }
  int degree() const { return degree_; }
  const PlaceLayout& layout() const { return layout_; }
  const Integer& discriminant() const { return config_.disc; }
  int unit_rank() const { return layout_.size() - 1; }

  AlgebraicNumber zero() const { return AlgebraicNumber::constant(degree_, 0); }
  AlgebraicNumber one() const { return AlgebraicNumber::constant(degree_, 1); }
  AlgebraicNumber from_rational(const Rational& r) const { return AlgebraicNumber::constant(degree_, r); }
  AlgebraicInteger integer_zero() const { return {std::vector<Integer>(degree_, 0)}; }
  AlgebraicInteger integer_one() const;

  AlgebraicNumber mul(const AlgebraicNumber& a, const AlgebraicNumber& b) const;
  AlgebraicNumber inverse(const AlgebraicNumber& a) const;
  AlgebraicNumber div(const AlgebraicNumber& a, const AlgebraicNumber& b) const;
  AlgebraicNumber power(const AlgebraicNumber& a, long exponent) const;
  /* Matrix of multiplication by a on the power basis (column k = a * x^k). */
  std::vector<std::vector<Rational>> multiplication_matrix(const AlgebraicNumber& a) const;
  Rational norm(const AlgebraicNumber& a) const;
  Rational trace(const AlgebraicNumber& a) const;

  AlgebraicNumber from_integral(const AlgebraicInteger& a) const;
  std::optional<AlgebraicInteger> to_integral(const AlgebraicNumber& a) const;
  AlgebraicInteger mul(const AlgebraicInteger& a, const AlgebraicInteger& b) const;

  const std::vector<AlgebraicNumber>& fundamental_units() const { return config_.fundamental_units; }
  /* The full (finite) group of roots of unity, 1 first. */
  const std::vector<AlgebraicNumber>& roots_of_unity() const { return roots_of_unity_; }
  /* Provable constant C >= 1 such that every z with H(z) != 0 has a unit
   * multiple with C^-1 H^(1/d) <= ||xi z_v|| <= C H^(1/d) for all v. */
  double unit_balance_constant() const { return balance_constant_; }

  /* Cached numeric embedding tables at the given precision. */
  std::shared_ptr<const Embedding> embedding(int precision_bits) const;

 private:
  FieldConfig config_;
  int degree_ = 0;
  PlaceLayout layout_;
  std::vector<std::vector<Rational>> basis_inverse_;
  std::vector<AlgebraicNumber> roots_of_unity_;
  double balance_constant_ = 1.0;

  mutable std::shared_ptr<std::mutex> cache_mutex_;
  mutable std::shared_ptr<std::map<int, std::shared_ptr<const Embedding>>> cache_;
};

/* Approximates all complex roots of the monic integer polynomial c0..cd. */
std::vector<Complex> polynomial_roots(const std::vector<Integer>& coeffs, int precision_bits);

SNumber embed(const NumberField& field, const AlgebraicNumber& a, int precision_bits);
/* |N(a)|, exact. */
Rational field_norm(const NumberField& field, const AlgebraicNumber& a);
/* prod_v |x_v|^(d_v). */
Real height_s(const SNumber& x);
/* prod_v max(|(z1)_v|, |(z2)_v|)^(d_v). */
Real height_vec(const SNumberPair& z);

struct UnitReduction {
  AlgebraicNumber unit;
  SNumberPair reduced;
  Real achieved_constant;
  /* Optimum sat on the boundary of the exponent box. */
  bool boundary_warning = false;
};

/* Searches xi = zeta * prod u_j^(k_j), |k_j| <= exponent_range, minimising
 * max_v ||xi z_v|| / H(z)^(1/d). Throws Error(Domain) on zero height. */
UnitReduction unit_reduce(const NumberField& field, const SNumberPair& z, int exponent_range = 8);

/* True iff #T_R + 2 #T_C > d/2. T holds place indices. */
bool hk_family_check(const PlaceLayout& layout, const std::vector<int>& places);
/* Every subset T of S passing hk_family_check, in increasing bitmask order. */
std::vector<std::vector<int>> hk_qualifying_subsets(const PlaceLayout& layout);

/* L(iota_S(p/q), T) = { y : y_v = iota_v(p/q) for v in T }. */
struct SubspaceHK {
  AlgebraicNumber p;
  AlgebraicNumber q;
  std::vector<int> places;

  bool valid(const PlaceLayout& layout) const { return hk_family_check(layout, places); }
  /* Real dimension d - #T_R - 2 #T_C. */
  int real_dimension(const PlaceLayout& layout) const;
  AlgebraicNumber anchor(const NumberField& field) const;
};

/* max_{v in T} |x_v - iota_v(p/q)|. Throws Error(Domain) if q == 0. */
Real dist_to_subspace(const NumberField& field, const SNumber& x, const SubspaceHK& subspace);

}  // namespace nfba

#endif
