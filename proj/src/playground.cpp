#include "nfba/playground.hpp"

#include <cmath>

#include "nfba/error.hpp"

namespace nfba {

namespace {

PlaceLayout rational_layout() { return PlaceLayout{{PlaceKind::Real}}; }

SNumber real_point(const PlaceLayout& layout, Real value) {
  int prec = value.precision();
  return SNumber(layout, {Complex(std::move(value))}, prec);
}

int digits_for(int precision_bits) { return static_cast<int>(std::ceil(precision_bits * std::log(2.0) / std::log(3.0))) + 2; }

void require_real_line(const PlaceLayout& layout, const char* what) {
  if (layout.size() != 1 || layout.kinds[0] != PlaceKind::Real)
    fail(ErrorKind::Config, std::string(what) + " playground needs K = Q");
}

}  // namespace

bool ball_precedes(const FormalBall& inner, const FormalBall& outer) {
  return distance(inner.center, outer.center) + inner.radius <= outer.radius;
}

Real SingletonSet::distance(const SNumber& x) const { return nfba::distance(x, point_); }

std::string SingletonSet::describe() const {
  std::string s = "{";
  for (int v = 0; v < point_.size(); ++v) s += (v ? ", " : "") + point_[v].re.to_string(12);
  return s + "}";
}

SubspaceSet::SubspaceSet(const NumberField& field, SubspaceHK subspace, int precision_bits)
    : anchor_(embed(field, subspace.anchor(field), precision_bits)), places_(std::move(subspace.places)) {}

SubspaceSet::SubspaceSet(SNumber anchor, std::vector<int> places) : anchor_(std::move(anchor)), places_(std::move(places)) {}

Real SubspaceSet::distance(const SNumber& x) const {
  Real best(x.precision_bits());
  for (int v : places_) best = max(best, (x[v] - anchor_[v]).modulus());
  return best;
}

std::string SubspaceSet::describe() const {
  std::string s = "L(T={";
  for (size_t i = 0; i < places_.size(); ++i) s += (i ? "," : "") + std::to_string(places_[i]);
  return s + "})";
}

std::optional<SNumber> MinkowskiSpace::sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int prec = std::max(c.precision_bits(), r.precision());
  SNumber out = c.with_precision(prec);
  for (int v = 0; v < layout_.size(); ++v) {
    if (layout_.kinds[v] == PlaceKind::Real) {
      out[v].re += Real(u(rng), prec) * r;
      continue;
    }
    double a, b;
    do {
      a = u(rng);
      b = u(rng);
    } while (a * a + b * b > 1.0);
    out[v].re += Real(a, prec) * r;
    out[v].im += Real(b, prec) * r;
  }
  return out;
}

std::vector<SNumber> MinkowskiSpace::candidates(const SNumber& c, const Real& r) const {
  const int prec = std::max(c.precision_bits(), r.precision());
  // Per place offsets: the center, the two ends of a real interval, eight boundary points of a disk.
  std::vector<std::vector<std::pair<double, double>>> offsets;
  for (int v = 0; v < layout_.size(); ++v) {
    if (layout_.kinds[v] == PlaceKind::Real) {
      offsets.push_back({{0, 0}, {1, 0}, {-1, 0}});
    } else {
      std::vector<std::pair<double, double>> o{{0, 0}};
      for (int k = 0; k < 8; ++k) o.push_back({std::cos(k * M_PI / 4), std::sin(k * M_PI / 4)});
      offsets.push_back(o);
    }
  }
  std::vector<SNumber> out;
  std::vector<size_t> idx(layout_.size(), 0);
  while (true) {
    SNumber z = c.with_precision(prec);
    for (int v = 0; v < layout_.size(); ++v) {
      z[v].re += Real(offsets[v][idx[v]].first, prec) * r;
      z[v].im += Real(offsets[v][idx[v]].second, prec) * r;
    }
    out.push_back(std::move(z));
    int v = 0;
    while (v < layout_.size() && ++idx[v] == offsets[v].size()) idx[v++] = 0;
    if (v == layout_.size()) break;
  }
  return out;
}

double MinkowskiSpace::diffuse_beta() const { return 0.5 / std::sqrt(static_cast<double>(layout_.degree())); }

FormalBall MinkowskiSpace::initial_ball(int precision_bits) const {
  return {SNumber::zero(layout_, precision_bits), Real(1.0, precision_bits)};
}

UnitInterval::UnitInterval() : layout_(rational_layout()) {}

bool UnitInterval::contains(const SNumber& x) const {
  require_real_line(x.layout(), "interval");
  return x[0].im.is_zero() && x[0].re >= 0.0 && x[0].re <= 1.0;
}

std::optional<SNumber> UnitInterval::sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const {
  const int prec = std::max(c.precision_bits(), r.precision());
  Real lo = max(c[0].re - r, Real(prec)), hi = min(c[0].re + r, Real(1.0, prec));
  if (lo > hi) return std::nullopt;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return real_point(layout_, lo + (hi - lo) * Real(u(rng), prec));
}

std::vector<SNumber> UnitInterval::candidates(const SNumber& c, const Real& r) const {
  const int prec = std::max(c.precision_bits(), r.precision());
  Real lo = max(c[0].re - r, Real(prec)), hi = min(c[0].re + r, Real(1.0, prec));
  if (lo > hi) return {};
  return {real_point(layout_, lo), real_point(layout_, hi), c.with_precision(prec)};
}

FormalBall UnitInterval::initial_ball(int precision_bits) const {
  return {real_point(layout_, Real(0.5, precision_bits)), Real(0.5, precision_bits)};
}

CantorSet::CantorSet() : layout_(rational_layout()) {}

Real CantorSet::snap_down(const Real& u) {
  const int prec = u.precision();
  if (u >= 1.0) return Real(1.0, prec);
  if (u <= 0.0) return Real(prec);
  Real y = u, value(prec), scale(1.0, prec);
  for (int j = 0, n = digits_for(prec); j < n; ++j) {
    y *= 3.0;
    long dg = std::min<long>(2, y.floor_to_integer().get_si());
    y -= Real(dg, prec);
    scale /= Real(3L, prec);
    if (dg == 1) return value + scale;
    if (dg == 2) value += scale * 2.0;
  }
  return value;
}

Real CantorSet::snap_up(const Real& u) {
  const int prec = u.precision();
  if (u >= 1.0) return Real(1.0, prec);
  if (u <= 0.0) return Real(prec);
  Real y = u, value(prec), scale(1.0, prec);
  for (int j = 0, n = digits_for(prec); j < n; ++j) {
    y *= 3.0;
    long dg = std::min<long>(2, y.floor_to_integer().get_si());
    y -= Real(dg, prec);
    scale /= Real(3L, prec);
    if (dg == 1) return value + scale * 2.0;
    if (dg == 2) value += scale * 2.0;
  }
  return value + scale;
}

bool CantorSet::contains(const SNumber& x) const {
  require_real_line(x.layout(), "cantor");
  if (!x[0].im.is_zero()) return false;
  const Real& u = x[0].re;
  const int prec = u.precision();
  Real tol = pow(Real(2.0, prec), -(prec - 8));
  if (u < -tol || u > tol + 1.0) return false;
  return abs(snap_down(u) - u) <= tol || abs(snap_up(u) - u) <= tol;
}

std::optional<SNumber> CantorSet::sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const {
  const int prec = std::max(c.precision_bits(), r.precision());
  Real lo = max(c[0].re - r, Real(prec)), hi = min(c[0].re + r, Real(1.0, prec));
  if (lo > hi) return std::nullopt;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Real t = lo + (hi - lo) * Real(u(rng), prec);
  Real z = (rng() & 1) ? snap_up(t) : snap_down(t);
  if (abs(z - c[0].re) > r) return std::nullopt;
  return real_point(layout_, z);
}

std::vector<SNumber> CantorSet::candidates(const SNumber& c, const Real& r) const {
  const int prec = std::max(c.precision_bits(), r.precision());
  std::vector<SNumber> out{c.with_precision(prec)};
  for (int k = 1; k <= 4; ++k) {
    Real step = r * Real(k / 4.0, prec);
    for (const Real& z : {snap_down(c[0].re + step), snap_up(c[0].re + step), snap_down(c[0].re - step),
                          snap_up(c[0].re - step)})
      if (abs(z - c[0].re) <= r) out.push_back(real_point(layout_, z));
  }
  return out;
}

double CantorSet::diffuse_beta() const {
  // Ahlfors regularity constants a = 1/4, b = 4 at dimension log 2 / log 3.
  return std::pow(1.0 / 16.0, std::log(3.0) / std::log(2.0));
}

FormalBall CantorSet::initial_ball(int precision_bits) const {
  return {real_point(layout_, Real(precision_bits)), Real(1.0, precision_bits)};
}

std::unique_ptr<Playground> make_playground(const std::string& name, const PlaceLayout& layout) {
  if (name == "minkowski") return std::make_unique<MinkowskiSpace>(layout);
  if (name == "interval" || name == "cantor") {
    require_real_line(layout, name.c_str());
    if (name == "interval") return std::make_unique<UnitInterval>();
    return std::make_unique<CantorSet>();
  }
  fail(ErrorKind::Config, "unknown playground '" + name + "'");
}

}  // namespace nfba
