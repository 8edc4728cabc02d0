#include "lattice.hpp"

#include <cmath>

#include "nfba/error.hpp"

namespace nfba::detail {

namespace {

constexpr double kLovasz = 0.99;

AlgebraicInteger integral(const NumberField& field, const AlgebraicNumber& a, const char* what) {
  auto c = field.to_integral(a);
  if (!c) fail(ErrorKind::Precondition, std::string(what) + " is not an algebraic integer");
  return *c;
}

}  // namespace

std::vector<LatticePoint> module_generators(const NumberField& field,
                                            const std::optional<std::array<AlgebraicNumber, 4>>& change) {
  const int d = field.degree();
  std::vector<LatticePoint> gens;
  auto zero = field.integer_zero();
  for (int i = 0; i < d; ++i) {
    AlgebraicInteger e = zero;
    e.coords[i] = 1;
    gens.push_back({e, zero});
  }
  for (int i = 0; i < d; ++i) {
    AlgebraicInteger e = zero;
    e.coords[i] = 1;
    gens.push_back({zero, e});
  }
  if (!change) return gens;
  const auto& [a, b, c, dd] = *change;
  if (field.mul(a, dd) - field.mul(b, c) != field.one()) fail(ErrorKind::Precondition, "basis change is not in SL2(O)");
  for (auto* m : {&a, &b, &c, &dd}) integral(field, *m, "basis change entry");
  std::vector<LatticePoint> out;
  for (auto& g : gens) {
    AlgebraicNumber p = field.from_integral(g.p), q = field.from_integral(g.q);
    out.push_back({integral(field, field.mul(a, p) + field.mul(b, q), "image"),
                   integral(field, field.mul(c, p) + field.mul(dd, q), "image")});
  }
  return out;
}

FlowLattice::FlowLattice(const NumberField& field, const SNumber& x, const Real& t,
                         std::vector<LatticePoint> generators, int precision)
    : field_(field),
      precision_(precision),
      n_(2 * field.degree()),
      x_(x.with_precision(std::max(precision, x.precision_bits()))),
      et_(exp(t.with_precision(precision))),
      emt_(exp(-t.with_precision(precision))),
      generators_(std::move(generators)) {
  if (static_cast<int>(generators_.size()) != n_) fail(ErrorKind::Internal, "lattice needs 2d generators");
  for (int i = 0; i < n_; ++i) {
    basis_.push_back(coordinates(generators_[i]));
    std::vector<Integer> row(n_, 0);
    row[i] = 1;
    transform_.push_back(std::move(row));
  }
  reduce();
}

std::vector<Real> FlowLattice::coordinates(const LatticePoint& pt) const {
  auto emb = field_.embedding(precision_);
  std::vector<Real> out;
  const auto& layout = field_.layout();
  for (int v = 0; v < layout.size(); ++v) {
    Complex p = emb->embed_at(pt.p, v), q = emb->embed_at(pt.q, v);
    Complex top = (p + x_[v] * q) * et_;
    Complex bottom = q * emt_;
    out.push_back(top.re);
    if (layout.kinds[v] == PlaceKind::Complex) out.push_back(top.im);
    out.push_back(bottom.re);
    if (layout.kinds[v] == PlaceKind::Complex) out.push_back(bottom.im);
  }
  return out;
}

void FlowLattice::reduce() {
  const int n = n_;
  const int prec = precision_;
  std::vector<std::vector<Real>> mu(n, std::vector<Real>(n, Real(prec)));
  std::vector<Real> norm(n, Real(prec));
  auto dot = [&](const std::vector<Real>& a, const std::vector<Real>& b) {
    Real s(prec);
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };
  auto gram_schmidt = [&] {
    std::vector<std::vector<Real>> star(n);
    for (int i = 0; i < n; ++i) {
      star[i] = basis_[i];
      for (int j = 0; j < i; ++j) {
        mu[i][j] = dot(basis_[i], star[j]) / norm[j];
        for (int k = 0; k < n; ++k) star[i][k] -= mu[i][j] * star[j][k];
      }
      norm[i] = dot(star[i], star[i]);
      if (norm[i].is_zero()) fail(ErrorKind::Internal, "flowed module basis is degenerate");
    }
  };
  gram_schmidt();
  int k = 1;
  long guard = 0;
  while (k < n) {
    if (++guard > 100000) fail(ErrorKind::Internal, "LLL did not terminate");
    for (int j = k - 1; j >= 0; --j) {
      Integer r = mu[k][j].round_to_integer();
      if (r == 0) continue;
      for (int c = 0; c < n; ++c) basis_[k][c] -= basis_[j][c] * r;
      for (int c = 0; c < n; ++c) transform_[k][c] -= r * transform_[j][c];
      Real rr(r, prec);
      for (int i = 0; i < j; ++i) mu[k][i] -= rr * mu[j][i];
      mu[k][j] -= rr;
    }
    Real lhs = norm[k];
    Real rhs = (Real(kLovasz, prec) - mu[k][k - 1] * mu[k][k - 1]) * norm[k - 1];
    if (lhs >= rhs) {
      ++k;
    } else {
      std::swap(basis_[k], basis_[k - 1]);
      std::swap(transform_[k], transform_[k - 1]);
      gram_schmidt();
      k = std::max(k - 1, 1);
    }
  }
  gs_norm_.assign(n, 0.0);
  mu_.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    gs_norm_[i] = norm[i].to_double();
    for (int j = 0; j < i; ++j) mu_[i][j] = mu[i][j].to_double();
  }
}

bool FlowLattice::enumerate(const Real& radius, long budget, long& nodes,
                            const std::function<void(const LatticePoint&)>& visit) const {
  const int n = n_;
  // Slack absorbs the double rounding of the Gram-Schmidt data; callers filter exactly.
  const double bound = (radius * radius).to_double() * (1.0 + 1e-8) + 1e-300;
  std::vector<long> c(n, 0);
  bool ok = true;

  auto emit = [&] {
    std::vector<Integer> gen(n, 0);
    for (int i = 0; i < n; ++i) {
      if (c[i] == 0) continue;
      for (int k = 0; k < n; ++k) gen[k] += transform_[i][k] * c[i];
    }
    LatticePoint pt{field_.integer_zero(), field_.integer_zero()};
    const int d = field_.degree();
    for (int k = 0; k < n; ++k) {
      if (gen[k] == 0) continue;
      for (int i = 0; i < d; ++i) {
        pt.p.coords[i] += gen[k] * generators_[k].p.coords[i];
        pt.q.coords[i] += gen[k] * generators_[k].q.coords[i];
      }
    }
    visit(pt);
  };

  std::function<void(int, double, bool)> rec = [&](int i, double partial, bool zero_above) {
    if (!ok) return;
    double center = 0.0;
    for (int j = i + 1; j < n; ++j) center += static_cast<double>(c[j]) * mu_[j][i];
    double remaining = bound - partial;
    if (remaining < 0) return;
    double width = std::sqrt(remaining / gs_norm_[i]);
    double lo = std::ceil(-center - width), hi = std::floor(-center + width);
    if (zero_above) lo = std::max(lo, 0.0);
    if (hi - lo > 1e9) fail(ErrorKind::Budget, "enumeration range too wide");
    for (double ci = lo; ci <= hi; ci += 1.0) {
      if (++nodes > budget) {
        ok = false;
        return;
      }
      c[i] = static_cast<long>(ci);
      double y = ci + center;
      double next = partial + gs_norm_[i] * y * y;
      if (next > bound) continue;
      bool still_zero = zero_above && c[i] == 0;
      if (i == 0) {
        if (!still_zero) emit();
      } else {
        rec(i - 1, next, still_zero);
      }
      if (!ok) return;
    }
    c[i] = 0;
  };
  rec(n - 1, 0.0, true);
  return ok;
}

}  // namespace nfba::detail
