#include "nfba/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "nfba/error.hpp"

namespace nfba {

namespace {

/* Real coordinates of K_S against the integral basis, in double. */
struct BasisGeometry {
  int d = 0;
  PlaceLayout layout;
  std::vector<std::vector<double>> forward;  // [coord][i]
  std::vector<std::vector<double>> inverse;  // [i][coord]
  std::vector<double> row_sum;               // sum_j |inverse[i][j]|

  explicit BasisGeometry(const NumberField& field) : d(field.degree()), layout(field.layout()) {
    auto emb = field.embedding(kDefaultPrecision);
    forward.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) {
      int row = 0;
      for (int v = 0; v < layout.size(); ++v) {
        const Complex& b = emb->basis_image(v, i);
        forward[row++][i] = b.re.to_double();
        if (layout.kinds[v] == PlaceKind::Complex) forward[row++][i] = b.im.to_double();
      }
    }
    // Gauss-Jordan on [forward | I].
    std::vector<std::vector<double>> a = forward;
    inverse.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) inverse[i][i] = 1.0;
    for (int col = 0; col < d; ++col) {
      int piv = col;
      for (int r = col + 1; r < d; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      std::swap(a[piv], a[col]);
      std::swap(inverse[piv], inverse[col]);
      double f = a[col][col];
      for (int c = 0; c < d; ++c) a[col][c] /= f, inverse[col][c] /= f;
      for (int r = 0; r < d; ++r) {
        if (r == col) continue;
        double g = a[r][col];
        for (int c = 0; c < d; ++c) a[r][c] -= g * a[col][c], inverse[r][c] -= g * inverse[col][c];
      }
    }
    row_sum.assign(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row_sum[i] += std::abs(inverse[i][j]);
  }

  std::vector<std::complex<double>> place_values(const std::vector<long>& z) const {
    std::vector<std::complex<double>> out;
    int row = 0;
    for (int v = 0; v < layout.size(); ++v) {
      double re = 0, im = 0;
      for (int i = 0; i < d; ++i) re += forward[row][i] * static_cast<double>(z[i]);
      ++row;
      if (layout.kinds[v] == PlaceKind::Complex) {
        for (int i = 0; i < d; ++i) im += forward[row][i] * static_cast<double>(z[i]);
        ++row;
      }
      out.emplace_back(re, im);
    }
    return out;
  }

  std::vector<double> coords_of(const std::vector<std::complex<double>>& values) const {
    std::vector<double> flat;
    for (int v = 0; v < layout.size(); ++v) {
      flat.push_back(values[v].real());
      if (layout.kinds[v] == PlaceKind::Complex) flat.push_back(values[v].imag());
    }
    std::vector<double> z(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) z[i] += inverse[i][j] * flat[j];
    return z;
  }
};

/* Calls f on every integer vector with lo[i] <= z[i] <= hi[i]. */
void for_box(const std::vector<long>& lo, const std::vector<long>& hi, const std::function<void(const std::vector<long>&)>& f) {
  const size_t d = lo.size();
  for (size_t i = 0; i < d; ++i)
    if (lo[i] > hi[i]) return;
  std::vector<long> z = lo;
  while (true) {
    f(z);
    size_t i = 0;
    while (i < d && z[i] == hi[i]) z[i] = lo[i], ++i;
    if (i == d) return;
    ++z[i];
  }
}

double sup(const std::vector<std::complex<double>>& v) {
  double m = 0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

AlgebraicInteger to_integer(const std::vector<long>& z) {
  AlgebraicInteger out;
  for (long c : z) out.coords.emplace_back(c);
  return out;
}

std::vector<std::complex<double>> x_doubles(const SNumber& x) {
  std::vector<std::complex<double>> out;
  for (int v = 0; v < x.size(); ++v) out.emplace_back(x[v].re.to_double(), x[v].im.to_double());
  return out;
}

Real zero_threshold(int precision) { return pow(Real(2.0, precision), -(precision / 2)); }

/* lhs and ||q|| at full precision. */
std::pair<Real, Real> measure(const NumberField& field, const SNumber& x, const AlgebraicInteger& p,
                              const AlgebraicInteger& q, int prec) {
  auto emb = field.embedding(prec);
  Real lhs(prec), qn(prec);
  for (int v = 0; v < x.size(); ++v) {
    Complex pv = emb->embed_at(p, v), qv = emb->embed_at(q, v);
    lhs = max(lhs, (qv * x[v] + pv).modulus());
    qn = max(qn, qv.modulus());
  }
  return {lhs, qn};
}

bool lex_less(const DirichletWitness& a, const DirichletWitness& b) {
  auto na = sign_normalized({a.p, a.q}), nb = sign_normalized({b.p, b.q});
  if (na.q != nb.q) return na.q < nb.q;
  return na.p < nb.p;
}

}  // namespace

Real dirichlet_constant(const NumberField& field, int precision_bits) {
  const int prec = precision_bits;
  Real two_over_pi = Real(2.0, prec) / Real::pi(prec);
  Real c = pow(two_over_pi, 2L * field.layout().num_complex()) * Real(Integer(abs(field.discriminant())), prec);
  return pow(c, Real(1.0, prec) / Real(static_cast<long>(field.degree()), prec));
}

DirichletResult strong_dirichlet_solve(const NumberField& field, const SNumber& x, const Real& Q, long search_bound) {
  if (!(Q > 0.0)) fail(ErrorKind::Precondition, "Q must be positive");
  if (x.layout() != field.layout()) fail(ErrorKind::Domain, "x does not match the field's places");
  const int prec = std::max(x.precision_bits(), kDefaultPrecision);
  const int d = field.degree();
  BasisGeometry geo(field);
  Real C = dirichlet_constant(field, prec);
  Real bound = C / Q.with_precision(prec);
  const double Qd = Q.to_double(), bd = bound.to_double();
  auto xd = x_doubles(x);

  std::vector<long> qlo(d), qhi(d);
  for (int i = 0; i < d; ++i) {
    double w = std::floor(Qd * geo.row_sum[i] + 1e-9);
    if (w > static_cast<double>(search_bound)) fail(ErrorKind::Budget, "q box exceeds search_bound");
    qlo[i] = -static_cast<long>(w);
    qhi[i] = static_cast<long>(w);
  }

  DirichletResult result;
  std::vector<DirichletWitness> screened;
  const double slack = 1e-9;
  for_box(qlo, qhi, [&](const std::vector<long>& qz) {
    bool zero = std::all_of(qz.begin(), qz.end(), [](long c) { return c == 0; });
    if (zero) return;
    auto qv = geo.place_values(qz);
    if (sup(qv) > Qd * (1 + slack)) return;
    ++result.q_candidates;
    std::vector<std::complex<double>> target;
    for (int v = 0; v < x.size(); ++v) target.push_back(-qv[v] * xd[v]);
    auto center = geo.coords_of(target);
    std::vector<long> plo(d), phi(d);
    for (int i = 0; i < d; ++i) {
      double w = bd * geo.row_sum[i] * (1 + slack) + 1e-9;
      plo[i] = static_cast<long>(std::ceil(center[i] - w));
      phi[i] = static_cast<long>(std::floor(center[i] + w));
    }
    for_box(plo, phi, [&](const std::vector<long>& pz) {
      auto pv = geo.place_values(pz);
      double lhs = 0;
      for (int v = 0; v < x.size(); ++v) lhs = std::max(lhs, std::abs(qv[v] * xd[v] + pv[v]));
      if (lhs > bd * (1 + slack) + 1e-12) return;
      DirichletWitness w;
      w.p = to_integer(pz);
      w.q = to_integer(qz);
      screened.push_back(std::move(w));
    });
  });
  if (result.q_candidates == 0) {
    result.status = DirichletStatus::QBoxEmpty;
    return result;
  }

  Real tol = zero_threshold(prec);
  for (auto& w : screened) {
    auto [lhs, qn] = measure(field, x, w.p, w.q, prec);
    w.Q = Q;
    w.lhs = lhs;
    w.qnorm = qn;
    w.bound = bound;
    w.exact = lhs <= tol;
    w.valid = qn <= Q && lhs <= bound;
    if (!w.valid) continue;
    if (!result.witness) {
      result.witness = w;
      continue;
    }
    const auto& b = *result.witness;
    bool better;
    if (abs(w.lhs - b.lhs) > tol * max(Real(1.0, prec), b.lhs))
      better = w.lhs < b.lhs;
    else if (abs(w.qnorm - b.qnorm) > tol * b.qnorm)
      better = w.qnorm < b.qnorm;
    else
      better = lex_less(w, b);
    if (better) result.witness = w;
  }
  if (!result.witness) fail(ErrorKind::Internal, "strong Dirichlet search exhausted without a witness");
  auto norm = sign_normalized({result.witness->p, result.witness->q});
  result.witness->p = norm.p;
  result.witness->q = norm.q;
  return result;
}

bool verify_witness(const NumberField& field, const SNumber& x, const DirichletWitness& w) {
  if (w.q.is_zero()) return false;
  const int prec = std::max(x.precision_bits(), kDefaultPrecision);
  auto [lhs, qn] = measure(field, x, w.p, w.q, prec);
  Real bound = dirichlet_constant(field, prec) / w.Q.with_precision(prec);
  return qn <= w.Q && lhs <= bound;
}

DirichletStream weak_dirichlet_stream(const NumberField& field, const SNumber& x, int count, double max_Q) {
  if (count < 1) fail(ErrorKind::Precondition, "count must be >= 1");
  const int prec = std::max(x.precision_bits(), kDefaultPrecision);
  DirichletStream out;
  for (double Q = 1.0; static_cast<int>(out.witnesses.size()) < count; Q *= 2.0) {
    if (Q > max_Q) fail(ErrorKind::Budget, "weak_dirichlet_stream: Q limit reached before count classes");
    auto r = strong_dirichlet_solve(field, x, Real(Q, prec));
    if (!r.witness) continue;
    const auto& w = *r.witness;
    if (w.exact) {
      out.witnesses = {w};
      out.rational = true;
      return out;
    }
    bool seen = false;
    for (auto& prev : out.witnesses) {
      if (!same_fraction(field, {prev.p, prev.q}, {w.p, w.q})) continue;
      seen = true;
      if (w.qnorm < prev.qnorm) prev = w;
      break;
    }
    if (!seen) out.witnesses.push_back(w);
  }
  return out;
}

HattoriComparison hattori_compare(const NumberField& field, const SNumber& x, long bound) {
  const auto& layout = field.layout();
  bool real_quadratic = field.degree() == 2 && layout.num_real() == 2;
  bool complex_quartic = field.degree() == 4 && layout.num_complex() == 2 && layout.num_real() == 0;
  if (!real_quadratic && !complex_quartic)
    fail(ErrorKind::Precondition, "hattori_compare needs a real quadratic or totally complex quartic field");
  if (bound < 1) fail(ErrorKind::Precondition, "bound must be >= 1");
  const int prec = std::max(x.precision_bits(), kDefaultPrecision);
  const int d = field.degree();
  BasisGeometry geo(field);
  auto xd = x_doubles(x);
  auto emb = field.embedding(prec);
  auto unit = emb->embed(field.fundamental_units().front());
  std::vector<std::complex<double>> ud = x_doubles(unit);
  const double l1 = std::log(std::abs(ud[0]));

  HattoriComparison out{Real(1e300, prec), Real(1e300, prec), 0};
  double best_ba = 1e300, best_hat = 1e300;
  std::vector<long> qlo(d), qhi(d);
  for (int i = 0; i < d; ++i) {
    long w = static_cast<long>(std::floor(static_cast<double>(bound) * geo.row_sum[i] + 1e-9));
    qlo[i] = -w;
    qhi[i] = w;
  }
  struct Candidate {
    std::vector<long> p, q;
    long k;
  };
  std::vector<Candidate> near_zero;
  for_box(qlo, qhi, [&](const std::vector<long>& qz) {
    if (std::all_of(qz.begin(), qz.end(), [](long c) { return c == 0; })) return;
    auto qv = geo.place_values(qz);
    if (sup(qv) > static_cast<double>(bound) * (1 + 1e-9)) return;
    // Balance |q_v| across the two places with a power of the fundamental unit.
    double gap = std::log(std::abs(qv[1])) - std::log(std::abs(qv[0]));
    long k0 = std::lround(gap / (2 * l1));
    long best_k = k0;
    double best_spread = 1e300;
    for (long k = k0 - 1; k <= k0 + 1; ++k) {
      double spread = std::abs(gap - 2 * static_cast<double>(k) * l1);
      if (spread < best_spread) best_spread = spread, best_k = k;
    }
    for (int v = 0; v < 2; ++v) qv[v] *= std::pow(ud[v], static_cast<double>(best_k));
    double qn = sup(qv);
    std::vector<std::complex<double>> target;
    for (int v = 0; v < 2; ++v) target.push_back(-qv[v] * xd[v]);
    auto center = geo.coords_of(target);
    std::vector<long> plo(d), phi(d);
    for (int i = 0; i < d; ++i) {
      plo[i] = static_cast<long>(std::floor(center[i]));
      phi[i] = plo[i] + 1;
    }
    for_box(plo, phi, [&](const std::vector<long>& pz) {
      auto pv = geo.place_values(pz);
      double lhs = 0, rel = 0;
      for (int v = 0; v < 2; ++v) {
        double gapv = std::abs(qv[v] * xd[v] + pv[v]);
        lhs = std::max(lhs, gapv);
        rel = std::max(rel, gapv / std::abs(qv[v]));
      }
      ++out.pairs;
      double ba = qn * lhs, hat = qn * qn * rel;
      best_ba = std::min(best_ba, ba);
      best_hat = std::min(best_hat, hat);
      if (ba < 1e-9 || hat < 1e-9) near_zero.push_back({pz, qz, best_k});
    });
  });

  out.inf_ba = Real(best_ba, prec);
  out.inf_hattori = Real(best_hat, prec);
  // Double screening cannot tell a true zero from rounding; decide those exactly.
  if (!near_zero.empty()) {
    Real tol = zero_threshold(prec);
    for (const auto& cand : near_zero) {
      auto p = to_integer(cand.p);
      Real lhs(prec), qn(prec), rel(prec);
      AlgebraicInteger q = *field.to_integral(field.mul(field.power(field.fundamental_units().front(), cand.k),
                                                         field.from_integral(to_integer(cand.q))));
      for (int v = 0; v < 2; ++v) {
        Complex qv = emb->embed_at(q, v), pv = emb->embed_at(p, v);
        Real g = (qv * x[v] + pv).modulus();
        lhs = max(lhs, g);
        rel = max(rel, g / qv.modulus());
        qn = max(qn, qv.modulus());
      }
      Real ba = qn * lhs, hat = qn * qn * rel;
      if (ba <= tol) out.inf_ba = Real(prec);
      if (hat <= tol) out.inf_hattori = Real(prec);
    }
  }
  return out;
}

void write_dirichlet_csv_header(std::ostream& out) { out << "x_id,Q,p,q,lhs,bound,valid\n"; }

void write_dirichlet_csv_row(std::ostream& out, const std::string& x_id, const DirichletWitness& w) {
  auto join = [](const AlgebraicInteger& a) {
    std::string s;
    for (size_t i = 0; i < a.coords.size(); ++i) s += (i ? ";" : "") + a.coords[i].get_str();
    return s;
  };
  out << x_id << ',' << w.Q.to_string(17) << ',' << join(w.p) << ',' << join(w.q) << ',' << w.lhs.to_string(17) << ','
      << w.bound.to_string(17) << ',' << (w.valid ? "true" : "false") << '\n';
}

}  // namespace nfba
