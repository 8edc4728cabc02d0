#include "nfba/flow.hpp"

#include <cmath>
#include <numeric>

#include "lattice.hpp"
#include "nfba/error.hpp"

namespace nfba {

namespace {

Real tie_tolerance(int precision) { return pow(Real(2.0, precision), -(precision / 2)); }

bool key_less(const LatticePoint& a, const LatticePoint& b) {
  auto na = sign_normalized(a), nb = sign_normalized(b);
  if (na.q != nb.q) return na.q < nb.q;
  return na.p < nb.p;
}

/* a is a better minimiser than b: smaller height, ties by key. */
bool better(const Real& ha, const LatticePoint& a, const Real& hb, const LatticePoint& b, const Real& tol) {
  Real gap = ha - hb;
  Real scale = max(abs(ha), abs(hb)) * tol;
  if (abs(gap) > scale) return gap.sign() < 0;
  return key_less(a, b);
}

FlowState at_time(const SNumber& x, const Real& t) { return FlowState{x, t}; }

}  // namespace

// ---------------------------------------------------------------------------
// Lattice points

LatticePoint target_point(const NumberField& field, const AlgebraicNumber& r) {
  Integer m = 1;
  for (const auto& c : r.coords()) m = lcm(m, Integer(c.get_den()));
  for (Integer b = 1; b <= m; ++b) {
    if (m % b != 0) continue;
    auto scaled = field.to_integral(Rational(b) * r);
    if (!scaled) continue;
    auto den = field.to_integral(field.from_rational(Rational(b)));
    AlgebraicInteger neg = *scaled;
    for (auto& c : neg.coords) c = -c;
    return {neg, *den};
  }
  fail(ErrorKind::Internal, "no integral denominator for " + r.to_string());
}

AlgebraicNumber fraction_of(const NumberField& field, const LatticePoint& pt) {
  if (pt.q.is_zero()) fail(ErrorKind::Domain, "fraction with q = 0");
  return field.div(field.from_integral(pt.p), field.from_integral(pt.q));
}

bool same_fraction(const NumberField& field, const LatticePoint& a, const LatticePoint& b) {
  return field.mul(a.p, b.q) == field.mul(b.p, a.q);
}

LatticePoint sign_normalized(const LatticePoint& pt) {
  const auto& lead = pt.q.is_zero() ? pt.p : pt.q;
  for (const auto& c : lead.coords) {
    if (c == 0) continue;
    if (c > 0) return pt;
    LatticePoint out = pt;
    for (auto& x : out.p.coords) x = -x;
    for (auto& x : out.q.coords) x = -x;
    return out;
  }
  return pt;
}

namespace {

std::string coords_string(const AlgebraicInteger& a) {
  std::string out = "[";
  for (size_t i = 0; i < a.coords.size(); ++i) {
    if (i) out += ",";
    out += a.coords[i].get_str();
  }
  return out + "]";
}

std::string csv_coords(const AlgebraicInteger& a) {
  std::string out;
  for (size_t i = 0; i < a.coords.size(); ++i) {
    if (i) out += ";";
    out += a.coords[i].get_str();
  }
  return out;
}

}  // namespace

std::string to_string(const LatticePoint& pt) { return "(" + coords_string(pt.p) + ", " + coords_string(pt.q) + ")"; }

// ---------------------------------------------------------------------------
// Flow

int working_precision(const SNumber& x, const Real& t) {
  double tt = std::max(0.0, t.to_double());
  return std::max(x.precision_bits(), 96 + static_cast<int>(std::ceil(3.0 * tt / std::log(2.0))));
}

SNumberPair flow_vector(const NumberField& field, const FlowState& state, const LatticePoint& pt) {
  const int prec = working_precision(state.x, state.t);
  auto emb = field.embedding(prec);
  Real et = exp(state.t.with_precision(prec)), emt = exp(-state.t.with_precision(prec));
  std::vector<Complex> top, bottom;
  for (int v = 0; v < field.layout().size(); ++v) {
    Complex p = emb->embed_at(pt.p, v), q = emb->embed_at(pt.q, v);
    top.push_back((p + state.x[v] * q) * et);
    bottom.push_back(q * emt);
  }
  return {SNumber(field.layout(), std::move(top), prec), SNumber(field.layout(), std::move(bottom), prec)};
}

Real flow_height(const NumberField& field, const FlowState& state, const LatticePoint& pt) {
  return height_vec(flow_vector(field, state, pt));
}

ForwardDerivative forward_derivative(const NumberField& field, const FlowState& state, const LatticePoint& pt) {
  if (pt.q.is_zero()) fail(ErrorKind::Precondition, "forward_derivative needs q != 0");
  const int prec = working_precision(state.x, state.t);
  auto emb = field.embedding(prec);
  Real e2t = exp(Real(-2.0, prec) * state.t.with_precision(prec));
  Real tol = tie_tolerance(prec);
  ForwardDerivative out;
  const auto& layout = field.layout();
  for (int v = 0; v < layout.size(); ++v) {
    Complex p = emb->embed_at(pt.p, v), q = emb->embed_at(pt.q, v);
    Real gap = (p + state.x[v] * q).modulus();
    Real threshold = e2t * q.modulus();
    if (abs(gap - threshold) <= tol * threshold) out.kink = true;
    if (gap < threshold) {
      out.places.push_back(v);
      out.value -= layout.local_degree(v);
    } else {
      out.value += layout.local_degree(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration and delta_H

Enumeration enumerate_small(const NumberField& field, const FlowState& state, const Real& cutoff,
                            const EnumerationOptions& options) {
  if (cutoff.sign() <= 0) fail(ErrorKind::Precondition, "cutoff must be positive");
  if (state.t.sign() < 0) fail(ErrorKind::Precondition, "flow time must be >= 0");
  const int prec = working_precision(state.x, state.t);
  const int d = field.degree();
  detail::FlowLattice lattice(field, state.x, state.t, detail::module_generators(field, options.basis_change), prec);
  // Every class below cutoff has a unit multiple in this sup-norm box.
  Real sup = Real(field.unit_balance_constant() * (1.0 + 1e-9), prec) *
             pow(cutoff.with_precision(prec), Real(1.0, prec) / Real(static_cast<long>(d), prec));
  Real radius = sup * sqrt(Real(static_cast<long>(2 * field.layout().size()), prec));
  Enumeration out;
  Real tol = tie_tolerance(prec);
  Real limit = cutoff * (Real(1.0, prec) + tol);
  out.complete = lattice.enumerate(radius, options.budget, out.nodes, [&](const LatticePoint& pt) {
    Real h = flow_height(field, state, pt);
    if (h <= limit) out.vectors.push_back({pt, h});
  });
  return out;
}

DeltaH delta_H(const NumberField& field, const FlowState& state, const Real& cutoff, const EnumerationOptions& options) {
  auto e = enumerate_small(field, state, cutoff, options);
  const int prec = working_precision(state.x, state.t);
  Real tol = tie_tolerance(prec);
  DeltaH out{cutoff.with_precision(prec), std::nullopt, e.complete, e.nodes};
  const SmallVector* best = nullptr;
  for (const auto& sv : e.vectors)
    if (!best || better(sv.height, sv.pt, best->height, best->pt, tol)) best = &sv;
  if (best) {
    out.value = min(out.value, best->height);
    out.witness = sign_normalized(best->pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certification

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "certified";
    case Verdict::Refuted:
      return "refuted";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

BACertificate certify_ba_schedule(const NumberField& field, const SNumber& x, const std::vector<Real>& times,
                                  const Real& epsilon, const EnumerationOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorKind::Precondition, "epsilon must lie in (0, 1)");
  if (times.empty()) fail(ErrorKind::Precondition, "empty certification schedule");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= 0.0) fail(ErrorKind::Precondition, "certification times must be positive");
    if (i && times[i] <= times[i - 1]) fail(ErrorKind::Precondition, "certification times must increase");
  }
  const int prec = x.precision_bits();
  const long d = field.degree();
  BACertificate cert;
  cert.epsilon = epsilon;
  cert.horizon = times.back();
  cert.times = times;
  Real gap = times.size() > 1 ? times[1] - times[0] : times.front();
  for (size_t i = 2; i < times.size(); ++i) gap = max(gap, times[i] - times[i - 1]);
  cert.spacing = gap;
  cert.lower_bound = min(exp(Real(-d, prec) * times.front()), epsilon * exp(Real(-d, prec) * gap));

  bool incomplete = false;
  for (const auto& t : times) {
    FlowState state = at_time(x, t);
    auto e = enumerate_small(field, state, epsilon, options);
    if (!e.complete) incomplete = true;
    Real tol = tie_tolerance(working_precision(x, t));
    const SmallVector* failing = nullptr;
    int failing_derivative = 0;
    for (const auto& sv : e.vectors) {
      if (!(sv.height < epsilon)) continue;
      ++cert.vectors_checked;
      if (sv.pt.q.is_zero()) continue;
      auto der = forward_derivative(field, state, sv.pt);
      cert.kink_seen = cert.kink_seen || der.kink;
      if (der.value >= 0) continue;
      if (!failing || better(sv.height, sv.pt, failing->height, failing->pt, tol)) {
        failing = &sv;
        failing_derivative = der.value;
      }
    }
    if (failing) {
      cert.verdict = Verdict::Refuted;
      cert.witness = RefutationWitness{sign_normalized(failing->pt), t, failing->height, failing_derivative};
      return cert;
    }
  }
  cert.verdict = incomplete ? Verdict::Inconclusive : Verdict::Certified;
  return cert;
}

BACertificate certify_ba(const NumberField& field, const SNumber& x, const Real& horizon, const Real& epsilon,
                         const Real& spacing, const EnumerationOptions& options) {
  if (!(horizon > 0.0)) fail(ErrorKind::Precondition, "horizon must be positive");
  if (!(spacing > 0.0)) fail(ErrorKind::Precondition, "spacing must be positive");
  std::vector<Real> times;
  const int prec = std::max(x.precision_bits(), spacing.precision());
  Real slack = horizon * (1.0 + 1e-12);
  for (long n = 1;; ++n) {
    Real t = spacing.with_precision(prec) * Real(n, prec);
    if (t > slack) break;
    times.push_back(t);
    if (n > 1'000'000) fail(ErrorKind::Precondition, "horizon / spacing too large");
  }
  if (times.empty()) fail(ErrorKind::Precondition, "spacing exceeds horizon");
  auto cert = certify_ba_schedule(field, x, times, epsilon, options);
  cert.horizon = horizon;
  cert.spacing = spacing;
  cert.lower_bound = min(exp(Real(-static_cast<long>(field.degree()), prec) * times.front()),
                         epsilon * exp(Real(-static_cast<long>(field.degree()), prec) * spacing));
  return cert;
}

Sandwich sandwich_check(const NumberField& field, const SNumber& x, const SNumber& y, const LatticePoint& pt,
                        const Real& t) {
  Real hx = flow_height(field, at_time(x, t), pt);
  Real hy = flow_height(field, at_time(y, t), pt);
  if (hx.is_zero() || hy.is_zero()) fail(ErrorKind::Domain, "sandwich_check: zero height");
  const int prec = hx.precision();
  Real rho = distance(x, y);
  Sandwich out;
  out.ratio = hy / hx;
  out.bound = pow(Real(1.0, prec) + exp(Real(2.0, prec) * t) * rho, static_cast<long>(field.degree()));
  out.within = out.ratio <= out.bound * (1.0 + 1e-9) && out.ratio * out.bound >= Real(1.0 - 1e-9, prec);
  return out;
}

// ---------------------------------------------------------------------------
// Small fractions

Real uniqueness_epsilon(int degree, const Real& t, const Real& radius) {
  const int prec = std::max(t.precision(), radius.precision());
  Real base = Real(2.0, prec) * (Real(1.0, prec) + Real(2.0, prec) * exp(Real(2.0, prec) * t) * radius);
  return pow(base, -static_cast<long>(degree));
}

std::optional<SmallFraction> find_small_fraction(const NumberField& field, const SNumber& center, const Real& radius,
                                                 const Real& t, const Real& epsilon,
                                                 const EnumerationOptions& options) {
  if (radius.sign() < 0) fail(ErrorKind::Precondition, "ball radius must be >= 0");
  if (epsilon.sign() <= 0) fail(ErrorKind::Precondition, "epsilon must be positive");
  const int d = field.degree();
  if (epsilon > uniqueness_epsilon(d, t, radius) * (1.0 + 1e-12))
    fail(ErrorKind::Precondition, "epsilon exceeds 2^-d (1 + 2 e^{2t} r)^-d");
  FlowState state = at_time(center, t);
  const int prec = working_precision(center, t);
  Real et = exp(t.with_precision(prec)), emt = exp(-t.with_precision(prec));
  Real r = radius.with_precision(prec);
  Real widened = epsilon * pow(Real(1.0, prec) + et * et * r, static_cast<long>(d)) * (1.0 + 1e-12);
  auto e = enumerate_small(field, state, widened, options);
  if (!e.complete) fail(ErrorKind::Budget, "find_small_fraction: enumeration budget exceeded");

  auto emb = field.embedding(prec);
  const auto& layout = field.layout();
  Real tol = tie_tolerance(prec);
  std::vector<SmallFraction> classes;
  for (const auto& sv : e.vectors) {
    if (sv.pt.q.is_zero()) continue;
    Real h(1.0, prec);
    for (int v = 0; v < layout.size(); ++v) {
      Complex p = emb->embed_at(sv.pt.p, v), q = emb->embed_at(sv.pt.q, v);
      Real qn = q.modulus();
      Real offset = (p + center[v] * q).modulus() / qn - r;
      Real factor = qn * max(emt, et * max(Real(prec), offset));
      h *= layout.local_degree(v) == 2 ? factor * factor : factor;
    }
    if (h > epsilon) continue;
    bool merged = false;
    for (auto& c : classes) {
      if (!same_fraction(field, c.pt, sv.pt)) continue;
      if (better(h, sv.pt, c.ball_height, c.pt, tol)) c = {sign_normalized(sv.pt), h};
      merged = true;
      break;
    }
    if (!merged) classes.push_back({sign_normalized(sv.pt), h});
  }
  if (classes.size() > 1)
    fail(ErrorKind::InvariantViolation, "two fraction classes below epsilon: " + to_string(classes[0].pt) + " and " +
                                            to_string(classes[1].pt));
  if (classes.empty()) return std::nullopt;
  return classes.front();
}

// ---------------------------------------------------------------------------
// Trace

std::vector<TraceRow> flow_trace(const NumberField& field, const SNumber& x, const Real& tmax, const Real& step,
                                 const Real& cutoff) {
  if (!(step > 0.0)) fail(ErrorKind::Precondition, "trace step must be positive");
  if (tmax.sign() < 0) fail(ErrorKind::Precondition, "tmax must be >= 0");
  std::vector<TraceRow> rows;
  const int prec = std::max(x.precision_bits(), step.precision());
  Real slack = tmax * (1.0 + 1e-12) + 1e-12;
  for (long n = 0;; ++n) {
    Real t = step.with_precision(prec) * Real(n, prec);
    if (t > slack) break;
    auto dh = delta_H(field, at_time(x, t), cutoff);
    TraceRow row{t, dh.value, dh.witness, std::nullopt, dh.complete};
    if (dh.witness && !dh.witness->q.is_zero()) row.derivative = forward_derivative(field, at_time(x, t), *dh.witness).value;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "t,delta_H,witness_p,witness_q,derivative_at_witness\n";
  for (const auto& r : rows) {
    out << r.t.to_string(17) << ',' << r.delta.to_string(17) << ',';
    if (r.witness)
      out << csv_coords(r.witness->p) << ',' << csv_coords(r.witness->q) << ',';
    else
      out << ",,";
    if (r.derivative) out << *r.derivative;
    out << '\n';
  }
}

}  // namespace nfba
