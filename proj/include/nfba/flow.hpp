#ifndef NFBA_FLOW_HPP
#define NFBA_FLOW_HPP

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nfba/numberfield.hpp"

namespace nfba {

/* A vector of O^2, in integral-basis coordinates. Under the flow it is
 * small near x = iota(-p/q). */
struct LatticePoint {
  AlgebraicInteger p;
  AlgebraicInteger q;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/* (-a, b) with a/b = r and b the least positive integer with b*r in O. */
LatticePoint target_point(const NumberField& field, const AlgebraicNumber& r);
/* p/q as an element of K. Throws Error(Domain) if q == 0. */
AlgebraicNumber fraction_of(const NumberField& field, const LatticePoint& pt);
/* p q' == p' q, exactly. */
bool same_fraction(const NumberField& field, const LatticePoint& a, const LatticePoint& b);
/* Flips the sign so the first nonzero coordinate of q (or of p when q == 0)
 * is positive. */
LatticePoint sign_normalized(const LatticePoint& pt);
std::string to_string(const LatticePoint& pt);

/* The module g_t u_x iota(O^2). */
struct FlowState {
  SNumber x;
  Real t;
};

/* Precision used for computations at time t: enough bits to absorb the
 * e^{2t} cancellation in p + x q. */
int working_precision(const SNumber& x, const Real& t);

SNumberPair flow_vector(const NumberField& field, const FlowState& state, const LatticePoint& pt);
Real flow_height(const NumberField& field, const FlowState& state, const LatticePoint& pt);

struct ForwardDerivative {
  int value = 0;
  std::vector<int> places;  // T_{x,t}
  /* Some |x_v + p_v/q_v| sits within the tie tolerance of e^{-2t}. */
  bool kink = false;
};

/* Sum over v outside T of d_v minus sum over v in T of d_v. Throws
 * Error(Precondition) if q == 0. */
ForwardDerivative forward_derivative(const NumberField& field, const FlowState& state, const LatticePoint& pt);

struct EnumerationOptions {
  long budget = 10'000'000;
  /* Optional element (a b; c d) of SL2(O) applied to the module basis. */
  std::optional<std::array<AlgebraicNumber, 4>> basis_change;
};

struct SmallVector {
  LatticePoint pt;
  Real height;
};

struct Enumeration {
  /* Every vector (one per sign) with height <= cutoff whose unit class
   * meets the enumeration box; every unit class below cutoff is present. */
  std::vector<SmallVector> vectors;
  bool complete = true;
  long nodes = 0;
};

Enumeration enumerate_small(const NumberField& field, const FlowState& state, const Real& cutoff,
                            const EnumerationOptions& options = {});

struct DeltaH {
  Real value;
  std::optional<LatticePoint> witness;  // set when value < cutoff
  bool complete = true;
  long nodes = 0;
};

/* min(cutoff, min over nonzero (p,q) of the flowed height). Ties resolve to the
 * lexicographically smaller sign-normalized (q, p). */
DeltaH delta_H(const NumberField& field, const FlowState& state, const Real& cutoff,
               const EnumerationOptions& options = {});

enum class Verdict { Certified, Refuted, Inconclusive };
const char* to_string(Verdict v);

struct RefutationWitness {
  LatticePoint pt;
  Real time;
  Real height;
  int derivative = 0;
};

struct BACertificate {
  Real horizon;
  Real epsilon;
  Real spacing;
  std::vector<Real> times;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<RefutationWitness> witness;
  /* min{e^{-d t_1}, eps e^{-d c}} with c the largest gap. */
  Real lower_bound;
  bool kink_seen = false;
  long vectors_checked = 0;
};

/* Refuted when, at some t_n = n * spacing <= horizon, a vector of height below
 * epsilon has negative forward derivative; certified when none does. */
BACertificate certify_ba(const NumberField& field, const SNumber& x, const Real& horizon, const Real& epsilon,
                         const Real& spacing, const EnumerationOptions& options = {});
/* Same check on an explicit increasing schedule. */
BACertificate certify_ba_schedule(const NumberField& field, const SNumber& x, const std::vector<Real>& times,
                                  const Real& epsilon, const EnumerationOptions& options = {});

struct Sandwich {
  Real ratio;
  Real bound;
  bool within = false;
};

/* H(g_t u_y v) / H(g_t u_x v) against (1 + e^{2t} ||x - y||)^d. */
Sandwich sandwich_check(const NumberField& field, const SNumber& x, const SNumber& y, const LatticePoint& pt,
                        const Real& t);

struct SmallFraction {
  LatticePoint pt;
  /* Minimum over the ball of the flowed height of pt. */
  Real ball_height;
};

/* Largest epsilon allowed by the uniqueness lemma: 2^-d (1 + 2 e^{2t} radius)^-d. */
Real uniqueness_epsilon(int degree, const Real& t, const Real& radius);

/* The unique fraction class whose vector reaches height <= epsilon somewhere in
 * the sup-norm ball B(center, radius) at time t. Throws
 * Error(InvariantViolation) if two classes qualify. */
std::optional<SmallFraction> find_small_fraction(const NumberField& field, const SNumber& center, const Real& radius,
                                                 const Real& t, const Real& epsilon,
                                                 const EnumerationOptions& options = {});

struct TraceRow {
  Real t;
  Real delta;
  std::optional<LatticePoint> witness;
  std::optional<int> derivative;
  bool complete = true;
};

std::vector<TraceRow> flow_trace(const NumberField& field, const SNumber& x, const Real& tmax, const Real& step,
                                 const Real& cutoff);
/* Columns t, delta_H, witness_p, witness_q, derivative_at_witness. */
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace nfba

#endif
