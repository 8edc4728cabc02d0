#ifndef NFBA_DIRICHLET_HPP
#define NFBA_DIRICHLET_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nfba/flow.hpp"
#include "nfba/numberfield.hpp"

namespace nfba {

/* ((2/pi)^(2 #S_C) |D_K|)^(1/d). */
Real dirichlet_constant(const NumberField& field, int precision_bits = kDefaultPrecision);

struct DirichletWitness {
  AlgebraicInteger p;
  AlgebraicInteger q;
  Real Q;
  Real lhs;    // ||iota(q) x + iota(p)||
  Real qnorm;  // ||iota(q)||
  Real bound;  // C / Q
  bool valid = false;
  /* lhs vanishes to working precision: x = iota(-p/q). */
  bool exact = false;
};

enum class DirichletStatus { Found, QBoxEmpty };

struct DirichletResult {
  DirichletStatus status = DirichletStatus::Found;
  std::optional<DirichletWitness> witness;
  long q_candidates = 0;
};

/* Searches every q with ||iota(q)|| <= Q and every p within C/Q of -q x.
 * Returns the witness of least lhs (ties: smaller ||iota(q)||, then
 * lexicographic sign-normalized coordinates). search_bound caps the
 * integral-basis box; exceeding it throws Error(Budget). */
DirichletResult strong_dirichlet_solve(const NumberField& field, const SNumber& x, const Real& Q,
                                       long search_bound = 1'000'000);

/* Re-evaluates both inequalities of a witness from scratch. */
bool verify_witness(const NumberField& field, const SNumber& x, const DirichletWitness& w);

struct DirichletStream {
  std::vector<DirichletWitness> witnesses;
  /* x was recognised as a point of iota(K). */
  bool rational = false;
};

/* count pairwise distinct fraction classes with ||q x + p|| <= C ||q||^-1,
 * from strong solutions at Q = 1, 2, 4, ... */
DirichletStream weak_dirichlet_stream(const NumberField& field, const SNumber& x, int count, double max_Q = 1e7);

struct HattoriComparison {
  Real inf_ba;       // inf ||q|| ||q x + p||
  Real inf_hattori;  // inf ||q||^2 ||x + p/q||
  long pairs = 0;
};

/* Finite truncation (||iota(q)|| <= bound) of both infima, with q unit
 * reduced before measuring. Requires a real quadratic or totally complex
 * quartic field. */
HattoriComparison hattori_compare(const NumberField& field, const SNumber& x, long bound);

/* x-id, Q, p, q, lhs, bound, valid. */
void write_dirichlet_csv_header(std::ostream& out);
void write_dirichlet_csv_row(std::ostream& out, const std::string& x_id, const DirichletWitness& w);

}  // namespace nfba

#endif
