#ifndef NFBA_SRC_LATTICE_HPP
#define NFBA_SRC_LATTICE_HPP

#include <functional>
#include <vector>

#include "nfba/flow.hpp"

namespace nfba::detail {

/* The real lattice g_t u_x iota(Z-span of generators) inside R^{2d}, LLL
 * reduced with the unimodular transform kept exactly. */
class FlowLattice {
 public:
  FlowLattice(const NumberField& field, const SNumber& x, const Real& t, std::vector<LatticePoint> generators,
              int precision);

  /* Calls visit once per +/- pair of nonzero lattice vectors whose Euclidean
   * norm is at most radius. Returns false if the node budget ran out. */
  bool enumerate(const Real& radius, long budget, long& nodes,
                 const std::function<void(const LatticePoint&)>& visit) const;

  int dimension() const { return n_; }

 private:
  std::vector<Real> coordinates(const LatticePoint& pt) const;
  void reduce();

  const NumberField& field_;
  int precision_;
  int n_;
  SNumber x_;
  Real et_;
  Real emt_;
  std::vector<LatticePoint> generators_;
  std::vector<std::vector<Real>> basis_;
  std::vector<std::vector<Integer>> transform_;  // row i: basis_i in terms of generators
  std::vector<double> gs_norm_;                  // |b*_i|^2
  std::vector<std::vector<double>> mu_;
};

/* Standard generators (beta_i, 0), (0, beta_i), optionally pushed through an
 * SL2(O) matrix (a b; c d). */
std::vector<LatticePoint> module_generators(const NumberField& field,
                                            const std::optional<std::array<AlgebraicNumber, 4>>& change);

}  // namespace nfba::detail

#endif
