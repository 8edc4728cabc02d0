#ifndef NFBA_XSPEC_HPP
#define NFBA_XSPEC_HPP

#include <optional>
#include <string>

#include "nfba/numberfield.hpp"

namespace nfba {

/* A point of K_S given on the command line. */
struct XSpec {
  SNumber value;
  /* Set when the point was given as an exact element of K. */
  std::optional<AlgebraicNumber> exact;
};

/* Grammar:
 *   a/b, a     exact; a and b are integers, rationals or power-basis
 *              coordinate lists such as [1,-2] or [1/2,0]
 *   v1;v2;...  one decimal per place: 1.25, -3e-4, 0.5+0.5i, 2i
 *   phi, pi    named constants (real places only)
 * Throws Error(Parse). */
XSpec parse_xspec(const NumberField& field, const std::string& text, int precision_bits);

}  // namespace nfba

#endif
