#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nfba/error.hpp"
#include "nfba/xspec.hpp"

using namespace nfba;

namespace {

ErrorKind kind_of(const NumberField& f, const std::string& text) {
  try {
    parse_xspec(f, text, 128);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("exact rationals over Q") {
  auto q = NumberField::preset("Q");
  auto x = parse_xspec(q, "1/3", 128);
  REQUIRE(x.exact);
  CHECK(x.exact->coords()[0] == Rational(1, 3));
  CHECK(x.value[0].re.to_double() == doctest::Approx(1.0 / 3).epsilon(1e-15));

  auto y = parse_xspec(q, "-7", 128);
  REQUIRE(y.exact);
  CHECK(y.exact->coords()[0] == Rational(-7));
}

TEST_CASE("coordinate lists divide in the field") {
  auto f = NumberField::preset("Q(sqrt2)");
  // (1 + a) / (1 - a) = -(3 + 2a)
  auto x = parse_xspec(f, "[1,1]/[1,-1]", 128);
  REQUIRE(x.exact);
  CHECK(x.exact->coords()[0] == Rational(-3));
  CHECK(x.exact->coords()[1] == Rational(-2));
  double s = x.value[0].re.to_double() + x.value[1].re.to_double();
  CHECK(s == doctest::Approx(-6.0).epsilon(1e-14));
  double lo = std::min(x.value[0].re.to_double(), x.value[1].re.to_double());
  double hi = std::max(x.value[0].re.to_double(), x.value[1].re.to_double());
  CHECK(lo == doctest::Approx(-3 - 2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(hi == doctest::Approx(-3 + 2 * std::sqrt(2.0)).epsilon(1e-12));

  auto bare = parse_xspec(f, "[1/2,0]", 128);
  REQUIRE(bare.exact);
  CHECK(bare.value[0].re.to_double() == 0.5);
}

TEST_CASE("per-place decimals") {
  auto f = NumberField::preset("Q(sqrt2)");
  auto x = parse_xspec(f, "1.25; -3e-4", 128);
  CHECK_FALSE(x.exact);
  CHECK(x.value[0].re.to_double() == 1.25);
  CHECK(x.value[1].re.to_double() == doctest::Approx(-3e-4).epsilon(1e-15));

  auto gi = NumberField::preset("Q(i)");
  auto z = parse_xspec(gi, "0.5-2e-1i", 128);
  CHECK(z.value[0].re.to_double() == 0.5);
  CHECK(z.value[0].im.to_double() == doctest::Approx(-0.2).epsilon(1e-15));
  auto w = parse_xspec(gi, "2i", 128);
  CHECK(w.value[0].re.to_double() == 0.0);
  CHECK(w.value[0].im.to_double() == 2.0);
  auto u = parse_xspec(gi, "1-i", 128);
  CHECK(u.value[0].im.to_double() == -1.0);
}

TEST_CASE("named constants") {
  auto q = NumberField::preset("Q");
  auto phi = parse_xspec(q, "phi", 200);
  CHECK(phi.value[0].re.to_double() == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
  CHECK(phi.value.precision_bits() == 200);
  auto pi = parse_xspec(NumberField::preset("Q(sqrt5)"), "pi", 128);
  CHECK(pi.value[1].re.to_double() == doctest::Approx(M_PI).epsilon(1e-15));
}

TEST_CASE("malformed x-specs are parse errors") {
  auto q = NumberField::preset("Q");
  auto f = NumberField::preset("Q(sqrt2)");
  auto gi = NumberField::preset("Q(i)");
  CHECK(kind_of(q, "") == ErrorKind::Parse);
  CHECK(kind_of(q, "1/0") == ErrorKind::Parse);
  CHECK(kind_of(q, "1/2/3") == ErrorKind::Parse);
  CHECK(kind_of(q, "abc") == ErrorKind::Parse);
  CHECK(kind_of(q, "2i") == ErrorKind::Parse);
  CHECK(kind_of(f, "1.5") == ErrorKind::Parse);
  CHECK(kind_of(f, "[1,2,3]") == ErrorKind::Parse);
  CHECK(kind_of(f, "[1,2") == ErrorKind::Parse);
  CHECK(kind_of(gi, "phi") == ErrorKind::Parse);
}

TEST_CASE("shipped field files match the built-in presets") {
  const std::pair<const char*, const char*> files[] = {
      {"q", "Q"}, {"qi", "Q(i)"}, {"qsqrt2", "Q(sqrt2)"}, {"qsqrt5", "Q(sqrt5)"}, {"qzeta3", "Q(zeta3)"}, {"qzeta8", "Q(zeta8)"}};
  for (const auto& [file, name] : files) {
    CAPTURE(name);
    auto loaded = NumberField::load(std::string(NFBA_SOURCE_DIR) + "/fields/" + file + ".json");
    auto preset = NumberField::preset(name);
    CHECK(loaded.config().to_json() == preset.config().to_json());
    CHECK(loaded.degree() == preset.degree());
  }
}
