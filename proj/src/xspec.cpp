#include "nfba/xspec.hpp"

#include <algorithm>
#include <cctype>

#include "nfba/error.hpp"

namespace nfba {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

Rational parse_rational(const std::string& text) {
  std::string s = trim(text);
  if (s.empty()) fail(ErrorKind::Parse, "empty rational");
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch)) && ch != '/' && ch != '-' && ch != '+')
      fail(ErrorKind::Parse, "not a rational: '" + text + "'");
  if (s[0] == '+') s = s.substr(1);
  Rational q;
  if (q.set_str(s, 10) != 0) fail(ErrorKind::Parse, "not a rational: '" + text + "'");
  if (q.get_den() == 0) fail(ErrorKind::Parse, "zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

/* An integer, or a bracketed list of rational power-basis coordinates. */
AlgebraicNumber parse_element(const NumberField& field, const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail(ErrorKind::Parse, "unterminated coordinate list '" + text + "'");
    auto parts = split(s.substr(1, s.size() - 2), ',');
    if (static_cast<int>(parts.size()) != field.degree())
      fail(ErrorKind::Parse, "coordinate list needs " + std::to_string(field.degree()) + " entries");
    std::vector<Rational> coords;
    for (const auto& p : parts) coords.push_back(parse_rational(p));
    return AlgebraicNumber(std::move(coords));
  }
  return field.from_rational(parse_rational(s));
}

/* Splits "a/b" at the top-level slash that is not inside brackets. */
std::optional<std::pair<std::string, std::string>> split_fraction(const std::string& s) {
  int depth = 0;
  std::optional<size_t> at;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (s[i] == '/' && depth == 0) {
      if (at) return std::nullopt;
      at = i;
    }
  }
  if (!at) return std::nullopt;
  return std::make_pair(s.substr(0, *at), s.substr(*at + 1));
}

bool is_exact_syntax(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '/' || ch == '-' || ch == '+' || ch == '[' ||
           ch == ']' || ch == ',' || ch == ' ';
  });
}

/* "1.5", "-2e-3", "0.5+0.5i", "0.5-2i", "3i". */
Complex parse_place(const std::string& text, bool complex_place, int prec) {
  std::string s = trim(text);
  if (s.empty()) fail(ErrorKind::Parse, "empty place value");
  if (s.back() != 'i') return Complex(Real::parse(s, prec));
  if (!complex_place) fail(ErrorKind::Parse, "imaginary part given for a real place: '" + text + "'");
  std::string body = s.substr(0, s.size() - 1);
  // Find the sign that separates the real and imaginary parts (not an exponent sign).
  size_t cut = std::string::npos;
  for (size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  std::string re = cut == std::string::npos ? "0" : body.substr(0, cut);
  std::string im = cut == std::string::npos ? body : body.substr(cut);
  if (im == "+" || im == "-" || im.empty()) im += "1";
  if (im[0] == '+') im = im.substr(1);
  return Complex(Real::parse(re, prec), Real::parse(im, prec));
}

}  // namespace

XSpec parse_xspec(const NumberField& field, const std::string& text, int precision_bits) {
  const std::string s = trim(text);
  const auto& layout = field.layout();
  if (s.empty()) fail(ErrorKind::Parse, "empty x-spec");

  if (s == "phi" || s == "pi") {
    if (layout.num_complex() > 0) fail(ErrorKind::Parse, "named constants need real places only");
    Real v = s == "pi" ? Real::pi(precision_bits) : (sqrt(Real(5L, precision_bits)) + 1.0) / 2.0;
    std::vector<Complex> vals(layout.size(), Complex(v));
    return {SNumber(layout, std::move(vals), precision_bits), std::nullopt};
  }

  if (is_exact_syntax(s)) {
    if (auto frac = split_fraction(s)) {
      AlgebraicNumber a = parse_element(field, frac->first);
      AlgebraicNumber b = parse_element(field, frac->second);
      if (b.is_zero()) fail(ErrorKind::Parse, "division by zero in x-spec");
      AlgebraicNumber x = field.div(a, b);
      return {embed(field, x, precision_bits), x};
    }
    if (s.front() == '[' || s.find_first_of("[],") == std::string::npos) {
      AlgebraicNumber x = parse_element(field, s);
      return {embed(field, x, precision_bits), x};
    }
  }

  auto parts = split(s, ';');
  if (static_cast<int>(parts.size()) != layout.size())
    fail(ErrorKind::Parse, "x-spec needs " + std::to_string(layout.size()) + " place values separated by ';'");
  std::vector<Complex> vals;
  for (int v = 0; v < layout.size(); ++v) vals.push_back(parse_place(parts[v], layout.kinds[v] == PlaceKind::Complex, precision_bits));
  return {SNumber(layout, std::move(vals), precision_bits), std::nullopt};
}

}  // namespace nfba
