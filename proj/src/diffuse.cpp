#include "nfba/diffuse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nfba/error.hpp"

namespace nfba {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/* Orthonormal basis by modified Gram-Schmidt; dependent vectors are dropped. */
std::vector<Vec> orthonormalize(const LinearSubspace& s, int n) {
  std::vector<Vec> out;
  for (Vec v : s.basis) {
    if (static_cast<int>(v.size()) != n) fail(ErrorKind::Domain, "family vector has the wrong dimension");
    for (const auto& e : out) {
      double c = dot(v, e);
      for (int i = 0; i < n; ++i) v[i] -= c * e[i];
    }
    double len = norm(v);
    if (len < 1e-12) continue;
    for (double& x : v) x /= len;
    out.push_back(std::move(v));
  }
  if (static_cast<int>(out.size()) >= n) fail(ErrorKind::Domain, "family subspace is not proper");
  return out;
}

double perp_norm(const Vec& v, const std::vector<Vec>& onb) {
  Vec w = v;
  for (const auto& e : onb) {
    double c = dot(v, e);
    for (size_t i = 0; i < w.size(); ++i) w[i] -= c * e[i];
  }
  return norm(w);
}

}  // namespace

SampledCurve SampledCurve::from_points(std::vector<double> ts, std::vector<std::vector<double>> points) {
  const size_t m = ts.size();
  if (m < 2 || points.size() != m) fail(ErrorKind::Domain, "curve needs at least two nodes with matching points");
  SampledCurve curve;
  curve.dimension = static_cast<int>(points[0].size());
  if (curve.dimension < 1) fail(ErrorKind::Domain, "curve points need at least one coordinate");
  for (size_t i = 0; i < m; ++i) {
    if (static_cast<int>(points[i].size()) != curve.dimension) fail(ErrorKind::Domain, "ragged curve points");
    if (i && !(ts[i] > ts[i - 1])) fail(ErrorKind::Domain, "curve parameters must increase strictly");
  }
  if (ts.front() < 0.0 || ts.back() > 1.0) fail(ErrorKind::Domain, "curve parameters must lie in [0,1]");
  // Three-point stencils on possibly uneven spacing: central inside, one-sided at the ends.
  auto stencil = [&](size_t j0, double w0, double w1, double w2) {
    Vec der(curve.dimension);
    for (int k = 0; k < curve.dimension; ++k)
      der[k] = w0 * points[j0][k] + w1 * points[j0 + 1][k] + w2 * points[j0 + 2][k];
    return der;
  };
  for (size_t i = 0; i < m; ++i) {
    Vec der;
    if (m == 2) {
      der = sub(points[1], points[0]);
      for (double& x : der) x /= ts[1] - ts[0];
    } else {
      size_t j0 = i == 0 ? 0 : (i + 1 == m ? m - 3 : i - 1);
      double h1 = ts[j0 + 1] - ts[j0], h2 = ts[j0 + 2] - ts[j0 + 1], h = h1 + h2;
      if (i == 0)
        der = stencil(j0, -(2 * h1 + h2) / (h1 * h), h / (h1 * h2), -h1 / (h2 * h));
      else if (i + 1 == m)
        der = stencil(j0, h2 / (h1 * h), -h / (h1 * h2), (2 * h2 + h1) / (h2 * h));
      else
        der = stencil(j0, -h2 / (h1 * h), (h2 - h1) / (h1 * h2), h1 / (h2 * h));
    }
    curve.nodes.push_back({ts[i], points[i], std::move(der)});
  }
  return curve;
}

SampledCurve SampledCurve::sample(const std::function<std::vector<double>(double)>& phi, int node_count) {
  if (node_count < 2) fail(ErrorKind::Domain, "need at least two nodes");
  std::vector<double> ts;
  std::vector<Vec> pts;
  for (int i = 0; i < node_count; ++i) {
    double t = static_cast<double>(i) / (node_count - 1);
    ts.push_back(t);
    pts.push_back(phi(t));
  }
  return from_points(std::move(ts), std::move(pts));
}

DiffuseReport curve_diffuse_params(const SampledCurve& curve, const std::vector<LinearSubspace>& family,
                                   const DiffuseOptions& options) {
  if (family.empty()) fail(ErrorKind::Domain, "empty subspace family");
  const int n = curve.dimension;
  std::vector<std::vector<Vec>> onbs;
  for (const auto& s : family) onbs.push_back(orthonormalize(s, n));

  DiffuseReport rep;
  rep.a = 1e300;
  rep.b = 0;
  rep.c = 1e300;
  for (size_t i = 0; i < curve.nodes.size(); ++i) {
    const Vec& der = curve.nodes[i].derivative;
    double len = norm(der);
    if (len == 0.0) {
      std::ostringstream msg;
      msg << "nondegeneracy failure: zero derivative at t=" << curve.nodes[i].t;
      fail(ErrorKind::Domain, msg.str());
    }
    rep.b = std::max(rep.b, len);
    rep.c = std::min(rep.c, len);
    for (size_t s = 0; s < onbs.size(); ++s) {
      double ratio = perp_norm(der, onbs[s]) / len;
      if (ratio < rep.a) {
        rep.a = ratio;
        rep.worst_node = i;
        rep.worst_subspace = s;
      }
    }
  }
  rep.beta_bound = rep.a * rep.c / (4 * rep.b * std::sqrt(static_cast<double>(n)));
  rep.tangency = rep.a <= options.tangency_tolerance;
  if (!options.estimate_rho || rep.tangency) {
    rep.rho.assign(curve.nodes.size(), 0.0);
    return rep;
  }

  // Empirical rho_x: the largest dyadic scale at which every tested translate
  // L + phi(s) leaves a node of B(phi(t), rho) outside its beta_bound rho neighborhood.
  double diameter = 0;
  for (const auto& node : curve.nodes) diameter = std::max(diameter, norm(sub(node.point, curve.nodes[0].point)));
  const int levels = 12, translates = 4, max_scan = 200;
  rep.rho.assign(curve.nodes.size(), 0.0);
  for (size_t i = 0; i < curve.nodes.size(); ++i) {
    const Vec& x = curve.nodes[i].point;
    for (int k = 0; k < levels; ++k) {
      double rho = diameter * std::ldexp(1.0, -k);
      std::vector<size_t> inside;
      for (size_t j = 0; j < curve.nodes.size(); ++j)
        if (norm(sub(curve.nodes[j].point, x)) <= rho) inside.push_back(j);
      size_t stride = std::max<size_t>(1, inside.size() / max_scan);
      bool pass = true;
      for (size_t s = 0; s < onbs.size() && pass; ++s) {
        for (int w = 0; w < translates && pass; ++w) {
          const Vec& anchor = curve.nodes[inside[inside.size() * w / translates]].point;
          bool escaped = false;
          for (size_t j = 0; j < inside.size() && !escaped; j += stride)
            escaped = perp_norm(sub(curve.nodes[inside[j]].point, anchor), onbs[s]) > rep.beta_bound * rho;
          pass = escaped;
        }
      }
      if (pass) {
        rep.rho[i] = rho;
        break;
      }
    }
  }
  return rep;
}

double ahlfors_beta(double a_reg, double b_reg, double delta) {
  if (!(a_reg > 0 && a_reg <= b_reg && delta > 0)) fail(ErrorKind::Precondition, "ahlfors_beta needs 0 < a <= b and delta > 0");
  return std::pow(a_reg / b_reg, 1.0 / delta);
}

SNumber diffuse_escape(const Playground& Y, const SNumber& y, const Real& rho, const ClosedSet& L, double beta_prime,
                       std::mt19937_64& rng, int samples) {
  const double beta = Y.diffuse_beta();
  if (!(beta_prime > 0) || beta_prime > beta / (2 + beta) * (1 + 1e-12))
    fail(ErrorKind::Precondition, "beta' must lie in (0, beta/(2+beta)]");
  if (!(rho > 0.0)) fail(ErrorKind::Precondition, "rho must be positive");
  const int prec = std::max(y.precision_bits(), rho.precision());
  Real bp(beta_prime, prec);
  Real need = Real(2.0, prec) * bp * rho;
  if (L.distance(y) > need) return y;
  Real reach = (Real(1.0, prec) - bp) * rho;

  std::optional<SNumber> best;
  Real best_dist(prec);
  auto consider = [&](const SNumber& z) {
    if (!Y.contains(z) || distance(z, y) > reach) return;
    Real dz = L.distance(z);
    if (!best || dz > best_dist) {
      best = z;
      best_dist = dz;
    }
  };
  for (const auto& z : Y.candidates(y, reach)) consider(z);
  for (int i = 0; i < samples; ++i)
    if (auto z = Y.sample(y, reach, rng)) consider(*z);
  if (!best || !(best_dist > need)) fail(ErrorKind::Budget, "escape-failure: no sampled point clears the neighborhood");
  return *best;
}

SampledCurve read_curve_csv(std::istream& in) {
  std::vector<double> ts;
  std::vector<Vec> pts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      fail(ErrorKind::Parse, "non-numeric curve row: " + line);
    }
    first = false;
    if (row.size() < 2) fail(ErrorKind::Parse, "curve row needs t and at least one coordinate");
    ts.push_back(row[0]);
    pts.emplace_back(row.begin() + 1, row.end());
  }
  return SampledCurve::from_points(std::move(ts), std::move(pts));
}

std::vector<LinearSubspace> family_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::Parse, "family must be a non-empty JSON array");
  std::vector<LinearSubspace> out;
  try {
    for (const auto& item : j) {
      LinearSubspace s;
      if (item.is_array() && !item.empty() && item[0].is_number()) {
        s.basis.push_back(item.get<Vec>());
      } else {
        for (const auto& v : item) s.basis.push_back(v.get<Vec>());
      }
      if (s.basis.empty()) fail(ErrorKind::Parse, "empty subspace in family");
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad family JSON: ") + e.what());
  }
  return out;
}

}  // namespace nfba
