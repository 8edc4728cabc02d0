#ifndef NFBA_DIFFUSE_HPP
#define NFBA_DIFFUSE_HPP

#include <functional>
#include <istream>
#include <random>
#include <vector>

#include <json.hpp>

#include "nfba/playground.hpp"

namespace nfba {

struct CurveNode {
  double t = 0;
  std::vector<double> point;
  std::vector<double> derivative;
};

struct SampledCurve {
  int dimension = 0;
  std::vector<CurveNode> nodes;

  /* Derivatives by central differences, one-sided at the endpoints. */
  static SampledCurve from_points(std::vector<double> ts, std::vector<std::vector<double>> points);
  static SampledCurve sample(const std::function<std::vector<double>(double)>& phi, int node_count);
};

/* A linear subspace of R^n given by spanning vectors. */
struct LinearSubspace {
  std::vector<std::vector<double>> basis;
};

struct DiffuseOptions {
  double tangency_tolerance = 1e-6;
  bool estimate_rho = true;
};

struct DiffuseReport {
  double a = 0;  // min ||proj_{L perp} phi'|| / ||phi'||
  double b = 0;  // max ||phi'||
  double c = 0;  // min ||phi'||
  double beta_bound = 0;  // a c / (4 b sqrt(n))
  bool tangency = false;
  std::size_t worst_node = 0;
  std::size_t worst_subspace = 0;
  /* Largest tested rho passing the escape test at each node; 0 when none did. */
  std::vector<double> rho;
};

DiffuseReport curve_diffuse_params(const SampledCurve& curve, const std::vector<LinearSubspace>& family,
                                   const DiffuseOptions& options = {});

/* (a / b)^(1 / delta). */
double ahlfors_beta(double a_reg, double b_reg, double delta);

/* z in Y with (z, beta' rho) preceding (y, rho) and dist(z, L) > 2 beta' rho.
 * Throws Error(Budget) when no sampled candidate qualifies. */
SNumber diffuse_escape(const Playground& Y, const SNumber& y, const Real& rho, const ClosedSet& L, double beta_prime,
                       std::mt19937_64& rng, int samples = 256);

/* Rows "t,x1,...,xn"; a non-numeric first row is a header. */
SampledCurve read_curve_csv(std::istream& in);
/* Either a list of vectors (each a line) or a list of lists of vectors. */
std::vector<LinearSubspace> family_from_json(const nlohmann::json& j);

}  // namespace nfba

#endif
