#include "biharm/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "biharm/error.hpp"

namespace biharm {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::kArgument, "gauss_legendre: need at least one point");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::vector<QuadratureNode> composite_gauss(double a, double b, int cells, int points) {
  if (cells < 1 || !(b > a)) throw Error(ErrorKind::kArgument, "composite_gauss: bad interval");
  const GaussRule rule = gauss_legendre(points);
  std::vector<QuadratureNode> out;
  out.reserve(static_cast<std::size_t>(cells) * points);
  const double h = (b - a) / cells;
  for (int c = 0; c < cells; ++c) {
    const double mid = a + (c + 0.5) * h;
    for (int k = 0; k < points; ++k) {
      out.push_back({mid + 0.5 * h * rule.nodes[k], 0.5 * h * rule.weights[k]});
    }
  }
  return out;
}

}  // namespace biharm
