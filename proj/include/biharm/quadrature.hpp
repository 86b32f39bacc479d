#pragma once

#include <vector>

namespace biharm {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule; exact for polynomials of degree 2n - 1.
GaussRule gauss_legendre(int n);

struct QuadratureNode {
  double x;
  double w;
};

// Composite rule on [a, b]: `cells` uniform cells with `points` Gauss points each.
std::vector<QuadratureNode> composite_gauss(double a, double b, int cells, int points);

}  // namespace biharm
