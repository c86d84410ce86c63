#pragma once

#include <vector>

namespace qiup::quadrature {

/// Nodes and weights of an n-point rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for integral f(x) e^{-x^2} dx (Golub-Welsch).
Rule gauss_hermite(int n);

/// Rule for E[f(X)] with X ~ N(0, 1): nodes sqrt2 x_k, weights w_k / sqrt(pi).
Rule standard_normal(int n);

}  // namespace qiup::quadrature
