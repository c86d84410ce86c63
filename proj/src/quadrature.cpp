#include "qiup/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "qiup/errors.hpp"

namespace qiup::quadrature {

Rule gauss_hermite(int n) {
  if (n < 1 || n > 200) throw ValidationError("Gauss-Hermite order must be in [1, 200]");
  // Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v * v;
  }
  return rule;
}

Rule standard_normal(int n) {
  Rule r = gauss_hermite(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    r.nodes[k] *= std::sqrt(2.0);
    r.weights[k] *= inv_sqrt_pi;
  }
  return r;
}

}  // namespace qiup::quadrature
