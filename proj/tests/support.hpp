#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "fermarkov/car.hpp"
#include "fermarkov/quantum_info.hpp"

namespace fermarkov::testing {

inline Matrix random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  const Matrix m = random_matrix(dim, rng);
  return (m + m.adjoint()) / 2.0;
}

/// Full-rank density with smallest eigenvalue bounded away from zero.
inline Matrix random_density(int dim, std::mt19937_64& rng, double floor = 0.05) {
  const Matrix g = random_matrix(dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (1.0 - floor) * rho + floor * Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return rho;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Jordan-Wigner annihilators built directly from Kronecker products:
/// Z on sites k < j, sigma^- = [[0,1],[0,0]] on site j, identity after.
inline std::vector<Matrix> kron_annihilators(int n) {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  const Matrix id = Matrix::Identity(2, 2);
  std::vector<Matrix> out;
  for (int j = 0; j < n; ++j) {
    Matrix m = Matrix::Identity(1, 1);
    for (int k = 0; k < n; ++k) m = kron(m, k < j ? z : (k == j ? lower : id));
    out.push_back(m);
  }
  return out;
}

inline std::shared_ptr<const CarAlgebra> algebra(int n) {
  return std::make_shared<const CarAlgebra>(n);
}

inline StateDensity state_of(const Matrix& rho) {
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(rho.rows()))));
  return StateDensity(algebra(n), rho);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace fermarkov::testing
