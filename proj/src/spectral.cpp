#include "fermarkov/spectral.hpp"

#include <cmath>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

SpectralDecomposition eig_hermitian(const Matrix& m, double tol_herm) {
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol_herm)) {
    std::ostringstream os;
    os << "max |M - M*| = " << defect << " exceeds " << tol_herm;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  SpectralDecomposition sd{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < sd.eigenvectors.cols(); ++k) {
    auto col = sd.eigenvectors.col(k);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-12) {
        col *= std::conj(col(i)) / std::abs(col(i));
        break;
      }
    }
  }
  return sd;
}

namespace {

Complex apply_scalar(double lambda, MatFunc f, double eps_faithful) {
  switch (f.kind) {
    case MatFunc::Kind::Log:
      if (lambda <= eps_faithful) {
        throw Error(ErrorKind::SingularMatrix, "log of eigenvalue " + std::to_string(lambda));
      }
      return std::log(lambda);
    case MatFunc::Kind::Exp:
      return std::exp(lambda);
    case MatFunc::Kind::Pow:
      if (f.param < 0.0 && lambda <= eps_faithful) {
        throw Error(ErrorKind::SingularMatrix,
                    "negative power of eigenvalue " + std::to_string(lambda));
      }
      if (f.param == 0.0) return 1.0;
      if (lambda < 0.0) {
        if (lambda < -eps_faithful) {
          throw Error(ErrorKind::NotPositive, "fractional power of eigenvalue " +
                                                  std::to_string(lambda));
        }
        return 0.0;
      }
      return std::pow(lambda, f.param);
    case MatFunc::Kind::ImaginaryPow:
      if (lambda <= eps_faithful) {
        throw Error(ErrorKind::SingularMatrix,
                    "imaginary power of eigenvalue " + std::to_string(lambda));
      }
      return std::exp(Complex(0.0, f.param * std::log(lambda)));
  }
  return 0.0;
}

}  // namespace

Matrix mat_func(const SpectralDecomposition& sd, MatFunc f, double eps_faithful) {
  CVector values(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values(i) = apply_scalar(sd.eigenvalues(i), f, eps_faithful);
  }
  return sd.eigenvectors * values.asDiagonal() * sd.eigenvectors.adjoint();
}

Matrix mat_func(const Matrix& m, MatFunc f, double eps_faithful) {
  return mat_func(eig_hermitian(m), f, eps_faithful);
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace fermarkov
