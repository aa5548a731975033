#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fermarkov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kTolHerm = 1e-10;
inline constexpr double kEpsFaithful = 1e-12;

/// Eigenpairs of a Hermitian matrix. Eigenvalues ascend; each eigenvector is
/// phase-fixed so its first non-negligible component is real and positive.
struct SpectralDecomposition {
  RVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// max_ij |M_ij - conj(M_ji)|
double hermiticity_defect(const Matrix& m);

SpectralDecomposition eig_hermitian(const Matrix& m, double tol_herm = kTolHerm);

/// Scalar function applied on the spectrum of a Hermitian matrix.
struct MatFunc {
  enum class Kind { Log, Exp, Pow, ImaginaryPow };
  Kind kind;
  double param = 0.0;

  static MatFunc log() { return {Kind::Log, 0.0}; }
  static MatFunc exp() { return {Kind::Exp, 0.0}; }
  static MatFunc pow(double s) { return {Kind::Pow, s}; }
  /// M^{it}, a unitary for faithful M.
  static MatFunc imaginary_pow(double t) { return {Kind::ImaginaryPow, t}; }
};

Matrix mat_func(const Matrix& m, MatFunc f, double eps_faithful = kEpsFaithful);
Matrix mat_func(const SpectralDecomposition& sd, MatFunc f, double eps_faithful = kEpsFaithful);

inline Matrix mat_log(const Matrix& m) { return mat_func(m, MatFunc::log()); }
inline Matrix mat_exp(const Matrix& m) { return mat_func(m, MatFunc::exp()); }
inline Matrix mat_pow(const Matrix& m, double s) { return mat_func(m, MatFunc::pow(s)); }
inline Matrix mat_ipow(const Matrix& m, double t) { return mat_func(m, MatFunc::imaginary_pow(t)); }

// Small helpers shared across modules.
inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
inline Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }
double min_eigenvalue(const Matrix& hermitian);

}  // namespace fermarkov
