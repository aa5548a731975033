#pragma once

#include <memory>

#include "fermarkov/car.hpp"
#include "fermarkov/spectral.hpp"

namespace fermarkov {

inline constexpr double kTolEquality = 1e-8;

/// Density matrix of a state on the full CAR algebra, phi(x) = Tr(rho x).
class StateDensity {
 public:
  /// Validates Hermiticity, unit trace (1e-10) and positivity (eigenvalues >= -1e-12).
  StateDensity(std::shared_ptr<const CarAlgebra> alg, Matrix rho);

  const CarAlgebra& alg() const { return *alg_; }
  const std::shared_ptr<const CarAlgebra>& alg_ptr() const { return alg_; }
  const Matrix& rho() const { return rho_; }
  int n_sites() const { return alg_->n_sites(); }
  double min_eig() const { return min_eig_; }
  bool faithful(double eps = kEpsFaithful) const { return min_eig_ > eps; }
  /// Frobenius norm of rho - Theta(rho).
  double parity_defect() const;
  bool is_even(double tol = 1e-10) const { return parity_defect() <= tol; }

 private:
  std::shared_ptr<const CarAlgebra> alg_;
  Matrix rho_;
  double min_eig_;
};

/// Density of phi restricted to A(I), as a unit-trace matrix of size 2^|I|.
Matrix restrict_density(const StateDensity& state, const Sites& sites);
/// E_I(rho) in the full algebra: the density of phi o E_I with respect to Tr.
Matrix embedded_restriction(const StateDensity& state, const Sites& sites);

/// -sum lambda log lambda in nats, with 0 log 0 = 0.
double vn_entropy(const Matrix& density);
/// Tr rho (log rho - log sigma). Throws SingularReference unless sigma is faithful.
double rel_entropy(const Matrix& rho, const Matrix& sigma, double eps_faithful = kEpsFaithful);

struct SsaReport {
  double s_total = 0.0;
  double s_ab = 0.0;
  double s_bc = 0.0;
  double s_b = 0.0;
  /// S(AB) + S(BC) - S(ABC) - S(B)
  double gap = 0.0;
  /// S(rho, rho_BC) - S(rho_AB, rho_B) on embedded densities
  double gap_relative = 0.0;
  double tol_equality = kTolEquality;
  bool saturated = false;
};

SsaReport ssa_gap(const StateDensity& state, const RegionPartition& regions,
                  double tol_equality = kTolEquality);

/// u_t = rho^{it} sigma^{-it}
Matrix cocycle(const Matrix& rho, const Matrix& sigma, double t);

}  // namespace fermarkov
