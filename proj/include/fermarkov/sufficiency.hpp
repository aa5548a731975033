#pragma once

#include <vector>

#include "fermarkov/quantum_info.hpp"
#include "fermarkov/subalgebra.hpp"

namespace fermarkov {

/// Linear map on M_N stored as an N^2 x N^2 matrix acting on column-major vec().
struct QuantumChannel {
  int dim_in = 0;
  int dim_out = 0;
  Matrix superop;
  int kraus_rank = 0;
  bool unital = false;

  Matrix apply(const Matrix& x) const;
  /// J = sum_ij e_ij (x) Phi(e_ij), indexed (i * N + a, j * N + b).
  Matrix choi() const;
  double choi_min_eigenvalue() const;
};

/// Generalized conditional expectation onto S with respect to rho_psi:
///   E(a) = rho0^{-1/2} E_S(rho^{1/2} a rho^{1/2}) rho0^{-1/2},  rho0 = E_S(rho).
QuantumChannel petz_map(const Matrix& rho_psi, const SubalgebraBasis& s);

struct SufficiencyOptions {
  double tol_equality = kTolEquality;
  /// relative residual for cocycle-generator membership
  double tol_cocycle = 1e-7;
  double tol_member = kTolMember;
  double tol_petz = 1e-8;
  std::vector<double> sample_times{0.3, 1.1};
};

struct SufficiencyReport {
  // (ii) relative entropy is preserved
  double relent_full = 0.0;
  double relent_restricted = 0.0;
  double relent_drop = 0.0;
  bool relent_equal = false;
  // (iii) rho_phi^{it} rho_psi^{-it} stays in S for all t
  int krylov_dimension = 0;
  double krylov_residual = 0.0;
  double sampled_cocycle_residual = 0.0;
  bool cocycle_member = false;
  // (iv) the two generalized conditional expectations coincide
  double petz_difference = 0.0;
  bool petz_equal = false;

  bool overall = false;
  bool verdicts_agree() const {
    return relent_equal == cocycle_member && cocycle_member == petz_equal;
  }
};

SufficiencyReport is_sufficient(const Matrix& rho_phi, const Matrix& rho_psi,
                                const SubalgebraBasis& s, const SufficiencyOptions& opts = {});

struct FactorThrough {
  Matrix d;
  double hermiticity = 0.0;
  double min_eig = 0.0;
  double commutant_residual = 0.0;
  double phi_reconstruction = 0.0;
  double psi_reconstruction = 0.0;
};

/// D = rho_phi0^{-1} rho_phi, certified positive, in the relative commutant of
/// S, and reproducing rho_psi = rho_psi0 D. Requires S to be stable under the
/// modular flow of psi and sufficient for the pair.
FactorThrough factor_through(const Matrix& rho_phi, const Matrix& rho_psi,
                             const SubalgebraBasis& s, Rng& rng,
                             const SufficiencyOptions& opts = {});

}  // namespace fermarkov
