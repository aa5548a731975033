#include "fermarkov/quantum_info.hpp"

#include <cmath>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

StateDensity::StateDensity(std::shared_ptr<const CarAlgebra> alg, Matrix rho)
    : alg_(std::move(alg)), rho_(std::move(rho)) {
  if (!alg_) throw Error(ErrorKind::InvariantViolation, "state without algebra");
  if (rho_.rows() != alg_->dim() || rho_.cols() != alg_->dim()) {
    throw Error(ErrorKind::InvariantViolation, "density dimension does not match 2^n");
  }
  const double herm = hermiticity_defect(rho_);
  if (herm > kTolHerm) {
    std::ostringstream os;
    os << "density not self-adjoint (defect " << herm << ")";
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
  rho_ = hermitian_part(rho_);
  const double trace = rho_.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "trace " << trace << " differs from 1";
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
  min_eig_ = min_eigenvalue(rho_);
  if (min_eig_ < -1e-12) {
    std::ostringstream os;
    os << "density has negative eigenvalue " << min_eig_;
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
}

double StateDensity::parity_defect() const { return (rho_ - alg_->theta(rho_)).norm(); }

Matrix restrict_density(const StateDensity& state, const Sites& sites) {
  const auto& alg = state.alg();
  const double scale = static_cast<double>(alg.dim() >> sites.size());
  return alg.local_matrix(state.rho(), sites) * scale;
}

Matrix embedded_restriction(const StateDensity& state, const Sites& sites) {
  return state.alg().cond_expect(state.rho(), sites);
}

double vn_entropy(const Matrix& density) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(density), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 0.0) s -= l * std::log(l);
  }
  return s;
}

double rel_entropy(const Matrix& rho, const Matrix& sigma, double eps_faithful) {
  const SpectralDecomposition ss = eig_hermitian(sigma);
  if (ss.eigenvalues(0) <= eps_faithful) {
    std::ostringstream os;
    os << "reference density has eigenvalue " << ss.eigenvalues(0);
    throw Error(ErrorKind::SingularReference, os.str());
  }
  const Matrix log_sigma = mat_func(ss, MatFunc::log(), eps_faithful);
  return -vn_entropy(rho) - (rho * log_sigma).trace().real();
}

SsaReport ssa_gap(const StateDensity& state, const RegionPartition& regions,
                  double tol_equality) {
  if (!state.faithful()) {
    std::ostringstream os;
    os << "state has minimal eigenvalue " << state.min_eig();
    throw Error(ErrorKind::NotFaithful, os.str());
  }
  if (regions.n_sites() != state.n_sites()) {
    throw Error(ErrorKind::InvalidRegions, "regions do not match the number of sites");
  }
  SsaReport r;
  r.tol_equality = tol_equality;
  r.s_total = vn_entropy(state.rho());
  r.s_ab = vn_entropy(restrict_density(state, regions.AB()));
  r.s_bc = vn_entropy(restrict_density(state, regions.BC()));
  r.s_b = vn_entropy(restrict_density(state, regions.B));
  r.gap = r.s_ab + r.s_bc - r.s_total - r.s_b;

  const Matrix rho_bc = embedded_restriction(state, regions.BC());
  const Matrix rho_ab = embedded_restriction(state, regions.AB());
  const Matrix rho_b = embedded_restriction(state, regions.B);
  r.gap_relative = rel_entropy(state.rho(), rho_bc) - rel_entropy(rho_ab, rho_b);
  r.saturated = r.gap <= tol_equality;
  return r;
}

Matrix cocycle(const Matrix& rho, const Matrix& sigma, double t) {
  try {
    return mat_ipow(rho, t) * mat_ipow(sigma, -t);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix) throw Error(ErrorKind::NotFaithful, e.what());
    throw;
  }
}

}  // namespace fermarkov
