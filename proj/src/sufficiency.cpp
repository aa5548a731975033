#include "fermarkov/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

namespace {

Eigen::Map<const CVector> vec(const Matrix& x) { return {x.data(), x.size()}; }

}  // namespace

Matrix QuantumChannel::apply(const Matrix& x) const {
  const CVector out = superop * vec(x);
  return Eigen::Map<const Matrix>(out.data(), dim_out, dim_out);
}

Matrix QuantumChannel::choi() const {
  const int n = dim_in;
  Matrix j(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int jj = 0; jj < n; ++jj) {
      const auto col = superop.col(i + static_cast<Eigen::Index>(jj) * n);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          j(static_cast<Eigen::Index>(i) * n + a, static_cast<Eigen::Index>(jj) * n + b) =
              col(a + static_cast<Eigen::Index>(b) * n);
        }
      }
    }
  }
  return j;
}

double QuantumChannel::choi_min_eigenvalue() const { return min_eigenvalue(choi()); }

QuantumChannel petz_map(const Matrix& rho_psi, const SubalgebraBasis& s) {
  const int n = s.dim_ambient();
  if (rho_psi.rows() != n) throw Error(ErrorKind::InvariantViolation, "dimension mismatch");
  const Matrix rho0 = hermitian_part(s.project(rho_psi));
  const SpectralDecomposition sd0 = eig_hermitian(rho0, 1e-9);
  if (sd0.eigenvalues(0) <= kEpsFaithful) {
    std::ostringstream os;
    os << "restricted density has eigenvalue " << sd0.eigenvalues(0);
    throw Error(ErrorKind::SingularRestriction, os.str());
  }
  const Matrix r0 = mat_func(sd0, MatFunc::pow(-0.5));
  const Matrix r = mat_pow(rho_psi, 0.5);

  QuantumChannel ch;
  ch.dim_in = ch.dim_out = n;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  if (s.is_full()) {
    // E_S is the identity, so E(a) = (r0 r) a (r r0).
    const Matrix left = r0 * r;
    const Matrix right = r * r0;
    ch.superop = Matrix(nn, nn);
    for (Eigen::Index c = 0; c < nn; ++c) {
      Matrix e = Matrix::Zero(n, n);
      e(c % n, c / n) = 1.0;
      ch.superop.col(c) = vec(Matrix(left * e * right));
    }
  } else {
    // superop = [vec(r0 b_k r0)]_k [vec(r b_k r)]_k^*  over an orthonormal basis b_k
    const Matrix q = s.columns();
    Matrix outer(nn, q.cols());
    Matrix inner(nn, q.cols());
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      const Matrix b = Eigen::Map<const Matrix>(q.col(k).data(), n, n);
      outer.col(k) = vec(Matrix(r0 * b * r0));
      inner.col(k) = vec(Matrix(r * b * r));
    }
    ch.superop = outer * inner.adjoint();
  }
  const Matrix id = Matrix::Identity(n, n);
  ch.unital = (ch.apply(id) - id).norm() <= 1e-9 * n;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(ch.choi()), Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  ch.kraus_rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 1e-10 * top) ++ch.kraus_rank;
  }
  return ch;
}

namespace {

void require_faithful(const Matrix& rho, const char* name) {
  const double m = min_eigenvalue(rho);
  if (m <= kEpsFaithful) {
    std::ostringstream os;
    os << name << " has minimal eigenvalue " << m;
    throw Error(ErrorKind::NotFaithful, os.str());
  }
}

double relative_residual(const Matrix& w, const SubalgebraBasis& s) {
  const double norm = w.norm();
  if (norm == 0.0) return 0.0;
  return (w - s.project(w)).norm() / norm;
}

}  // namespace

SufficiencyReport is_sufficient(const Matrix& rho_phi, const Matrix& rho_psi,
                                const SubalgebraBasis& s, const SufficiencyOptions& opts) {
  require_faithful(rho_phi, "phi");
  require_faithful(rho_psi, "psi");
  SufficiencyReport rep;
  const int n = s.dim_ambient();

  // (ii)
  const Matrix phi0 = hermitian_part(s.project(rho_phi));
  const Matrix psi0 = hermitian_part(s.project(rho_psi));
  rep.relent_full = rel_entropy(rho_phi, rho_psi);
  rep.relent_restricted = rel_entropy(phi0, psi0);
  rep.relent_drop = rep.relent_full - rep.relent_restricted;
  rep.relent_equal = rep.relent_drop <= opts.tol_equality;

  // (iii) u_t = exp(itT)(I) with T(X) = K X - X L, so u_t lies in S for every
  // t exactly when the Krylov space of T at I does. Each new direction is
  // projected back onto S after its residual is recorded; otherwise rounding
  // outside S is amplified by T at every step.
  const Matrix k_log = mat_log(rho_phi);
  const Matrix l_log = mat_log(rho_psi);
  const double scale = k_log.norm() + l_log.norm();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  std::vector<Matrix> krylov{Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n))};
  const int max_dim = std::min<int>(static_cast<int>(nn), s.size() + 1);
  while (static_cast<int>(krylov.size()) <= max_dim) {
    const Matrix& v = krylov.back();
    Matrix w = k_log * v - v * l_log;
    const double wn = w.norm();
    if (wn <= 1e-13 * scale) break;
    rep.krylov_residual = std::max(rep.krylov_residual, relative_residual(w, s));
    if (rep.krylov_residual > opts.tol_cocycle) break;
    w = s.project(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : krylov) w -= (b.adjoint() * w).trace() * b;
    }
    const double r = w.norm();
    if (r <= 1e-8 * wn) break;
    krylov.push_back(w / r);
  }
  rep.krylov_dimension = static_cast<int>(krylov.size());
  bool sampled_ok = true;
  for (double t : opts.sample_times) {
    const Matrix u = mat_ipow(rho_phi, t) * mat_ipow(rho_psi, -t);
    const double res = relative_residual(u, s);
    rep.sampled_cocycle_residual = std::max(rep.sampled_cocycle_residual, res);
    sampled_ok = sampled_ok && res <= opts.tol_cocycle;
  }
  rep.cocycle_member = rep.krylov_residual <= opts.tol_cocycle && sampled_ok;

  // (iv)
  const QuantumChannel e_phi = petz_map(rho_phi, s);
  const QuantumChannel e_psi = petz_map(rho_psi, s);
  rep.petz_difference = (e_phi.superop - e_psi.superop).norm() / n;
  rep.petz_equal = rep.petz_difference <= opts.tol_petz;

  rep.overall = rep.relent_equal && rep.cocycle_member && rep.petz_equal;
  return rep;
}

FactorThrough factor_through(const Matrix& rho_phi, const Matrix& rho_psi,
                             const SubalgebraBasis& s, Rng& rng,
                             const SufficiencyOptions& opts) {
  const SubalgebraBasis stable = invariant_subalgebra(mat_log(rho_psi), s, rng);
  if (stable.size() < s.size()) {
    throw Error(ErrorKind::FlowUnstable, "subalgebra is not invariant under the modular flow of psi");
  }
  const SufficiencyReport rep = is_sufficient(rho_phi, rho_psi, s, opts);
  if (!rep.overall) {
    std::ostringstream os;
    os << "relative entropy drop " << rep.relent_drop << ", cocycle residual "
       << rep.krylov_residual << ", Petz difference " << rep.petz_difference;
    throw Error(ErrorKind::NotSufficient, os.str());
  }
  const Matrix phi0 = hermitian_part(s.project(rho_phi));
  const Matrix psi0 = hermitian_part(s.project(rho_psi));
  FactorThrough f;
  f.d = mat_pow(phi0, -1.0) * rho_phi;
  f.hermiticity = (f.d - f.d.adjoint()).norm();
  f.min_eig = min_eigenvalue(f.d);
  const SubalgebraBasis comm = commutant(s, rng);
  f.commutant_residual = membership(f.d, comm).residual;
  f.phi_reconstruction = (rho_phi - phi0 * f.d).norm();
  f.psi_reconstruction = (rho_psi - psi0 * f.d).norm();
  const double scale = 1.0 + tau_norm(f.d);
  if (f.hermiticity > 1e-8 * scale || f.min_eig < -1e-9 ||
      f.commutant_residual > kTolMember * scale || f.psi_reconstruction > 1e-8) {
    std::ostringstream os;
    os << "factor D failed certification: hermiticity " << f.hermiticity << ", min eig "
       << f.min_eig << ", commutant residual " << f.commutant_residual << ", psi reconstruction "
       << f.psi_reconstruction;
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
  return f;
}

}  // namespace fermarkov
