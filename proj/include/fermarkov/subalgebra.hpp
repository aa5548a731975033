#pragma once

#include <random>
#include <vector>

#include "fermarkov/car.hpp"
#include "fermarkov/spectral.hpp"

namespace fermarkov {

using Rng = std::mt19937_64;

inline constexpr double kRankTol = 1e-9;
inline constexpr double kTolMember = 1e-9;

/// Linear subspace of M_N, stored as Euclidean-orthonormal column-major vec()
/// images. The matching matrices sqrt(N) * unvec(column) are orthonormal for
/// the normalized trace inner product tau(a* b). Most instances are
/// *-subalgebras; the linear-span helpers below also produce plain subspaces.
class SubalgebraBasis {
 public:
  SubalgebraBasis() = default;

  static SubalgebraBasis full(int dim);
  static SubalgebraBasis scalars(int dim);
  /// `columns` must already have orthonormal columns in C^{dim*dim}.
  static SubalgebraBasis from_orthonormal(int dim, Matrix columns);
  /// Orthonormal basis of the linear span of `elements`.
  static SubalgebraBasis span_of(int dim, const std::vector<Matrix>& elements,
                                 double rank_tol = kRankTol);

  int dim_ambient() const { return dim_; }
  int size() const { return full_ ? dim_ * dim_ : static_cast<int>(columns_.cols()); }
  bool is_full() const { return full_; }

  /// tau-orthonormal basis element k.
  Matrix element(int k) const;
  std::vector<Matrix> elements() const;
  /// N^2 x size() orthonormal columns; materializes the identity when full.
  Matrix columns() const;

  CVector coordinates(const Matrix& x) const;
  Matrix from_coordinates(const CVector& c) const;
  Matrix project(const Matrix& x) const;

  bool contains_identity(double tol = kTolMember) const;

 private:
  int dim_ = 0;
  bool full_ = false;
  Matrix columns_;
};

/// Normalized Hilbert-Schmidt norm sqrt(tau(x* x)).
double tau_norm(const Matrix& x);

struct MembershipResult {
  bool member;
  double residual;
};

/// residual = tau-norm of x - P_S(x); member iff residual <= tol (1 + tau-norm x).
MembershipResult membership(const Matrix& x, const SubalgebraBasis& s,
                            double tol_member = kTolMember);

/// Largest membership residual of a basis element of `a` inside `b`.
double inclusion_defect(const SubalgebraBasis& a, const SubalgebraBasis& b);
/// max of both inclusion defects.
double span_equality_defect(const SubalgebraBasis& a, const SubalgebraBasis& b);

SubalgebraBasis linear_sum(const SubalgebraBasis& a, const SubalgebraBasis& b);
/// span{ left * s_k * right }
SubalgebraBasis multiply_span(const Matrix& left, const SubalgebraBasis& s, const Matrix& right);

/// Smallest *-algebra containing `generators` and the identity.
SubalgebraBasis span_closure(int dim, const std::vector<Matrix>& generators,
                             double rank_tol = kRankTol);

/// Relative commutant s' within `ambient`. The ambient defaults to all of M_N.
SubalgebraBasis commutant(const SubalgebraBasis& s, Rng& rng, double rank_tol = kRankTol);
SubalgebraBasis relative_commutant(const SubalgebraBasis& s, const SubalgebraBasis& ambient,
                                   Rng& rng, double rank_tol = kRankTol);
SubalgebraBasis center(const SubalgebraBasis& s, Rng& rng, double rank_tol = kRankTol);

/// Minimal central projections of a *-algebra with identity, in ascending
/// order of the random central element used to separate them.
std::vector<Matrix> minimal_central_projections(const SubalgebraBasis& s, Rng& rng,
                                                int retries = 5, double gap = 1e-8);

struct InvariantStats {
  int iterations = 0;
  double closure_residual = 0.0;
  double flow_residual = 0.0;
  double rank_tol_used = 0.0;
};

/// Largest subspace V of span(ambient) with [H, V] contained in V, i.e. the
/// elements whose orbit exp(itH) x exp(-itH) stays inside the ambient span for
/// every real t. The result is checked to be a *-algebra and flow stable.
SubalgebraBasis invariant_subalgebra(const Matrix& h, const SubalgebraBasis& ambient, Rng& rng,
                                     InvariantStats* stats = nullptr,
                                     double rank_tol = kRankTol);

/// A(I) with its matrix-unit basis.
SubalgebraBasis region_subalgebra(const CarAlgebra& alg, const Sites& sites);
/// A(I)_+ or A(I)_-, spanned by the parity-homogeneous matrix units.
SubalgebraBasis region_parity_part(const CarAlgebra& alg, const Sites& sites, bool even);
/// Even (or odd) part of a Theta-stable subspace.
SubalgebraBasis parity_part(const CarAlgebra& alg, const SubalgebraBasis& s, bool even);
bool is_parity_stable(const CarAlgebra& alg, const SubalgebraBasis& s, double tol = 1e-9);

/// Random Hermitian element with unit tau-norm (zero only for the zero space).
Matrix random_hermitian_element(const SubalgebraBasis& s, Rng& rng);
/// Random element with complex Gaussian coordinates.
Matrix random_element(const SubalgebraBasis& s, Rng& rng);

/// Largest membership residual over adjoints of basis elements and products of
/// `pairs` random element pairs.
double closure_defect(const SubalgebraBasis& s, Rng& rng, int pairs = 3);

/// Orthonormal basis of ker(m): right singular vectors with singular value
/// <= rank_tol * max(sigma_max, scale_floor).
Matrix null_space(const Matrix& m, double rank_tol, double scale_floor);

}  // namespace fermarkov
