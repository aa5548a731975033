#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fermarkov/spectral.hpp"

namespace fermarkov {

using Sites = std::vector<int>;

/// A matrix with at most one nonzero entry per column (and per row).
/// Column c holds value[c] at row[c]; row[c] < 0 marks an empty column.
/// Every Jordan-Wigner generator and matrix unit has this shape.
struct MonomialMatrix {
  std::vector<int> row;
  std::vector<Complex> value;

  static MonomialMatrix identity(int dim);
  int dim() const { return static_cast<int>(row.size()); }
  MonomialMatrix operator*(const MonomialMatrix& rhs) const;
  MonomialMatrix adjoint() const;
  Matrix dense() const;
  /// Tr(M^* x).
  Complex inner(const Matrix& x) const;
  /// out += coeff * M
  void add_to(Matrix& out, Complex coeff) const;
};

/// How site operators are dressed. JordanWigner is the only valid CAR
/// representation; the undressed variant exists as a negative control.
enum class StringConvention { JordanWigner, Undressed };

/// The CAR algebra on n sites in the Jordan-Wigner picture:
///   a_j = (prod_{k<j} Z_k) sigma^-_j,  Z = I - 2 a*a = diag(1, -1),
/// with site 0 the most significant tensor factor and a*a = diag(0, 1) on
/// the site. Dimension 2^n.
class CarAlgebra {
 public:
  static constexpr int kMaxSites = 10;

  explicit CarAlgebra(int n_sites, StringConvention convention = StringConvention::JordanWigner);

  int n_sites() const { return n_sites_; }
  int dim() const { return dim_; }
  Sites all_sites() const;

  Matrix annihilator(int i) const { return annihilators_.at(i).dense(); }
  Matrix creator(int i) const { return annihilators_.at(i).adjoint().dense(); }
  Matrix number(int i) const;
  const MonomialMatrix& annihilator_monomial(int i) const { return annihilators_.at(i); }

  /// Normalized trace, tau(I) = 1.
  Complex tau(const Matrix& x) const { return x.trace() / static_cast<double>(dim_); }

  /// v_I = prod_{i in I} (a_i* a_i - a_i a_i*).
  Matrix parity_unitary(const Sites& sites) const;
  /// Theta^I(x) = v_I x v_I.
  Matrix parity_automorphism(const Matrix& x, const Sites& sites) const;
  Matrix theta(const Matrix& x) const;
  /// (x_plus, x_minus) with respect to the global parity.
  std::pair<Matrix, Matrix> even_odd_split(const Matrix& x) const;

  /// Trace-preserving conditional expectation onto A(I): the Hilbert-Schmidt
  /// projection onto the span of the matrix units of I.
  Matrix cond_expect(const Matrix& x, const Sites& sites) const;

  /// Image of E_I(x) under the matrix-unit isomorphism A(I) -> M_{2^|I|}.
  Matrix local_matrix(const Matrix& x, const Sites& sites) const;
  /// Inverse of local_matrix on A(I).
  Matrix embed_local(const Matrix& small, const Sites& sites) const;

  void check_sites(const Sites& sites) const;

 private:
  int n_sites_;
  int dim_;
  std::vector<MonomialMatrix> annihilators_;
};

/// Mutually commuting 2x2 matrix units of a region {i_1 < ... < i_k}:
///   e11 = a a*, e22 = a* a, e12 = V_{j-1} a, e21 = V_{j-1} a*,
///   V_j = prod_{l<=j} (I - 2 a*_{i_l} a_{i_l}).
/// Multi-indices are flattened as alpha = row * 2^k + col where row and col
/// are k-bit strings (bit k-1-j <-> site i_j; bit value 0 <-> label 1).
struct MatrixUnitFamily {
  Sites region;
  int k = 0;
  std::vector<MonomialMatrix> units;
  std::vector<bool> even;

  int size() const { return static_cast<int>(units.size()); }
  int side() const { return 1 << k; }
  int index(int row, int col) const { return row * side() + col; }
  Matrix unit(int alpha) const { return units.at(alpha).dense(); }
  /// p_alpha = e_alpha e_alpha^*
  Matrix p(int alpha) const { return (units.at(alpha) * units.at(alpha).adjoint()).dense(); }
  /// q_alpha = e_alpha^* e_alpha
  Matrix q(int alpha) const { return (units.at(alpha).adjoint() * units.at(alpha)).dense(); }
};

MatrixUnitFamily matrix_units(const CarAlgebra& alg, const Sites& region);

/// Disjoint site sets A, B, C covering {0, ..., n-1}.
struct RegionPartition {
  Sites A, B, C;

  static RegionPartition make(int n_sites, Sites a, Sites b, Sites c);
  /// Parses "A=0,1:B=2:C=3".
  static RegionPartition parse(int n_sites, const std::string& text);
  /// Contiguous split with the given block sizes.
  static RegionPartition contiguous(int size_a, int size_b, int size_c);

  int n_sites() const { return static_cast<int>(A.size() + B.size() + C.size()); }
  Sites AB() const;
  Sites BC() const;
  Sites all() const;
  std::string to_string() const;
};

Sites site_union(const Sites& a, const Sites& b);

}  // namespace fermarkov
