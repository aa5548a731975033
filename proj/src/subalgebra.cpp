#include "fermarkov/subalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

namespace {

Eigen::Map<const CVector> vec(const Matrix& x) { return {x.data(), x.size()}; }

Matrix unvec(const CVector& v, int dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

// Appends v (after two Gram-Schmidt passes) when its residual exceeds
// rank_tol times max(|v|, scale). The scale keeps products that cancel to
// rounding noise from entering as spurious directions.
bool orthonormal_extend(Matrix& q, Eigen::Index& used, CVector v, double rank_tol,
                        double scale = 0.0) {
  const double norm0 = v.norm();
  if (norm0 == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (used > 0) {
      auto basis = q.leftCols(used);
      v -= basis * (basis.adjoint() * v);
    }
  }
  const double r = v.norm();
  if (r <= rank_tol * std::max(norm0, scale)) return false;
  if (used == q.cols()) q.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(8, 2 * used));
  q.col(used++) = v / r;
  return true;
}

Complex gaussian(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

}  // namespace

double tau_norm(const Matrix& x) {
  return x.norm() / std::sqrt(static_cast<double>(x.rows()));
}

SubalgebraBasis SubalgebraBasis::full(int dim) {
  SubalgebraBasis s;
  s.dim_ = dim;
  s.full_ = true;
  return s;
}

SubalgebraBasis SubalgebraBasis::scalars(int dim) {
  SubalgebraBasis s;
  s.dim_ = dim;
  Matrix id = Matrix::Identity(dim, dim);
  s.columns_ = vec(id) / std::sqrt(static_cast<double>(dim));
  return s;
}

SubalgebraBasis SubalgebraBasis::from_orthonormal(int dim, Matrix columns) {
  if (columns.rows() != static_cast<Eigen::Index>(dim) * dim) {
    throw Error(ErrorKind::InvariantViolation, "basis columns have wrong length");
  }
  SubalgebraBasis s;
  s.dim_ = dim;
  s.columns_ = std::move(columns);
  return s;
}

SubalgebraBasis SubalgebraBasis::span_of(int dim, const std::vector<Matrix>& elements,
                                         double rank_tol) {
  Matrix q(static_cast<Eigen::Index>(dim) * dim, 0);
  Eigen::Index used = 0;
  double scale = 0.0;
  for (const auto& e : elements) scale = std::max(scale, e.norm());
  for (const auto& e : elements) orthonormal_extend(q, used, vec(e), rank_tol, scale);
  q.conservativeResize(Eigen::NoChange, used);
  return from_orthonormal(dim, std::move(q));
}

Matrix SubalgebraBasis::element(int k) const {
  const double scale = std::sqrt(static_cast<double>(dim_));
  if (full_) {
    Matrix e = Matrix::Zero(dim_, dim_);
    e(k % dim_, k / dim_) = scale;
    return e;
  }
  return unvec(columns_.col(k), dim_) * scale;
}

std::vector<Matrix> SubalgebraBasis::elements() const {
  std::vector<Matrix> out;
  out.reserve(size());
  for (int k = 0; k < size(); ++k) out.push_back(element(k));
  return out;
}

Matrix SubalgebraBasis::columns() const {
  if (full_) return Matrix::Identity(static_cast<Eigen::Index>(dim_) * dim_, dim_ * dim_);
  return columns_;
}

CVector SubalgebraBasis::coordinates(const Matrix& x) const {
  const double scale = std::sqrt(static_cast<double>(dim_));
  if (full_) return vec(x) / scale;
  return columns_.adjoint() * vec(x) / scale;
}

Matrix SubalgebraBasis::from_coordinates(const CVector& c) const {
  const double scale = std::sqrt(static_cast<double>(dim_));
  if (full_) return unvec(c * scale, dim_);
  return unvec(columns_ * c * scale, dim_);
}

Matrix SubalgebraBasis::project(const Matrix& x) const {
  if (full_) return x;
  return unvec(columns_ * (columns_.adjoint() * vec(x)), dim_);
}

bool SubalgebraBasis::contains_identity(double tol) const {
  return membership(Matrix::Identity(dim_, dim_), *this, tol).member;
}

MembershipResult membership(const Matrix& x, const SubalgebraBasis& s, double tol_member) {
  const double residual = tau_norm(x - s.project(x));
  return {residual <= tol_member * (1.0 + tau_norm(x)), residual};
}

double inclusion_defect(const SubalgebraBasis& a, const SubalgebraBasis& b) {
  if (b.is_full()) return 0.0;
  if (a.is_full()) return b.size() == a.size() ? 0.0 : 1.0;
  // Basis columns are orthonormal, so the residual of each is sqrt(1 - |P q|^2).
  const Matrix qa = a.columns();
  const Matrix qb = b.columns();
  const Matrix resid = qa - qb * (qb.adjoint() * qa);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < resid.cols(); ++k) worst = std::max(worst, resid.col(k).norm());
  return worst;
}

double span_equality_defect(const SubalgebraBasis& a, const SubalgebraBasis& b) {
  return std::max(inclusion_defect(a, b), inclusion_defect(b, a));
}

SubalgebraBasis linear_sum(const SubalgebraBasis& a, const SubalgebraBasis& b) {
  if (a.is_full() || b.is_full()) return SubalgebraBasis::full(a.dim_ambient());
  Matrix q = a.columns();
  Eigen::Index used = q.cols();
  const Matrix qb = b.columns();
  for (Eigen::Index k = 0; k < qb.cols(); ++k) orthonormal_extend(q, used, qb.col(k), kRankTol);
  q.conservativeResize(Eigen::NoChange, used);
  return SubalgebraBasis::from_orthonormal(a.dim_ambient(), std::move(q));
}

SubalgebraBasis multiply_span(const Matrix& left, const SubalgebraBasis& s, const Matrix& right) {
  std::vector<Matrix> products;
  products.reserve(s.size());
  for (int k = 0; k < s.size(); ++k) products.push_back(left * s.element(k) * right);
  return SubalgebraBasis::span_of(s.dim_ambient(), products);
}

SubalgebraBasis span_closure(int dim, const std::vector<Matrix>& generators, double rank_tol) {
  double top = 0.0;
  for (const auto& g : generators) {
    if (g.rows() != dim || g.cols() != dim) {
      throw Error(ErrorKind::InvariantViolation, "generator has wrong dimension");
    }
    top = std::max(top, g.norm());
  }
  // Generators at rounding level (e.g. P b with P orthogonal to b) are dropped.
  std::vector<Matrix> gens;
  for (const auto& g : generators) {
    if (g.norm() <= 1e-12 * top) continue;
    gens.push_back(g);
    if ((g - g.adjoint()).norm() > rank_tol * g.norm()) gens.push_back(g.adjoint());
  }
  const Eigen::Index full_dim = static_cast<Eigen::Index>(dim) * dim;
  Matrix q(full_dim, 0);
  Eigen::Index used = 0;
  const Matrix id = Matrix::Identity(dim, dim);
  orthonormal_extend(q, used, vec(id), rank_tol);
  for (const auto& g : gens) orthonormal_extend(q, used, vec(g), rank_tol, top);

  // Multiply every newly found direction by every generator until nothing new appears.
  Eigen::Index frontier_begin = 0;
  while (frontier_begin < used && used < full_dim) {
    const Eigen::Index frontier_end = used;
    for (Eigen::Index k = frontier_begin; k < frontier_end && used < full_dim; ++k) {
      const Matrix f = unvec(q.col(k), dim);
      for (const auto& g : gens) {
        const Matrix prod = g * f;
        orthonormal_extend(q, used, vec(prod), rank_tol, g.norm());
        if (used == full_dim) break;
      }
    }
    frontier_begin = frontier_end;
  }
  if (used == full_dim) return SubalgebraBasis::full(dim);
  q.conservativeResize(Eigen::NoChange, used);
  return SubalgebraBasis::from_orthonormal(dim, std::move(q));
}

Matrix null_space(const Matrix& m, double rank_tol, double scale_floor) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  Matrix reduced;
  if (m.rows() > 2 * cols) {
    Eigen::HouseholderQR<Matrix> qr(m);
    reduced = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  } else {
    reduced = m;
  }
  Matrix v;
  RVector sv;
  if (reduced.rows() >= reduced.cols() && reduced.cols() <= 64) {
    Eigen::JacobiSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
    v = svd.matrixV();
    sv = svd.singularValues();
  } else {
    Eigen::BDCSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
    v = svd.matrixV();
    sv = svd.singularValues();
  }
  const double smax = sv.size() ? sv(0) : 0.0;
  const double thresh = rank_tol * std::max(smax, scale_floor);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  return v.rightCols(cols - rank);
}

Matrix random_element(const SubalgebraBasis& s, Rng& rng) {
  CVector c(s.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gaussian(rng);
  return s.from_coordinates(c);
}

Matrix random_hermitian_element(const SubalgebraBasis& s, Rng& rng) {
  Matrix h;
  if (s.is_full()) {
    const int n = s.dim_ambient();
    h.resize(n, n);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = gaussian(rng);
  } else {
    h = random_element(s, rng);
  }
  h = hermitian_part(h);
  const double norm = tau_norm(h);
  return norm > 0.0 ? Matrix(h / norm) : h;
}

namespace {

// Largest commutator defect of the basis of `result` against `probe`, relative
// to the tau-norm of the probe.
double commutation_defect(const SubalgebraBasis& result, const Matrix& probe) {
  double worst = 0.0;
  for (int k = 0; k < result.size(); ++k) {
    const Matrix e = result.element(k);
    worst = std::max(worst, tau_norm(commutator(e, probe)));
  }
  return worst;
}

SubalgebraBasis commutant_in_full(const SubalgebraBasis& s, Rng& rng, double rank_tol) {
  const int n = s.dim_ambient();
  if (s.is_full()) return SubalgebraBasis::scalars(n);
  if (s.size() <= 1) return SubalgebraBasis::full(n);
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<Matrix> gens;
    for (int i = 0; i < 3 + attempt; ++i) gens.push_back(random_hermitian_element(s, rng));

    // Anything commuting with gens[0] is block diagonal in its eigenbasis.
    const SpectralDecomposition sd = eig_hermitian(gens[0]);
    const Matrix& u = sd.eigenvectors;
    std::vector<int> cluster(n, 0);
    for (int i = 1; i < n; ++i) {
      cluster[i] = cluster[i - 1] + (sd.eigenvalues(i) - sd.eigenvalues(i - 1) > 1e-8 ? 1 : 0);
    }
    std::vector<std::pair<int, int>> cand;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (cluster[i] == cluster[j]) cand.emplace_back(i, j);
      }
    }
    const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
    Matrix m = Matrix::Zero(nn * static_cast<Eigen::Index>(gens.size() - 1), cand.size());
    for (size_t g = 1; g < gens.size(); ++g) {
      const Matrix gt = u.adjoint() * gens[g] * u;
      const Eigen::Index off = nn * static_cast<Eigen::Index>(g - 1);
      for (size_t c = 0; c < cand.size(); ++c) {
        const auto [i, j] = cand[c];
        // e_ij gt - gt e_ij
        for (int b = 0; b < n; ++b) m(off + i + static_cast<Eigen::Index>(b) * n, c) += gt(j, b);
        for (int a = 0; a < n; ++a) m(off + a + static_cast<Eigen::Index>(j) * n, c) -= gt(a, i);
      }
    }
    const Matrix kernel = null_space(m, rank_tol, 1.0);
    Matrix cols(nn, kernel.cols());
    for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
      Matrix local = Matrix::Zero(n, n);
      for (size_t c = 0; c < cand.size(); ++c) local(cand[c].first, cand[c].second) = kernel(c, k);
      const Matrix x = u * local * u.adjoint();
      cols.col(k) = vec(x);
    }
    SubalgebraBasis result = SubalgebraBasis::from_orthonormal(n, std::move(cols));
    if (commutation_defect(result, random_hermitian_element(s, rng)) <= 1e-8) return result;
  }
  throw Error(ErrorKind::NotAnAlgebra, "commutant did not stabilize; input is not a *-algebra?");
}

}  // namespace

SubalgebraBasis commutant(const SubalgebraBasis& s, Rng& rng, double rank_tol) {
  return commutant_in_full(s, rng, rank_tol);
}

SubalgebraBasis relative_commutant(const SubalgebraBasis& s, const SubalgebraBasis& ambient,
                                   Rng& rng, double rank_tol) {
  if (ambient.is_full()) return commutant_in_full(s, rng, rank_tol);
  const int n = s.dim_ambient();
  const Matrix w = ambient.columns();
  if (s.size() <= 1 || w.cols() == 0) return ambient;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<Matrix> gens;
    for (int i = 0; i < 2 + attempt; ++i) gens.push_back(random_hermitian_element(s, rng));
    Matrix m(nn * static_cast<Eigen::Index>(gens.size()), w.cols());
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
      const Matrix e = unvec(w.col(k), n);
      for (size_t g = 0; g < gens.size(); ++g) {
        const Matrix c = commutator(e, gens[g]);
        m.block(nn * static_cast<Eigen::Index>(g), k, nn, 1) = vec(c);
      }
    }
    const Matrix kernel = null_space(m, rank_tol, 1.0);
    SubalgebraBasis result = SubalgebraBasis::from_orthonormal(n, w * kernel);
    if (commutation_defect(result, random_hermitian_element(s, rng)) <= 1e-8) return result;
  }
  throw Error(ErrorKind::NotAnAlgebra, "relative commutant did not stabilize");
}

SubalgebraBasis center(const SubalgebraBasis& s, Rng& rng, double rank_tol) {
  if (s.is_full()) return SubalgebraBasis::scalars(s.dim_ambient());
  return relative_commutant(s, s, rng, rank_tol);
}

std::vector<Matrix> minimal_central_projections(const SubalgebraBasis& s, Rng& rng, int retries,
                                                double gap) {
  const int n = s.dim_ambient();
  const SubalgebraBasis z = center(s, rng);
  if (z.size() <= 1) return {Matrix::Identity(n, n)};
  for (int attempt = 0; attempt < retries; ++attempt) {
    const Matrix h = random_hermitian_element(z, rng);
    const SpectralDecomposition sd = eig_hermitian(h, 1e-8);
    std::vector<Matrix> out;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
      if (i == n || sd.eigenvalues(i) - sd.eigenvalues(i - 1) > gap) {
        const auto v = sd.eigenvectors.middleCols(start, i - start);
        out.push_back(v * v.adjoint());
        start = i;
      }
    }
    if (static_cast<int>(out.size()) == z.size()) return out;
  }
  throw Error(ErrorKind::DegenerateCenter, "random central elements failed to separate the " +
                                               std::to_string(z.size()) + " central blocks");
}

double closure_defect(const SubalgebraBasis& s, Rng& rng, int pairs) {
  if (s.is_full()) return 0.0;
  double worst = 0.0;
  for (int k = 0; k < s.size(); ++k) {
    worst = std::max(worst, membership(s.element(k).adjoint(), s).residual);
  }
  for (int p = 0; p < pairs; ++p) {
    Matrix x = random_element(s, rng);
    Matrix y = random_element(s, rng);
    x /= std::max(tau_norm(x), 1e-300);
    y /= std::max(tau_norm(y), 1e-300);
    worst = std::max(worst, membership(x * y, s).residual);
  }
  return worst;
}

namespace {

SubalgebraBasis invariant_iteration(const Matrix& h, const SubalgebraBasis& ambient,
                                    double rank_tol, int& iterations) {
  const int n = ambient.dim_ambient();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  const double spread = es.eigenvalues()(n - 1) - es.eigenvalues()(0);
  Matrix v = ambient.columns();
  iterations = 0;
  if (spread <= 1e-14) return ambient;
  while (v.cols() > 0) {
    ++iterations;
    const Eigen::Index d = v.cols();
    Matrix images(nn, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const Matrix b = unvec(v.col(k), n);
      images.col(k) = vec(Matrix(h * b - b * h));
    }
    const Matrix resid = images - v * (v.adjoint() * images);
    const Matrix kernel = null_space(resid, rank_tol, spread);
    if (kernel.cols() == d) break;
    v = v * kernel;
    // restore orthonormality lost to round-off
    Eigen::HouseholderQR<Matrix> qr(v);
    v = qr.householderQ() * Matrix::Identity(nn, v.cols());
  }
  if (v.cols() == nn) return SubalgebraBasis::full(n);
  return SubalgebraBasis::from_orthonormal(n, std::move(v));
}

}  // namespace

SubalgebraBasis invariant_subalgebra(const Matrix& h, const SubalgebraBasis& ambient, Rng& rng,
                                     InvariantStats* stats, double rank_tol) {
  if (hermiticity_defect(h) > kTolHerm * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NotHermitian, "flow generator must be self-adjoint");
  }
  const SpectralDecomposition sd = eig_hermitian(h, INFINITY);
  constexpr double kVerifyTol = 1e-6;
  double tol = rank_tol;
  for (int attempt = 0; attempt < 3; ++attempt, tol /= 100.0) {
    int iterations = 0;
    SubalgebraBasis result = invariant_iteration(h, ambient, tol, iterations);
    const double closure = closure_defect(result, rng);
    double flow = 0.0;
    if (!result.is_full() && result.size() > 0) {
      Matrix x = random_element(result, rng);
      x /= tau_norm(x);
      for (double t : {0.1, 0.7, 1.3}) {
        CVector phase(sd.eigenvalues.size());
        for (Eigen::Index i = 0; i < phase.size(); ++i) {
          phase(i) = std::exp(Complex(0.0, t * sd.eigenvalues(i)));
        }
        const Matrix u = sd.eigenvectors * phase.asDiagonal() * sd.eigenvectors.adjoint();
        flow = std::max(flow, membership(u * x * u.adjoint(), result).residual);
      }
    }
    if (stats) *stats = {iterations, closure, flow, tol};
    if (closure <= kVerifyTol && flow <= kVerifyTol) return result;
  }
  std::ostringstream os;
  os << "invariant subspace failed closure/flow verification (closure "
     << (stats ? stats->closure_residual : NAN) << ", flow " << (stats ? stats->flow_residual : NAN)
     << ")";
  throw Error(ErrorKind::NotAnAlgebra, os.str());
}

SubalgebraBasis region_subalgebra(const CarAlgebra& alg, const Sites& sites) {
  const int n = alg.dim();
  if (sites.empty()) return SubalgebraBasis::scalars(n);
  if (static_cast<int>(sites.size()) == alg.n_sites()) return SubalgebraBasis::full(n);
  const MatrixUnitFamily fam = matrix_units(alg, sites);
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  // Each unit has 2^{n-k} entries of modulus one, so this normalizes it.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n >> fam.k));
  Matrix cols = Matrix::Zero(nn, fam.size());
  for (int a = 0; a < fam.size(); ++a) {
    const auto& e = fam.units[a];
    for (int c = 0; c < n; ++c) {
      if (e.row[c] >= 0) cols(e.row[c] + static_cast<Eigen::Index>(c) * n, a) = e.value[c] * scale;
    }
  }
  return SubalgebraBasis::from_orthonormal(n, std::move(cols));
}

SubalgebraBasis region_parity_part(const CarAlgebra& alg, const Sites& sites, bool even) {
  const int n = alg.dim();
  const MatrixUnitFamily fam = matrix_units(alg, sites);
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n >> fam.k));
  int count = 0;
  for (int a = 0; a < fam.size(); ++a) count += fam.even[a] == even ? 1 : 0;
  Matrix cols = Matrix::Zero(nn, count);
  int out = 0;
  for (int a = 0; a < fam.size(); ++a) {
    if (fam.even[a] != even) continue;
    const auto& e = fam.units[a];
    for (int c = 0; c < n; ++c) {
      if (e.row[c] >= 0) cols(e.row[c] + static_cast<Eigen::Index>(c) * n, out) = e.value[c] * scale;
    }
    ++out;
  }
  return SubalgebraBasis::from_orthonormal(n, std::move(cols));
}

SubalgebraBasis parity_part(const CarAlgebra& alg, const SubalgebraBasis& s, bool even) {
  if (s.is_full()) return region_parity_part(alg, alg.all_sites(), even);
  std::vector<Matrix> parts;
  parts.reserve(s.size());
  for (int k = 0; k < s.size(); ++k) {
    auto [plus, minus] = alg.even_odd_split(s.element(k));
    parts.push_back(even ? plus : minus);
  }
  return SubalgebraBasis::span_of(s.dim_ambient(), parts);
}

bool is_parity_stable(const CarAlgebra& alg, const SubalgebraBasis& s, double tol) {
  if (s.is_full()) return true;
  for (int k = 0; k < s.size(); ++k) {
    if (membership(alg.theta(s.element(k)), s, tol).residual > tol) return false;
  }
  return true;
}

}  // namespace fermarkov
