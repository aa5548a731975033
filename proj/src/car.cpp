#include "fermarkov/car.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

MonomialMatrix MonomialMatrix::identity(int dim) {
  MonomialMatrix m;
  m.row.resize(dim);
  m.value.assign(dim, 1.0);
  for (int c = 0; c < dim; ++c) m.row[c] = c;
  return m;
}

MonomialMatrix MonomialMatrix::operator*(const MonomialMatrix& rhs) const {
  MonomialMatrix out;
  const int n = rhs.dim();
  out.row.assign(n, -1);
  out.value.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    const int mid = rhs.row[c];
    if (mid < 0 || row[mid] < 0) continue;
    out.row[c] = row[mid];
    out.value[c] = value[mid] * rhs.value[c];
  }
  return out;
}

MonomialMatrix MonomialMatrix::adjoint() const {
  MonomialMatrix out;
  const int n = dim();
  out.row.assign(n, -1);
  out.value.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    if (row[c] < 0) continue;
    out.row[row[c]] = c;
    out.value[row[c]] = std::conj(value[c]);
  }
  return out;
}

Matrix MonomialMatrix::dense() const {
  Matrix m = Matrix::Zero(dim(), dim());
  add_to(m, 1.0);
  return m;
}

Complex MonomialMatrix::inner(const Matrix& x) const {
  Complex acc = 0.0;
  for (int c = 0; c < dim(); ++c) {
    if (row[c] >= 0) acc += std::conj(value[c]) * x(row[c], c);
  }
  return acc;
}

void MonomialMatrix::add_to(Matrix& out, Complex coeff) const {
  for (int c = 0; c < dim(); ++c) {
    if (row[c] >= 0) out(row[c], c) += coeff * value[c];
  }
}

CarAlgebra::CarAlgebra(int n_sites, StringConvention convention) : n_sites_(n_sites) {
  if (n_sites < 1) throw Error(ErrorKind::InvalidRegions, "need at least one site");
  if (n_sites > kMaxSites) {
    throw Error(ErrorKind::DimensionTooLarge,
                std::to_string(n_sites) + " sites exceeds " + std::to_string(kMaxSites));
  }
  dim_ = 1 << n_sites;
  annihilators_.reserve(n_sites);
  for (int j = 0; j < n_sites; ++j) {
    const unsigned site_bit = 1u << (n_sites - 1 - j);
    const unsigned string_mask = ~((site_bit << 1) - 1) & static_cast<unsigned>(dim_ - 1);
    MonomialMatrix a;
    a.row.assign(dim_, -1);
    a.value.assign(dim_, 0.0);
    for (int s = 0; s < dim_; ++s) {
      if ((static_cast<unsigned>(s) & site_bit) == 0) continue;
      a.row[s] = static_cast<int>(static_cast<unsigned>(s) ^ site_bit);
      double sign = 1.0;
      if (convention == StringConvention::JordanWigner &&
          std::popcount(static_cast<unsigned>(s) & string_mask) % 2 == 1) {
        sign = -1.0;
      }
      a.value[s] = sign;
    }
    annihilators_.push_back(std::move(a));
  }
}

Sites CarAlgebra::all_sites() const {
  Sites s(n_sites_);
  for (int i = 0; i < n_sites_; ++i) s[i] = i;
  return s;
}

void CarAlgebra::check_sites(const Sites& sites) const {
  for (int i : sites) {
    if (i < 0 || i >= n_sites_) {
      throw Error(ErrorKind::InvalidRegions, "site " + std::to_string(i) + " out of range");
    }
  }
}

Matrix CarAlgebra::number(int i) const {
  const auto& a = annihilators_.at(i);
  return (a.adjoint() * a).dense();
}

Matrix CarAlgebra::parity_unitary(const Sites& sites) const {
  check_sites(sites);
  Matrix v = Matrix::Identity(dim_, dim_);
  for (int i : sites) {
    const auto& a = annihilators_[i];
    const Matrix vi = (a.adjoint() * a).dense() - (a * a.adjoint()).dense();
    v = v * vi;
  }
  return v;
}

Matrix CarAlgebra::parity_automorphism(const Matrix& x, const Sites& sites) const {
  const Matrix v = parity_unitary(sites);
  return v * x * v;
}

Matrix CarAlgebra::theta(const Matrix& x) const {
  // v is diagonal with entries +-1.
  const Matrix v = parity_unitary(all_sites());
  const RVector d = v.diagonal().real();
  return d.cast<Complex>().asDiagonal() * x * d.cast<Complex>().asDiagonal();
}

std::pair<Matrix, Matrix> CarAlgebra::even_odd_split(const Matrix& x) const {
  const Matrix t = theta(x);
  return {(x + t) / 2.0, (x - t) / 2.0};
}

Matrix CarAlgebra::cond_expect(const Matrix& x, const Sites& sites) const {
  check_sites(sites);
  if (sites.empty()) return tau(x) * Matrix::Identity(dim_, dim_);
  const MatrixUnitFamily fam = matrix_units(*this, sites);
  Matrix out = Matrix::Zero(dim_, dim_);
  const double norm = static_cast<double>(dim_ >> fam.k);  // Tr(q_alpha)
  for (const auto& e : fam.units) e.add_to(out, e.inner(x) / norm);
  return out;
}

Matrix CarAlgebra::local_matrix(const Matrix& x, const Sites& sites) const {
  check_sites(sites);
  const MatrixUnitFamily fam = matrix_units(*this, sites);
  const int side = fam.side();
  const double norm = static_cast<double>(dim_ >> fam.k);
  Matrix small(side, side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) small(r, c) = fam.units[fam.index(r, c)].inner(x) / norm;
  }
  return small;
}

Matrix CarAlgebra::embed_local(const Matrix& small, const Sites& sites) const {
  check_sites(sites);
  const MatrixUnitFamily fam = matrix_units(*this, sites);
  const int side = fam.side();
  if (small.rows() != side || small.cols() != side) {
    throw Error(ErrorKind::InvariantViolation, "local matrix has wrong dimension");
  }
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) fam.units[fam.index(r, c)].add_to(out, small(r, c));
  }
  return out;
}

MatrixUnitFamily matrix_units(const CarAlgebra& alg, const Sites& region) {
  alg.check_sites(region);
  if (!std::is_sorted(region.begin(), region.end()) ||
      std::adjacent_find(region.begin(), region.end()) != region.end()) {
    throw Error(ErrorKind::InvalidRegions, "region must be sorted and duplicate-free");
  }
  MatrixUnitFamily fam;
  fam.region = region;
  fam.k = static_cast<int>(region.size());

  const int n = alg.dim();
  std::vector<MonomialMatrix> prefix{MonomialMatrix::identity(n)};
  std::vector<int> odd_count{0};
  MonomialMatrix string = MonomialMatrix::identity(n);  // V_{i_{j-1}}
  for (int j = 0; j < fam.k; ++j) {
    const MonomialMatrix& a = alg.annihilator_monomial(region[j]);
    const MonomialMatrix ad = a.adjoint();
    // factor[k][l] for labels k, l in {0, 1} (i.e. 1, 2)
    const MonomialMatrix factor[2][2] = {{a * ad, string * a}, {string * ad, ad * a}};
    const int old_side = 1 << j;
    const int new_side = old_side << 1;
    std::vector<MonomialMatrix> next(static_cast<size_t>(new_side) * new_side);
    std::vector<int> next_odd(next.size());
    for (int r = 0; r < old_side; ++r) {
      for (int c = 0; c < old_side; ++c) {
        const int old_idx = r * old_side + c;
        for (int k = 0; k < 2; ++k) {
          for (int l = 0; l < 2; ++l) {
            const int idx = (2 * r + k) * new_side + (2 * c + l);
            next[idx] = prefix[old_idx] * factor[k][l];
            next_odd[idx] = odd_count[old_idx] + (k != l ? 1 : 0);
          }
        }
      }
    }
    prefix = std::move(next);
    odd_count = std::move(next_odd);
    // V_{i_j} = V_{i_{j-1}} (I - 2 a* a): flip the sign on occupied columns.
    MonomialMatrix z = MonomialMatrix::identity(n);
    const MonomialMatrix num = ad * a;
    for (int c = 0; c < n; ++c) {
      if (num.row[c] >= 0) z.value[c] = 1.0 - 2.0 * num.value[c];
    }
    string = string * z;
  }
  fam.units = std::move(prefix);
  fam.even.resize(fam.units.size());
  for (size_t i = 0; i < fam.units.size(); ++i) fam.even[i] = odd_count[i] % 2 == 0;
  return fam;
}

Sites site_union(const Sites& a, const Sites& b) {
  Sites out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RegionPartition RegionPartition::make(int n_sites, Sites a, Sites b, Sites c) {
  for (Sites* s : {&a, &b, &c}) std::sort(s->begin(), s->end());
  if (a.empty() || b.empty() || c.empty()) {
    throw Error(ErrorKind::InvalidRegions, "A, B and C must all be nonempty");
  }
  std::vector<int> seen(n_sites, 0);
  for (const Sites* s : {&a, &b, &c}) {
    for (int i : *s) {
      if (i < 0 || i >= n_sites) {
        throw Error(ErrorKind::InvalidRegions, "site " + std::to_string(i) + " out of range");
      }
      if (seen[i]++) {
        throw Error(ErrorKind::InvalidRegions, "site " + std::to_string(i) + " listed twice");
      }
    }
  }
  for (int i = 0; i < n_sites; ++i) {
    if (!seen[i]) throw Error(ErrorKind::InvalidRegions, "site " + std::to_string(i) + " unassigned");
  }
  return RegionPartition{std::move(a), std::move(b), std::move(c)};
}

RegionPartition RegionPartition::parse(int n_sites, const std::string& text) {
  Sites parts[3];
  bool given[3] = {false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    const auto eq = item.find('=');
    if (eq != 1 || item.empty() || (item[0] != 'A' && item[0] != 'B' && item[0] != 'C')) {
      throw Error(ErrorKind::ParseError, "bad region item '" + item + "'");
    }
    const int which = item[0] - 'A';
    if (given[which]) throw Error(ErrorKind::ParseError, "region given twice: " + item);
    given[which] = true;
    std::stringstream list(item.substr(2));
    std::string tok;
    while (std::getline(list, tok, ',')) {
      if (tok.empty()) continue;
      try {
        size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        parts[which].push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "bad site index '" + tok + "'");
      }
    }
  }
  return make(n_sites, parts[0], parts[1], parts[2]);
}

RegionPartition RegionPartition::contiguous(int size_a, int size_b, int size_c) {
  Sites a, b, c;
  int next = 0;
  for (int i = 0; i < size_a; ++i) a.push_back(next++);
  for (int i = 0; i < size_b; ++i) b.push_back(next++);
  for (int i = 0; i < size_c; ++i) c.push_back(next++);
  return make(next, a, b, c);
}

Sites RegionPartition::AB() const { return site_union(A, B); }
Sites RegionPartition::BC() const { return site_union(B, C); }
Sites RegionPartition::all() const { return site_union(AB(), C); }

std::string RegionPartition::to_string() const {
  auto list = [](const Sites& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(s[i]);
    }
    return out;
  };
  return "A=" + list(A) + ":B=" + list(B) + ":C=" + list(C);
}

}  // namespace fermarkov
