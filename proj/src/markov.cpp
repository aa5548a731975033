#include "fermarkov/markov.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

std::vector<Matrix> site_generators(const CarAlgebra& alg, const Sites& sites) {
  std::vector<Matrix> gens;
  for (int i : sites) {
    gens.push_back(alg.annihilator(i));
    gens.push_back(alg.creator(i));
  }
  return gens;
}

TripletAnalysis analyze_triplet(const StateDensity& state, const RegionPartition& regions,
                                const Tolerances& tol) {
  if (regions.n_sites() != state.n_sites()) {
    throw Error(ErrorKind::InvalidRegions, "regions do not match the number of sites");
  }
  const CarAlgebra& alg = state.alg();
  TripletAnalysis out;
  out.regions = regions;
  out.ssa = ssa_gap(state, regions, tol.tol_equality);
  out.rho_bc = hermitian_part(embedded_restriction(state, regions.BC()));
  const Matrix h = mat_log(out.rho_bc);

  Rng rng(tol.seed);
  out.C = invariant_subalgebra(h, region_subalgebra(alg, regions.AB()), rng, nullptr, tol.rank_tol);
  out.B = invariant_subalgebra(h, region_subalgebra(alg, regions.B), rng, nullptr, tol.rank_tol);

  out.a_in_C = true;
  for (const Matrix& g : site_generators(alg, regions.A)) {
    const auto m = membership(g, out.C, tol.tol_member);
    out.a_in_C = out.a_in_C && m.member;
    out.a_in_C_residual = std::max(out.a_in_C_residual, m.residual);
  }
  const Sites bc = regions.BC();
  for (int k = 0; k < out.C.size(); ++k) {
    const Matrix proj = alg.cond_expect(out.C.element(k), bc);
    out.ebc_c_in_b_residual =
        std::max(out.ebc_c_in_b_residual, membership(proj, out.B, tol.tol_member).residual);
  }
  out.parity_defect = state.parity_defect();
  out.even = out.parity_defect <= 1e-10;
  out.markov = out.ssa.saturated && out.a_in_C;
  return out;
}

Factorization factorize(const StateDensity& state, const RegionPartition& regions,
                        const Tolerances& tol) {
  return factorize(state, analyze_triplet(state, regions, tol), tol);
}

Factorization factorize(const StateDensity& state, const TripletAnalysis& analysis,
                        const Tolerances& tol) {
  if (!analysis.ssa.saturated) {
    std::ostringstream os;
    os << "SSA gap " << analysis.ssa.gap << " exceeds " << analysis.ssa.tol_equality;
    throw Error(ErrorKind::NotSaturated, os.str());
  }
  const CarAlgebra& alg = state.alg();
  const Matrix& rho = state.rho();
  Factorization f;
  f.x = hermitian_part(analysis.C.project(rho));
  const SpectralDecomposition sx = eig_hermitian(f.x, 1e-9);
  f.x_min_eig = sx.eigenvalues(0);
  if (f.x_min_eig <= kEpsFaithful) {
    throw Error(ErrorKind::FactorizationFailed, "restriction of rho to C is not invertible");
  }
  const Matrix y_raw = mat_func(sx, MatFunc::pow(-1.0)) * rho;
  const double y_herm = (y_raw - y_raw.adjoint()).norm();
  f.y = hermitian_part(y_raw);
  f.y_min_eig = min_eigenvalue(f.y);
  f.commute_residual = commutator(f.x, f.y).norm();
  f.product_residual = (f.x * f.y - rho).norm();
  f.x_region_residual =
      membership(f.x, region_subalgebra(alg, analysis.regions.AB()), tol.tol_member).residual;
  f.y_region_residual =
      membership(f.y, region_subalgebra(alg, analysis.regions.BC()), tol.tol_member).residual;
  for (int k = 0; k < analysis.C.size(); ++k) {
    f.y_commutant_residual =
        std::max(f.y_commutant_residual, tau_norm(commutator(f.y, analysis.C.element(k))));
  }
  const auto [y_plus, y_minus] = alg.even_odd_split(f.y);
  f.y_odd_norm = y_minus.norm();
  f.y_parity = f.y_odd_norm <= 1e-9 * std::max(1.0, f.y.norm()) ? FactorParity::Even
                                                                  : FactorParity::NonEven;
  if (analysis.even) {
    f.even_factors = std::make_pair(alg.even_odd_split(f.x).first, Matrix(y_plus));
  }

  const double y_scale = 1.0 + tau_norm(f.y);
  const bool ok = y_herm <= 1e-8 * y_scale && f.y_min_eig >= -1e-9 &&
                  f.commute_residual <= 1e-9 && f.product_residual <= 1e-8 &&
                  f.x_region_residual <= tol.tol_member * (1.0 + tau_norm(f.x)) &&
                  f.y_region_residual <= tol.tol_member * y_scale;
  if (!ok) {
    std::ostringstream os;
    os << "factor certification failed: commutator " << f.commute_residual << ", product "
       << f.product_residual << ", y in A_BC " << f.y_region_residual << ", min eig y "
       << f.y_min_eig << ", y hermiticity " << y_herm;
    throw Error(ErrorKind::FactorizationFailed, os.str());
  }
  return f;
}

namespace {

// Lexicographic order on entries, ties within 1e-9.
bool signature_less(const Matrix& a, const Matrix& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex da = a.data()[i];
    const Complex db = b.data()[i];
    if (std::abs(da.real() - db.real()) > 1e-9) return da.real() < db.real();
    if (std::abs(da.imag() - db.imag()) > 1e-9) return da.imag() < db.imag();
  }
  return false;
}

void require_even_markov(const TripletAnalysis& analysis) {
  if (!analysis.even) {
    std::ostringstream os;
    os << "state is not even (|rho - Theta(rho)| = " << analysis.parity_defect << ")";
    throw Error(ErrorKind::NotEven, os.str());
  }
  if (!analysis.markov) {
    std::ostringstream os;
    os << "state is not a Markov triplet (SSA gap " << analysis.ssa.gap << ")";
    throw Error(ErrorKind::NotMarkov, os.str());
  }
}

}  // namespace

CentralStructure central_structure(const StateDensity& state, const RegionPartition& regions,
                                   const Tolerances& tol) {
  return central_structure(state, analyze_triplet(state, regions, tol), tol);
}

CentralStructure central_structure(const StateDensity& state, const TripletAnalysis& analysis,
                                   const Tolerances& tol) {
  require_even_markov(analysis);
  const CarAlgebra& alg = state.alg();
  const Matrix& rho = state.rho();
  const int n = alg.dim();
  Rng rng(tol.seed + 1);
  const std::vector<Matrix> p = minimal_central_projections(analysis.B, rng);
  const int m = static_cast<int>(p.size());

  std::vector<int> sigma(m, -1);
  for (int i = 0; i < m; ++i) {
    const Matrix t = alg.theta(p[i]);
    for (int j = 0; j < m; ++j) {
      if ((t - p[j]).norm() <= 1e-8) {
        sigma[i] = j;
        break;
      }
    }
    if (sigma[i] < 0) {
      throw Error(ErrorKind::UnmatchedParityAction,
                  "Theta(P_" + std::to_string(i) + ") matches no minimal central projection");
    }
  }
  for (int i = 0; i < m; ++i) {
    if (sigma[sigma[i]] != i) {
      throw Error(ErrorKind::UnmatchedParityAction, "Theta does not act as an involution");
    }
  }

  auto weight = [&](const Matrix& q) { return (q * rho).trace().real(); };
  std::vector<int> fixed;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i) {
    if (sigma[i] == i) {
      fixed.push_back(i);
    } else if (i < sigma[i]) {
      int rep = i, partner = sigma[i];
      if (signature_less(p[partner], p[rep])) std::swap(rep, partner);
      pairs.emplace_back(rep, partner);
    }
  }
  std::stable_sort(fixed.begin(), fixed.end(),
                   [&](int a, int b) { return weight(p[a]) > weight(p[b]); });
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    return weight(p[a.first] + p[a.second]) > weight(p[b.first] + p[b.second]);
  });

  CentralStructure cs;
  cs.m = m;
  cs.k = static_cast<int>(fixed.size());
  for (int i : fixed) {
    cs.P.push_back(p[i]);
    cs.Q.push_back(p[i]);
  }
  const Matrix id = Matrix::Identity(n, n);
  const Matrix pa = (id + alg.parity_unitary(analysis.regions.A)) / 2.0;
  for (const auto& [rep, partner] : pairs) {
    cs.P.push_back(p[rep]);
    cs.P.push_back(p[partner]);
    cs.Q.push_back(pa * p[rep] + (id - pa) * p[partner]);
    cs.Q.push_back((id - pa) * p[rep] + pa * p[partner]);
    const Matrix& q1 = cs.Q[cs.Q.size() - 2];
    const Matrix& q2 = cs.Q.back();
    cs.pair_sum_residual =
        std::max(cs.pair_sum_residual, (q1 + q2 - p[rep] - p[partner]).norm());
  }

  Matrix total = Matrix::Zero(n, n);
  for (size_t i = 0; i < cs.Q.size(); ++i) {
    const Matrix& q = cs.Q[i];
    total += q;
    cs.projection_residual =
        std::max({cs.projection_residual, (q * q - q).norm(), (q - q.adjoint()).norm()});
    for (size_t j = i + 1; j < cs.Q.size(); ++j) {
      cs.orthogonality_residual = std::max(cs.orthogonality_residual, (q * cs.Q[j]).norm());
    }
    cs.q_central_residual =
        std::max(cs.q_central_residual, membership(q, analysis.C).residual);
    for (int c = 0; c < analysis.C.size(); ++c) {
      cs.q_central_residual =
          std::max(cs.q_central_residual, tau_norm(commutator(q, analysis.C.element(c))));
    }
  }
  cs.completeness_residual = (total - id).norm();
  return cs;
}

int BlockDecomposition::fixed_count() const {
  return static_cast<int>(std::count_if(blocks.begin(), blocks.end(), [](const Block& b) {
    return b.parity == BlockParity::ThetaFixed;
  }));
}

int BlockDecomposition::pair_count() const {
  return static_cast<int>(blocks.size()) - fixed_count();
}

namespace {

std::vector<Matrix> compressed(const Matrix& left, const SubalgebraBasis& s) {
  std::vector<Matrix> out;
  out.reserve(s.size());
  for (int k = 0; k < s.size(); ++k) out.push_back(left * s.element(k));
  return out;
}

void append(std::vector<Matrix>& to, const std::vector<Matrix>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

}  // namespace

BlockDecomposition decompose_even(const StateDensity& state, const RegionPartition& regions,
                                  const Tolerances& tol) {
  const TripletAnalysis analysis = analyze_triplet(state, regions, tol);
  require_even_markov(analysis);
  const CarAlgebra& alg = state.alg();
  const Matrix& rho = state.rho();
  const int n = alg.dim();
  const Matrix id = Matrix::Identity(n, n);

  BlockDecomposition out;
  out.factors = factorize(state, analysis, tol);
  const Matrix& x = out.factors.even_factors->first;
  const Matrix& y = out.factors.even_factors->second;
  out.central = central_structure(state, analysis, tol);
  const CentralStructure& cs = out.central;

  Rng rng(tol.seed + 2);
  const std::vector<Matrix> a_gens = site_generators(alg, regions.A);
  std::vector<Matrix> c_gens = a_gens;
  append(c_gens, analysis.B.elements());
  out.lemma_c_defect = span_equality_defect(analysis.C, span_closure(n, c_gens, tol.rank_tol));

  const SubalgebraBasis b_tilde =
      relative_commutant(analysis.B, region_subalgebra(alg, regions.B), rng, tol.rank_tol);
  const SubalgebraBasis c_plus = region_parity_part(alg, regions.C, true);
  const SubalgebraBasis c_minus = region_parity_part(alg, regions.C, false);
  const Matrix v_b = alg.parity_unitary(regions.B);
  const std::vector<Matrix> c_plus_elems = c_plus.elements();
  const std::vector<Matrix> c_minus_elems = c_minus.elements();

  auto c_side = [&](const Matrix& dressing) {
    std::vector<Matrix> gens = c_plus_elems;
    for (const auto& o : c_minus_elems) gens.push_back(dressing * o);
    return gens;
  };
  {
    std::vector<Matrix> gens = b_tilde.elements();
    append(gens, c_side(v_b));
    out.y_in_ctilde_residual = membership(y, span_closure(n, gens, tol.rank_tol)).residual;
  }

  auto certify = [&](const Matrix& v, const SubalgebraBasis& s, double& residual) {
    const auto m = membership(v, s, tol.tol_member);
    residual = m.residual;
    return m.member;
  };

  bool certified = true;
  Matrix reassembled = Matrix::Zero(n, n);
  for (int j = 0; j < cs.k; ++j) {
    Block b;
    b.parity = BlockParity::ThetaFixed;
    b.projection = cs.Q[j];
    b.x = cs.Q[j] * x;
    b.y = cs.Q[j] * y;
    b.trace = (cs.Q[j] * rho).trace().real();
    std::vector<Matrix> cj = a_gens;
    append(cj, compressed(cs.P[j], analysis.B));
    std::vector<Matrix> ctj = compressed(cs.P[j], b_tilde);
    append(ctj, c_side(cs.P[j] * v_b));
    certified &= certify(b.x, span_closure(n, cj, tol.rank_tol), b.x_member_residual);
    certified &= certify(b.y, span_closure(n, ctj, tol.rank_tol), b.y_member_residual);
    reassembled += b.x * b.y;
    out.blocks.push_back(std::move(b));
  }
  const Matrix pa = (id + alg.parity_unitary(regions.A)) / 2.0;
  for (int j = cs.k; j + 1 < cs.m; j += 2) {
    Block b;
    b.parity = BlockParity::ThetaPair;
    const Matrix& q1 = cs.Q[j];
    const Matrix& q2 = cs.Q[j + 1];
    const Matrix& p1 = cs.P[j];
    const Matrix& p2 = cs.P[j + 1];
    b.projection = q1 + q2;
    b.x = q1 * x;
    b.y = q1 * y;
    b.trace = (b.projection * rho).trace().real();
    b.theta_image_residual = std::max((q2 * x - alg.theta(b.x)).norm(),
                                      (q2 * y - alg.theta(b.y)).norm());
    const Matrix zw = b.x * b.y;
    const Matrix pair_part = zw + alg.theta(zw);
    b.pair_reassembly_residual = (pair_part - b.projection * rho * b.projection).norm();

    std::vector<Matrix> dl = a_gens;
    append(dl, compressed(pa * p1, analysis.B));
    append(dl, compressed((id - pa) * p2, analysis.B));
    std::vector<Matrix> dtl = compressed(pa * p1, b_tilde);
    append(dtl, compressed((id - pa) * p2, b_tilde));
    append(dtl, c_side((p1 + p2) * v_b));
    certified &= certify(b.x, span_closure(n, dl, tol.rank_tol), b.x_member_residual);
    certified &= certify(b.y, span_closure(n, dtl, tol.rank_tol), b.y_member_residual);
    certified &= b.theta_image_residual <= 1e-9;
    reassembled += pair_part;
    out.blocks.push_back(std::move(b));
  }
  out.reassembly_residual = (reassembled - rho).norm();
  certified &= out.y_in_ctilde_residual <= tol.tol_member * (1.0 + tau_norm(y));
  if (!certified) {
    std::ostringstream os;
    os << "block membership exceeded tolerance;";
    for (size_t i = 0; i < out.blocks.size(); ++i) {
      os << " block " << i << ": x " << out.blocks[i].x_member_residual << " y "
         << out.blocks[i].y_member_residual << " theta " << out.blocks[i].theta_image_residual
         << ";";
    }
    os << " y in C~ " << out.y_in_ctilde_residual;
    throw Error(ErrorKind::BlockCertificationFailed, os.str());
  }
  return out;
}

StructureLemmaReport validate_structure_lemmas(const StateDensity& state,
                                               const RegionPartition& regions,
                                               const Tolerances& tol) {
  const TripletAnalysis analysis = analyze_triplet(state, regions, tol);
  if (!analysis.even) throw Error(ErrorKind::NotEven, "structure lemmas need an even state");
  const CarAlgebra& alg = state.alg();
  const int n = alg.dim();
  Rng rng(tol.seed + 3);
  StructureLemmaReport r;
  r.dim_c = analysis.C.size();
  r.dim_b = analysis.B.size();

  std::vector<Matrix> c_gens = site_generators(alg, regions.A);
  append(c_gens, analysis.B.elements());
  r.c_defect = span_equality_defect(analysis.C, span_closure(n, c_gens, tol.rank_tol));

  const SubalgebraBasis c_comm = commutant(analysis.C, rng, tol.rank_tol);
  const SubalgebraBasis rel =
      relative_commutant(analysis.B, region_subalgebra(alg, regions.BC()), rng, tol.rank_tol);
  const SubalgebraBasis rel_plus = parity_part(alg, rel, true);
  const SubalgebraBasis rel_minus = parity_part(alg, rel, false);
  const Matrix id = Matrix::Identity(n, n);
  const SubalgebraBasis ccom_target =
      linear_sum(rel_plus, multiply_span(id, rel_minus, alg.parity_unitary(regions.A)));
  r.ccom_defect = span_equality_defect(c_comm, ccom_target);
  r.dim_ccom = c_comm.size();
  r.dim_rel_plus = rel_plus.size();
  r.dim_rel_minus = rel_minus.size();

  const SubalgebraBasis b_tilde =
      relative_commutant(analysis.B, region_subalgebra(alg, regions.B), rng, tol.rank_tol);
  std::vector<Matrix> gens = b_tilde.elements();
  append(gens, region_parity_part(alg, regions.C, true).elements());
  const Matrix v_b = alg.parity_unitary(regions.B);
  for (const auto& o : region_parity_part(alg, regions.C, false).elements()) {
    gens.push_back(v_b * o);
  }
  r.b_defect = span_equality_defect(rel, span_closure(n, gens, tol.rank_tol));
  return r;
}

}  // namespace fermarkov
