#include "fermarkov/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <random>

namespace fermarkov {

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double monomial_distance(const MonomialMatrix& a, const MonomialMatrix& b) {
  double worst = 0.0;
  for (int c = 0; c < a.dim(); ++c) {
    const Complex va = a.row[c] < 0 ? Complex(0.0) : a.value[c];
    const Complex vb = b.row[c] < 0 ? Complex(0.0) : b.value[c];
    if (a.row[c] == b.row[c] || va == 0.0 || vb == 0.0) {
      worst = std::max(worst, std::abs(va - vb));
    } else {
      worst = std::max({worst, std::abs(va), std::abs(vb)});
    }
  }
  return worst;
}

MonomialMatrix zero_monomial(int dim) {
  MonomialMatrix z;
  z.row.assign(dim, -1);
  z.value.assign(dim, Complex(0.0));
  return z;
}

Sites mask_sites(int mask, int n) {
  Sites s;
  for (int i = 0; i < n; ++i) {
    if ((mask >> (n - 1 - i)) & 1) s.push_back(i);
  }
  return s;
}

class Checker {
 public:
  explicit Checker(std::uint64_t seed) : rng_(seed) {}

  Matrix random_local(const CarAlgebra& alg, const Sites& sites) {
    const int side = 1 << sites.size();
    Matrix small(side, side);
    for (Eigen::Index i = 0; i < small.size(); ++i) small.data()[i] = Complex(g_(rng_), g_(rng_));
    if (sites.empty()) return small(0, 0) * Matrix::Identity(alg.dim(), alg.dim());
    return alg.embed_local(small, sites);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> g_{0.0, 1.0};
};

void run_one(const CarAlgebra& alg, Checker& chk, std::map<std::string, double>& worst) {
  const int n = alg.n_sites();
  const int dim = alg.dim();
  const Matrix id = Matrix::Identity(dim, dim);
  auto note = [&](const char* name, double v) { worst[name] = std::max(worst[name], v); };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Matrix ai = alg.annihilator(i);
      const Matrix aj = alg.annihilator(j);
      const Matrix ajs = alg.creator(j);
      note("car", max_abs(ai * aj + aj * ai));
      note("car", max_abs(ai * ajs + ajs * ai - (i == j ? id : Matrix::Zero(dim, dim))));
    }
  }

  const int full_mask = (1 << n) - 1;
  for (int mask = 0; mask <= full_mask; ++mask) {
    const Sites in = mask_sites(mask, n);
    const Sites out = mask_sites(full_mask ^ mask, n);

    // tau(ab) = tau(a) tau(b) and graded commutation across a split
    if (!in.empty() && !out.empty()) {
      const Matrix a = chk.random_local(alg, in);
      const Matrix b = chk.random_local(alg, out);
      note("tau_product", std::abs(alg.tau(a * b) - alg.tau(a) * alg.tau(b)));
      const auto [ap, am] = alg.even_odd_split(a);
      const auto [bp, bm] = alg.even_odd_split(b);
      note("graded", max_abs(ap * bp - bp * ap));
      note("graded", max_abs(ap * bm - bm * ap));
      note("graded", max_abs(am * bp - bp * am));
      note("graded", max_abs(am * bm + bm * am));
    }

    // v_I implements Theta^I and is a self-adjoint unitary
    const Matrix v = alg.parity_unitary(in);
    note("v_I", max_abs(v * v - id));
    note("v_I", max_abs(v - v.adjoint()));
    for (int i = 0; i < n; ++i) {
      const bool inside = std::binary_search(in.begin(), in.end(), i);
      const Matrix ai = alg.annihilator(i);
      note("v_I", max_abs(v * ai * v - (inside ? -ai : ai)));
    }
    const Matrix x = chk.random_local(alg, alg.all_sites());
    note("v_I", max_abs(alg.parity_automorphism(x, in) - v * x * v));

    // E_I: tau(ab) = tau(E_I(a) b) for b in A(I), idempotent, commutes with Theta
    const Matrix b_in = chk.random_local(alg, in);
    const Matrix ex = alg.cond_expect(x, in);
    note("cond_expect", std::abs(alg.tau(x * b_in) - alg.tau(ex * b_in)));
    note("cond_expect", max_abs(alg.cond_expect(ex, in) - ex));
    note("cond_expect", max_abs(alg.cond_expect(b_in, in) - b_in));
    note("cond_expect", max_abs(alg.theta(ex) - alg.cond_expect(alg.theta(x), in)));
    for (int mask2 = 0; mask2 <= full_mask; ++mask2) {
      const Sites other = mask_sites(mask2, n);
      const Sites both = mask_sites(mask & mask2, n);
      note("cond_expect_meet",
           max_abs(alg.cond_expect(ex, other) - alg.cond_expect(x, both)));
    }
  }

  // p_alpha e_beta q_alpha = delta e_alpha over the whole chain and a sub-region
  std::vector<Sites> regions{alg.all_sites()};
  if (n > 1) {
    Sites alternate;
    for (int i = 0; i < n; i += 2) alternate.push_back(i);
    regions.push_back(alternate);
  }
  const MonomialMatrix zero = zero_monomial(dim);
  for (const Sites& region : regions) {
    const MatrixUnitFamily fam = matrix_units(alg, region);
    for (int a = 0; a < fam.size(); ++a) {
      const MonomialMatrix& ea = fam.units[a];
      const MonomialMatrix p = ea * ea.adjoint();
      const MonomialMatrix q = ea.adjoint() * ea;
      for (int b = 0; b < fam.size(); ++b) {
        note("matrix_units", monomial_distance(p * fam.units[b] * q, a == b ? ea : zero));
      }
      const Matrix dense = ea.dense();
      note("matrix_units", max_abs(alg.theta(dense) - (fam.even[a] ? dense : Matrix(-dense))));
    }
  }
}

}  // namespace

SelftestReport run_selftest(int max_n, StringConvention convention, double bound,
                            std::uint64_t seed) {
  SelftestReport rep;
  std::map<std::string, double> worst;
  for (const char* name : {"car", "tau_product", "graded", "v_I", "matrix_units", "cond_expect",
                           "cond_expect_meet"}) {
    worst[name] = 0.0;
  }
  Checker chk(seed);
  for (int n = 1; n <= max_n; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const CarAlgebra alg(n, convention);
    run_one(alg, chk, worst);
    rep.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  rep.ok = true;
  for (const char* name : {"car", "tau_product", "graded", "v_I", "matrix_units", "cond_expect",
                           "cond_expect_meet"}) {
    const double w = worst[name];
    rep.identities.push_back({name, w, bound, w <= bound});
    rep.ok = rep.ok && w <= bound;
  }
  return rep;
}

}  // namespace fermarkov
