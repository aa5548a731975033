#include <gtest/gtest.h>

#include <cmath>

#include "fermarkov/errors.hpp"
#include "fermarkov/quantum_info.hpp"
#include "fermarkov/subalgebra.hpp"
#include "support.hpp"

using namespace fermarkov;
using fermarkov::testing::algebra;
using fermarkov::testing::kron;
using fermarkov::testing::max_abs;
using fermarkov::testing::random_density;
using fermarkov::testing::state_of;

namespace {

const double kLog2 = std::log(2.0);

// Partial trace over the trailing `drop` tensor factors.
Matrix trace_out_tail(const Matrix& rho, int drop) {
  const int tail = 1 << drop;
  const int side = static_cast<int>(rho.rows()) / tail;
  Matrix out = Matrix::Zero(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      for (int t = 0; t < tail; ++t) out(r, c) += rho(r * tail + t, c * tail + t);
  return out;
}

// Unitary exchanging fermionic modes j and j+1: a_j <-> a_{j+1}.
Matrix fermionic_swap(int n, int j) {
  Matrix fswap = Matrix::Zero(4, 4);
  fswap(0, 0) = 1.0;
  fswap(1, 2) = 1.0;
  fswap(2, 1) = 1.0;
  fswap(3, 3) = -1.0;
  const Matrix left = Matrix::Identity(1 << j, 1 << j);
  const Matrix right = Matrix::Identity(1 << (n - j - 2), 1 << (n - j - 2));
  return kron(kron(left, fswap), right);
}

Matrix even_positive(const CarAlgebra& alg, const Sites& sites, std::mt19937_64& rng) {
  const int side = 1 << sites.size();
  const Matrix x = alg.embed_local(random_density(side, rng, 0.2), sites);
  return (x + alg.theta(x)) / 2.0;
}

}  // namespace

TEST(State, Validation) {
  auto alg = algebra(2);
  EXPECT_THROW(StateDensity(alg, Matrix::Identity(4, 4)), Error);  // trace 4
  Matrix neg = Matrix::Identity(4, 4) / 4.0;
  neg(0, 0) = -0.25;
  neg(1, 1) = 0.75;
  EXPECT_THROW(StateDensity(alg, neg), Error);
  EXPECT_TRUE(StateDensity(alg, Matrix::Identity(4, 4) / 4.0).faithful());
}

TEST(Restrict, Tracial) {
  const auto s = state_of(Matrix::Identity(16, 16) / 16.0);
  for (const Sites& I : {Sites{0}, Sites{1, 3}, Sites{0, 1, 2}}) {
    const int side = 1 << I.size();
    EXPECT_LE(max_abs(restrict_density(s, I) - Matrix::Identity(side, side) / double(side)),
              1e-15);
  }
}

TEST(Restrict, FullRegionIsIdentityMap) {
  std::mt19937_64 rng(1);
  const Matrix rho = random_density(8, rng);
  EXPECT_LE(max_abs(restrict_density(state_of(rho), {0, 1, 2}) - rho), 1e-14);
}

TEST(Restrict, LeadingSitesMatchPartialTrace) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = random_density(16, rng);
    const auto s = state_of(rho);
    EXPECT_LE(max_abs(restrict_density(s, {0, 1}) - trace_out_tail(rho, 2)), 1e-14);
    EXPECT_LE(max_abs(restrict_density(s, {0}) - trace_out_tail(rho, 3)), 1e-14);
  }
}

TEST(Restrict, EvenStaysEvenAndPositive) {
  std::mt19937_64 rng(3);
  const CarAlgebra alg(4);
  const CarAlgebra small(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix r = random_density(16, rng);
    const Matrix rho = (r + alg.theta(r)) / 2.0;
    const Matrix local = restrict_density(state_of(rho), {1, 3});
    EXPECT_LE(max_abs(small.theta(local) - local), 1e-14);
    EXPECT_NEAR(local.trace().real(), 1.0, 1e-12);
    EXPECT_GE(min_eigenvalue(local), -1e-10);
  }
}

TEST(Entropy, Examples) {
  Matrix pure = Matrix::Zero(4, 4);
  pure(2, 2) = 1.0;
  EXPECT_NEAR(vn_entropy(pure), 0.0, 1e-15);
  EXPECT_NEAR(vn_entropy(Matrix::Identity(8, 8) / 8.0), 3.0 * kLog2, 1e-14);
  Matrix d = Matrix::Zero(4, 4);
  d(0, 0) = 0.5;
  d(1, 1) = 0.25;
  d(2, 2) = 0.25;
  EXPECT_NEAR(vn_entropy(d), 1.5 * kLog2, 1e-14);
}

TEST(Entropy, InvariantUnderModeRelabeling) {
  std::mt19937_64 rng(4);
  const Matrix u = fermionic_swap(3, 1);
  const CarAlgebra alg(3);
  EXPECT_LE(max_abs(u * alg.annihilator(1) * u.adjoint() - alg.annihilator(2)), 1e-15);
  EXPECT_LE(max_abs(u * alg.annihilator(2) * u.adjoint() - alg.annihilator(1)), 1e-15);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = random_density(8, rng);
    const Matrix swapped = u * rho * u.adjoint();
    EXPECT_NEAR(vn_entropy(restrict_density(state_of(swapped), {0, 1})),
                vn_entropy(restrict_density(state_of(rho), {0, 2})), 1e-12);
  }
}

TEST(RelEntropy, Examples) {
  std::mt19937_64 rng(5);
  const Matrix rho = random_density(8, rng);
  EXPECT_NEAR(rel_entropy(rho, rho), 0.0, 1e-12);
  EXPECT_NEAR(rel_entropy(rho, Matrix::Identity(8, 8) / 8.0), 3.0 * kLog2 - vn_entropy(rho),
              1e-12);
  Matrix singular = Matrix::Identity(2, 2);
  singular(1, 1) = 0.0;
  try {
    rel_entropy(Matrix::Identity(2, 2) / 2.0, singular);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularReference);
  }
}

TEST(RelEntropy, Monotone) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = state_of(random_density(8, rng));
    const auto s = state_of(random_density(8, rng));
    const double full = rel_entropy(r.rho(), s.rho());
    EXPECT_GE(full, -1e-10);
    const Sites I = trial % 2 ? Sites{0, 2} : Sites{1};
    EXPECT_GE(full - rel_entropy(restrict_density(r, I), restrict_density(s, I)), -1e-10);
  }
}

TEST(RelEntropy, JointlyConvex) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix r1 = random_density(4, rng), r2 = random_density(4, rng);
    const Matrix s1 = random_density(4, rng), s2 = random_density(4, rng);
    const double l = unif(rng);
    const double mixed = rel_entropy(l * r1 + (1 - l) * r2, l * s1 + (1 - l) * s2);
    EXPECT_LE(mixed, l * rel_entropy(r1, s1) + (1 - l) * rel_entropy(r2, s2) + 1e-9);
  }
}

TEST(Ssa, TracialIsSaturated) {
  const auto rep = ssa_gap(state_of(Matrix::Identity(8, 8) / 8.0),
                           RegionPartition::contiguous(1, 1, 1));
  EXPECT_NEAR(rep.gap, 0.0, 1e-12);
  EXPECT_TRUE(rep.saturated);
}

TEST(Ssa, RandomStatesObeyInequality) {
  std::mt19937_64 rng(8);
  const auto regions = RegionPartition::contiguous(1, 1, 1);
  int clearly_positive = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = state_of(random_density(8, rng));
    const auto rep = ssa_gap(s, regions);
    EXPECT_GE(rep.gap, -1e-9);
    EXPECT_NEAR(rep.gap, rep.s_ab + rep.s_bc - rep.s_total - rep.s_b, 1e-12);
    clearly_positive += rep.gap > 1e-4 ? 1 : 0;
  }
  EXPECT_GE(clearly_positive, 95);
}

TEST(Ssa, RelativeEntropyForm) {
  std::mt19937_64 rng(9);
  const auto regions = RegionPartition::make(4, {0, 3}, {1}, {2});
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = state_of(random_density(16, rng));
    const auto rep = ssa_gap(s, regions);
    const double alt = rel_entropy(s.rho(), embedded_restriction(s, regions.BC())) -
                       rel_entropy(embedded_restriction(s, regions.AB()),
                                   embedded_restriction(s, regions.B));
    EXPECT_NEAR(rep.gap, alt, 1e-8);
  }
}

TEST(Ssa, CommutingEvenProductIsSaturated) {
  std::mt19937_64 rng(10);
  const CarAlgebra alg(4);
  const auto regions = RegionPartition::contiguous(1, 2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = even_positive(alg, regions.AB(), rng);
    const Matrix y = even_positive(alg, regions.C, rng);
    ASSERT_LE(max_abs(x * y - y * x), 1e-12);
    Matrix rho = hermitian_part(x * y);
    rho /= rho.trace().real();
    EXPECT_LE(std::abs(ssa_gap(state_of(rho), regions).gap), 1e-10);
  }
}

TEST(Ssa, RejectsNonFaithful) {
  Matrix rho = Matrix::Zero(8, 8);
  rho(0, 0) = 1.0;
  try {
    ssa_gap(state_of(rho), RegionPartition::contiguous(1, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFaithful);
  }
}

TEST(Cocycle, BasicProperties) {
  std::mt19937_64 rng(11);
  const Matrix rho = random_density(8, rng), sigma = random_density(8, rng);
  const Matrix id = Matrix::Identity(8, 8);
  EXPECT_LE(max_abs(cocycle(rho, rho, 0.9) - id), 1e-12);
  EXPECT_LE(max_abs(cocycle(rho, sigma, 0.0) - id), 1e-12);
  for (double s : {0.2, -0.5}) {
    for (double t : {0.3, 1.1}) {
      const Matrix ut = cocycle(rho, sigma, t);
      EXPECT_LE(max_abs(ut.adjoint() * ut - id), 1e-9);
      const Matrix lhs = ut.adjoint() * cocycle(rho, sigma, s + t);
      const Matrix rhs = mat_ipow(sigma, t) * cocycle(rho, sigma, s) * mat_ipow(sigma, -t);
      EXPECT_LE(max_abs(lhs - rhs), 1e-8);
    }
  }
}

TEST(Cocycle, SaturatingStateStaysInLeftAlgebra) {
  std::mt19937_64 rng(12);
  const CarAlgebra alg(3);
  const auto regions = RegionPartition::contiguous(1, 1, 1);
  const Matrix x = even_positive(alg, regions.AB(), rng);
  const Matrix y = even_positive(alg, regions.C, rng);
  Matrix rho = hermitian_part(x * y);
  rho /= rho.trace().real();
  const auto s = state_of(rho);
  const Matrix rho_bc = embedded_restriction(s, regions.BC());
  const auto ab = region_subalgebra(alg, regions.AB());
  for (double t : {0.3, 1.1}) EXPECT_TRUE(membership(cocycle(rho, rho_bc, t), ab).member);
  const Matrix generic = random_density(8, rng);
  const Matrix generic_bc = alg.cond_expect(generic, regions.BC());
  EXPECT_FALSE(membership(cocycle(generic, generic_bc, 1.1), ab).member);
  EXPECT_THROW(cocycle(rho, Matrix::Zero(8, 8), 0.5), Error);
}
