#include <gtest/gtest.h>

#include "fermarkov/errors.hpp"
#include "fermarkov/markov.hpp"
#include "fermarkov/states.hpp"
#include "fermarkov/sufficiency.hpp"
#include "support.hpp"

using namespace fermarkov;
using fermarkov::testing::max_abs;
using fermarkov::testing::state_of;

namespace {

StateDensity tracial(int n) {
  const int d = 1 << n;
  return state_of(Matrix::Identity(d, d) / static_cast<double>(d));
}

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvariantViolation;
}

bool sufficient_for_bc_marginal(const StateDensity& s, const RegionPartition& r) {
  const auto ab = region_subalgebra(s.alg(), r.AB());
  return is_sufficient(s.rho(), embedded_restriction(s, r.BC()), ab).overall;
}

}  // namespace

TEST(Analyze, Tracial) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  const auto t = analyze_triplet(tracial(3), r);
  EXPECT_TRUE(t.ssa.saturated);
  EXPECT_EQ(t.C.size(), 16);
  EXPECT_EQ(t.B.size(), 4);
  EXPECT_TRUE(t.a_in_C);
  EXPECT_TRUE(t.markov);
  EXPECT_TRUE(t.even);
}

TEST(Analyze, RandomStateIsNotMarkov) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  const auto t = analyze_triplet(random_state(3, 5, 0.1 / 8), r);
  EXPECT_FALSE(t.ssa.saturated);
  EXPECT_GT(t.ssa.gap, 1e-4);
  EXPECT_FALSE(t.markov);
  EXPECT_LE(t.ebc_c_in_b_residual, 2e-9);
}

TEST(Analyze, EvenStatesMarkovIffSaturated) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const StateDensity s = seed % 2 ? random_even_state(4, seed, 0.1 / 16)
                                    : make_product_markov(r, seed);
    const auto t = analyze_triplet(s, r);
    ASSERT_TRUE(t.even);
    EXPECT_EQ(t.markov, t.ssa.saturated) << seed;
    EXPECT_EQ(t.ssa.saturated, seed % 2 == 0) << seed;
    EXPECT_LE(t.ebc_c_in_b_residual, 2e-9);
  }
}

TEST(Analyze, ProductConstructionIsMarkov) {
  for (const auto& r : {RegionPartition::contiguous(1, 1, 1), RegionPartition::contiguous(1, 2, 1),
                        RegionPartition::make(4, {1}, {0, 3}, {2})}) {
    const auto s = make_product_markov(r, 11);
    const auto t = analyze_triplet(s, r);
    EXPECT_LE(t.ssa.gap, 1e-8);
    EXPECT_TRUE(t.a_in_C);
    EXPECT_TRUE(t.markov);
  }
}

TEST(Analyze, NonEvenSaturationWithoutMarkov) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  ProductOptions opts;
  opts.parity = ProductParity::EvenNonEven;
  const auto s = make_product_markov(r, 12, opts);
  const auto t = analyze_triplet(s, r);
  EXPECT_TRUE(t.ssa.saturated);
  EXPECT_FALSE(t.even);
  // the verdict is the conjunction, whatever the membership outcome
  EXPECT_EQ(t.markov, t.ssa.saturated && t.a_in_C);
  const auto f = factorize(s, t);
  EXPECT_EQ(t.markov, f.y_parity == FactorParity::Even);
}

TEST(Analyze, SaturationMatchesSufficiency) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  ProductOptions noneven;
  noneven.parity = ProductParity::EvenNonEven;
  const StateDensity states[] = {random_state(3, 1, 0.1 / 8), random_even_state(3, 2, 0.1 / 8),
                                 make_product_markov(r, 3), make_product_markov(r, 4, noneven),
                                 tracial(3)};
  for (const auto& s : states) {
    EXPECT_EQ(analyze_triplet(s, r).ssa.saturated, sufficient_for_bc_marginal(s, r));
  }
}

TEST(Factorize, RecoversProduct) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = make_product_markov(r, seed);
    const auto f = factorize(s, r);
    EXPECT_LE((f.x * f.y - s.rho()).norm(), 1e-8);
    EXPECT_LE(f.product_residual, 1e-8);
    EXPECT_LE(f.commute_residual, 1e-9);
    EXPECT_LE(f.x_region_residual, 1e-9);
    EXPECT_LE(f.y_region_residual, 1e-8);
    EXPECT_GT(f.x_min_eig, 0.0);
    EXPECT_GT(f.y_min_eig, 0.0);
    EXPECT_EQ(f.y_parity, FactorParity::Even);
    ASSERT_TRUE(f.even_factors.has_value());
    const auto& [xe, ye] = *f.even_factors;
    EXPECT_LE((xe * ye - s.rho()).norm(), 1e-8);
    EXPECT_LE(max_abs(s.alg().theta(xe) - xe), 1e-9);
    EXPECT_LE(max_abs(s.alg().theta(ye) - ye), 1e-9);
  }
}

TEST(Factorize, Tracial) {
  const auto f = factorize(tracial(3), RegionPartition::contiguous(1, 1, 1));
  EXPECT_LE(f.commute_residual, 1e-14);
  EXPECT_LE(max_abs(f.y - f.y(0, 0) * Matrix::Identity(8, 8)), 1e-12);
}

TEST(Factorize, RequiresSaturation) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  EXPECT_EQ(error_kind([&] { factorize(random_state(3, 7, 0.1 / 8), r); }),
            ErrorKind::NotSaturated);
}

TEST(Factorize, NonEvenFactor) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  ProductOptions opts;
  opts.parity = ProductParity::EvenNonEven;
  const auto s = make_product_markov(r, 8, opts);
  const auto f = factorize(s, r);
  EXPECT_EQ(f.y_parity, FactorParity::NonEven);
  EXPECT_GT(f.y_odd_norm, 1e-6);
  EXPECT_LE(f.product_residual, 1e-8);
  EXPECT_FALSE(f.even_factors.has_value());
}

TEST(Central, TracialHasTrivialB) {
  const auto cs = central_structure(tracial(3), RegionPartition::contiguous(1, 1, 1));
  EXPECT_EQ(cs.m, 1);
  EXPECT_EQ(cs.k, 1);
  ASSERT_EQ(cs.Q.size(), 1u);
  EXPECT_LE(max_abs(cs.Q[0] - Matrix::Identity(8, 8)), 1e-10);
}

TEST(Central, SwappedPair) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  const auto [s, design] = make_block_markov(r, 3, 0, 1);
  const auto cs = central_structure(s, r);
  EXPECT_EQ(cs.m, 2);
  EXPECT_EQ(cs.k, 0);
  ASSERT_EQ(cs.Q.size(), 2u);
  const double rank = cs.P[0].trace().real() + cs.P[1].trace().real();
  EXPECT_NEAR(cs.Q[0].trace().real(), rank / 2.0, 1e-9);
  EXPECT_NEAR(cs.Q[1].trace().real(), rank / 2.0, 1e-9);
  EXPECT_LE(cs.projection_residual, 1e-9);
  EXPECT_LE(cs.orthogonality_residual, 1e-10);
  EXPECT_LE(cs.completeness_residual, 1e-9);
  EXPECT_LE(cs.pair_sum_residual, 1e-10);
  EXPECT_LE(cs.q_central_residual, 1e-9);
  EXPECT_LE(max_abs(s.alg().theta(cs.P[0]) - cs.P[1]), 1e-8);
}

TEST(Central, Preconditions) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  EXPECT_EQ(error_kind([&] { central_structure(random_state(3, 9, 0.1 / 8), r); }),
            ErrorKind::NotEven);
  EXPECT_EQ(error_kind([&] { central_structure(random_even_state(3, 9, 0.1 / 8), r); }),
            ErrorKind::NotMarkov);
}

TEST(Decompose, Tracial) {
  const auto d = decompose_even(tracial(3), RegionPartition::contiguous(1, 1, 1));
  ASSERT_EQ(d.blocks.size(), 1u);
  EXPECT_EQ(d.blocks[0].parity, BlockParity::ThetaFixed);
  EXPECT_LE(d.reassembly_residual, 1e-12);
}

TEST(Decompose, DesignedBlocksRoundTrip) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  const std::pair<int, int> designs[] = {{1, 0}, {2, 0}, {0, 1}, {1, 1}};
  for (auto [k, p] : designs) {
    const auto [s, design] = make_block_markov(r, 17, k, p);
    const auto d = decompose_even(s, r);
    EXPECT_EQ(d.fixed_count(), k) << k << "," << p;
    EXPECT_EQ(d.pair_count(), p) << k << "," << p;
    EXPECT_LE(d.reassembly_residual, 1e-8);
    EXPECT_LE(d.lemma_c_defect, 1e-8);
    EXPECT_LE(d.central.projection_residual, 1e-9);
    Matrix sum = Matrix::Zero(s.alg().dim(), s.alg().dim());
    for (const auto& b : d.blocks) {
      EXPECT_LE(b.x_member_residual, 1e-8);
      EXPECT_LE(b.y_member_residual, 1e-8);
      if (b.parity == BlockParity::ThetaPair) {
        EXPECT_LE(b.theta_image_residual, 1e-9);
        EXPECT_LE(b.pair_reassembly_residual, 1e-8);
        const Matrix zw = b.x * b.y;
        sum += zw + s.alg().theta(zw);
      } else {
        sum += b.x * b.y;
      }
    }
    EXPECT_LE((sum - s.rho()).norm(), 1e-8);
    for (std::size_t i = 1; i < d.blocks.size(); ++i) {
      if (d.blocks[i].parity == d.blocks[i - 1].parity) {
        EXPECT_GE(d.blocks[i - 1].trace, d.blocks[i].trace - 1e-12);
      }
    }
  }
}

TEST(Decompose, Deterministic) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  const auto [s, design] = make_block_markov(r, 21, 1, 1);
  const auto a = decompose_even(s, r);
  const auto b = decompose_even(s, r);
  ASSERT_EQ(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    EXPECT_EQ(max_abs(a.blocks[i].projection - b.blocks[i].projection), 0.0);
  }
}

TEST(Lemmas, TracialAndDesigned) {
  const auto r3 = RegionPartition::contiguous(1, 1, 1);
  const auto t = validate_structure_lemmas(tracial(3), r3);
  EXPECT_LE(t.c_defect, 1e-10);
  EXPECT_LE(t.ccom_defect, 1e-10);
  EXPECT_LE(t.b_defect, 1e-10);
  EXPECT_EQ(t.dim_c, 16);
  EXPECT_EQ(t.dim_b, 4);
  const auto r = RegionPartition::contiguous(1, 2, 1);
  for (auto [k, p] : {std::pair{1, 1}, std::pair{0, 1}, std::pair{2, 0}}) {
    const auto [s, design] = make_block_markov(r, 5, k, p);
    const auto rep = validate_structure_lemmas(s, r);
    EXPECT_LE(rep.c_defect, 1e-8);
    EXPECT_LE(rep.ccom_defect, 1e-8);
    EXPECT_LE(rep.b_defect, 1e-8);
    EXPECT_EQ(rep.dim_ccom, rep.dim_rel_plus + rep.dim_rel_minus);
  }
  EXPECT_EQ(error_kind([&] { validate_structure_lemmas(random_state(3, 2, 0.1 / 8), r3); }),
            ErrorKind::NotEven);
}
