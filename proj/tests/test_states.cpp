#include <gtest/gtest.h>

#include <set>

#include "fermarkov/errors.hpp"
#include "fermarkov/markov.hpp"
#include "fermarkov/states.hpp"
#include "support.hpp"

using namespace fermarkov;
using fermarkov::testing::max_abs;

TEST(Seeds, DerivedStreamsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (std::uint64_t k = 0; k < 5; ++k) seen.insert(derive_seed(s, k));
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
}

TEST(Random, FaithfulWithFloor) {
  for (int n = 1; n <= 4; ++n) {
    const double floor = 0.1 / (1 << n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = random_state(n, seed, floor);
      EXPECT_NEAR(s.rho().trace().real(), 1.0, 1e-12);
      EXPECT_GE(s.min_eig(), floor * (1 - 1e-9));
      EXPECT_LE(max_abs(s.rho() - s.rho().adjoint()), 1e-15);
    }
  }
  EXPECT_THROW(random_state(2, 1, 0.0), Error);
  EXPECT_THROW(random_state(2, 1, 0.5), Error);
}

TEST(Random, Reproducible) {
  EXPECT_EQ(max_abs(random_state(3, 9, 0.01).rho() - random_state(3, 9, 0.01).rho()), 0.0);
  EXPECT_GT(max_abs(random_state(3, 9, 0.01).rho() - random_state(3, 10, 0.01).rho()), 1e-3);
}

TEST(Random, EvenStates) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = random_even_state(3, seed, 0.01);
    EXPECT_TRUE(s.is_even());
    EXPECT_TRUE(s.faithful());
  }
  EXPECT_FALSE(random_state(3, 1, 0.01).is_even());
}

TEST(Product, FactorsCommuteAndSaturate) {
  const auto r = RegionPartition::make(4, {0}, {1, 3}, {2});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = make_product_markov(r, seed);
    EXPECT_TRUE(s.is_even());
    EXPECT_LE(ssa_gap(s, r).gap, 1e-8);
  }
}

TEST(Product, IdentityX) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  ProductOptions opts;
  opts.identity_x = true;
  const auto s = make_product_markov(r, 2, opts);
  // rho is then a function of the C site alone
  EXPECT_LE(max_abs(s.alg().cond_expect(s.rho(), r.C) - s.rho()), 1e-12);
}

TEST(Product, NonEvenParityMode) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  ProductOptions opts;
  opts.parity = ProductParity::EvenNonEven;
  const auto s = make_product_markov(r, 3, opts);
  EXPECT_FALSE(s.is_even());
  EXPECT_LE(ssa_gap(s, r).gap, 1e-8);
}

TEST(Block, DesignInvariants) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  for (auto [k, p] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
    const auto [s, d] = make_block_markov(r, 4, k, p);
    EXPECT_EQ(d.k_fixed, k);
    EXPECT_EQ(d.n_pairs, p);
    ASSERT_EQ(static_cast<int>(d.P.size()), k + 2 * p);
    const int dim = s.alg().dim();
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < d.P.size(); ++i) {
      EXPECT_LE(max_abs(d.P[i] * d.P[i] - d.P[i]), 1e-12);
      EXPECT_LE(max_abs(s.alg().cond_expect(d.P[i], r.B) - d.P[i]), 1e-12);
      for (std::size_t j = i + 1; j < d.P.size(); ++j) EXPECT_LE(max_abs(d.P[i] * d.P[j]), 1e-12);
      sum += d.P[i];
    }
    EXPECT_LE(max_abs(sum - Matrix::Identity(dim, dim)), 1e-12);
    for (int i = 0; i < k; ++i) EXPECT_LE(max_abs(s.alg().theta(d.P[i]) - d.P[i]), 1e-12);
    for (int l = 0; l < p; ++l) {
      EXPECT_LE(max_abs(s.alg().theta(d.P[k + 2 * l]) - d.P[k + 2 * l + 1]), 1e-12);
    }
    EXPECT_LE((d.x * d.y - s.rho() * (d.x * d.y).trace().real()).norm(), 1e-10);
    EXPECT_TRUE(s.is_even());
    EXPECT_LE(ssa_gap(s, r).gap, 1e-8);
  }
}

TEST(Block, RegionTooSmall) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  try {
    make_block_markov(r, 1, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RegionTooSmall);
  }
}

TEST(Perturb, MixesAndKeepsParity) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  const auto base = make_product_markov(r, 5);
  const auto s = perturb(base, 1e-3, 6);
  EXPECT_TRUE(s.is_even());
  const double dist = (s.rho() - base.rho()).norm();
  EXPECT_GT(dist, 0.0);
  EXPECT_LE(dist, 2e-3);
  EXPECT_FALSE(perturb(base, 0.1, 6, false).is_even());
  EXPECT_THROW(perturb(base, 1.5, 6), Error);
}

TEST(Generate, KindsAndNames) {
  for (auto kind : {GeneratorKind::Random, GeneratorKind::RandomEven, GeneratorKind::ProductMarkov,
                    GeneratorKind::BlockMarkov, GeneratorKind::Perturbed}) {
    EXPECT_EQ(parse_generator_kind(to_string(kind)), kind);
    GeneratorSpec spec;
    spec.kind = kind;
    spec.seed = 7;
    spec.regions = RegionPartition::contiguous(1, 2, 1);
    const auto a = generate(spec);
    const auto b = generate(spec);
    EXPECT_EQ(max_abs(a.rho() - b.rho()), 0.0);
    EXPECT_TRUE(a.faithful());
  }
  EXPECT_THROW(parse_generator_kind("gibbs"), Error);
}
