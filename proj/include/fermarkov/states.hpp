#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fermarkov/markov.hpp"
#include "fermarkov/quantum_info.hpp"
#include "fermarkov/subalgebra.hpp"

namespace fermarkov {

/// Independent stream `stream` of a base seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// rho = (1 - N floor) G G^* / Tr(G G^*) + floor I with G complex Gaussian.
/// floor must lie in (0, 2^-n]; floor = 2^-n gives the tracial state.
StateDensity random_state(int n, std::uint64_t seed, double floor);
/// (rho + Theta(rho)) / 2 of random_state.
StateDensity random_even_state(int n, std::uint64_t seed, double floor);

enum class ProductParity { EvenEven, EvenNonEven };

struct ProductOptions {
  ProductParity parity = ProductParity::EvenEven;
  /// use x = I, so rho = y / Tr y
  bool identity_x = false;
  int retries = 5;
};

/// rho = x y / Tr(x y) with x > 0 even in A_AB and y > 0 in A_C. For EvenEven
/// y is even as well; for EvenNonEven y keeps its odd part, which still
/// commutes with the even x.
StateDensity make_product_markov(const RegionPartition& regions, std::uint64_t seed,
                                 const ProductOptions& opts = {});

/// What make_block_markov built: projections P_j of B, Theta-fixed first then
/// Theta-swapped pairs (partner after representative), and the factors.
struct BlockDesign {
  std::vector<Matrix> P;
  int k_fixed = 0;
  int n_pairs = 0;
  Matrix x;
  Matrix y;
};

/// Even Markov state rho = x y with central support on designed projections
/// of A_B. Needs k_fixed + 2 n_pairs <= 2^|B|.
std::pair<StateDensity, BlockDesign> make_block_markov(const RegionPartition& regions,
                                                       std::uint64_t seed, int k_fixed,
                                                       int n_pairs);

/// (1 - eps) rho + eps sigma with sigma a random (even, if keep_even) state.
StateDensity perturb(const StateDensity& state, double epsilon, std::uint64_t seed,
                     bool keep_even = true);

enum class GeneratorKind { Random, RandomEven, ProductMarkov, BlockMarkov, Perturbed };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& text);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Random;
  std::uint64_t seed = 0;
  RegionPartition regions;
  /// faithfulness floor as a fraction of 2^-n
  double floor_fraction = 0.1;
  ProductParity parity = ProductParity::EvenEven;
  int k_fixed = 1;
  int n_pairs = 0;
  /// Perturbed: mixing weight applied to an EvenEven product state
  double epsilon = 1e-3;
  bool keep_even = true;
};

StateDensity generate(const GeneratorSpec& spec);

}  // namespace fermarkov
