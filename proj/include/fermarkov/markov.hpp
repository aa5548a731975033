#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fermarkov/quantum_info.hpp"
#include "fermarkov/subalgebra.hpp"

namespace fermarkov {

struct Tolerances {
  double tol_equality = kTolEquality;
  double tol_member = kTolMember;
  double rank_tol = kRankTol;
  /// seeds the random elements used by commutant and projection solvers
  std::uint64_t seed = 0x5eedULL;

  bool operator==(const Tolerances&) const = default;
};

/// Verdicts on a triplet A_A < A_AB < A together with the modular-flow
/// invariant algebras
///   C = { x in A_AB : rho_BC^{it} x rho_BC^{-it} in A_AB for all t },
///   B = { y in A_B  : rho_BC^{it} y rho_BC^{-it} in A_B  for all t }.
struct TripletAnalysis {
  RegionPartition regions;
  SsaReport ssa;
  Matrix rho_bc;  // E_BC(rho), the density of phi o E_BC
  SubalgebraBasis C;
  SubalgebraBasis B;
  bool a_in_C = false;
  double a_in_C_residual = 0.0;
  /// largest residual of E_BC(c) in B over the basis of C
  double ebc_c_in_b_residual = 0.0;
  bool even = false;
  double parity_defect = 0.0;
  bool markov = false;
};

TripletAnalysis analyze_triplet(const StateDensity& state, const RegionPartition& regions,
                                const Tolerances& tol = {});

enum class FactorParity { Even, NonEven };

/// rho = x y with x the density of phi restricted to C and y = x^{-1} rho.
struct Factorization {
  Matrix x;
  Matrix y;
  double x_region_residual = 0.0;  // x in A_AB
  double y_region_residual = 0.0;  // y in A_BC
  double y_commutant_residual = 0.0;  // |[y, c]| over the basis of C
  double commute_residual = 0.0;
  double product_residual = 0.0;
  double x_min_eig = 0.0;
  double y_min_eig = 0.0;
  double y_odd_norm = 0.0;
  FactorParity y_parity = FactorParity::Even;
  /// present for even states: x and y with odd parts removed
  std::optional<std::pair<Matrix, Matrix>> even_factors;
};

Factorization factorize(const StateDensity& state, const RegionPartition& regions,
                        const Tolerances& tol = {});
Factorization factorize(const StateDensity& state, const TripletAnalysis& analysis,
                        const Tolerances& tol = {});

/// Minimal central projections of B, ordered Theta-fixed first then swapped
/// pairs, and the minimal central projections Q_j of C built from them.
struct CentralStructure {
  std::vector<Matrix> P;
  std::vector<Matrix> Q;
  int m = 0;
  int k = 0;
  double projection_residual = 0.0;
  double orthogonality_residual = 0.0;
  double completeness_residual = 0.0;
  double pair_sum_residual = 0.0;
  double q_central_residual = 0.0;
};

CentralStructure central_structure(const StateDensity& state, const TripletAnalysis& analysis,
                                   const Tolerances& tol = {});
CentralStructure central_structure(const StateDensity& state, const RegionPartition& regions,
                                   const Tolerances& tol = {});

enum class BlockParity { ThetaFixed, ThetaPair };

struct Block {
  BlockParity parity = BlockParity::ThetaFixed;
  Matrix projection;  // Q_j for fixed blocks, E_l = Q_j + Q_{j+1} for pairs
  Matrix x;           // x_j, or z_l = Q_{k+2l+1} x
  Matrix y;           // y_j, or w_l = Q_{k+2l+1} y
  double trace = 0.0;  // Tr(projection rho)
  double x_member_residual = 0.0;
  double y_member_residual = 0.0;
  double theta_image_residual = 0.0;  // pairs: partner block against Theta(z), Theta(w)
  double pair_reassembly_residual = 0.0;  // pairs: z w + Theta(z w) against E rho E
};

struct BlockDecomposition {
  CentralStructure central;
  std::vector<Block> blocks;
  Factorization factors;
  double lemma_c_defect = 0.0;
  double y_in_ctilde_residual = 0.0;
  double reassembly_residual = 0.0;

  int fixed_count() const;
  int pair_count() const;
};

BlockDecomposition decompose_even(const StateDensity& state, const RegionPartition& regions,
                                  const Tolerances& tol = {});

struct StructureLemmaReport {
  /// C = A_A v B
  double c_defect = 0.0;
  /// C' = (B' n A_BC)_+ + (B' n A_BC)_- v_A
  double ccom_defect = 0.0;
  /// B' n A_BC = B~ v ((A_C)_+ + v_B (A_C)_-)
  double b_defect = 0.0;
  int dim_c = 0;
  int dim_b = 0;
  int dim_ccom = 0;
  int dim_rel_plus = 0;
  int dim_rel_minus = 0;
};

StructureLemmaReport validate_structure_lemmas(const StateDensity& state,
                                               const RegionPartition& regions,
                                               const Tolerances& tol = {});

/// Generators a_i, a_i^* of the given sites.
std::vector<Matrix> site_generators(const CarAlgebra& alg, const Sites& sites);

}  // namespace fermarkov
