#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fermarkov/car.hpp"

namespace fermarkov {

struct IdentityResult {
  std::string name;
  double worst = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SelftestReport {
  std::vector<IdentityResult> identities;
  /// wall time per n, index n - 1
  std::vector<double> seconds;
  bool ok = false;
};

/// Exact-algebra identities on n = 1..max_n sites: anticommutation relations,
/// the tau product property, graded commutation, v_I conjugation, the
/// matrix-unit identity and the conditional-expectation laws.
SelftestReport run_selftest(int max_n = 5,
                            StringConvention convention = StringConvention::JordanWigner,
                            double bound = 1e-10, std::uint64_t seed = 1);

}  // namespace fermarkov
