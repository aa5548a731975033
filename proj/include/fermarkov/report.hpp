#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fermarkov/markov.hpp"

namespace fermarkov {

inline constexpr int kSchemaVersion = 1;

std::string tool_version();

/// FNV-1a 64-bit hash, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// A residual with the tolerance it was judged against; pass iff value <= tol.
struct Check {
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;

  static Check make(double value, double tol) { return {value, tol, value <= tol}; }
  bool consistent() const { return pass == (value <= tol); }
  bool operator==(const Check&) const = default;
};

struct SsaSummary {
  double s_total = 0.0;
  double s_ab = 0.0;
  double s_bc = 0.0;
  double s_b = 0.0;
  double gap_relative = 0.0;
  /// value = gap, tol = tol_equality
  Check saturation;
  bool operator==(const SsaSummary&) const = default;
};

struct TripletSummary {
  int dim_c = 0;
  int dim_b = 0;
  /// worst residual of a_i, a_i^* in C against tol_member (1 + |a_i|_tau)
  Check a_in_c;
  Check ebc_c_in_b;
  /// value = |rho - Theta(rho)|_F
  Check parity;
  bool even = false;
  bool markov = false;
  bool operator==(const TripletSummary&) const = default;
};

struct FactorSummary {
  Check commute;
  Check product;
  Check x_region;
  Check y_region;
  Check y_commutant;
  double x_min_eig = 0.0;
  double y_min_eig = 0.0;
  /// value = |y_-|_F; pass means y is even
  Check y_even;
  bool operator==(const FactorSummary&) const = default;
};

struct BlockEntry {
  std::string parity;  // "theta_fixed" or "theta_pair"
  double trace = 0.0;
  Check x_member;
  Check y_member;
  bool operator==(const BlockEntry&) const = default;
};

struct BlockSummary {
  int fixed_count = 0;
  int pair_count = 0;
  std::vector<BlockEntry> blocks;
  Check projection;
  Check orthogonality;
  Check completeness;
  Check reassembly;
  Check lemma_c;
  bool operator==(const BlockSummary&) const = default;
};

struct AnalysisDocument {
  int schema_version = kSchemaVersion;
  std::string tool_version;
  std::string input_digest;
  int n_sites = 0;
  std::string regions;
  Tolerances tolerances;
  SsaSummary ssa;
  TripletSummary triplet;
  std::optional<FactorSummary> factorization;
  std::optional<BlockSummary> blocks;
  std::map<std::string, double> timings;
  bool operator==(const AnalysisDocument&) const = default;
};

SsaSummary summarize(const SsaReport& ssa);
TripletSummary summarize(const TripletAnalysis& t, const Tolerances& tol);
FactorSummary summarize(const Factorization& f, const Tolerances& tol);
BlockSummary summarize(const BlockDecomposition& d, const Tolerances& tol);

/// Recomputes every verdict from the recorded residuals and compares.
bool verdicts_consistent(const AnalysisDocument& doc);

enum class Format { Json, Text };
Format parse_format(const std::string& text);

std::string emit(const AnalysisDocument& doc, Format format);
/// Inverse of emit(doc, Format::Json). Throws ParseError.
AnalysisDocument parse_document(const std::string& json_text);

}  // namespace fermarkov
