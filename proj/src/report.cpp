#include "fermarkov/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "fermarkov/errors.hpp"
#include "json.hpp"

#ifndef FERMARKOV_VERSION
#define FERMARKOV_VERSION "0.0.0"
#endif

namespace fermarkov {

using nlohmann::json;

std::string tool_version() { return FERMARKOV_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

// tau-norm of a_i and a_i^* is 1/sqrt(2)
const double kGeneratorTauNorm = std::sqrt(0.5);

double member_tol(const Tolerances& tol, const Matrix& x) {
  return tol.tol_member * (1.0 + tau_norm(x));
}

}  // namespace

SsaSummary summarize(const SsaReport& ssa) {
  SsaSummary s;
  s.s_total = ssa.s_total;
  s.s_ab = ssa.s_ab;
  s.s_bc = ssa.s_bc;
  s.s_b = ssa.s_b;
  s.gap_relative = ssa.gap_relative;
  s.saturation = Check::make(ssa.gap, ssa.tol_equality);
  return s;
}

TripletSummary summarize(const TripletAnalysis& t, const Tolerances& tol) {
  TripletSummary s;
  s.dim_c = t.C.size();
  s.dim_b = t.B.size();
  s.a_in_c = Check::make(t.a_in_C_residual, tol.tol_member * (1.0 + kGeneratorTauNorm));
  s.ebc_c_in_b = Check::make(t.ebc_c_in_b_residual, tol.tol_member * 2.0);
  s.parity = Check::make(t.parity_defect, 1e-10);
  s.even = t.even;
  s.markov = t.markov;
  return s;
}

FactorSummary summarize(const Factorization& f, const Tolerances& tol) {
  FactorSummary s;
  s.commute = Check::make(f.commute_residual, 1e-9);
  s.product = Check::make(f.product_residual, 1e-8);
  s.x_region = Check::make(f.x_region_residual, member_tol(tol, f.x));
  s.y_region = Check::make(f.y_region_residual, member_tol(tol, f.y));
  s.y_commutant = Check::make(f.y_commutant_residual, member_tol(tol, f.y));
  s.x_min_eig = f.x_min_eig;
  s.y_min_eig = f.y_min_eig;
  s.y_even = Check::make(f.y_odd_norm, 1e-9 * std::max(1.0, f.y.norm()));
  return s;
}

BlockSummary summarize(const BlockDecomposition& d, const Tolerances& tol) {
  BlockSummary s;
  s.fixed_count = d.fixed_count();
  s.pair_count = d.pair_count();
  for (const Block& b : d.blocks) {
    BlockEntry e;
    e.parity = b.parity == BlockParity::ThetaFixed ? "theta_fixed" : "theta_pair";
    e.trace = b.trace;
    e.x_member = Check::make(b.x_member_residual, member_tol(tol, b.x));
    e.y_member = Check::make(b.y_member_residual, member_tol(tol, b.y));
    s.blocks.push_back(e);
  }
  s.projection = Check::make(d.central.projection_residual, 1e-9);
  s.orthogonality = Check::make(d.central.orthogonality_residual, 1e-9);
  s.completeness = Check::make(d.central.completeness_residual, 1e-9);
  s.reassembly = Check::make(d.reassembly_residual, 1e-8);
  s.lemma_c = Check::make(d.lemma_c_defect, 1e-8);
  return s;
}

bool verdicts_consistent(const AnalysisDocument& doc) {
  bool ok = doc.ssa.saturation.consistent() && doc.triplet.a_in_c.consistent() &&
            doc.triplet.ebc_c_in_b.consistent() && doc.triplet.parity.consistent();
  ok = ok && doc.triplet.even == doc.triplet.parity.pass;
  ok = ok && doc.triplet.markov == (doc.ssa.saturation.pass && doc.triplet.a_in_c.pass);
  if (doc.factorization) {
    const auto& f = *doc.factorization;
    for (const Check* c : {&f.commute, &f.product, &f.x_region, &f.y_region, &f.y_commutant,
                           &f.y_even}) {
      ok = ok && c->consistent();
    }
  }
  if (doc.blocks) {
    const auto& b = *doc.blocks;
    for (const Check* c :
         {&b.projection, &b.orthogonality, &b.completeness, &b.reassembly, &b.lemma_c}) {
      ok = ok && c->consistent();
    }
    int fixed = 0;
    for (const auto& e : b.blocks) {
      ok = ok && e.x_member.consistent() && e.y_member.consistent();
      fixed += e.parity == "theta_fixed" ? 1 : 0;
    }
    ok = ok && fixed == b.fixed_count &&
         static_cast<int>(b.blocks.size()) == b.fixed_count + b.pair_count;
  }
  return ok;
}

void to_json(json& j, const Check& c) { j = json{{"value", c.value}, {"tol", c.tol}, {"pass", c.pass}}; }
void from_json(const json& j, Check& c) {
  j.at("value").get_to(c.value);
  j.at("tol").get_to(c.tol);
  j.at("pass").get_to(c.pass);
}

void to_json(json& j, const Tolerances& t) {
  j = json{{"tol_equality", t.tol_equality},
           {"tol_member", t.tol_member},
           {"rank_tol", t.rank_tol},
           {"seed", t.seed}};
}
void from_json(const json& j, Tolerances& t) {
  j.at("tol_equality").get_to(t.tol_equality);
  j.at("tol_member").get_to(t.tol_member);
  j.at("rank_tol").get_to(t.rank_tol);
  j.at("seed").get_to(t.seed);
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SsaSummary, s_total, s_ab, s_bc, s_b, gap_relative, saturation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TripletSummary, dim_c, dim_b, a_in_c, ebc_c_in_b, parity, even,
                                   markov)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FactorSummary, commute, product, x_region, y_region,
                                   y_commutant, x_min_eig, y_min_eig, y_even)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BlockEntry, parity, trace, x_member, y_member)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BlockSummary, fixed_count, pair_count, blocks, projection,
                                   orthogonality, completeness, reassembly, lemma_c)

namespace {

json to_json_document(const AnalysisDocument& d) {
  json j;
  j["schema_version"] = d.schema_version;
  j["tool_version"] = d.tool_version;
  j["input_digest"] = d.input_digest;
  j["n_sites"] = d.n_sites;
  j["regions"] = d.regions;
  j["tolerances"] = d.tolerances;
  j["ssa"] = d.ssa;
  j["triplet"] = d.triplet;
  if (d.factorization) j["factorization"] = *d.factorization;
  if (d.blocks) j["blocks"] = *d.blocks;
  j["timings"] = d.timings;
  return j;
}

void text_line(std::ostream& os, const std::string& name, const Check& c) {
  os << name << ": " << (c.pass ? "pass" : "fail") << " (" << c.value << " <= " << c.tol << ")\n";
}

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "json") return Format::Json;
  if (text == "text") return Format::Text;
  throw Error(ErrorKind::ParseError, "unknown format '" + text + "'");
}

std::string emit(const AnalysisDocument& doc, Format format) {
  if (format == Format::Json) return to_json_document(doc).dump(2) + "\n";
  std::ostringstream os;
  os.precision(6);
  os << "schema_version: " << doc.schema_version << "\n";
  os << "tool_version: " << doc.tool_version << "\n";
  os << "input_digest: " << doc.input_digest << "\n";
  os << "regions: " << doc.regions << "\n";
  text_line(os, "ssa.saturated", doc.ssa.saturation);
  text_line(os, "triplet.a_in_C", doc.triplet.a_in_c);
  text_line(os, "triplet.even", doc.triplet.parity);
  os << "triplet.markov: " << (doc.triplet.markov ? "true" : "false") << "\n";
  if (doc.factorization) {
    const auto& f = *doc.factorization;
    text_line(os, "factorization.commute", f.commute);
    text_line(os, "factorization.product", f.product);
    text_line(os, "factorization.x_in_AB", f.x_region);
    text_line(os, "factorization.y_in_BC", f.y_region);
    text_line(os, "factorization.y_even", f.y_even);
  }
  if (doc.blocks) {
    const auto& b = *doc.blocks;
    os << "blocks.theta_fixed: " << b.fixed_count << "\n";
    os << "blocks.theta_pair: " << b.pair_count << "\n";
    text_line(os, "blocks.projection", b.projection);
    text_line(os, "blocks.orthogonality", b.orthogonality);
    text_line(os, "blocks.reassembly", b.reassembly);
  }
  for (const auto& [name, sec] : doc.timings) os << "time." << name << ": " << sec << " s\n";
  return os.str();
}

AnalysisDocument parse_document(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    AnalysisDocument d;
    j.at("schema_version").get_to(d.schema_version);
    if (d.schema_version != kSchemaVersion) {
      throw Error(ErrorKind::ParseError,
                  "unsupported schema_version " + std::to_string(d.schema_version));
    }
    j.at("tool_version").get_to(d.tool_version);
    j.at("input_digest").get_to(d.input_digest);
    j.at("n_sites").get_to(d.n_sites);
    j.at("regions").get_to(d.regions);
    j.at("tolerances").get_to(d.tolerances);
    j.at("ssa").get_to(d.ssa);
    j.at("triplet").get_to(d.triplet);
    if (j.contains("factorization")) d.factorization = j.at("factorization").get<FactorSummary>();
    if (j.contains("blocks")) d.blocks = j.at("blocks").get<BlockSummary>();
    j.at("timings").get_to(d.timings);
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("analysis document: ") + e.what());
  }
}

}  // namespace fermarkov
