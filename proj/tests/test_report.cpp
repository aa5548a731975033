#include <gtest/gtest.h>

#include "fermarkov/errors.hpp"
#include "fermarkov/report.hpp"
#include "fermarkov/state_io.hpp"
#include "fermarkov/states.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace fermarkov;
using nlohmann::json;

namespace {

AnalysisDocument document_for(const StateDensity& s, const RegionPartition& r, bool blocks) {
  const Tolerances tol;
  AnalysisDocument doc;
  doc.tool_version = tool_version();
  doc.input_digest = fnv1a_hex("input");
  doc.n_sites = s.n_sites();
  doc.regions = r.to_string();
  doc.tolerances = tol;
  const auto t = analyze_triplet(s, r, tol);
  doc.ssa = summarize(t.ssa);
  doc.triplet = summarize(t, tol);
  if (t.ssa.saturated) doc.factorization = summarize(factorize(s, t, tol), tol);
  if (blocks) doc.blocks = summarize(decompose_even(s, r, tol), tol);
  doc.timings["analyze"] = 0.125;
  return doc;
}

std::string error_text(const std::string& text) {
  try {
    parse_state_file(text, "state.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

}  // namespace

TEST(Check, Threshold) {
  EXPECT_TRUE(Check::make(3.2e-9, 1e-8).pass);
  EXPECT_FALSE(Check::make(3.2e-8, 1e-8).pass);
  EXPECT_TRUE(Check::make(1e-8, 1e-8).pass);
  Check forged{1.0, 1e-8, true};
  EXPECT_FALSE(forged.consistent());
}

TEST(Digest, Fnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Document, RoundTripWithAllSections) {
  const auto r = RegionPartition::contiguous(1, 2, 1);
  const auto [s, design] = make_block_markov(r, 3, 1, 1);
  const auto doc = document_for(s, r, true);
  ASSERT_TRUE(doc.factorization.has_value());
  ASSERT_TRUE(doc.blocks.has_value());
  EXPECT_TRUE(verdicts_consistent(doc));
  const auto back = parse_document(emit(doc, Format::Json));
  EXPECT_TRUE(back == doc);
  EXPECT_EQ(emit(back, Format::Json), emit(doc, Format::Json));
}

TEST(Document, OptionalSectionsOmitted) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  const auto doc = document_for(random_state(3, 4, 0.0125), r, false);
  const json j = json::parse(emit(doc, Format::Json));
  EXPECT_FALSE(j.contains("factorization"));
  EXPECT_FALSE(j.contains("blocks"));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_FALSE(j["triplet"]["markov"].get<bool>());
  EXPECT_TRUE(parse_document(j.dump()) == doc);
}

TEST(Document, DetectsInconsistentVerdicts) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  auto doc = document_for(make_product_markov(r, 1), r, false);
  EXPECT_TRUE(verdicts_consistent(doc));
  doc.triplet.markov = !doc.triplet.markov;
  EXPECT_FALSE(verdicts_consistent(doc));
}

TEST(Document, TextFormat) {
  const auto r = RegionPartition::contiguous(1, 1, 1);
  const std::string text = emit(document_for(make_product_markov(r, 1), r, false), Format::Text);
  EXPECT_NE(text.find("triplet.markov: true"), std::string::npos);
  EXPECT_NE(text.find("ssa.saturated: pass"), std::string::npos);
  EXPECT_EQ(parse_format("text"), Format::Text);
  EXPECT_THROW(parse_format("xml"), Error);
}

TEST(Document, ParseErrors) {
  EXPECT_THROW(parse_document("{"), Error);
  EXPECT_THROW(parse_document(R"({"schema_version": 99})"), Error);
  EXPECT_THROW(parse_document(R"({"schema_version": 1})"), Error);
}

TEST(StateFile, RoundTrip) {
  StateFile f;
  f.n_sites = 3;
  f.regions = RegionPartition::make(3, {0}, {2}, {1});
  f.matrix = random_state(3, 2, 0.01).rho();
  f.metadata = json{{"seed", 2}};
  const auto back = parse_state_file(dump_state_file(f));
  EXPECT_EQ(back.n_sites, 3);
  EXPECT_EQ(back.regions.to_string(), f.regions.to_string());
  EXPECT_EQ((back.matrix - f.matrix).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((*back.metadata)["seed"], 2);
}

TEST(StateFile, SyntaxErrorsCarryLineAndColumn) {
  const std::string msg = error_text("{\n  \"version\": 1,\n  \"n_sites\": ]\n}");
  EXPECT_NE(msg.find("state.json:3:"), std::string::npos) << msg;
}

TEST(StateFile, SchemaErrorsCarryPath) {
  const json base = json::parse(dump_state_file(StateFile{
      3, RegionPartition::contiguous(1, 1, 1), Eigen::MatrixXcd::Identity(8, 8) / 8.0, std::nullopt}));
  EXPECT_NO_THROW(parse_state_file(base.dump()));
  EXPECT_NE(error_text(R"({"version": 2})").find("/version"), std::string::npos);
  json j = base;
  j["n_sites"] = 12;
  EXPECT_NE(error_text(j.dump()).find("/n_sites"), std::string::npos);
  j = base;
  j["n_sites"] = 4;
  j["regions"] = {{"A", {0}}, {"B", {1, 3}}, {"C", {2}}};
  EXPECT_NE(error_text(j.dump()).find("/matrix/dim"), std::string::npos);
  j["regions"]["B"] = {0};
  EXPECT_NE(error_text(j.dump()).find("/regions"), std::string::npos);
  j["regions"]["B"] = "x";
  EXPECT_NE(error_text(j.dump()).find("/regions/B"), std::string::npos);
  j = base;
  j["matrix"]["data"][1] = json::array({1.0});
  EXPECT_NE(error_text(j.dump()).find("/matrix/data/1"), std::string::npos);
}

TEST(StateFile, LoadValidatesDensity) {
  StateFile f;
  f.n_sites = 3;
  f.regions = RegionPartition::contiguous(1, 1, 1);
  f.matrix = Eigen::MatrixXcd::Identity(8, 8);
  try {
    load_state(f, "big.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("big.json"), std::string::npos);
  }
}
