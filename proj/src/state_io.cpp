#include "fermarkov/state_io.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include "fermarkov/errors.hpp"

namespace fermarkov {

using nlohmann::json;

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

Sites sites_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of site indices");
  Sites s;
  for (const auto& v : j) {
    if (!v.is_number_integer()) fail(where, "site index must be an integer");
    s.push_back(v.get<int>());
  }
  return s;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return json{{"dim", m.rows()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("data")) {
    fail(where, "matrix needs 'dim' and 'data'");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0) {
    fail(where + "/dim", "must be a positive integer");
  }
  const auto dim = j["dim"].get<Eigen::Index>();
  const json& data = j["data"];
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != dim * dim) {
    fail(where + "/data", "expected " + std::to_string(dim * dim) + " [re, im] entries");
  }
  Matrix m(dim, dim);
  for (Eigen::Index k = 0; k < dim * dim; ++k) {
    const json& e = data[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      fail(where + "/data/" + std::to_string(k), "entry must be [re, im]");
    }
    m(k / dim, k % dim) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

std::string dump_state_file(const StateFile& f) {
  json j;
  j["version"] = 1;
  j["n_sites"] = f.n_sites;
  j["regions"] = json{{"A", f.regions.A}, {"B", f.regions.B}, {"C", f.regions.C}};
  j["matrix"] = matrix_to_json(f.matrix);
  if (f.metadata) j["metadata"] = *f.metadata;
  return j.dump() + "\n";
}

StateFile parse_state_file(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source + ":" + line_col(text, e.byte), e.what());
  }
  if (!j.is_object()) fail(source, "top level must be an object");
  if (!j.contains("version") || j["version"] != 1) fail(source + ":/version", "must be 1");
  if (!j.contains("n_sites") || !j["n_sites"].is_number_integer()) {
    fail(source + ":/n_sites", "missing or not an integer");
  }
  StateFile f;
  f.n_sites = j["n_sites"].get<int>();
  if (f.n_sites < 1 || f.n_sites > CarAlgebra::kMaxSites) {
    fail(source + ":/n_sites", "must lie in 1.." + std::to_string(CarAlgebra::kMaxSites));
  }
  if (!j.contains("regions") || !j["regions"].is_object()) {
    fail(source + ":/regions", "missing regions object");
  }
  const json& r = j["regions"];
  for (const char* key : {"A", "B", "C"}) {
    if (!r.contains(key)) fail(source + ":/regions", std::string("missing region ") + key);
  }
  try {
    f.regions = RegionPartition::make(f.n_sites, sites_from_json(r["A"], source + ":/regions/A"),
                                      sites_from_json(r["B"], source + ":/regions/B"),
                                      sites_from_json(r["C"], source + ":/regions/C"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    fail(source + ":/regions", e.what());
  }
  if (!j.contains("matrix")) fail(source + ":/matrix", "missing matrix");
  f.matrix = matrix_from_json(j["matrix"], source + ":/matrix");
  if (f.matrix.rows() != (Eigen::Index{1} << f.n_sites)) {
    fail(source + ":/matrix/dim", "dim must equal 2^n_sites");
  }
  if (j.contains("metadata")) f.metadata = j["metadata"];
  return f;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorKind::ParseError, path + ": write failed");
}

StateFile read_state_file(const std::string& path) {
  return parse_state_file(read_text_file(path), path);
}

StateDensity load_state(const StateFile& f, const std::string& source) {
  try {
    return StateDensity(std::make_shared<const CarAlgebra>(f.n_sites), f.matrix);
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + e.what());
  }
}

}  // namespace fermarkov
