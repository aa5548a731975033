#pragma once

#include <optional>
#include <string>

#include "fermarkov/quantum_info.hpp"
#include "json.hpp"

namespace fermarkov {

/// On-disk state:
///   {"version": 1, "n_sites": n, "regions": {"A": [...], "B": [...], "C": [...]},
///    "matrix": {"dim": 2^n, "data": [[re, im], ...]}, "metadata": {...}}
/// with data in row-major order.
struct StateFile {
  int n_sites = 0;
  RegionPartition regions;
  Matrix matrix;
  std::optional<nlohmann::json> metadata;
};

nlohmann::json matrix_to_json(const Matrix& m);
/// `where` names the source in error messages.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

std::string dump_state_file(const StateFile& f);
/// Syntax errors report file:line:column; schema errors report the JSON path.
StateFile parse_state_file(const std::string& text, const std::string& source = "<input>");
StateFile read_state_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Validated density of the file; StateDensity violations are rethrown with
/// the source name attached.
StateDensity load_state(const StateFile& f, const std::string& source = "<input>");

}  // namespace fermarkov
