#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lde/dynsys.hpp"
#include "lde/embedding.hpp"
#include "lde/localizability.hpp"
#include "lde/spectral.hpp"

namespace lde::io {

using json = nlohmann::json;

/// Parses "p/q", a decimal literal, or a JSON number. "p/q" is evaluated as
/// p / q in double arithmetic, i.e. rounded to the nearest double.
double parse_scalar(const json& value);
double parse_scalar(std::string_view text);

/// Row-major array of arrays under `key`; validates shape against "n" when present.
Matrix matrix_from_json(const json& doc, const std::string& key);
json matrix_to_json(const Matrix& M);

/// { "n": int, "A": [[...]] }
LinearSystem system_from_json(const json& doc);
json system_to_json(const LinearSystem& sys);

/// { "n": int, "W": [[...]] } plus optional "blocks" (0-based ground truth).
Matrix adjacency_from_json(const json& doc);
json adjacency_to_json(const Matrix& W, const std::vector<Index>& blocks = {});

/// { "kind": "coupled_cell", "d", "alpha", "beta", "gamma", "S", "epsilon" }
CoupledCellSystem coupled_from_json(const json& doc);
json coupled_to_json(const CoupledCellSystem& sys);
bool is_coupled_document(const json& doc);

json read_json(const std::filesystem::path& path);
/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);

/// Header "k,x1,...,xn"; doubles with 17 significant digits, '.' decimal point.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Locale-independent shortest-exact rendering with 17 significant digits.
std::string format_double(double value);

json complex_to_json(Complex z);
json complex_list_to_json(const ComplexVector& v);

/// Vertices are written 1-based.
json report_to_json(const LocalizabilityReport& report);
json companion_to_json(const CompanionModel& model);
CompanionModel companion_from_json(const json& doc);
json spectral_report_to_json(const SpectralReport& report);
json labels_to_json(const std::vector<Index>& labels);

}  // namespace lde::io
