#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipgrid/assign.hpp"
#include "lipgrid/encoder.hpp"
#include "lipgrid/geometry.hpp"
#include "lipgrid/regularity.hpp"

namespace lipgrid {

using Json = nlohmann::json;

struct FamilyFile {
  int d = 0;
  std::int64_t N = 0;
  std::int64_t M = 0;
  Rational c = 1;
  std::vector<TiledFamily> levels;
};

Json to_json(const FamilyFile& families);
FamilyFile families_from_json(const Json& j);

Json to_json(const GridDensity& rho, std::optional<double> eps = std::nullopt);
GridDensity density_from_json(const Json& j);

Json to_json(const SeparatedSet& set);
SeparatedSet separated_set_from_json(const Json& j);

Json to_json(const Assignment& a);
Assignment assignment_from_json(const Json& j);

Json to_json(const PiecewiseLinear1D& f);
PiecewiseLinear1D piecewise_linear_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// %.12g
std::string format_number(double x);

struct BoundsRow {
  std::int64_t n = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  std::uint64_t seed = 0;
  double time_ms = 0.0;
};

inline constexpr const char* kBoundsHeader = "n,lower,upper,exact,seed,time_ms";
std::string bounds_csv(const std::vector<BoundsRow>& rows);
// Throws IoError naming the offending line.
std::vector<BoundsRow> parse_bounds_csv(const std::string& text);

}  // namespace lipgrid
