#include "lipgrid/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lipgrid/errors.hpp"

namespace lipgrid {

namespace {

Json point_to_json(const RationalPoint& p) {
  Json arr = Json::array();
  for (const auto& q : p) arr.push_back(to_string(q));
  return arr;
}

RationalPoint point_from_json(const Json& j) {
  RationalPoint p;
  for (const auto& v : j) p.push_back(parse_rational(v.get<std::string>()));
  return p;
}

template <class T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) throw IoError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception& e) {
    throw IoError(std::string("field '") + name + "': " + e.what());
  }
}

}  // namespace

Json to_json(const FamilyFile& f) {
  Json levels = Json::array();
  for (const auto& fam : f.levels) {
    Json anchors = Json::array();
    for (const auto& c : fam.cubes) anchors.push_back(point_to_json(c.anchor));
    Json offsets = Json::array();
    for (const auto& z : fam.offsets) offsets.push_back(point_to_json(z));
    levels.push_back({{"side", to_string(fam.side())}, {"anchors", anchors}, {"offsets", offsets}});
  }
  return Json{{"d", f.d}, {"N", f.N}, {"M", f.M}, {"c", to_string(f.c)}, {"levels", levels}};
}

FamilyFile families_from_json(const Json& j) {
  FamilyFile f;
  f.d = field<int>(j, "d");
  f.N = field<std::int64_t>(j, "N");
  f.M = field<std::int64_t>(j, "M");
  f.c = parse_rational(field<std::string>(j, "c"));
  std::size_t level = 1;
  for (const auto& lj : field<Json>(j, "levels")) {
    TiledFamily fam;
    fam.level = level++;
    Rational side = parse_rational(field<std::string>(lj, "side"));
    for (const auto& a : field<Json>(lj, "anchors")) {
      RationalPoint anchor = point_from_json(a);
      if (static_cast<int>(anchor.size()) != f.d) throw IoError("anchor dimension differs from d");
      fam.cubes.emplace_back(side, anchor);
    }
    if (lj.contains("offsets"))
      for (const auto& z : lj.at("offsets")) fam.offsets.push_back(point_from_json(z));
    f.levels.push_back(std::move(fam));
  }
  return f;
}

Json to_json(const GridDensity& rho, std::optional<double> eps) {
  Json j{{"d", rho.dim()}, {"m", rho.resolution()}, {"cells", rho.cells()},
         {"inf", rho.inf_value()}, {"sup", rho.sup_value()}};
  if (eps) j["eps"] = *eps;
  return j;
}

GridDensity density_from_json(const Json& j) {
  try {
    return GridDensity(field<int>(j, "d"), field<std::int64_t>(j, "m"), field<std::vector<double>>(j, "cells"));
  } catch (const PreconditionError& e) {
    throw IoError(std::string("invalid density: ") + e.what());
  }
}

Json to_json(const SeparatedSet& set) {
  return Json{{"d", set.d}, {"r", set.r}, {"n", set.n}, {"points", set.points}};
}

SeparatedSet separated_set_from_json(const Json& j) {
  SeparatedSet s;
  s.d = field<int>(j, "d");
  s.r = field<double>(j, "r");
  s.n = field<std::int64_t>(j, "n");
  s.points = field<std::vector<Point>>(j, "points");
  for (const auto& p : s.points)
    if (static_cast<int>(p.size()) != s.d) throw IoError("point dimension differs from d");
  return s;
}

Json to_json(const Assignment& a) {
  return Json{{"n", a.grid_n}, {"permutation", a.permutation}, {"bottleneck", a.bottleneck}};
}

Assignment assignment_from_json(const Json& j) {
  Assignment a;
  a.grid_n = field<std::int64_t>(j, "n");
  a.permutation = field<std::vector<std::size_t>>(j, "permutation");
  a.bottleneck = field<double>(j, "bottleneck");
  return a;
}

Json to_json(const PiecewiseLinear1D& f) {
  return Json{{"breakpoints", point_to_json(f.breakpoints)}, {"values", point_to_json(f.values)}};
}

PiecewiseLinear1D piecewise_linear_from_json(const Json& j) {
  PiecewiseLinear1D f;
  f.breakpoints = point_from_json(field<Json>(j, "breakpoints"));
  f.values = point_from_json(field<Json>(j, "values"));
  return f;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

Json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(1) + "\n"); }

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  std::string out = std::string(kBoundsHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + format_number(r.lower) + "," + format_number(r.upper) + "," +
           (r.exact ? format_number(*r.exact) : std::string()) + "," + std::to_string(r.seed) + "," +
           format_number(r.time_ms) + "\n";
  }
  return out;
}

std::vector<BoundsRow> parse_bounds_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBoundsHeader) throw IoError("CSV header must be '" + std::string(kBoundsHeader) + "'");
  std::vector<BoundsRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    auto fail = [&](const std::string& why) {
      return IoError("CSV row " + std::to_string(number) + " ('" + line + "'): " + why);
    };
    if (cols.size() != 6) throw fail("expected 6 columns, found " + std::to_string(cols.size()));
    auto number_of = [&](const std::string& s, const char* what) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        throw fail(std::string("column ") + what + " is not a number");
      }
      if (used != s.size() || !std::isfinite(v)) throw fail(std::string("column ") + what + " is not a number");
      return v;
    };
    BoundsRow r;
    double n = number_of(cols[0], "n");
    if (n != std::floor(n) || n < 1) throw fail("column n is not a positive integer");
    r.n = static_cast<std::int64_t>(n);
    r.lower = number_of(cols[1], "lower");
    r.upper = number_of(cols[2], "upper");
    if (!cols[3].empty()) r.exact = number_of(cols[3], "exact");
    double seed = number_of(cols[4], "seed");
    if (seed < 0 || seed != std::floor(seed)) throw fail("column seed is not a non-negative integer");
    r.seed = static_cast<std::uint64_t>(std::stoull(cols[4]));
    r.time_ms = number_of(cols[5], "time_ms");
    rows.push_back(r);
  }
  if (rows.empty()) throw IoError("CSV has no data rows");
  return rows;
}

}  // namespace lipgrid
