#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lipgrid/geometry.hpp"
#include "lipgrid/sampled_map.hpp"

namespace lipgrid {

GridDensity normalize_density(const GridDensity& rho);

// Smallest a with floor_sum <= a^d <= floor_sum + slack.
std::int64_t choose_power_target(std::int64_t floor_sum, std::int64_t slack, int d);

// One stage of the discretisation: the cube [0,l]^d is cut into m^d cells
// T_k of side l/m and cell k receives counts[k] points.
struct StagePlan {
  int d = 0;
  std::int64_t m = 0;
  double p = 0.0;
  double l = 0.0;
  std::vector<double> cell_integrals;  // l^d times the density mass of the matching cell of [0,1]^d
  std::vector<std::int64_t> floors;
  std::vector<std::size_t> plus_one_cells;
  std::vector<std::int64_t> counts;
  std::int64_t target_side = 0;  // n with sum(counts) = n^d
  double separation = 0.0;       // r = 1 / (4 sup(rho)^(1/d))
  double rho_sup = 0.0;
  double rho_inf = 0.0;
};

StagePlan plan_stage(const GridDensity& rho, std::int64_t m, double p, std::optional<double> l_override = std::nullopt);

struct SeparatedSet {
  int d = 0;
  double r = 0.0;
  std::int64_t n = 0;  // |points| = n^d
  std::vector<Point> points;
};

SeparatedSet encode_stage(const StagePlan& plan);

// Smallest distance between two points (uses a bucket grid).
double min_pairwise_distance(const std::vector<Point>& points);
// First pair closer than or equal to r, if any.
std::optional<std::pair<std::size_t, std::size_t>> separation_violation(const std::vector<Point>& points, double r);

struct MeasureDeviation {
  std::vector<double> per_cell;  // |mu(cell) - integral of rho over cell|
  std::vector<double> bound;     // 1/n^d + integral * |l^d/n^d - 1|
  double max_deviation = 0.0;
};

// Compares the counting measure of set/l (normalised to a probability) with
// rho on the m^d cells of [0,1]^d.
MeasureDeviation discrete_measure_deviation(const StagePlan& plan, const SeparatedSet& set, const GridDensity& rho);

// Nearest integer point of x * scale per coordinate, scale = d / r unless
// given (ties towards -inf);
// throws when two points collide.
std::vector<std::vector<std::int64_t>> integerize(const SeparatedSet& set, std::optional<double> scale = std::nullopt);

}  // namespace lipgrid
