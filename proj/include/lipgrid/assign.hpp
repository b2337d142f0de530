#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipgrid/sampled_map.hpp"

namespace lipgrid {

// Bijection from a point set onto the grid [n]^d = {1..n}^d. Grid cells are
// numbered row-major with the last axis fastest.
struct Assignment {
  std::vector<std::size_t> permutation;  // source index -> grid index
  std::int64_t grid_n = 0;
  double bottleneck = 0.0;
  // Largest stretch at each source point, sorted in decreasing order.
  std::vector<double> stretch_spectrum;
};

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  std::map<std::string, double> wall_time_ms;
  std::uint64_t seed = 0;
  bool budget_exhausted = false;
  std::uint64_t nodes = 0;
  Assignment best;
};

std::vector<std::int64_t> grid_coordinates(std::size_t index, std::int64_t n, std::size_t d);

// max |f(x)-f(y)| / |x-y| over pairs; +inf when two source points coincide.
double lipschitz_constant(const std::vector<Point>& points, const Assignment& assignment);

// Sort the points lexicographically and hand out grid cells in row-major order.
Assignment sorted_assignment(const std::vector<Point>& points, std::int64_t n);

BoundsReport solve_exact(const std::vector<Point>& points, std::int64_t n, std::uint64_t node_budget = 50'000'000);

struct AnnealSchedule {
  std::uint64_t proposals = 0;  // per restart; 0 means 200 |S|^2
  int restarts = 4;
  double initial_temperature = 0.05;  // relative to the starting bottleneck
  double final_temperature = 1e-4;
};

BoundsReport solve_heuristic(const std::vector<Point>& points, std::int64_t n, std::uint64_t seed,
                             const AnnealSchedule& schedule = {});

// Any bijection onto a unit-spaced grid maps the k points of a closed ball of
// radius t into at most (2Lt+1)^d cells, so L >= (k^(1/d) - 1) / (2t).
double counting_lower_bound(const std::vector<Point>& points);

// Shared by the solvers: compares pairwise stretches exactly when all
// coordinates are integers.
struct StretchContext {
  explicit StretchContext(const std::vector<Point>& points, std::int64_t n);

  std::size_t size() const { return count; }
  double source_sq(std::size_t i, std::size_t j) const;
  std::int64_t grid_sq(std::size_t a, std::size_t b) const;

  struct Stretch {
    double num = 0.0;  // squared grid distance
    double den = 1.0;  // squared source distance
  };
  Stretch stretch(std::size_t i, std::size_t j, std::size_t gi, std::size_t gj) const {
    return Stretch{static_cast<double>(grid_sq(gi, gj)), source_sq(i, j)};
  }
  bool less(const Stretch& a, const Stretch& b) const;
  static double value(const Stretch& s);

  std::size_t count = 0;
  std::size_t dim = 0;
  std::int64_t n = 0;
  bool integral = false;
  std::vector<double> coords;  // source points, count x dim
  std::vector<std::int64_t> grid;  // coordinates, count x dim
};

}  // namespace lipgrid
