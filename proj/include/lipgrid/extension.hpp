#pragma once

#include <vector>

#include "lipgrid/geometry.hpp"
#include "lipgrid/sampled_map.hpp"

namespace lipgrid {

// Coordinatewise McShane extension: f_j(q) = min_s (v_j(s) + L |q - s|).
// Every coordinate of the data must be L-Lipschitz; the result reproduces the
// data exactly on the sample points.
std::vector<Point> mcshane_extend(const std::vector<Point>& points, const std::vector<Point>& values, double L,
                                  const std::vector<Point>& queries);

// Largest |f(a)-f(b)| / |a-b| over all pairs of the combined samples.
double empirical_lipschitz(const std::vector<Point>& inputs, const std::vector<Point>& outputs);

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
  double volume() const;
};

struct PushforwardReport {
  std::vector<double> deviation;  // per test box
  double max_deviation = 0.0;
  Box mapped_hull;
};

// Compares the push-forward of rho under a map sampled at the cell centres of
// [0,1]^d with Lebesgue measure restricted to the image: for each test box B,
// sum of rho * cell volume over cells whose image lies in B against
// |B intersected with the mapped hull|. The hull is the bounding box of the
// mapped centres widened by half a cell.
PushforwardReport pushforward_check(const SampledMap& map, const GridDensity& rho, const std::vector<Box>& boxes);

}  // namespace lipgrid
