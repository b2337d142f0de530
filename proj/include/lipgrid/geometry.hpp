#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lipgrid/rational.hpp"

namespace lipgrid {

// Axis-parallel closed cube anchor + [0, side]^d. The anchor is an integer
// multiple of side in every coordinate.
struct Cube {
  Rational side;
  RationalPoint anchor;

  Cube() = default;
  Cube(Rational side, RationalPoint anchor);

  std::size_t dim() const { return anchor.size(); }
  Rational volume() const;
  Rational upper(std::size_t axis) const { return anchor[axis] + side; }
  bool operator==(const Cube& other) const = default;
};

// One level of a nested construction: equal-side, pairwise non-overlapping
// cubes, together with the offset of every level used to place them.
struct TiledFamily {
  std::size_t level = 1;
  std::vector<Cube> cubes;
  std::vector<RationalPoint> offsets;

  std::size_t dim() const { return cubes.empty() ? 0 : cubes.front().dim(); }
  Rational side() const;
  void validate() const;  // equal sides, no interior overlap
};

// Piecewise-constant density on the uniform m^d grid of [0,1]^d. Cells are
// stored row-major with the last axis fastest.
class GridDensity {
 public:
  GridDensity() = default;
  GridDensity(int d, std::int64_t m, std::vector<double> cells);
  static GridDensity constant(int d, std::int64_t m, double value);

  int dim() const { return d_; }
  std::int64_t resolution() const { return m_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<double>& cells() const { return cells_; }
  double inf_value() const {
    if (stale_) update_bounds();
    return inf_;
  }
  double sup_value() const {
    if (stale_) update_bounds();
    return sup_;
  }

  double at(std::size_t flat) const { return cells_[flat]; }
  void set(std::size_t flat, double value);
  std::size_t flat_index(const std::vector<std::int64_t>& idx) const;
  std::vector<std::int64_t> multi_index(std::size_t flat) const;
  // Value of the cell containing x (points on the upper face of [0,1]^d
  // belong to the last cell).
  double value_at(const std::vector<double>& x) const;
  void refresh_bounds() { update_bounds(); }

 private:
  void update_bounds() const;

  int d_ = 0;
  std::int64_t m_ = 0;
  std::vector<double> cells_;
  mutable double inf_ = 0.0;
  mutable double sup_ = 0.0;
  mutable bool stale_ = false;
};

bool e1_adjacent(const Cube& a, const Cube& b);
Rational cube_intersection_measure(const Cube& a, const Cube& b);

// Exact integral of the density over the cube, as a rational.
Rational cell_integral_exact(const GridDensity& rho, const Cube& cube);
Rational cell_average_exact(const GridDensity& rho, const Cube& cube);
double cell_average(const GridDensity& rho, const Cube& cube);

// Exact Lebesgue measure of (union of cubes) intersected with the box.
Rational union_measure_within(const Cube& box, const std::vector<const Cube*>& cubes);
Rational overlap_fraction(const Cube& cube, const std::vector<TiledFamily>& finer);

bool inside_unit_cube(const Cube& cube);

}  // namespace lipgrid
