#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace lipgrid {

using Point = std::vector<double>;
using Simplex = std::vector<std::size_t>;  // d+1 vertex indices

// Regular sampling grid on an axis-parallel box. With cell_centered the
// samples sit at the centres of counts[k] equal cells per axis; otherwise they
// are the counts[k] vertices including both box faces.
struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::int64_t> counts;
  bool cell_centered = false;

  std::size_t dim() const { return counts.size(); }
  std::size_t total() const;
  double spacing(std::size_t axis) const;
  double coordinate(std::size_t axis, std::int64_t i) const;
};

// Affine map x -> linear * x + offset on one simplex.
struct AffinePiece {
  std::vector<double> linear;  // out_dim x dim, row-major
  std::vector<double> offset;
};

// A map R^d -> R^n known through its values at sample points. Grid samples are
// read as a piecewise-affine map on the Freudenthal (Kuhn) triangulation;
// explicit triangulations are also accepted.
class SampledMap {
 public:
  using Function = std::function<Point(const Point&)>;

  static SampledMap on_grid(const GridSpec& grid, std::size_t out_dim, const Function& f);
  static SampledMap from_grid_values(const GridSpec& grid, std::size_t out_dim, std::vector<double> values);
  static SampledMap from_triangulation(std::vector<Point> vertices, std::vector<Simplex> simplices,
                                       std::vector<Point> values);
  // Cell-centred samples of f on the uniform m^d grid of [0,1]^d.
  static SampledMap unit_cell_centers(std::size_t d, std::int64_t m, std::size_t out_dim, const Function& f);

  std::size_t dim() const { return dim_; }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t vertex_count() const { return vertices_.size() / dim_; }
  Point vertex(std::size_t i) const;
  Point value(std::size_t i) const;
  const double* value_ptr(std::size_t i) const { return values_.data() + i * out_dim_; }
  const double* vertex_ptr(std::size_t i) const { return vertices_.data() + i * dim_; }

  bool is_grid() const { return grid_.has_value(); }
  const GridSpec& grid() const;
  std::size_t grid_flat(const std::vector<std::int64_t>& idx) const;
  // Volume represented by one sample of a cell-centred grid.
  double sample_volume() const;

  const std::vector<Simplex>& simplices() const;
  AffinePiece affine_piece(std::size_t simplex) const;
  // Barycentric coordinates of the preimage of y in the simplex (square maps
  // only); empty when the piece is singular.
  std::optional<std::vector<double>> preimage_barycentric(std::size_t simplex, const Point& y) const;
  double jacobian_determinant(std::size_t simplex) const;

 private:
  std::size_t dim_ = 0;
  std::size_t out_dim_ = 0;
  std::vector<double> vertices_;
  std::vector<double> values_;
  std::optional<GridSpec> grid_;
  mutable std::vector<Simplex> simplices_;
  mutable bool simplices_ready_ = false;
};

// Small dense linear algebra used by the piecewise-affine code.
double determinant(std::vector<double> a, std::size_t n);
// Solves a x = b (n x n, row-major); empty when the matrix is singular.
std::optional<std::vector<double>> solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n);

double distance(const Point& a, const Point& b);
double distance(const double* a, const double* b, std::size_t n);

}  // namespace lipgrid
