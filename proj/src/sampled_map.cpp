#include "lipgrid/sampled_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lipgrid/errors.hpp"

namespace lipgrid {

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (auto c : counts) t *= static_cast<std::size_t>(c);
  return t;
}

double GridSpec::spacing(std::size_t axis) const {
  double extent = upper[axis] - lower[axis];
  if (cell_centered) return extent / static_cast<double>(counts[axis]);
  return counts[axis] > 1 ? extent / static_cast<double>(counts[axis] - 1) : 0.0;
}

double GridSpec::coordinate(std::size_t axis, std::int64_t i) const {
  double h = spacing(axis);
  if (cell_centered) return lower[axis] + (static_cast<double>(i) + 0.5) * h;
  if (i == counts[axis] - 1) return upper[axis];
  return lower[axis] + static_cast<double>(i) * h;
}

namespace {

void check_grid(const GridSpec& grid) {
  if (grid.counts.empty()) throw PreconditionError("grid needs at least one axis");
  if (grid.lower.size() != grid.dim() || grid.upper.size() != grid.dim())
    throw PreconditionError("grid bounds do not match its dimension");
  for (std::size_t k = 0; k < grid.dim(); ++k) {
    if (grid.counts[k] < 1) throw PreconditionError("grid needs at least one sample per axis");
    if (!(grid.upper[k] > grid.lower[k])) throw PreconditionError("grid box is empty");
  }
}

std::vector<double> grid_points(const GridSpec& grid) {
  const std::size_t d = grid.dim();
  std::vector<double> pts;
  pts.reserve(grid.total() * d);
  std::vector<std::int64_t> idx(d, 0);
  for (std::size_t flat = 0; flat < grid.total(); ++flat) {
    for (std::size_t k = 0; k < d; ++k) pts.push_back(grid.coordinate(k, idx[k]));
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < grid.counts[k]) break;
      idx[k] = 0;
    }
  }
  return pts;
}

}  // namespace

SampledMap SampledMap::on_grid(const GridSpec& grid, std::size_t out_dim, const Function& f) {
  check_grid(grid);
  SampledMap map;
  map.dim_ = grid.dim();
  map.out_dim_ = out_dim;
  map.grid_ = grid;
  map.vertices_ = grid_points(grid);
  map.values_.reserve(grid.total() * out_dim);
  for (std::size_t i = 0; i < grid.total(); ++i) {
    Point y = f(map.vertex(i));
    if (y.size() != out_dim) throw PreconditionError("sampled function returned wrong output dimension");
    map.values_.insert(map.values_.end(), y.begin(), y.end());
  }
  return map;
}

SampledMap SampledMap::from_grid_values(const GridSpec& grid, std::size_t out_dim, std::vector<double> values) {
  check_grid(grid);
  if (values.size() != grid.total() * out_dim) throw PreconditionError("value count does not match the grid");
  SampledMap map;
  map.dim_ = grid.dim();
  map.out_dim_ = out_dim;
  map.grid_ = grid;
  map.vertices_ = grid_points(grid);
  map.values_ = std::move(values);
  return map;
}

SampledMap SampledMap::from_triangulation(std::vector<Point> vertices, std::vector<Simplex> simplices,
                                          std::vector<Point> values) {
  if (vertices.empty() || vertices.size() != values.size())
    throw PreconditionError("triangulation needs one value per vertex");
  SampledMap map;
  map.dim_ = vertices.front().size();
  map.out_dim_ = values.front().size();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].size() != map.dim_ || values[i].size() != map.out_dim_)
      throw PreconditionError("inconsistent vertex or value dimension");
    map.vertices_.insert(map.vertices_.end(), vertices[i].begin(), vertices[i].end());
    map.values_.insert(map.values_.end(), values[i].begin(), values[i].end());
  }
  for (const auto& s : simplices) {
    if (s.size() != map.dim_ + 1) throw PreconditionError("simplex must have d+1 vertices");
    for (auto v : s)
      if (v >= vertices.size()) throw PreconditionError("simplex refers to a missing vertex");
  }
  map.simplices_ = std::move(simplices);
  map.simplices_ready_ = true;
  return map;
}

SampledMap SampledMap::unit_cell_centers(std::size_t d, std::int64_t m, std::size_t out_dim, const Function& f) {
  GridSpec grid{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), std::vector<std::int64_t>(d, m), true};
  return on_grid(grid, out_dim, f);
}

Point SampledMap::vertex(std::size_t i) const {
  return Point(vertices_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
               vertices_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
}

Point SampledMap::value(std::size_t i) const {
  return Point(values_.begin() + static_cast<std::ptrdiff_t>(i * out_dim_),
               values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * out_dim_));
}

const GridSpec& SampledMap::grid() const {
  if (!grid_) throw PreconditionError("map is not sampled on a regular grid");
  return *grid_;
}

std::size_t SampledMap::grid_flat(const std::vector<std::int64_t>& idx) const {
  const GridSpec& g = grid();
  std::size_t flat = 0;
  for (std::size_t k = 0; k < g.dim(); ++k) flat = flat * static_cast<std::size_t>(g.counts[k]) + static_cast<std::size_t>(idx[k]);
  return flat;
}

double SampledMap::sample_volume() const {
  const GridSpec& g = grid();
  if (!g.cell_centered) throw PreconditionError("sample volume needs a cell-centred grid");
  double v = 1.0;
  for (std::size_t k = 0; k < g.dim(); ++k) v *= g.spacing(k);
  return v;
}

const std::vector<Simplex>& SampledMap::simplices() const {
  if (simplices_ready_) return simplices_;
  const GridSpec& g = grid();
  const std::size_t d = g.dim();
  std::vector<std::size_t> perm(d);
  std::vector<std::vector<std::size_t>> perms;
  std::iota(perm.begin(), perm.end(), 0);
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::int64_t> cells(d);
  std::size_t cell_total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    cells[k] = g.counts[k] - 1;
    if (cells[k] < 1) throw PreconditionError("triangulation needs two samples per axis");
    cell_total *= static_cast<std::size_t>(cells[k]);
  }
  std::vector<std::int64_t> base(d, 0);
  for (std::size_t c = 0; c < cell_total; ++c) {
    for (const auto& p : perms) {
      Simplex s;
      std::vector<std::int64_t> v = base;
      s.push_back(grid_flat(v));
      for (std::size_t j = 0; j < d; ++j) {
        ++v[p[j]];
        s.push_back(grid_flat(v));
      }
      simplices_.push_back(std::move(s));
    }
    for (std::size_t k = d; k-- > 0;) {
      if (++base[k] < cells[k]) break;
      base[k] = 0;
    }
  }
  simplices_ready_ = true;
  return simplices_;
}

AffinePiece SampledMap::affine_piece(std::size_t simplex) const {
  const Simplex& s = simplices().at(simplex);
  const std::size_t d = dim_;
  // Edge matrix E (d x d, columns v_j - v_0) and value differences F.
  std::vector<double> edges(d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) edges[k * d + j] = vertex_ptr(s[j + 1])[k] - vertex_ptr(s[0])[k];
  AffinePiece piece;
  piece.linear.assign(out_dim_ * d, 0.0);
  // Row r of the linear part solves E^T a_r = (f_r(v_j) - f_r(v_0))_j.
  std::vector<double> et(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) et[r * d + c] = edges[c * d + r];
  for (std::size_t r = 0; r < out_dim_; ++r) {
    std::vector<double> rhs(d);
    for (std::size_t j = 0; j < d; ++j) rhs[j] = value_ptr(s[j + 1])[r] - value_ptr(s[0])[r];
    auto row = solve_linear(et, rhs, d);
    if (!row) throw PreconditionError("degenerate simplex in triangulation");
    std::copy(row->begin(), row->end(), piece.linear.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  piece.offset.resize(out_dim_);
  for (std::size_t r = 0; r < out_dim_; ++r) {
    double acc = value_ptr(s[0])[r];
    for (std::size_t k = 0; k < d; ++k) acc -= piece.linear[r * d + k] * vertex_ptr(s[0])[k];
    piece.offset[r] = acc;
  }
  return piece;
}

std::optional<std::vector<double>> SampledMap::preimage_barycentric(std::size_t simplex, const Point& y) const {
  if (out_dim_ != dim_) throw PreconditionError("preimages need a square map");
  const Simplex& s = simplices().at(simplex);
  const std::size_t d = dim_;
  std::vector<double> f(d * d);
  std::vector<double> rhs(d);
  const double* f0 = value_ptr(s[0]);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t j = 0; j < d; ++j) f[r * d + j] = value_ptr(s[j + 1])[r] - f0[r];
    rhs[r] = y[r] - f0[r];
  }
  auto lambda = solve_linear(f, rhs, d);
  if (!lambda) return std::nullopt;
  std::vector<double> bary(d + 1);
  double rest = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    bary[j + 1] = (*lambda)[j];
    rest -= (*lambda)[j];
  }
  bary[0] = rest;
  return bary;
}

double SampledMap::jacobian_determinant(std::size_t simplex) const {
  if (out_dim_ != dim_) throw PreconditionError("Jacobian determinant needs a square map");
  const Simplex& s = simplices().at(simplex);
  const std::size_t d = dim_;
  std::vector<double> f(d * d), e(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      f[r * d + j] = value_ptr(s[j + 1])[r] - value_ptr(s[0])[r];
      e[r * d + j] = vertex_ptr(s[j + 1])[r] - vertex_ptr(s[0])[r];
    }
  double de = determinant(e, d);
  if (de == 0.0) throw PreconditionError("degenerate simplex in triangulation");
  return determinant(f, d) / de;
}

double determinant(std::vector<double> a, std::size_t n) {
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      det = -det;
    }
    det *= a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
    }
  }
  return det;
}

std::optional<std::vector<double>> solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::nullopt;
  const double tiny = scale * 1e-13;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) <= tiny) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
    x[r] = acc / a[r * n + r];
  }
  return x;
}

double distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

double distance(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw PreconditionError("distance between points of different dimension");
  return distance(a.data(), b.data(), a.size());
}

}  // namespace lipgrid
