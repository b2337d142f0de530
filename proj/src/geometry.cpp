#include "lipgrid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lipgrid/errors.hpp"

namespace lipgrid {

Cube::Cube(Rational side_, RationalPoint anchor_) : side(std::move(side_)), anchor(std::move(anchor_)) {
  if (side <= 0) throw PreconditionError("cube side must be positive");
  if (anchor.empty()) throw PreconditionError("cube needs at least one coordinate");
  for (const auto& a : anchor) {
    Rational k = a / side;
    if (!is_integer(k)) throw PreconditionError("cube anchor " + to_string(a) + " is not a multiple of side " + to_string(side));
  }
}

Rational Cube::volume() const { return pow(side, static_cast<unsigned>(dim())); }

Rational TiledFamily::side() const {
  if (cubes.empty()) throw PreconditionError("empty family has no side");
  return cubes.front().side;
}

void TiledFamily::validate() const {
  for (const auto& c : cubes) {
    if (c.side != cubes.front().side) throw InvariantError("family cubes have different sides");
    if (c.dim() != cubes.front().dim()) throw InvariantError("family cubes have different dimensions");
  }
  for (std::size_t i = 0; i < cubes.size(); ++i)
    for (std::size_t j = i + 1; j < cubes.size(); ++j)
      if (cube_intersection_measure(cubes[i], cubes[j]) != 0) throw InvariantError("family cubes overlap");
}

GridDensity::GridDensity(int d, std::int64_t m, std::vector<double> cells) : d_(d), m_(m), cells_(std::move(cells)) {
  if (d < 1) throw PreconditionError("density dimension must be positive");
  if (m < 1) throw PreconditionError("density resolution must be positive");
  long double expected = std::pow(static_cast<long double>(m), d);
  if (expected > 4.0e9L) throw PreconditionError("density grid too large");
  if (cells_.size() != static_cast<std::size_t>(expected))
    throw PreconditionError("density has " + std::to_string(cells_.size()) + " cells, expected " +
                            std::to_string(static_cast<std::size_t>(expected)));
  for (double v : cells_)
    if (!std::isfinite(v)) throw PreconditionError("density cell is not finite");
  refresh_bounds();
}

GridDensity GridDensity::constant(int d, std::int64_t m, double value) {
  auto count = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(m), d)));
  return GridDensity(d, m, std::vector<double>(count, value));
}

void GridDensity::set(std::size_t flat, double value) {
  if (!std::isfinite(value)) throw PreconditionError("density cell is not finite");
  cells_.at(flat) = value;
  stale_ = true;
}

void GridDensity::update_bounds() const {
  auto [lo, hi] = std::minmax_element(cells_.begin(), cells_.end());
  inf_ = *lo;
  sup_ = *hi;
  stale_ = false;
}

std::size_t GridDensity::flat_index(const std::vector<std::int64_t>& idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < d_; ++k) flat = flat * static_cast<std::size_t>(m_) + static_cast<std::size_t>(idx[k]);
  return flat;
}

std::vector<std::int64_t> GridDensity::multi_index(std::size_t flat) const {
  std::vector<std::int64_t> idx(d_);
  for (int k = d_ - 1; k >= 0; --k) {
    idx[k] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(m_));
    flat /= static_cast<std::size_t>(m_);
  }
  return idx;
}

double GridDensity::value_at(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != d_) throw PreconditionError("point dimension does not match density");
  std::vector<std::int64_t> idx(d_);
  for (int k = 0; k < d_; ++k) {
    if (x[k] < 0.0 || x[k] > 1.0) throw DomainError("point outside the unit cube");
    auto i = static_cast<std::int64_t>(std::floor(x[k] * static_cast<double>(m_)));
    idx[k] = std::min(i, m_ - 1);
  }
  return cells_[flat_index(idx)];
}

bool e1_adjacent(const Cube& a, const Cube& b) {
  if (a.side != b.side) throw PreconditionError("adjacency needs cubes of equal side");
  if (a.dim() != b.dim()) throw PreconditionError("adjacency needs cubes of equal dimension");
  if (b.anchor[0] != a.anchor[0] + a.side) return false;
  for (std::size_t k = 1; k < a.dim(); ++k)
    if (a.anchor[k] != b.anchor[k]) return false;
  return true;
}

Rational cube_intersection_measure(const Cube& a, const Cube& b) {
  if (a.dim() != b.dim()) throw PreconditionError("intersection of cubes of different dimension");
  Rational measure = 1;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    Rational lo = std::max(a.anchor[k], b.anchor[k]);
    Rational hi = std::min(a.upper(k), b.upper(k));
    if (hi <= lo) return 0;
    measure *= hi - lo;
  }
  return measure;
}

bool inside_unit_cube(const Cube& cube) {
  for (std::size_t k = 0; k < cube.dim(); ++k)
    if (cube.anchor[k] < 0 || cube.upper(k) > 1) return false;
  return true;
}

namespace {

struct AxisWeights {
  std::int64_t first = 0;
  std::vector<Rational> weights;  // overlap length with each grid cell
};

AxisWeights axis_weights(const Rational& lo, const Rational& hi, std::int64_t m) {
  AxisWeights out;
  Rational mq = m;
  Rational lo_scaled = lo * mq;
  Rational hi_scaled = hi * mq;
  std::int64_t first = to_int64(floor_of(lo_scaled));
  std::int64_t last = to_int64(ceil_of(hi_scaled)) - 1;
  first = std::max<std::int64_t>(first, 0);
  last = std::min<std::int64_t>(last, m - 1);
  out.first = first;
  for (std::int64_t i = first; i <= last; ++i) {
    Rational cell_lo(BigInt(static_cast<long>(i)), BigInt(static_cast<long>(m)));
    Rational cell_hi(BigInt(static_cast<long>(i + 1)), BigInt(static_cast<long>(m)));
    cell_lo.canonicalize();
    cell_hi.canonicalize();
    Rational w = std::min(cell_hi, hi) - std::max(cell_lo, lo);
    out.weights.push_back(w > 0 ? w : Rational(0));
  }
  return out;
}

// Odometer over the half-open index box [lo, hi); false once exhausted.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] < hi[k]) return true;
    idx[k] = lo[k];
  }
  return false;
}

}  // namespace

Rational cell_integral_exact(const GridDensity& rho, const Cube& cube) {
  if (static_cast<int>(cube.dim()) != rho.dim()) throw PreconditionError("cube and density dimensions differ");
  if (!inside_unit_cube(cube)) throw DomainError("cube is not contained in the unit cube");
  const int d = rho.dim();
  const std::int64_t m = rho.resolution();
  std::vector<AxisWeights> axes;
  for (int k = 0; k < d; ++k) axes.push_back(axis_weights(cube.anchor[k], cube.upper(k), m));

  Rational full(BigInt(1), BigInt(static_cast<long>(m)));
  full.canonicalize();
  const AxisWeights& inner = axes[d - 1];
  const std::size_t inner_count = inner.weights.size();

  Rational total = 0;
  std::vector<std::size_t> counter(d > 1 ? d - 1 : 0, 0);
  const auto& cells = rho.cells();
  while (true) {
    Rational outer = 1;
    std::size_t base = 0;
    bool zero = false;
    for (int k = 0; k < d - 1; ++k) {
      const Rational& w = axes[k].weights[counter[k]];
      if (w == 0) zero = true;
      outer *= w;
      base = base * static_cast<std::size_t>(m) + static_cast<std::size_t>(axes[k].first + static_cast<std::int64_t>(counter[k]));
    }
    if (!zero && inner_count > 0) {
      base = base * static_cast<std::size_t>(m) + static_cast<std::size_t>(inner.first);
      ExactSum interior;
      Rational partial = 0;
      for (std::size_t j = 0; j < inner_count; ++j) {
        const Rational& w = inner.weights[j];
        double v = cells[base + j];
        if (w == full) interior.add(v);
        else if (w != 0) partial += w * from_double(v);
      }
      Rational line = partial;
      if (!interior.empty()) line += interior.value() * full;
      total += outer * line;
    }
    int k = d - 2;
    for (; k >= 0; --k) {
      if (++counter[k] < axes[k].weights.size()) break;
      counter[k] = 0;
    }
    if (k < 0) break;
  }
  return total;
}

Rational cell_average_exact(const GridDensity& rho, const Cube& cube) {
  return cell_integral_exact(rho, cube) / cube.volume();
}

double cell_average(const GridDensity& rho, const Cube& cube) { return to_double(cell_average_exact(rho, cube)); }

Rational union_measure_within(const Cube& box, const std::vector<const Cube*>& cubes) {
  const std::size_t d = box.dim();
  std::vector<const Cube*> hits;
  for (const Cube* c : cubes) {
    if (c->dim() != d) throw PreconditionError("cube dimension mismatch in union measure");
    if (cube_intersection_measure(box, *c) > 0) hits.push_back(c);
  }
  if (hits.empty()) return 0;
  // Coordinate compression: the breakpoints of every clipped cube split the
  // box into cells that are either fully covered or fully uncovered.
  std::vector<std::vector<Rational>> coords(d);
  for (std::size_t k = 0; k < d; ++k) {
    coords[k].push_back(box.anchor[k]);
    coords[k].push_back(box.upper(k));
    for (const Cube* c : hits) {
      coords[k].push_back(std::max(c->anchor[k], box.anchor[k]));
      coords[k].push_back(std::min(c->upper(k), box.upper(k)));
    }
    std::sort(coords[k].begin(), coords[k].end());
    coords[k].erase(std::unique(coords[k].begin(), coords[k].end()), coords[k].end());
  }
  std::vector<std::size_t> extent(d);
  std::size_t total_cells = 1;
  for (std::size_t k = 0; k < d; ++k) {
    extent[k] = coords[k].size() - 1;
    total_cells *= extent[k];
  }
  if (total_cells > 50'000'000) throw PreconditionError("union measure grid too large");
  std::vector<char> covered(total_cells, 0);
  for (const Cube* c : hits) {
    std::vector<std::size_t> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      Rational a = std::max(c->anchor[k], box.anchor[k]);
      Rational b = std::min(c->upper(k), box.upper(k));
      lo[k] = static_cast<std::size_t>(std::lower_bound(coords[k].begin(), coords[k].end(), a) - coords[k].begin());
      hi[k] = static_cast<std::size_t>(std::lower_bound(coords[k].begin(), coords[k].end(), b) - coords[k].begin());
    }
    std::vector<std::size_t> idx = lo;
    do {
      std::size_t flat = 0;
      for (std::size_t k = 0; k < d; ++k) flat = flat * extent[k] + idx[k];
      covered[flat] = 1;
    } while (advance(idx, lo, hi));
  }
  Rational measure = 0;
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < total_cells; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = d; k-- > 0;) {
      idx[k] = rem % extent[k];
      rem /= extent[k];
    }
    if (!covered[flat]) continue;
    Rational vol = 1;
    for (std::size_t k = 0; k < d; ++k) vol *= coords[k][idx[k] + 1] - coords[k][idx[k]];
    measure += vol;
  }
  return measure;
}

Rational overlap_fraction(const Cube& cube, const std::vector<TiledFamily>& finer) {
  std::vector<const Cube*> all;
  for (const auto& fam : finer)
    for (const auto& c : fam.cubes) all.push_back(&c);
  return union_measure_within(cube, all) / cube.volume();
}

}  // namespace lipgrid
