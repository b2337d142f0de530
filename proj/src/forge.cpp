#include "lipgrid/forge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "lipgrid/errors.hpp"

namespace lipgrid {

namespace {

struct CellRange {
  std::vector<std::int64_t> first;
  std::int64_t count = 0;  // cells per axis
};

CellRange cell_range(const Cube& cube, std::int64_t m) {
  Rational mq{BigInt(static_cast<long>(m))};
  Rational width = cube.side * mq;
  if (!is_integer(width)) throw PreconditionError("grid resolution does not resolve the cube side");
  CellRange r;
  r.count = to_int64(width.get_num());
  for (const auto& a : cube.anchor) {
    Rational s = a * mq;
    if (!is_integer(s)) throw PreconditionError("grid resolution does not resolve the cube anchor");
    r.first.push_back(to_int64(s.get_num()));
  }
  return r;
}

template <class Fn>
void for_each_cell(const GridDensity& grid, const CellRange& range, Fn&& fn) {
  const std::size_t d = range.first.size();
  std::vector<std::int64_t> local(d, 0), idx(d);
  while (true) {
    for (std::size_t k = 0; k < d; ++k) idx[k] = range.first[k] + local[k];
    fn(grid.flat_index(idx), local);
    std::size_t k = d;
    bool done = true;
    while (k-- > 0) {
      if (++local[k] < range.count) {
        done = false;
        break;
      }
      local[k] = 0;
    }
    if (done) return;
  }
}

bool even_e1_index(const Cube& cube) {
  BigInt idx = floor_of(cube.anchor[0] / cube.side);
  return mpz_even_p(idx.get_mpz_t()) != 0;
}

// error-free transformation: a + b = s + err exactly
double two_sum_error(double a, double b, double s) {
  double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

// a + shift, rounded so that |result - a| <= |shift| holds exactly.
double shift_towards(double a, double shift) {
  double s = a + shift;
  double err = two_sum_error(a, shift, s);
  if (shift > 0 && err < 0) s = std::nextafter(s, -std::numeric_limits<double>::infinity());
  if (shift < 0 && err > 0) s = std::nextafter(s, std::numeric_limits<double>::infinity());
  return s;
}

}  // namespace

std::int64_t chessboard_min_resolution(const std::vector<TiledFamily>& families) {
  BigInt base = 1;
  Rational min_side = -1;
  for (const auto& fam : families)
    for (const auto& cube : fam.cubes) {
      mpz_lcm(base.get_mpz_t(), base.get_mpz_t(), cube.side.get_den_mpz_t());
      for (const auto& a : cube.anchor) mpz_lcm(base.get_mpz_t(), base.get_mpz_t(), a.get_den_mpz_t());
      if (min_side < 0 || cube.side < min_side) min_side = cube.side;
    }
  if (min_side < 0) throw PreconditionError("no cubes given");
  BigInt factor = ceil_of(Rational(4) / (min_side * Rational(base)));
  if (factor < 1) factor = 1;
  return to_int64(base * factor);
}

GridDensity chessboard(const ChessboardSpec& spec, std::int64_t resolution) {
  if (spec.families.empty()) throw PreconditionError("chessboard needs at least one family");
  if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw PreconditionError("eps must lie in (0,1)");
  if (spec.taper <= 0 || spec.taper >= 1) throw PreconditionError("taper must lie in (0,1)");
  const int d = static_cast<int>(spec.families.front().dim());
  for (const auto& fam : spec.families) {
    fam.validate();
    for (const auto& cube : fam.cubes) {
      if (static_cast<int>(cube.dim()) != d) throw PreconditionError("families of different dimension");
      if (!inside_unit_cube(cube)) throw DomainError("chessboard cube leaves the unit cube");
      if (cube.side * Rational(BigInt(static_cast<long>(resolution))) < 4)
        throw PreconditionError("resolution too coarse: finest cubes need at least 4 cells per axis");
    }
  }
  for (std::size_t i = 0; i + 1 < spec.families.size(); ++i) {
    std::vector<TiledFamily> finer(spec.families.begin() + static_cast<std::ptrdiff_t>(i + 1), spec.families.end());
    for (const auto& cube : spec.families[i].cubes)
      if (overlap_fraction(cube, finer) > spec.eta)
        throw PreconditionError("finer families cover more than eta of a level " + std::to_string(i + 1) + " cube");
  }

  GridDensity psi = GridDensity::constant(d, resolution, 0.0);
  const double target = 8.0 * spec.eps / 9.0;
  const double half_ramp = to_double(spec.taper) / 2.0;
  for (const auto& fam : spec.families) {
    for (const auto& cube : fam.cubes) {
      CellRange range = cell_range(cube, resolution);
      std::vector<double> ramp(static_cast<std::size_t>(range.count));
      double ramp_sum = 0.0;
      for (std::int64_t j = 0; j < range.count; ++j) {
        double u = (static_cast<double>(j) + 0.5) / static_cast<double>(range.count);
        ramp[static_cast<std::size_t>(j)] = std::min(1.0, std::min(u, 1.0 - u) / half_ramp);
        ramp_sum += ramp[static_cast<std::size_t>(j)];
      }
      double mean = std::pow(ramp_sum / static_cast<double>(range.count), d);
      double plateau = (even_e1_index(cube) ? target : -target) / mean;
      if (std::abs(plateau) > spec.eps) throw PreconditionError("taper too wide: plateau would exceed eps");
      for_each_cell(psi, range, [&](std::size_t flat, const std::vector<std::int64_t>& local) {
        double w = 1.0;
        for (auto l : local) w *= ramp[static_cast<std::size_t>(l)];
        psi.set(flat, plateau * w);
      });
    }
  }
  psi.refresh_bounds();
  return psi;
}

GridDensity perturb_density(const GridDensity& base, const GridDensity& psi) {
  if (base.dim() != psi.dim() || base.resolution() != psi.resolution())
    throw PreconditionError("densities have different grids");
  std::vector<double> cells(base.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = base.at(i) + psi.at(i);
  return GridDensity(base.dim(), base.resolution(), std::move(cells));
}

std::vector<AdjacentPair> e1_adjacent_pairs(const TiledFamily& family) {
  std::map<RationalPoint, std::size_t> by_anchor;
  for (std::size_t i = 0; i < family.cubes.size(); ++i) by_anchor[family.cubes[i].anchor] = i;
  std::vector<AdjacentPair> pairs;
  for (std::size_t i = 0; i < family.cubes.size(); ++i) {
    RationalPoint next = family.cubes[i].anchor;
    next[0] += family.cubes[i].side;
    auto it = by_anchor.find(next);
    if (it != by_anchor.end() && family.cubes[it->second].side == family.cubes[i].side)
      pairs.push_back({i, it->second});
  }
  return pairs;
}

double adjacent_average_gap(const GridDensity& rho, const TiledFamily& family) {
  auto pairs = e1_adjacent_pairs(family);
  if (pairs.empty()) return std::numeric_limits<double>::infinity();
  std::vector<std::optional<Rational>> avg(family.cubes.size());
  auto average = [&](std::size_t i) -> const Rational& {
    if (!avg[i]) avg[i] = cell_average_exact(rho, family.cubes[i]);
    return *avg[i];
  };
  Rational best = -1;
  for (const auto& p : pairs) {
    Rational gap = abs(average(p.right) - average(p.left));
    if (best < 0 || gap < best) best = gap;
  }
  return to_double(best);
}

GridDensity linf_chessboard(const TiledFamily& family, const GridDensity& rho, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  family.validate();
  const std::size_t n = family.cubes.size();
  std::vector<CellRange> ranges;
  for (const auto& cube : family.cubes) {
    if (static_cast<int>(cube.dim()) != rho.dim()) throw PreconditionError("family and density dimensions differ");
    if (!inside_unit_cube(cube)) throw DomainError("cube leaves the unit cube");
    ranges.push_back(cell_range(cube, rho.resolution()));
  }
  std::map<RationalPoint, std::size_t> by_anchor;
  for (std::size_t i = 0; i < n; ++i) by_anchor[family.cubes[i].anchor] = i;

  GridDensity psi = rho;
  const Rational eps_q = from_double(eps);
  std::vector<bool> done(n, false);
  // Unprocessed cube with the smallest first coordinate (ties: smallest anchor).
  auto leftmost = [&]() {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (best == n || family.cubes[i].anchor < family.cubes[best].anchor) best = i;
    }
    return best;
  };
  std::size_t current = leftmost();
  std::size_t processed = 0;
  while (current != n) {
    done[current] = true;
    ++processed;
    if (processed == n) break;
    RationalPoint next = family.cubes[current].anchor;
    next[0] += family.cubes[current].side;
    auto it = by_anchor.find(next);
    if (it == by_anchor.end() || done[it->second]) {
      current = leftmost();  // new chain starts with psi = rho
      continue;
    }
    std::size_t succ = it->second;
    Rational diff = cell_average_exact(rho, family.cubes[succ]) - cell_average_exact(psi, family.cubes[current]);
    double shift = 0.0;
    if (abs(diff) >= eps_q) shift = 0.0;
    else if (diff >= 0) shift = eps;
    else shift = -eps;
    if (shift != 0.0)
      for_each_cell(psi, ranges[succ], [&](std::size_t flat, const std::vector<std::int64_t>&) {
        psi.set(flat, shift_towards(rho.at(flat), shift));
      });
    current = succ;
  }
  psi.refresh_bounds();
  return psi;
}

double porosity_radius(double eps, double C, double phi_sup, double L, int d) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (!(C > 0.0)) throw PreconditionError("C must be positive");
  if (!(L >= 1.0)) throw PreconditionError("L must be at least 1");
  if (d < 1) throw PreconditionError("dimension must be positive");
  double b = 1.0 / (2.0 * C * C);
  return eps / (2.0 * (4.0 + C * (phi_sup + 1.0 + 6.0 * std::pow(L / b, d))));
}

GridDensity fold_plane_density(const GridDensity& psi) {
  const std::int64_t m = psi.resolution();
  if (m % 2 != 0) throw PreconditionError("fold density needs an even resolution");
  std::vector<double> cells(psi.size());
  for (std::size_t flat = 0; flat < psi.size(); ++flat) {
    auto idx = psi.multi_index(flat);
    if (idx[0] < m / 2) {
      cells[flat] = psi.at(flat);
    } else {
      idx[0] = m - 1 - idx[0];
      cells[flat] = 1.0 - psi.at(psi.flat_index(idx));
    }
  }
  return GridDensity(psi.dim(), m, std::move(cells));
}

}  // namespace lipgrid
