#include "lipgrid/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lipgrid/errors.hpp"

namespace lipgrid {

namespace {

Rational ri(std::int64_t v) { return Rational(BigInt(static_cast<long>(v))); }

std::int64_t int_pow(std::int64_t b, int e) {
  BigInt r = pow(BigInt(static_cast<long>(b)), static_cast<unsigned>(e));
  return to_int64(r);
}

// smallest q with q^d >= n
std::int64_t ceil_root(std::int64_t n, int d) {
  BigInt root;
  BigInt target(static_cast<long>(n));
  mpz_root(root.get_mpz_t(), target.get_mpz_t(), static_cast<unsigned long>(d));
  if (pow(root, static_cast<unsigned>(d)) < target) root += 1;
  return to_int64(root);
}

std::vector<std::int64_t> unflatten(std::size_t flat, std::int64_t m, int d) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    idx[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(m));
    flat /= static_cast<std::size_t>(m);
  }
  return idx;
}

Cube unit_cell(const std::vector<std::int64_t>& idx, std::int64_t m) {
  Rational side(BigInt(1), BigInt(static_cast<long>(m)));
  RationalPoint anchor;
  for (auto i : idx) anchor.push_back(ri(i) * side);
  return Cube(side, anchor);
}

}  // namespace

GridDensity normalize_density(const GridDensity& rho) {
  if (!(rho.inf_value() > 0.0)) throw PreconditionError("density must be bounded below by a positive constant");
  ExactSum sum;
  for (double v : rho.cells()) sum.add(v);
  double mean = to_double(sum.value() / Rational(BigInt(static_cast<unsigned long>(rho.size()))));
  std::vector<double> cells(rho.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = rho.at(i) / mean;
  return GridDensity(rho.dim(), rho.resolution(), std::move(cells));
}

std::int64_t choose_power_target(std::int64_t floor_sum, std::int64_t slack, int d) {
  if (d < 1) throw PreconditionError("dimension must be positive");
  if (floor_sum < 0 || slack < 0) throw PreconditionError("counts must be non-negative");
  std::int64_t a = ceil_root(floor_sum, d);
  if (int_pow(a, d) > floor_sum + slack)
    throw PreconditionError("no d-th power in [" + std::to_string(floor_sum) + ", " + std::to_string(floor_sum + slack) +
                            "]");
  return a;
}

StagePlan plan_stage(const GridDensity& rho, std::int64_t m, double p, std::optional<double> l_override) {
  const int d = rho.dim();
  if (m < 1) throw PreconditionError("m must be positive");
  if (!(p > 0.0)) throw PreconditionError("p must be positive");
  if (d >= 2 && !(p < 1.0 / (d - 1))) throw PreconditionError("p must lie in (0, 1/(d-1))");
  if (!(rho.inf_value() > 0.0)) throw PreconditionError("density must be bounded below by a positive constant");

  StagePlan plan;
  plan.d = d;
  plan.m = m;
  plan.p = p;
  plan.l = l_override ? *l_override : std::pow(static_cast<double>(m), 1.0 + p);
  if (!(plan.l > 0.0)) throw PreconditionError("side length must be positive");
  plan.rho_sup = rho.sup_value();
  plan.rho_inf = rho.inf_value();
  const Rational l_pow = pow(from_double(plan.l), static_cast<unsigned>(d));

  const std::int64_t cells = int_pow(m, d);
  std::vector<Rational> exact(static_cast<std::size_t>(cells));
  std::vector<Rational> fractional(static_cast<std::size_t>(cells));
  std::int64_t floor_sum = 0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    exact[k] = l_pow * cell_integral_exact(rho, unit_cell(unflatten(k, m, d), m));
    BigInt fl = floor_of(exact[k]);
    plan.floors.push_back(to_int64(fl));
    plan.cell_integrals.push_back(to_double(exact[k]));
    fractional[k] = exact[k] - Rational(fl);
    floor_sum += plan.floors.back();
  }
  try {
    plan.target_side = choose_power_target(floor_sum, cells, d);
  } catch (const PreconditionError&) {
    throw PreconditionError("m too small: no d-th power within m^d of the floor sum " + std::to_string(floor_sum));
  }
  std::int64_t extra = int_pow(plan.target_side, d) - floor_sum;
  std::vector<std::size_t> order(exact.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fractional[a] > fractional[b]; });
  plan.plus_one_cells.assign(order.begin(), order.begin() + extra);
  std::sort(plan.plus_one_cells.begin(), plan.plus_one_cells.end());
  plan.counts = plan.floors;
  for (auto k : plan.plus_one_cells) ++plan.counts[k];
  for (std::size_t k = 0; k < plan.counts.size(); ++k)
    if (plan.counts[k] == 0)
      throw PreconditionError("resolution/contrast mismatch: cell " + std::to_string(k) + " receives no point");
  plan.separation = 1.0 / (4.0 * std::pow(plan.rho_sup, 1.0 / d));

  const Rational scale = l_pow / pow(ri(m), static_cast<unsigned>(d));
  const BigInt lo = floor_of(from_double(plan.rho_inf) * scale);
  const BigInt hi = floor_of(from_double(plan.rho_sup) * scale) + 1;
  for (auto n : plan.counts)
    if (BigInt(static_cast<long>(n)) < lo || BigInt(static_cast<long>(n)) > hi)
      throw InvariantError("cell count outside [floor(inf l^d/m^d), floor(sup l^d/m^d)+1]");
  return plan;
}

SeparatedSet encode_stage(const StagePlan& plan) {
  SeparatedSet set;
  set.d = plan.d;
  set.r = plan.separation;
  set.n = plan.target_side;
  const double cell_side = plan.l / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < plan.counts.size(); ++k) {
    auto idx = unflatten(k, plan.m, plan.d);
    const std::int64_t n = plan.counts[k];
    const std::int64_t q = ceil_root(n, plan.d);
    const double h = cell_side / static_cast<double>(q);
    std::vector<std::int64_t> node(static_cast<std::size_t>(plan.d), 0);
    for (std::int64_t placed = 0; placed < n; ++placed) {
      Point x(static_cast<std::size_t>(plan.d));
      for (std::size_t a = 0; a < x.size(); ++a)
        x[a] = static_cast<double>(idx[a]) * cell_side + plan.separation / 2.0 + static_cast<double>(node[a]) * h;
      set.points.push_back(std::move(x));
      for (std::size_t a = node.size(); a-- > 0;) {
        if (++node[a] < q) break;
        node[a] = 0;
      }
    }
  }
  if (static_cast<std::int64_t>(set.points.size()) != int_pow(set.n, set.d))
    throw InvariantError("encoded set does not have n^d points");
  if (auto bad = separation_violation(set.points, set.r))
    throw InvariantError("encoded points " + std::to_string(bad->first) + " and " + std::to_string(bad->second) +
                         " are not r-separated");
  return set;
}

namespace {

std::vector<std::size_t> order_by_first_coordinate(const std::vector<Point>& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  return order;
}

}  // namespace

double min_pairwise_distance(const std::vector<Point>& points) {
  auto order = order_by_first_coordinate(points);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Point& a = points[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Point& b = points[order[j]];
      if (b[0] - a[0] >= best) break;
      best = std::min(best, distance(a, b));
    }
  }
  return best;
}

std::optional<std::pair<std::size_t, std::size_t>> separation_violation(const std::vector<Point>& points, double r) {
  auto order = order_by_first_coordinate(points);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Point& a = points[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Point& b = points[order[j]];
      if (b[0] - a[0] > r) break;
      if (distance(a, b) <= r) return std::make_pair(std::min(order[i], order[j]), std::max(order[i], order[j]));
    }
  }
  return std::nullopt;
}

MeasureDeviation discrete_measure_deviation(const StagePlan& plan, const SeparatedSet& set, const GridDensity& rho) {
  if (set.d != plan.d || rho.dim() != plan.d) throw PreconditionError("dimensions of plan, set and density differ");
  const std::size_t cells = plan.counts.size();
  std::vector<std::int64_t> hits(cells, 0);
  const double cell_side = plan.l / static_cast<double>(plan.m);
  for (const auto& x : set.points) {
    std::size_t flat = 0;
    for (double c : x) {
      auto i = static_cast<std::int64_t>(std::floor(c / cell_side));
      i = std::clamp<std::int64_t>(i, 0, plan.m - 1);
      flat = flat * static_cast<std::size_t>(plan.m) + static_cast<std::size_t>(i);
    }
    ++hits[flat];
  }
  const double total = static_cast<double>(set.points.size());
  const double l_pow = std::pow(plan.l, plan.d);
  const double mass_cap = rho.sup_value() / std::pow(static_cast<double>(plan.m), plan.d);
  MeasureDeviation out;
  for (std::size_t k = 0; k < cells; ++k) {
    double mass = to_double(cell_integral_exact(rho, unit_cell(unflatten(k, plan.m, plan.d), plan.m)));
    double dev = std::abs(static_cast<double>(hits[k]) / total - mass);
    out.per_cell.push_back(dev);
    out.bound.push_back(1.0 / total + mass_cap * std::abs(l_pow / total - 1.0));
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  return out;
}

std::vector<std::vector<std::int64_t>> integerize(const SeparatedSet& set, std::optional<double> scale) {
  double s = scale ? *scale : static_cast<double>(set.d) / set.r;
  if (!(s > 0.0)) throw PreconditionError("integerization scale must be positive");
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(set.points.size());
  for (const auto& x : set.points) {
    std::vector<std::int64_t> z;
    for (double c : x) z.push_back(static_cast<std::int64_t>(std::ceil(c * s - 0.5)));
    out.push_back(std::move(z));
  }
  std::set<std::vector<std::int64_t>> seen(out.begin(), out.end());
  if (seen.size() != out.size()) throw InvariantError("integerization is not injective");
  return out;
}

}  // namespace lipgrid
