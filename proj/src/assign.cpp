#include "lipgrid/assign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "lipgrid/errors.hpp"

namespace lipgrid {

std::vector<std::int64_t> grid_coordinates(std::size_t index, std::int64_t n, std::size_t d) {
  std::vector<std::int64_t> c(d);
  for (std::size_t k = d; k-- > 0;) {
    c[k] = static_cast<std::int64_t>(index % static_cast<std::size_t>(n)) + 1;
    index /= static_cast<std::size_t>(n);
  }
  return c;
}

StretchContext::StretchContext(const std::vector<Point>& points, std::int64_t n_) : n(n_) {
  if (points.empty()) throw PreconditionError("empty point set");
  if (n < 1) throw PreconditionError("grid side must be positive");
  count = points.size();
  dim = points.front().size();
  double expected = std::pow(static_cast<double>(n), static_cast<double>(dim));
  if (static_cast<double>(count) != expected)
    throw PreconditionError("point set has " + std::to_string(count) + " points, grid has " +
                            std::to_string(static_cast<long long>(expected)));
  integral = true;
  coords.reserve(count * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw PreconditionError("points of different dimension");
    for (double c : p) {
      if (!std::isfinite(c)) throw PreconditionError("non-finite coordinate");
      if (c != std::floor(c) || std::abs(c) > 67108864.0) integral = false;
      coords.push_back(c);
    }
  }
  grid.reserve(count * dim);
  for (std::size_t g = 0; g < count; ++g) {
    auto c = grid_coordinates(g, n, dim);
    grid.insert(grid.end(), c.begin(), c.end());
  }
}

double StretchContext::source_sq(std::size_t i, std::size_t j) const {
  const double* a = coords.data() + i * dim;
  const double* b = coords.data() + j * dim;
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

std::int64_t StretchContext::grid_sq(std::size_t a, std::size_t b) const {
  const std::int64_t* p = grid.data() + a * dim;
  const std::int64_t* q = grid.data() + b * dim;
  std::int64_t s = 0;
  for (std::size_t k = 0; k < dim; ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
  return s;
}

bool StretchContext::less(const Stretch& a, const Stretch& b) const {
  if (a.den == 0.0) return false;  // a is infinite
  if (b.den == 0.0) return true;
  if (integral) {
    auto an = static_cast<__int128>(a.num), ad = static_cast<__int128>(a.den);
    auto bn = static_cast<__int128>(b.num), bd = static_cast<__int128>(b.den);
    return an * bd < bn * ad;
  }
  return a.num * b.den < b.num * a.den;
}

double StretchContext::value(const Stretch& s) {
  if (s.den == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(s.num / s.den);
}

namespace {

void check_bijection(const Assignment& a, std::size_t count) {
  if (a.permutation.size() != count) throw PreconditionError("assignment size differs from the point count");
  std::vector<bool> hit(count, false);
  for (auto g : a.permutation) {
    if (g >= count || hit[g]) throw PreconditionError("assignment is not a bijection onto the grid");
    hit[g] = true;
  }
}

}  // namespace

double lipschitz_constant(const std::vector<Point>& points, const Assignment& assignment) {
  StretchContext ctx(points, assignment.grid_n);
  check_bijection(assignment, ctx.size());
  StretchContext::Stretch worst{0.0, 1.0};
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = i + 1; j < ctx.size(); ++j) {
      auto s = ctx.stretch(i, j, assignment.permutation[i], assignment.permutation[j]);
      if (ctx.less(worst, s)) worst = s;
    }
  return StretchContext::value(worst);
}

namespace {

std::vector<double> spectrum_of(const StretchContext& ctx, const std::vector<std::size_t>& perm) {
  std::vector<double> rows(ctx.size(), 0.0);
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = i + 1; j < ctx.size(); ++j) {
      double v = StretchContext::value(ctx.stretch(i, j, perm[i], perm[j]));
      rows[i] = std::max(rows[i], v);
      rows[j] = std::max(rows[j], v);
    }
  std::sort(rows.begin(), rows.end(), std::greater<>());
  return rows;
}

Assignment finish(const StretchContext& ctx, std::vector<std::size_t> perm, std::int64_t n) {
  Assignment a;
  a.permutation = std::move(perm);
  a.grid_n = n;
  a.stretch_spectrum = spectrum_of(ctx, a.permutation);
  a.bottleneck = a.stretch_spectrum.empty() ? 0.0 : a.stretch_spectrum.front();
  return a;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Assignment sorted_assignment(const std::vector<Point>& points, std::int64_t n) {
  StretchContext ctx(points, n);
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<std::size_t> perm(points.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) perm[order[rank]] = rank;
  return finish(ctx, std::move(perm), n);
}

double counting_lower_bound(const std::vector<Point>& points) {
  if (points.size() < 2) return 0.0;
  const std::size_t d = points.front().size();
  double best = 0.0;
  std::vector<double> sq(points.size() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double t = points[i][k] - points[j][k];
        s += t * t;
      }
      sq[w++] = s;
    }
    std::sort(sq.begin(), sq.end());
    for (std::size_t j = 0; j < sq.size(); ++j) {
      if (j + 1 < sq.size() && sq[j + 1] == sq[j]) continue;  // count the whole tie group
      if (sq[j] == 0.0) continue;
      double k = static_cast<double>(j + 2);  // centre plus j+1 neighbours
      double t = std::sqrt(sq[j]);
      best = std::max(best, (std::pow(k, 1.0 / static_cast<double>(d)) - 1.0) / (2.0 * t));
    }
  }
  return best;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const StretchContext& ctx, std::uint64_t budget) : ctx_(ctx), budget_(budget) {
    const std::size_t N = ctx.size();
    // Crowding: neighbours at the smallest pairwise distance of the set.
    double min_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) min_sq = std::min(min_sq, ctx.source_sq(i, j));
    std::vector<std::size_t> crowd(N, 0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        if (i != j && ctx.source_sq(i, j) <= min_sq) ++crowd[i];
    order_.resize(N);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
    cell_.assign(N, 0);
    used_.assign(N, false);
    // Grid symmetries (axis reflections and permutations) let the first
    // point start in a fundamental domain.
    for (std::size_t g = 0; g < N; ++g) {
      auto c = grid_coordinates(g, ctx.n, ctx.dim);
      bool fundamental = true;
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (2 * c[k] > ctx.n + 1) fundamental = false;
        if (k > 0 && c[k - 1] > c[k]) fundamental = false;
      }
      if (fundamental) first_cells_.push_back(g);
    }
  }

  void run(std::vector<std::size_t> incumbent_perm, StretchContext::Stretch incumbent) {
    best_perm_ = std::move(incumbent_perm);
    best_ = incumbent;
    dfs(0, StretchContext::Stretch{0.0, 1.0});
  }

  bool exhausted() const { return exhausted_; }
  std::uint64_t nodes() const { return nodes_; }
  const std::vector<std::size_t>& best_perm() const { return best_perm_; }
  StretchContext::Stretch best() const { return best_; }

 private:
  void dfs(std::size_t depth, StretchContext::Stretch partial) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    const std::size_t N = ctx_.size();
    if (depth == N) {
      if (ctx_.less(partial, best_)) {
        best_ = partial;
        for (std::size_t t = 0; t < N; ++t) best_perm_[order_[t]] = cell_[t];
      }
      return;
    }
    const std::size_t i = order_[depth];
    struct Candidate {
      std::size_t cell;
      StretchContext::Stretch value;
    };
    std::vector<Candidate> cands;
    auto consider = [&](std::size_t g) {
      StretchContext::Stretch v = partial;
      for (std::size_t s = 0; s < depth; ++s) {
        auto st = ctx_.stretch(i, order_[s], g, cell_[s]);
        if (ctx_.less(v, st)) v = st;
        if (!ctx_.less(v, best_)) return;
      }
      cands.push_back({g, v});
    };
    if (depth == 0) {
      for (auto g : first_cells_) consider(g);
    } else {
      for (std::size_t g = 0; g < N; ++g)
        if (!used_[g]) consider(g);
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [&](const Candidate& a, const Candidate& b) { return ctx_.less(a.value, b.value); });
    for (const auto& c : cands) {
      if (!ctx_.less(c.value, best_)) break;
      used_[c.cell] = true;
      cell_[depth] = c.cell;
      dfs(depth + 1, c.value);
      used_[c.cell] = false;
      if (exhausted_) return;
    }
  }

  const StretchContext& ctx_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> cell_;
  std::vector<bool> used_;
  std::vector<std::size_t> first_cells_;
  std::vector<std::size_t> best_perm_;
  StretchContext::Stretch best_;
};

}  // namespace

BoundsReport solve_exact(const std::vector<Point>& points, std::int64_t n, std::uint64_t node_budget) {
  auto start = std::chrono::steady_clock::now();
  StretchContext ctx(points, n);
  BoundsReport report;
  Assignment initial = sorted_assignment(points, n);
  StretchContext::Stretch incumbent{0.0, 1.0};
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = i + 1; j < ctx.size(); ++j) {
      auto s = ctx.stretch(i, j, initial.permutation[i], initial.permutation[j]);
      if (ctx.less(incumbent, s)) incumbent = s;
    }
  BranchAndBound bnb(ctx, node_budget);
  bnb.run(initial.permutation, incumbent);
  report.nodes = bnb.nodes();
  report.best = finish(ctx, bnb.best_perm(), n);
  report.upper = StretchContext::value(bnb.best());
  report.best.bottleneck = report.upper;
  report.wall_time_ms["branch_and_bound"] = elapsed_ms(start);
  if (bnb.exhausted()) {
    auto lb_start = std::chrono::steady_clock::now();
    report.budget_exhausted = true;
    report.lower = std::min(counting_lower_bound(points), report.upper);
    report.wall_time_ms["lower_bound"] = elapsed_ms(lb_start);
  } else {
    report.exact = report.upper;
    report.lower = report.upper;
  }
  return report;
}

}  // namespace lipgrid
