#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "lipgrid/assign.hpp"
#include "lipgrid/errors.hpp"

namespace lipgrid {

namespace {

// Sort by the first coordinate into n slabs, each slab by the second
// coordinate into n sub-slabs, and so on; slab indices give grid coordinates.
std::vector<std::size_t> slab_sort(const std::vector<Point>& points, std::int64_t n) {
  const std::size_t d = points.front().size();
  std::vector<std::size_t> perm(points.size());
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto recurse = [&](auto&& self, std::size_t first, std::size_t last, std::size_t axis, std::size_t prefix) -> void {
    if (axis == d) {
      perm[idx[first]] = prefix;
      return;
    }
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(first), idx.begin() + static_cast<std::ptrdiff_t>(last),
                     [&](std::size_t a, std::size_t b) { return points[a][axis] < points[b][axis]; });
    const std::size_t block = (last - first) / static_cast<std::size_t>(n);
    for (std::int64_t s = 0; s < n; ++s) {
      std::size_t lo = first + static_cast<std::size_t>(s) * block;
      self(self, lo, lo + block, axis + 1, prefix * static_cast<std::size_t>(n) + static_cast<std::size_t>(s));
    }
  };
  recurse(recurse, 0, points.size(), 0, 0);
  return perm;
}

// Keeps the largest stretch seen from every source point under pair swaps.
class RowMaxTracker {
 public:
  RowMaxTracker(const StretchContext& ctx, std::vector<std::size_t> perm) : ctx_(ctx), perm_(std::move(perm)) {
    rows_.assign(ctx.size(), 0.0);
    for (std::size_t i = 0; i < ctx.size(); ++i)
      for (std::size_t j = i + 1; j < ctx.size(); ++j) {
        double v = pair(i, j);
        rows_[i] = std::max(rows_[i], v);
        rows_[j] = std::max(rows_[j], v);
      }
  }

  double pair(std::size_t i, std::size_t j) const {
    return StretchContext::value(ctx_.stretch(i, j, perm_[i], perm_[j]));
  }

  void swap(std::size_t i, std::size_t j) {
    undo_.clear();
    const std::size_t N = ctx_.size();
    std::vector<double> old_i(N), old_j(N);
    for (std::size_t k = 0; k < N; ++k) {
      if (k == i || k == j) continue;
      old_i[k] = pair(k, i);
      old_j[k] = pair(k, j);
    }
    std::swap(perm_[i], perm_[j]);
    swapped_ = {i, j};
    undo_.push_back({i, rows_[i]});
    undo_.push_back({j, rows_[j]});
    double ri = pair(i, j), rj = ri;
    for (std::size_t k = 0; k < N; ++k) {
      if (k == i || k == j) continue;
      double ni = pair(k, i), nj = pair(k, j);
      ri = std::max(ri, ni);
      rj = std::max(rj, nj);
      double fresh = std::max(ni, nj);
      if (fresh >= rows_[k]) {
        undo_.push_back({k, rows_[k]});
        rows_[k] = fresh;
      } else if (old_i[k] == rows_[k] || old_j[k] == rows_[k]) {
        undo_.push_back({k, rows_[k]});
        rows_[k] = recompute(k);
      }
    }
    rows_[i] = ri;
    rows_[j] = rj;
  }

  void revert() {
    std::swap(perm_[swapped_.first], perm_[swapped_.second]);
    for (auto it = undo_.rbegin(); it != undo_.rend(); ++it) rows_[it->first] = it->second;
    undo_.clear();
  }

  double bottleneck() const { return rows_.empty() ? 0.0 : *std::max_element(rows_.begin(), rows_.end()); }
  std::vector<double> spectrum() const {
    std::vector<double> s = rows_;
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  }
  const std::vector<double>& rows() const { return rows_; }
  const std::vector<std::size_t>& perm() const { return perm_; }

 private:
  double recompute(std::size_t k) const {
    double r = 0.0;
    for (std::size_t j = 0; j < ctx_.size(); ++j)
      if (j != k) r = std::max(r, pair(k, j));
    return r;
  }

  const StretchContext& ctx_;
  std::vector<std::size_t> perm_;
  std::vector<double> rows_;
  std::vector<std::pair<std::size_t, double>> undo_;
  std::pair<std::size_t, std::size_t> swapped_{0, 0};
};

// First differing entry of two spectra (candidate minus current); 0 if equal.
double spectrum_delta(const std::vector<double>& candidate, const std::vector<double>& current) {
  for (std::size_t k = 0; k < candidate.size(); ++k)
    if (candidate[k] != current[k]) return candidate[k] - current[k];
  return 0.0;
}

struct Objective {
  double bottleneck;
  std::vector<double> spectrum;
  std::vector<std::size_t> perm;

  bool better_than(const Objective& o) const {
    if (bottleneck != o.bottleneck) return bottleneck < o.bottleneck;
    if (spectrum != o.spectrum) return spectrum < o.spectrum;
    return perm < o.perm;
  }
};

Objective anneal_once(const StretchContext& ctx, std::vector<std::size_t> start, std::uint64_t proposals,
                      const AnnealSchedule& schedule, std::mt19937_64& rng) {
  RowMaxTracker state(ctx, std::move(start));
  Objective best{state.bottleneck(), state.spectrum(), state.perm()};
  const std::size_t N = ctx.size();
  if (N < 2 || proposals == 0) return best;
  const double scale = std::max(best.bottleneck, 1e-12);
  const double t0 = schedule.initial_temperature * scale;
  const double t1 = schedule.final_temperature * scale;
  const double ratio = proposals > 1 ? std::pow(t1 / t0, 1.0 / static_cast<double>(proposals - 1)) : 1.0;
  std::uniform_int_distribution<std::size_t> any(0, N - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double current_b = state.bottleneck();
  std::vector<double> current_s = state.spectrum();
  double temperature = t0;
  std::vector<std::size_t> critical;
  for (std::uint64_t step = 0; step < proposals; ++step, temperature *= ratio) {
    std::size_t i = any(rng);
    if (unit(rng) < 0.5) {
      critical.clear();
      const auto& rows = state.rows();
      for (std::size_t k = 0; k < N; ++k)
        if (rows[k] == current_b) critical.push_back(k);
      i = critical[std::uniform_int_distribution<std::size_t>(0, critical.size() - 1)(rng)];
    }
    std::size_t j = any(rng);
    if (j == i) continue;
    state.swap(i, j);
    double cand_b = state.bottleneck();
    double delta = cand_b - current_b;
    std::vector<double> cand_s;
    if (delta == 0.0) {
      cand_s = state.spectrum();
      delta = spectrum_delta(cand_s, current_s);
    }
    bool accept = delta <= 0.0 || unit(rng) < std::exp(-delta / temperature);
    if (!accept) {
      state.revert();
      continue;
    }
    current_b = cand_b;
    current_s = cand_s.empty() ? state.spectrum() : std::move(cand_s);
    if (current_b < best.bottleneck || (current_b == best.bottleneck && current_s < best.spectrum)) {
      best.bottleneck = current_b;
      best.spectrum = current_s;
      best.perm = state.perm();
    }
  }
  return best;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

BoundsReport solve_heuristic(const std::vector<Point>& points, std::int64_t n, std::uint64_t seed,
                             const AnnealSchedule& schedule) {
  if (schedule.restarts < 1) throw PreconditionError("at least one restart is needed");
  if (!(schedule.initial_temperature > 0.0 && schedule.final_temperature > 0.0))
    throw PreconditionError("temperatures must be positive");
  StretchContext ctx(points, n);
  BoundsReport report;
  report.seed = seed;
  const std::uint64_t N = ctx.size();
  const std::uint64_t proposals = schedule.proposals ? schedule.proposals : 200 * N * N;

  auto start = std::chrono::steady_clock::now();
  Assignment sorted = sorted_assignment(points, n);
  Objective best{sorted.bottleneck, sorted.stretch_spectrum, sorted.permutation};
  std::vector<std::size_t> initial = slab_sort(points, n);
  // Restarts use independent streams and merge by a total order, so running
  // them in any order or concurrently gives the same answer.
  for (int r = 0; r < schedule.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Objective found = anneal_once(ctx, initial, proposals, schedule, rng);
    if (found.better_than(best)) best = std::move(found);
  }
  report.wall_time_ms["anneal"] = elapsed_ms(start);

  report.best.permutation = best.perm;
  report.best.grid_n = n;
  report.best.bottleneck = lipschitz_constant(points, report.best);
  report.best.stretch_spectrum = best.spectrum;
  report.upper = report.best.bottleneck;

  auto lb_start = std::chrono::steady_clock::now();
  report.lower = counting_lower_bound(points);
  report.wall_time_ms["lower_bound"] = elapsed_ms(lb_start);
  return report;
}

}  // namespace lipgrid
