#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "lipgrid/assign.hpp"
#include "lipgrid/errors.hpp"

using namespace lipgrid;

namespace {

// Exhaustive minimum of the bottleneck over all bijections, integer arithmetic
// on squared distances, comparing fractions by cross multiplication.
double brute_force(const std::vector<Point>& pts, std::int64_t n) {
  const std::size_t N = pts.size(), d = pts.front().size();
  std::vector<std::vector<std::int64_t>> cell(N);
  for (std::size_t g = 0; g < N; ++g) {
    std::size_t rest = g;
    cell[g].resize(d);
    for (std::size_t k = d; k-- > 0;) {
      cell[g][k] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
  }
  auto sq = [&](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
  };
  std::vector<std::vector<std::int64_t>> src(N);
  for (std::size_t i = 0; i < N; ++i)
    for (double c : pts[i]) src[i].push_back(static_cast<std::int64_t>(c));
  std::vector<std::size_t> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best_num = -1, best_den = 1;
  do {
    std::int64_t num = 0, den = 1;
    for (std::size_t i = 0; i < N && (best_num < 0 || num * best_den < best_num * den); ++i)
      for (std::size_t j = i + 1; j < N; ++j) {
        std::int64_t a = sq(cell[perm[i]], cell[perm[j]]), b = sq(src[i], src[j]);
        if (a * den > num * b) {
          num = a;
          den = b;
        }
      }
    if (best_num < 0 || num * best_den < best_num * den) {
      best_num = num;
      best_den = den;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(static_cast<double>(best_num) / static_cast<double>(best_den));
}

std::vector<Point> grid_points(std::int64_t n) {
  std::vector<Point> pts;
  for (std::int64_t i = 1; i <= n; ++i)
    for (std::int64_t j = 1; j <= n; ++j) pts.push_back({static_cast<double>(i), static_cast<double>(j)});
  return pts;
}

std::vector<Point> random_integer_set(std::mt19937& gen, std::size_t count, int side) {
  std::uniform_int_distribution<int> u(0, side);
  std::set<Point> seen;
  while (seen.size() < count) seen.insert({static_cast<double>(u(gen)), static_cast<double>(u(gen))});
  std::vector<Point> pts(seen.begin(), seen.end());
  std::shuffle(pts.begin(), pts.end(), gen);
  return pts;
}

// max over centres and radii of (k^(1/d) - 1) / (2t)
double counting_oracle(const std::vector<Point>& pts) {
  double best = 0.0;
  for (const auto& c : pts)
    for (const auto& q : pts) {
      double t = distance(c, q);
      if (t == 0.0) continue;
      double k = 0;
      for (const auto& p : pts) k += distance(c, p) <= t ? 1 : 0;
      best = std::max(best, (std::pow(k, 1.0 / static_cast<double>(c.size())) - 1) / (2 * t));
    }
  return best;
}

}  // namespace

TEST_SUITE("assign") {
  TEST_CASE("grid coordinates are one based, last axis fastest") {
    CHECK(grid_coordinates(0, 3, 2) == std::vector<std::int64_t>{1, 1});
    CHECK(grid_coordinates(5, 3, 2) == std::vector<std::int64_t>{2, 3});
    CHECK(grid_coordinates(8, 3, 2) == std::vector<std::int64_t>{3, 3});
  }

  TEST_CASE("lipschitz constant of small assignments") {
    Assignment id{{0, 1, 2, 3}, 2, 0, {}};
    CHECK(lipschitz_constant(grid_points(2), id) == 1.0);
    CHECK(lipschitz_constant({{0.0}, {2.0}}, Assignment{{0, 1}, 2, 0, {}}) == 0.5);
    std::vector<Point> corners{{0, 0}, {0, 3}, {3, 0}, {3, 3}};
    CHECK(lipschitz_constant(corners, id) == doctest::Approx(1.0 / 3.0));
    CHECK(brute_force(corners, 2) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(lipschitz_constant(corners, Assignment{{0, 0, 1, 2}, 2, 0, {}}), PreconditionError);
    CHECK_THROWS_AS(lipschitz_constant({{0, 0}, {1, 1}}, Assignment{{0, 1}, 2, 0, {}}), PreconditionError);
  }

  TEST_CASE("exact solver on known instances") {
    for (std::int64_t n : {2, 3}) {
      BoundsReport r = solve_exact(grid_points(n), n);
      REQUIRE(r.exact);
      CHECK(*r.exact == 1.0);
      CHECK(r.lower == 1.0);
      CHECK(r.upper == 1.0);
    }
    std::vector<Point> line{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    BoundsReport r = solve_exact(line, 2);
    REQUIRE(r.exact);
    CHECK(*r.exact == 1.0);
    CHECK(brute_force(line, 2) == 1.0);
    BoundsReport c = solve_exact({{0, 0}, {3, 0}, {0, 3}, {3, 3}}, 2);
    REQUIRE(c.exact);
    CHECK(*c.exact == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(lipschitz_constant({{0, 0}, {3, 0}, {0, 3}, {3, 3}}, c.best) == *c.exact);
  }

  TEST_CASE("exact solver matches enumeration") {
    std::mt19937 gen(2024);
    for (int trial = 0; trial < 8; ++trial) {
      auto pts = random_integer_set(gen, 9, 6);
      BoundsReport r = solve_exact(pts, 3);
      REQUIRE(r.exact);
      CHECK(*r.exact == doctest::Approx(brute_force(pts, 3)).epsilon(1e-15));
      CHECK(lipschitz_constant(pts, r.best) == doctest::Approx(*r.exact).epsilon(1e-15));
    }
  }

  TEST_CASE("exact solver on non-integer input") {
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<Point> pts;
    for (int i = 0; i < 4; ++i) pts.push_back({u(gen), u(gen)});
    BoundsReport r = solve_exact(pts, 2);
    REQUIRE(r.exact);
    // all 24 bijections by hand
    std::vector<std::size_t> perm{0, 1, 2, 3};
    double best = INFINITY;
    do {
      best = std::min(best, lipschitz_constant(pts, Assignment{perm, 2, 0, {}}));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(*r.exact == doctest::Approx(best).epsilon(1e-14));
  }

  TEST_CASE("budget exhaustion keeps valid bounds") {
    std::mt19937 gen(5);
    auto pts = random_integer_set(gen, 16, 9);
    BoundsReport r = solve_exact(pts, 4, 50);
    CHECK(r.budget_exhausted);
    CHECK_FALSE(r.exact);
    CHECK(r.lower <= r.upper);
    CHECK(lipschitz_constant(pts, r.best) == doctest::Approx(r.upper));
  }

  TEST_CASE("heuristic") {
    for (std::int64_t n : {2, 3, 4}) {
      BoundsReport r = solve_heuristic(grid_points(n), n, 11);
      CHECK(r.upper == 1.0);
    }
    std::mt19937 gen(6);
    auto pts = random_integer_set(gen, 25, 12);
    BoundsReport a = solve_heuristic(pts, 5, 99);
    BoundsReport b = solve_heuristic(pts, 5, 99);
    CHECK(a.upper == b.upper);
    CHECK(a.lower == b.lower);
    CHECK(a.best.permutation == b.best.permutation);
    CHECK(a.best.stretch_spectrum == b.best.stretch_spectrum);
    CHECK(lipschitz_constant(pts, a.best) == doctest::Approx(a.upper));
    CHECK(a.lower <= a.upper);
    CHECK(a.upper <= lipschitz_constant(pts, sorted_assignment(pts, 5)));
  }

  TEST_CASE("bounds bracket the exact value") {
    std::mt19937 gen(77);
    for (int trial = 0; trial < 15; ++trial) {
      auto pts = random_integer_set(gen, 9, 6);
      BoundsReport e = solve_exact(pts, 3);
      BoundsReport h = solve_heuristic(pts, 3, static_cast<std::uint64_t>(trial));
      REQUIRE(e.exact);
      CHECK(counting_lower_bound(pts) <= *e.exact + 1e-12);
      CHECK(h.lower <= *e.exact + 1e-12);
      CHECK(*e.exact <= h.upper + 1e-12);
    }
  }

  TEST_CASE("counting bound") {
    CHECK(counting_lower_bound({{0.5, 0.5}}) == 0.0);
    std::vector<Point> cross{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    CHECK(counting_lower_bound(cross) == doctest::Approx((std::sqrt(5.0) - 1) / 2));
    std::vector<Point> half;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        if (i * i + j * j <= 4) half.push_back({i * 0.5, j * 0.5});
    REQUIRE(half.size() == 13);
    double b = counting_lower_bound(half);
    CHECK(b >= (std::sqrt(13.0) - 1) / 2 - 1e-12);
    CHECK(b == doctest::Approx(counting_oracle(half)));
    std::mt19937 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
      auto pts = random_integer_set(gen, 16, 8);
      CHECK(counting_lower_bound(pts) == doctest::Approx(counting_oracle(pts)));
    }
  }

  TEST_CASE("sorted assignment stays below sqrt(d) n on integer sets") {
    std::mt19937 gen(31);
    for (int trial = 0; trial < 30; ++trial) {
      std::int64_t n = 2 + trial % 4;
      auto pts = random_integer_set(gen, static_cast<std::size_t>(n * n), 3 * static_cast<int>(n));
      Assignment a = sorted_assignment(pts, n);
      CHECK(lipschitz_constant(pts, a) <= std::sqrt(2.0) * static_cast<double>(n));
      CHECK(a.bottleneck == doctest::Approx(lipschitz_constant(pts, a)));
      CHECK(std::is_sorted(a.stretch_spectrum.rbegin(), a.stretch_spectrum.rend()));
    }
  }
}
