#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "lipgrid/encoder.hpp"
#include "lipgrid/errors.hpp"

using namespace lipgrid;

namespace {

GridDensity random_density(std::mt19937& gen, int d, std::int64_t m, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(m);
  std::vector<double> cells(n);
  for (auto& c : cells) c = u(gen);
  return GridDensity(d, m, cells);
}

bool is_power(std::size_t count, int d, std::int64_t n) {
  std::size_t p = 1;
  for (int k = 0; k < d; ++k) p *= static_cast<std::size_t>(n);
  return p == count;
}

}  // namespace

TEST_SUITE("encoder") {
  TEST_CASE("normalisation") {
    GridDensity five = normalize_density(GridDensity::constant(2, 3, 5.0));
    for (double v : five.cells()) CHECK(v == 1.0);
    GridDensity two = normalize_density(GridDensity(1, 2, {1, 3}));
    CHECK(two.cells() == std::vector<double>{0.5, 1.5});
    std::mt19937 gen(1);
    for (int t = 0; t < 20; ++t) {
      GridDensity r = normalize_density(random_density(gen, 2, 7, 0.1, 4.0));
      double mean = 0;
      for (double v : r.cells()) mean += v;
      CHECK(std::abs(mean / static_cast<double>(r.size()) - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(normalize_density(GridDensity(1, 2, {0, 1})), PreconditionError);
  }

  TEST_CASE("power target") {
    CHECK(choose_power_target(9, 0, 2) == 3);
    CHECK(choose_power_target(10, 6, 2) == 4);
    CHECK_THROWS_AS(choose_power_target(10, 5, 2), PreconditionError);
    CHECK(choose_power_target(27, 0, 3) == 3);
    CHECK(choose_power_target(28, 36, 3) == 4);
  }

  TEST_CASE("constant density with an integer ratio") {
    StagePlan plan = plan_stage(GridDensity::constant(2, 5, 1.0), 2, 0.5, 4.0);
    for (double v : plan.cell_integrals) CHECK(v == 4.0);
    CHECK(plan.floors == std::vector<std::int64_t>{4, 4, 4, 4});
    CHECK(plan.plus_one_cells.empty());
    CHECK(plan.target_side == 4);
    CHECK(plan.separation == 0.25);

    SeparatedSet set = encode_stage(plan);
    CHECK(set.points.size() == 16);
    std::set<double> xs, ys;
    for (const auto& p : set.points) {
      xs.insert(p[0]);
      ys.insert(p[1]);
    }
    CHECK(xs == std::set<double>{0.125, 1.125, 2.125, 3.125});
    CHECK(ys == xs);
    CHECK(min_pairwise_distance(set.points) == 1.0);

    MeasureDeviation dev = discrete_measure_deviation(plan, set, GridDensity::constant(2, 5, 1.0));
    CHECK(dev.max_deviation <= 1.0 / 16.0);
  }

  TEST_CASE("floors of ten are lifted to sixteen") {
    // l = 3 on a 3x3 grid: each cell integral equals the cell value
    GridDensity rho(2, 3, {2.5, 2.25, 1.5, 1, 1, 1, 1.25, 1.25, 0.75});
    StagePlan plan = plan_stage(rho, 3, 0.5, 3.0);
    CHECK(plan.floors == std::vector<std::int64_t>{2, 2, 1, 1, 1, 1, 1, 1, 0});
    CHECK(plan.target_side == 4);
    // largest fractional parts first, ties by index
    CHECK(plan.plus_one_cells == std::vector<std::size_t>{0, 1, 2, 6, 7, 8});
    CHECK(plan.counts == std::vector<std::int64_t>{3, 3, 2, 1, 1, 1, 2, 2, 1});
  }

  TEST_CASE("single point cells sit at the shifted origin") {
    StagePlan plan = plan_stage(GridDensity::constant(2, 2, 1.0), 2, 0.5, 2.0);
    REQUIRE(plan.counts == std::vector<std::int64_t>{1, 1, 1, 1});
    SeparatedSet set = encode_stage(plan);
    REQUIRE(set.points.size() == 4);
    CHECK(set.points[0] == Point{0.125, 0.125});
    CHECK(set.points[3] == Point{1.125, 1.125});
  }

  TEST_CASE("plan errors") {
    GridDensity one = GridDensity::constant(2, 2, 1.0);
    CHECK_THROWS_AS(plan_stage(one, 2, 1.5), PreconditionError);
    CHECK_THROWS_AS(plan_stage(one, 0, 0.5), PreconditionError);
    // large contrast at a tiny side length leaves a cell empty
    std::vector<double> cells(16, 1.2);
    cells[0] = 0.01;
    CHECK_THROWS_AS(plan_stage(GridDensity(2, 4, cells), 4, 0.5), PreconditionError);
    CHECK_THROWS_AS(plan_stage(GridDensity::constant(3, 2, 1.0), 2, 0.4), PreconditionError);
  }

  TEST_CASE("stages stay separated with exact powers") {
    std::mt19937 gen(23);
    for (int trial = 0; trial < 12; ++trial) {
      GridDensity rho = normalize_density(random_density(gen, 2, 8, 0.5, 1.5));
      for (std::int64_t m : {4, 8}) {
        StagePlan plan = plan_stage(rho, m, 0.5);
        SeparatedSet set = encode_stage(plan);
        CHECK(is_power(set.points.size(), 2, set.n));
        CHECK(set.r == doctest::Approx(1.0 / (4.0 * std::sqrt(rho.sup_value()))));
        CHECK(min_pairwise_distance(set.points) > set.r);
        CHECK_FALSE(separation_violation(set.points, set.r));
        double scale = std::pow(plan.l, 2) / static_cast<double>(m * m);
        for (std::size_t k = 0; k < plan.counts.size(); ++k) {
          CHECK(plan.counts[k] >= plan.floors[k]);
          CHECK(plan.counts[k] <= plan.floors[k] + 1);
          CHECK(plan.counts[k] >= static_cast<std::int64_t>(std::floor(rho.inf_value() * scale)));
          CHECK(plan.counts[k] <= static_cast<std::int64_t>(std::floor(rho.sup_value() * scale)) + 1);
        }
        MeasureDeviation dev = discrete_measure_deviation(plan, set, rho);
        for (std::size_t k = 0; k < dev.per_cell.size(); ++k) CHECK(dev.per_cell[k] <= dev.bound[k]);
        CHECK_NOTHROW(integerize(set));
      }
    }
  }

  TEST_CASE("three dimensions") {
    std::mt19937 gen(4);
    GridDensity rho = normalize_density(random_density(gen, 3, 4, 0.8, 1.2));
    StagePlan plan = plan_stage(rho, 4, 0.4);
    SeparatedSet set = encode_stage(plan);
    CHECK(is_power(set.points.size(), 3, set.n));
    CHECK_FALSE(separation_violation(set.points, set.r));
  }

  TEST_CASE("separation checks") {
    std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {5, 5}};
    CHECK(min_pairwise_distance(pts) == 1.0);
    CHECK_FALSE(separation_violation(pts, 0.99));
    auto bad = separation_violation(pts, 1.0);
    REQUIRE(bad);
    CHECK(bad->first == 0);
    pts.push_back({5, 5});
    CHECK(min_pairwise_distance(pts) == 0.0);
  }

  TEST_CASE("integer rounding") {
    SeparatedSet grid{2, 2.0, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    auto z = integerize(grid);
    CHECK(z == std::vector<std::vector<std::int64_t>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    SeparatedSet one{2, 2.0, 1, {{0.4, 0.6}}};
    CHECK(integerize(one) == std::vector<std::vector<std::int64_t>>{{0, 1}});
    SeparatedSet tie{1, 1.0, 1, {{0.5}}};
    CHECK(integerize(tie) == std::vector<std::vector<std::int64_t>>{{0}});
    // points just over r apart stay distinct
    SeparatedSet close{2, 0.3, 1, {{0.0, 0.0}, {0.3000001, 0.0}}};
    auto zc = integerize(close);
    CHECK(zc[0] != zc[1]);
  }

  TEST_CASE("integerize is injective on random separated sets") {
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
      double r = 0.2 + 0.8 * u(gen) / 10.0;
      SeparatedSet s{2, r, 0, {}};
      while (s.points.size() < 60) {
        Point p{u(gen), u(gen)};
        bool ok = true;
        for (const auto& q : s.points) ok = ok && distance(p, q) > r;
        if (ok) s.points.push_back(p);
      }
      auto z = integerize(s);
      CHECK(std::set<std::vector<std::int64_t>>(z.begin(), z.end()).size() == z.size());
    }
  }
}
