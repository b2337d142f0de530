#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lipgrid/dichotomy.hpp"
#include "lipgrid/errors.hpp"
#include "lipgrid/forge.hpp"

using namespace lipgrid;

namespace {

std::vector<TiledFamily> families(int d, std::int64_t N, std::int64_t M, int levels) {
  NestedSpec spec;
  spec.d = d;
  spec.N = N;
  spec.M = M;
  spec.levels = levels;
  return build_nested_families(spec);
}

// Row of k unit-side/k cubes along e1 at height 0.
TiledFamily chain(int k) {
  TiledFamily f;
  Rational side = make_rational(1, k);
  for (int i = 0; i < k; ++i) f.cubes.push_back(Cube(side, RationalPoint{side * i, 0}));
  return f;
}

double exact_average(const GridDensity& rho, const Cube& c) { return to_double(cell_average_exact(rho, c)); }

}  // namespace

TEST_SUITE("forge") {
  TEST_CASE("one level of two cubes") {
    ChessboardSpec spec;
    spec.families = families(2, 2, 2, 1);
    spec.eps = 0.9;
    GridDensity psi = chessboard(spec, chessboard_min_resolution(spec.families));
    const auto& cubes = spec.families[0].cubes;
    CHECK(exact_average(psi, cubes[0]) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(exact_average(psi, cubes[1]) == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(adjacent_average_gap(psi, spec.families[0]) == doctest::Approx(1.6).epsilon(1e-12));
  }

  TEST_CASE("single level gap is 16 eps / 9") {
    for (double eps : {0.1, 0.3, 0.55, 0.9})
      for (std::int64_t N : {2, 3, 5}) {
        ChessboardSpec spec;
        spec.families = families(2, N, 1, 1);
        spec.eps = eps;
        GridDensity psi = chessboard(spec, chessboard_min_resolution(spec.families));
        CHECK(std::abs(adjacent_average_gap(psi, spec.families[0]) - 16 * eps / 9) <= 1e-9);
        CHECK(psi.sup_value() <= eps);
        CHECK(psi.inf_value() >= -eps);
      }
  }

  TEST_CASE("two nested levels keep the coarse gap") {
    ChessboardSpec spec;
    spec.families = families(2, 3, 2, 2);
    spec.eps = 0.6;
    GridDensity psi = chessboard(spec, chessboard_min_resolution(spec.families));
    CHECK(adjacent_average_gap(psi, spec.families[0]) >= 12 * 0.6 / 9 - 1e-12);
    CHECK(adjacent_average_gap(psi, spec.families[1]) == doctest::Approx(16 * 0.6 / 9).epsilon(1e-12));
  }

  TEST_CASE("support stays inside the first family") {
    ChessboardSpec spec;
    spec.families = families(2, 3, 2, 2);
    spec.eps = 0.5;
    std::int64_t m = chessboard_min_resolution(spec.families);
    GridDensity psi = chessboard(spec, m);
    std::vector<const Cube*> first;
    for (const auto& c : spec.families[0].cubes) first.push_back(&c);
    for (std::size_t f = 0; f < psi.size(); ++f) {
      if (psi.at(f) == 0.0) continue;
      auto idx = psi.multi_index(f);
      Cube cell(make_rational(1, m), RationalPoint{make_rational(idx[0], m), make_rational(idx[1], m)});
      CHECK(union_measure_within(cell, first) == cell.volume());
    }
  }

  TEST_CASE("chessboard preconditions") {
    ChessboardSpec spec;
    spec.families = families(2, 3, 2, 2);
    spec.eps = 0.5;
    std::int64_t m = chessboard_min_resolution(spec.families);
    CHECK_THROWS_AS(chessboard(spec, m + 1), PreconditionError);
    CHECK_THROWS_AS(chessboard(spec, m / 2), PreconditionError);
    spec.eps = 1.5;
    CHECK_THROWS_AS(chessboard(spec, m), PreconditionError);
    // two levels with N=2, M=1 overlap a quarter of each coarse cube
    ChessboardSpec dense;
    dense.families = families(2, 2, 1, 2);
    dense.eps = 0.5;
    CHECK_THROWS_AS(chessboard(dense, chessboard_min_resolution(dense.families)), PreconditionError);
  }

  TEST_CASE("perturbation") {
    ChessboardSpec spec;
    spec.families = families(2, 3, 1, 1);
    spec.eps = 0.7;
    std::int64_t m = chessboard_min_resolution(spec.families);
    GridDensity psi = chessboard(spec, m);
    GridDensity one = GridDensity::constant(2, m, 1.0);
    CHECK(perturb_density(one, GridDensity::constant(2, m, 0.0)).cells() == one.cells());
    GridDensity rho = perturb_density(one, psi);
    CHECK(rho.inf_value() >= 1 - 0.7);
    GridDensity three = perturb_density(GridDensity::constant(2, m, 3.0), psi);
    CHECK(adjacent_average_gap(three, spec.families[0]) ==
          doctest::Approx(adjacent_average_gap(psi, spec.families[0])).epsilon(1e-12));
    CHECK_THROWS_AS(perturb_density(GridDensity::constant(2, m + 1, 1.0), psi), PreconditionError);
  }

  TEST_CASE("L-infinity chessboard on a zero chain") {
    TiledFamily f = chain(3);
    GridDensity zero = GridDensity::constant(2, 6, 0.0);
    GridDensity psi = linf_chessboard(f, zero, 1.0);
    CHECK(exact_average(psi, f.cubes[0]) == 0.0);
    CHECK(exact_average(psi, f.cubes[1]) == 1.0);
    CHECK(exact_average(psi, f.cubes[2]) == 0.0);
  }

  TEST_CASE("L-infinity chessboard leaves separated cubes alone") {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cells(36);
    for (auto& c : cells) c = u(gen);
    GridDensity rho(2, 6, cells);
    TiledFamily single;
    single.cubes.push_back(Cube(make_rational(1, 3), RationalPoint{make_rational(1, 3), 0}));
    CHECK(linf_chessboard(single, rho, 0.5).cells() == rho.cells());

    // first cube averages 0, second 1: already apart by eps
    std::vector<double> two(36, 0.0);
    for (std::size_t k = 0; k < 36; ++k) {
      auto i = k / 6;
      if (i >= 3) two[k] = 1.0 + 0.1 * static_cast<double>(k % 2);
    }
    GridDensity rho2(2, 6, two);
    TiledFamily pair;
    pair.cubes = {Cube(Rational(1, 2), RationalPoint{0, 0}), Cube(Rational(1, 2), RationalPoint{Rational(1, 2), 0})};
    GridDensity psi = linf_chessboard(pair, rho2, 0.5);
    CHECK(psi.cells() == rho2.cells());
  }

  TEST_CASE("L-infinity chessboard invariants on random densities") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      int k = 2 + trial % 9;
      std::int64_t m = 2 * k;
      std::vector<double> cells(static_cast<std::size_t>(m * m));
      for (auto& c : cells) c = u(gen);
      GridDensity rho(2, m, cells);
      TiledFamily f = chain(k);
      double eps = 0.05 + 0.9 * u(gen);
      GridDensity psi = linf_chessboard(f, rho, eps);
      for (std::size_t i = 0; i < cells.size(); ++i) CHECK(std::abs(psi.at(i) - rho.at(i)) <= eps);
      for (std::size_t i = 0; i + 1 < f.cubes.size(); ++i) {
        Rational gap = cell_average_exact(psi, f.cubes[i + 1]) - cell_average_exact(psi, f.cubes[i]);
        CHECK(abs(gap) >= from_double(eps));
      }
    }
  }

  TEST_CASE("adjacent average gap") {
    TiledFamily f = chain(4);
    CHECK(adjacent_average_gap(GridDensity::constant(2, 8, 2.0), f) == 0.0);
    TiledFamily single;
    single.cubes.push_back(f.cubes[0]);
    CHECK(adjacent_average_gap(GridDensity::constant(2, 8, 2.0), single) == std::numeric_limits<double>::infinity());
    CHECK(e1_adjacent_pairs(f).size() == 3);
  }

  TEST_CASE("porosity radius formula") {
    // b(2) = 1/8, (L/b)^2 = 64
    double z = porosity_radius(0.5, 2.0, 1.0, 1.0, 2);
    CHECK(z == doctest::Approx(0.5 / (2 * (4 + 2 * (1 + 1 + 6 * 64)))));
    CHECK_THROWS(porosity_radius(0.5, 0.0, 1.0, 1.0, 2));
  }

  TEST_CASE("plane fold density") {
    GridDensity psi(2, 4, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2});
    GridDensity folded = fold_plane_density(psi);
    CHECK(folded.resolution() == 4);
    // rows with x1 < 1/2 keep psi; mirrored rows hold 1 - psi
    for (std::int64_t i = 0; i < 2; ++i)
      for (std::int64_t j = 0; j < 4; ++j) {
        CHECK(folded.at(folded.flat_index({i, j})) == psi.at(psi.flat_index({i, j})));
        CHECK(folded.at(folded.flat_index({3 - i, j})) == doctest::Approx(1 - psi.at(psi.flat_index({i, j}))));
      }
    CHECK_THROWS(fold_plane_density(GridDensity::constant(2, 3, 0.5)));
  }
}
