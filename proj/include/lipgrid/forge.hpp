#pragma once

#include <cstdint>
#include <vector>

#include "lipgrid/geometry.hpp"

namespace lipgrid {

struct ChessboardSpec {
  std::vector<TiledFamily> families;  // nested, level 1 first
  double eps = 0.5;
  Rational eta = Rational(1, 9);
  Rational taper = Rational(1, 10);  // fraction of each cube side spent ramping to zero
};

// Chessboard perturbation at grid resolution m: every cube of every family
// averages +-8 eps/9 with opposite signs on e1-neighbours, values stay within
// [-eps, eps] and vanish outside the first family.
GridDensity chessboard(const ChessboardSpec& spec, std::int64_t resolution);

// Finest resolution multiple needed: cubes must consist of whole grid cells
// with at least four cells per axis.
std::int64_t chessboard_min_resolution(const std::vector<TiledFamily>& families);

GridDensity perturb_density(const GridDensity& base, const GridDensity& psi);

// Adds 0 or +-eps on each cube so that e1-neighbouring cube averages differ by
// at least eps. rho must resolve the cubes into whole cells.
GridDensity linf_chessboard(const TiledFamily& family, const GridDensity& rho, double eps);

// Smallest |average(S) - average(S')| over e1-adjacent cube pairs; +inf when
// there are none.
double adjacent_average_gap(const GridDensity& rho, const TiledFamily& family);

struct AdjacentPair {
  std::size_t left;
  std::size_t right;
};
std::vector<AdjacentPair> e1_adjacent_pairs(const TiledFamily& family);

// Radius of a porosity ball around a density: with b(C) = 1/(2C^2),
// eps / (2 (4 + C (|phi|_inf + 1 + 6 (L/b(C))^d))).
double porosity_radius(double eps, double C, double phi_sup, double L, int d);

// Density for the plane fold (x1 -> 1/2 - |x1 - 1/2|): psi on x1 < 1/2 and
// 1 - psi(reflected) on x1 > 1/2. The resolution must be even.
GridDensity fold_plane_density(const GridDensity& psi);

}  // namespace lipgrid
