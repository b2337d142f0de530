#pragma once

#include <cstdint>
#include <vector>

#include "lipgrid/errors.hpp"
#include "lipgrid/extension.hpp"
#include "lipgrid/rational.hpp"
#include "lipgrid/sampled_map.hpp"

namespace lipgrid {

// Continuous piecewise-linear map of [0,1] with exact rational breakpoints
// 0 = b_0 < ... < b_k = 1 and values f(b_i).
struct PiecewiseLinear1D {
  std::vector<Rational> breakpoints;
  std::vector<Rational> values;

  static PiecewiseLinear1D identity();
  void validate() const;
  std::size_t pieces() const { return breakpoints.size() - 1; }
  Rational slope(std::size_t piece) const;
  Rational operator()(const Rational& x) const;
  bool is_lipschitz(const Rational& L) const;
  Rational sup_distance_to_identity() const;
  Rational image_min() const;
  Rational image_max() const;
  // Drops breakpoints between collinear pieces.
  PiecewiseLinear1D simplified() const;
};

// outer after inner
PiecewiseLinear1D compose(const PiecewiseLinear1D& outer, const PiecewiseLinear1D& inner);

// Identity up to a+c, then back down to a at a+2c, then x - 2c. The three
// intervals [a, a+c], [a+c, a+2c], [a+2c, a+3c] all land on [a, a+c].
PiecewiseLinear1D fold_map(const Rational& a, const Rational& c);

// Fat Cantor set: at stage s remove the open middle interval of length
// eps / 4^(s+1) from each of the 2^s remaining intervals.
struct FatCantorSpec {
  Rational eps;
};

struct Gap {
  Rational lo;
  Rational hi;
  Rational length() const { return hi - lo; }
};

// Removed intervals in stage order, left to right within a stage.
std::vector<Gap> fat_cantor_gaps(const FatCantorSpec& spec, std::size_t count);

struct FoldStep {
  Gap gap;
  Rational anchor;   // midpoint of the gap
  Rational width;    // fold width
  Rational image_a;  // image of the anchor under the previous folds; the fold is applied there
};

struct IteratedFold {
  PiecewiseLinear1D map;
  std::vector<FoldStep> steps;
};

IteratedFold iterated_fold(const FatCantorSpec& spec, std::size_t n_max);

class AmbiguousPreimage : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Number of x with f(x) = y; y must avoid the images of breakpoints.
std::size_t preimage_count(const PiecewiseLinear1D& f, const Rational& y);
std::size_t preimage_count(const SampledMap& f, const Point& y, double tol = 1e-9);

struct ProbeInterval {
  Rational center;
  Rational radius;
};

struct Interval {
  Rational lo;
  Rational hi;
  bool lo_closed = false;
  bool hi_closed = false;
};

// Exact preimage of the open interval (center - radius, center + radius).
std::vector<Interval> preimage(const PiecewiseLinear1D& f, const ProbeInterval& probe);
// Fewest open intervals of the given radius covering the set.
std::int64_t covering_number(const std::vector<Interval>& set, const Rational& radius);

// Smallest C <= c_max such that every probe preimage is covered by at most C
// intervals of radius C times the probe radius; c_max + 1 if none.
std::int64_t covering_regularity(const PiecewiseLinear1D& f, const std::vector<ProbeInterval>& probes,
                                 std::int64_t c_max);

// Probes of radius 2^-k centred at the multiples of 2^-k inside the image,
// for each listed k.
std::vector<ProbeInterval> dyadic_probes(const PiecewiseLinear1D& f, const std::vector<unsigned>& scales);

// Degree of a piecewise-affine map on the union of simplices inside the box U
// at a regular value y: sum of the Jacobian signs over the preimages.
int topological_degree(const SampledMap& f, const Box& U, const Point& y);

struct Ball {
  Point center;
  double radius = 0.0;
};

// Estimates |f^-1(B)| from cell-centred samples and checks it is at most
// C r^d (1 + tolerance) for every ball.
bool measure_regularity_probe(const SampledMap& f, const std::vector<Ball>& balls, double C, double tolerance = 0.05);
double preimage_measure_estimate(const SampledMap& f, const Ball& ball);

// Regularity constant implied by a preimage-measure bound C in dimension d.
double regularity_from_measure_bound(double C, int d);

}  // namespace lipgrid
