#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lipgrid/geometry.hpp"
#include "lipgrid/rational.hpp"
#include "lipgrid/sampled_map.hpp"

namespace lipgrid {

// Parameters of one dimension of the recursive dichotomy.
struct LevelParams {
  int d = 1;
  double eps = 0.0;
  BigInt M;
  double phi = 0.0;
  BigInt N0;
};

struct DichotomyParams {
  int d = 1;
  double L = 1.0;
  double eps = 0.0;
  double t = 0.0;  // threshold of the one-dimensional base case
  BigInt M;
  double phi = 0.0;
  BigInt N0;
  std::vector<double> theta_chain;  // eps of dimensions d-1, ..., 1
  std::vector<LevelParams> lower;   // dimensions 1 .. d-1
};

DichotomyParams params_1d(double L, double eps);
DichotomyParams params_nd(int d, double L, double eps);
// Names of the defining inequalities that fail; empty when all hold.
std::vector<std::string> params_violations(const DichotomyParams& params);

// Smallest r >= 1 with (1+phi)^r > L^2.
BigInt iteration_bound(double L, double phi);

enum class OffsetRule { zero, explicit_list };

struct NestedSpec {
  int d = 2;
  std::int64_t N = 2;
  std::int64_t M = 1;
  int levels = 1;
  Rational c = 1;
  OffsetRule rule = OffsetRule::zero;
  std::vector<RationalPoint> offsets;  // offsets of levels 2..levels for explicit_list
};

std::vector<TiledFamily> build_nested_families(const NestedSpec& spec);
// side of a level-i cube: c / (N M)^(i-1)
Rational level_scale(const NestedSpec& spec, int level);
std::int64_t min_resolution(int d, std::int64_t M, const Rational& eta);
// (M+1)^d / (M^d N^(d-1))
Rational overlap_bound(int d, std::int64_t M, std::int64_t N);

struct Statement1 {
  std::vector<std::int64_t> omega;  // slab indices 1..N-1 satisfying the translation estimate
};

struct Statement2 {
  std::vector<std::int64_t> lattice_index;  // z / (c/(NM)), lexicographically smallest witness
  RationalPoint z;
  double ratio = 0.0;  // stretch along e1 of the witness over the mean stretch
};

using ProbeVerdict = std::variant<Statement1, Statement2>;

class InconclusiveProbe : public std::runtime_error {
 public:
  InconclusiveProbe(const std::string& what, std::vector<std::int64_t> omega)
      : std::runtime_error(what), omega(std::move(omega)) {}
  std::vector<std::int64_t> omega;
};

// h is sampled on the vertices of a grid over [0,c] x [0,c/N]^(d-1) whose
// spacing divides c/(NM). All comparisons are exact on the sample values.
ProbeVerdict dichotomy_probe(const SampledMap& h, const Rational& c, const DichotomyParams& params,
                             std::int64_t N, double eps);

// Checks 1/L |x-y| <= |h(x)-h(y)| <= L |x-y| on every pair of samples.
bool certify_bilipschitz(const SampledMap& h, double L, double rel_tol = 1e-12);

}  // namespace lipgrid
