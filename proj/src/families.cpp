#include <algorithm>

#include "lipgrid/dichotomy.hpp"
#include "lipgrid/errors.hpp"

namespace lipgrid {

namespace {

Rational ri(std::int64_t v) { return Rational(BigInt(static_cast<long>(v))); }

}  // namespace

Rational level_scale(const NestedSpec& spec, int level) {
  Rational c = spec.c;
  for (int i = 1; i < level; ++i) c /= ri(spec.N) * ri(spec.M);
  return c;
}

std::vector<TiledFamily> build_nested_families(const NestedSpec& spec) {
  if (spec.d < 1) throw PreconditionError("dimension must be positive");
  if (spec.N < 2) throw PreconditionError("N must be at least 2");
  if (spec.M < 1) throw PreconditionError("M must be positive");
  if (spec.levels < 1) throw PreconditionError("need at least one level");
  if (spec.c <= 0) throw PreconditionError("c must be positive");
  const auto d = static_cast<std::size_t>(spec.d);
  if (spec.rule == OffsetRule::explicit_list && spec.offsets.size() != static_cast<std::size_t>(spec.levels - 1))
    throw PreconditionError("explicit offsets need one vector per level after the first");

  std::vector<TiledFamily> families;
  RationalPoint shift(d, Rational(0));
  std::vector<RationalPoint> offsets{RationalPoint(d, Rational(0))};
  for (int level = 1; level <= spec.levels; ++level) {
    Rational c_i = level_scale(spec, level);
    if (level > 1) {
      Rational c_prev = level_scale(spec, level - 1);
      RationalPoint z(d, Rational(0));
      if (spec.rule == OffsetRule::explicit_list) {
        z = spec.offsets[static_cast<std::size_t>(level - 2)];
        if (z.size() != d) throw PreconditionError("offset has the wrong dimension");
        for (std::size_t k = 0; k < d; ++k) {
          Rational hi = k == 0 ? Rational(c_prev - c_i) : Rational(c_prev / ri(spec.N) - c_i);
          if (!is_integer(z[k] / c_i))
            throw PreconditionError("offset coordinate " + to_string(z[k]) + " is not on the c_i lattice");
          if (z[k] < 0 || z[k] > hi)
            throw PreconditionError("offset coordinate " + to_string(z[k]) + " leaves the previous family");
        }
      }
      for (std::size_t k = 0; k < d; ++k) shift[k] += z[k];
      offsets.push_back(z);
    }
    TiledFamily fam;
    fam.level = static_cast<std::size_t>(level);
    fam.offsets = offsets;
    Rational side = c_i / ri(spec.N);
    for (std::int64_t l = 0; l < spec.N; ++l) {
      RationalPoint anchor = shift;
      anchor[0] += ri(l) * side;
      fam.cubes.emplace_back(side, anchor);
    }
    families.push_back(std::move(fam));
  }
  // Each union is the box shift + [0,side] x [0,side/N]^(d-1) of its level; check nesting.
  for (std::size_t i = 1; i < families.size(); ++i) {
    const auto& outer = families[i - 1].cubes;
    const auto& inner = families[i].cubes;
    for (std::size_t k = 0; k < d; ++k) {
      Rational outer_lo = outer.front().anchor[k], outer_hi = outer.back().upper(k);
      Rational inner_lo = inner.front().anchor[k], inner_hi = inner.back().upper(k);
      if (inner_lo < outer_lo || inner_hi > outer_hi) throw InvariantError("families are not nested");
    }
  }
  return families;
}

Rational overlap_bound(int d, std::int64_t M, std::int64_t N) {
  return pow(ri(M + 1), static_cast<unsigned>(d)) /
         (pow(ri(M), static_cast<unsigned>(d)) * pow(ri(N), static_cast<unsigned>(d - 1)));
}

std::int64_t min_resolution(int d, std::int64_t M, const Rational& eta) {
  if (d < 2) throw PreconditionError("overlap resolution needs d >= 2");
  if (M < 1) throw PreconditionError("M must be positive");
  if (eta <= 0) throw PreconditionError("eta must be positive");
  // smallest N >= 2 with N^(d-1) >= (M+1)^d / (M^d eta)
  Rational x = pow(ri(M + 1), static_cast<unsigned>(d)) / (pow(ri(M), static_cast<unsigned>(d)) * eta);
  BigInt target = ceil_of(x);
  BigInt root;
  mpz_root(root.get_mpz_t(), target.get_mpz_t(), static_cast<unsigned long>(d - 1));
  if (pow(root, static_cast<unsigned>(d - 1)) < target) root += 1;
  if (root < 2) root = 2;
  return to_int64(root);
}

}  // namespace lipgrid
