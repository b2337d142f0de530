#include <algorithm>

#include "lipgrid/regularity.hpp"

namespace lipgrid {

PiecewiseLinear1D PiecewiseLinear1D::identity() { return {{Rational(0), Rational(1)}, {Rational(0), Rational(1)}}; }

void PiecewiseLinear1D::validate() const {
  if (breakpoints.size() < 2 || breakpoints.size() != values.size())
    throw PreconditionError("piecewise-linear map needs matching breakpoints and values");
  if (breakpoints.front() != 0 || breakpoints.back() != 1) throw PreconditionError("breakpoints must run from 0 to 1");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i - 1] < breakpoints[i])) throw PreconditionError("breakpoints must increase strictly");
}

Rational PiecewiseLinear1D::slope(std::size_t piece) const {
  return (values[piece + 1] - values[piece]) / (breakpoints[piece + 1] - breakpoints[piece]);
}

Rational PiecewiseLinear1D::operator()(const Rational& x) const {
  if (x < breakpoints.front() || x > breakpoints.back()) throw DomainError("evaluation outside [0,1]");
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t i = static_cast<std::size_t>(it - breakpoints.begin());
  if (i == breakpoints.size()) return values.back();
  --i;
  return values[i] + slope(i) * (x - breakpoints[i]);
}

bool PiecewiseLinear1D::is_lipschitz(const Rational& L) const {
  for (std::size_t i = 0; i < pieces(); ++i)
    if (abs(slope(i)) > L) return false;
  return true;
}

Rational PiecewiseLinear1D::sup_distance_to_identity() const {
  Rational best = 0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) best = std::max(best, Rational(abs(values[i] - breakpoints[i])));
  return best;
}

Rational PiecewiseLinear1D::image_min() const { return *std::min_element(values.begin(), values.end()); }
Rational PiecewiseLinear1D::image_max() const { return *std::max_element(values.begin(), values.end()); }

PiecewiseLinear1D PiecewiseLinear1D::simplified() const {
  PiecewiseLinear1D out;
  out.breakpoints.push_back(breakpoints.front());
  out.values.push_back(values.front());
  for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i)
    if (slope(i - 1) != slope(i)) {
      out.breakpoints.push_back(breakpoints[i]);
      out.values.push_back(values[i]);
    }
  out.breakpoints.push_back(breakpoints.back());
  out.values.push_back(values.back());
  return out;
}

PiecewiseLinear1D compose(const PiecewiseLinear1D& outer, const PiecewiseLinear1D& inner) {
  outer.validate();
  inner.validate();
  std::vector<Rational> xs = inner.breakpoints;
  for (std::size_t i = 0; i < inner.pieces(); ++i) {
    Rational u0 = inner.values[i], u1 = inner.values[i + 1];
    if (u0 == u1) continue;
    Rational lo = std::min(u0, u1), hi = std::max(u0, u1);
    for (const auto& b : outer.breakpoints) {
      if (b <= lo || b >= hi) continue;
      xs.push_back(inner.breakpoints[i] + (b - u0) / inner.slope(i));
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  PiecewiseLinear1D out;
  for (const auto& x : xs) {
    out.breakpoints.push_back(x);
    out.values.push_back(outer(inner(x)));
  }
  return out.simplified();
}

PiecewiseLinear1D fold_map(const Rational& a, const Rational& c) {
  if (!(a > 0) || !(c > 0) || !(a + 3 * c < 1)) throw PreconditionError("fold needs 0 < a, 0 < c and a + 3c < 1");
  PiecewiseLinear1D g;
  g.breakpoints = {Rational(0), Rational(a + c), Rational(a + 2 * c), Rational(1)};
  g.values = {Rational(0), Rational(a + c), a, Rational(1 - 2 * c)};
  if (!g.is_lipschitz(1)) throw InvariantError("fold is not 1-Lipschitz");
  if (g.sup_distance_to_identity() > 2 * c) throw InvariantError("fold moves points by more than 2c");
  return g;
}

std::vector<Gap> fat_cantor_gaps(const FatCantorSpec& spec, std::size_t count) {
  if (!(spec.eps > 0 && spec.eps < 1)) throw PreconditionError("eps must lie in (0,1)");
  std::vector<Gap> gaps;
  std::vector<Gap> pieces{{Rational(0), Rational(1)}};
  Rational length = spec.eps / 4;
  while (gaps.size() < count) {
    std::vector<Gap> next;
    for (const auto& p : pieces) {
      Rational mid = (p.lo + p.hi) / 2;
      Gap removed{mid - length / 2, mid + length / 2};
      if (gaps.size() < count) gaps.push_back(removed);
      next.push_back({p.lo, removed.lo});
      next.push_back({removed.hi, p.hi});
    }
    pieces = std::move(next);
    length /= 4;
  }
  return gaps;
}

IteratedFold iterated_fold(const FatCantorSpec& spec, std::size_t n_max) {
  IteratedFold result;
  result.map = PiecewiseLinear1D::identity();
  auto gaps = fat_cantor_gaps(spec, n_max);
  auto D = [](std::size_t n) -> Rational { return 3 - make_rational(2, static_cast<long>(n + 1)); };
  Rational two_pow = 4;  // 2^(n+1)
  for (std::size_t n = 1; n <= n_max; ++n, two_pow *= 2) {
    const Gap& gap = gaps[n - 1];
    Rational len = gap.length();
    Rational delta = D(n) - D(n - 1);
    // D(n-1) (|U| + 4c) <= D(n) |U| for every interval U with |U| >= len/2 - 3c.
    Rational growth_cap = delta * len / (2 * (4 * D(n - 1) + 3 * delta));
    Rational c = std::min({Rational(spec.eps / two_pow), Rational(len / 8), growth_cap});
    FoldStep step{gap, (gap.lo + gap.hi) / 2, c, 0};
    step.image_a = result.map(step.anchor);
    result.map = compose(fold_map(step.image_a, c), result.map);
    result.steps.push_back(step);
  }
  if (!result.map.is_lipschitz(1)) throw InvariantError("iterated fold is not 1-Lipschitz");
  if (result.map.sup_distance_to_identity() > spec.eps) throw InvariantError("iterated fold moves points by more than eps");
  for (const auto& step : result.steps) {
    auto image = [&](const Rational& lo, const Rational& hi) {
      Rational a = std::min(result.map(lo), result.map(hi));
      Rational b = std::max(result.map(lo), result.map(hi));
      for (const auto& x : result.map.breakpoints)
        if (x > lo && x < hi) {
          a = std::min(a, result.map(x));
          b = std::max(b, result.map(x));
        }
      return std::make_pair(a, b);
    };
    auto first = image(step.anchor, step.anchor + step.width);
    for (int j = 2; j <= 3; ++j)
      if (image(step.anchor + (j - 1) * step.width, step.anchor + j * step.width) != first)
        throw InvariantError("fold triple does not share one image");
  }
  return result;
}

}  // namespace lipgrid
