#include <algorithm>
#include <cmath>

#include "lipgrid/regularity.hpp"

namespace lipgrid {

std::size_t preimage_count(const PiecewiseLinear1D& f, const Rational& y) {
  f.validate();
  for (const auto& v : f.values)
    if (v == y) throw AmbiguousPreimage("y is the image of a breakpoint");
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    Rational lo = std::min(f.values[i], f.values[i + 1]);
    Rational hi = std::max(f.values[i], f.values[i + 1]);
    if (lo < y && y < hi) ++count;
  }
  return count;
}

std::vector<Interval> preimage(const PiecewiseLinear1D& f, const ProbeInterval& probe) {
  const Rational lo = probe.center - probe.radius;
  const Rational hi = probe.center + probe.radius;
  auto inside = [&](const Rational& v) { return lo < v && v < hi; };
  std::vector<Interval> parts;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    const Rational& x0 = f.breakpoints[i];
    const Rational& x1 = f.breakpoints[i + 1];
    const Rational& v0 = f.values[i];
    const Rational& v1 = f.values[i + 1];
    if (v0 == v1) {
      if (inside(v0)) parts.push_back({x0, x1, true, true});
      continue;
    }
    Rational s = f.slope(i);
    // f(x) = v0 + s (x - x0); solve for the open range (lo, hi).
    Rational a = x0 + (lo - v0) / s;
    Rational b = x0 + (hi - v0) / s;
    if (a > b) std::swap(a, b);
    Interval piece{std::max(a, x0), std::min(b, x1), false, false};
    if (piece.lo >= piece.hi) continue;
    piece.lo_closed = inside(f(piece.lo));
    piece.hi_closed = inside(f(piece.hi));
    parts.push_back(piece);
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& p, const Interval& q) { return p.lo < q.lo; });
  std::vector<Interval> merged;
  for (const auto& p : parts) {
    if (!merged.empty()) {
      Interval& last = merged.back();
      bool touches = p.lo < last.hi || (p.lo == last.hi && (last.hi_closed || p.lo_closed));
      if (touches) {
        if (p.hi > last.hi) {
          last.hi = p.hi;
          last.hi_closed = p.hi_closed;
        } else if (p.hi == last.hi) {
          last.hi_closed = last.hi_closed || p.hi_closed;
        }
        continue;
      }
    }
    merged.push_back(p);
  }
  return merged;
}

std::int64_t covering_number(const std::vector<Interval>& set, const Rational& radius) {
  if (radius <= 0) throw PreconditionError("covering radius must be positive");
  std::int64_t count = 0;
  bool started = false;
  Rational covered_to;  // points strictly below are covered
  const Rational width = 2 * radius;
  for (const auto& part : set) {
    while (true) {
      bool has_uncovered = !started || part.hi > covered_to || (part.hi == covered_to && part.hi_closed);
      if (!has_uncovered) break;
      Rational start = started ? std::max(part.lo, covered_to) : part.lo;
      ++count;
      covered_to = start + width;
      started = true;
    }
  }
  return count;
}

std::int64_t covering_regularity(const PiecewiseLinear1D& f, const std::vector<ProbeInterval>& probes,
                                 std::int64_t c_max) {
  f.validate();
  if (c_max < 1) throw PreconditionError("c_max must be positive");
  std::vector<std::vector<Interval>> pre;
  pre.reserve(probes.size());
  for (const auto& p : probes) {
    if (p.radius <= 0) throw PreconditionError("probe radius must be positive");
    pre.push_back(preimage(f, p));
  }
  for (std::int64_t C = 1; C <= c_max; ++C) {
    bool ok = true;
    for (std::size_t i = 0; i < probes.size() && ok; ++i)
      ok = covering_number(pre[i], Rational(BigInt(static_cast<long>(C))) * probes[i].radius) <= C;
    if (ok) return C;
  }
  return c_max + 1;
}

std::vector<ProbeInterval> dyadic_probes(const PiecewiseLinear1D& f, const std::vector<unsigned>& scales) {
  const Rational lo = f.image_min(), hi = f.image_max();
  std::vector<ProbeInterval> probes;
  for (unsigned k : scales) {
    Rational r(BigInt(1), BigInt(1) << k);
    BigInt first = ceil_of(lo / r), last = floor_of(hi / r);
    for (BigInt j = first; j <= last; ++j) probes.push_back({Rational(j) * r, r});
  }
  return probes;
}

double preimage_measure_estimate(const SampledMap& f, const Ball& ball) {
  const double vol = f.sample_volume();
  double total = 0.0;
  for (std::size_t i = 0; i < f.vertex_count(); ++i)
    if (distance(f.value_ptr(i), ball.center.data(), f.out_dim()) < ball.radius) total += vol;
  return total;
}

bool measure_regularity_probe(const SampledMap& f, const std::vector<Ball>& balls, double C, double tolerance) {
  if (!(C > 0.0)) throw PreconditionError("C must be positive");
  for (const auto& b : balls) {
    if (b.center.size() != f.out_dim()) throw PreconditionError("ball centre has the wrong dimension");
    double cap = C * std::pow(b.radius, static_cast<double>(f.dim())) * (1.0 + tolerance);
    if (preimage_measure_estimate(f, b) > cap) return false;
  }
  return true;
}

double regularity_from_measure_bound(double C, int d) { return std::max(2.0, C * std::pow(2.0, d)); }

}  // namespace lipgrid
