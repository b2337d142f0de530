#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lipgrid/regularity.hpp"

namespace lipgrid {

namespace {

constexpr double kBarycentricTol = 1e-9;

bool image_box_contains(const SampledMap& f, const Simplex& s, const Point& y, double margin) {
  for (std::size_t r = 0; r < f.out_dim(); ++r) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto v : s) {
      lo = std::min(lo, f.value_ptr(v)[r]);
      hi = std::max(hi, f.value_ptr(v)[r]);
    }
    if (y[r] < lo - margin || y[r] > hi + margin) return false;
  }
  return true;
}

// Euclidean distance from y to the convex hull of the given points.
double distance_to_hull(const Point& y, const std::vector<const double*>& pts, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t k = pts.size();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<const double*> sub;
    for (std::size_t j = 0; j < k; ++j)
      if (mask & (1u << j)) sub.push_back(pts[j]);
    const std::size_t m = sub.size() - 1;
    std::vector<double> mu;
    if (m > 0) {
      std::vector<double> gram(m * m), rhs(m);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          double g = 0.0;
          for (std::size_t r = 0; r < n; ++r) g += (sub[a + 1][r] - sub[0][r]) * (sub[b + 1][r] - sub[0][r]);
          gram[a * m + b] = g;
        }
        double t = 0.0;
        for (std::size_t r = 0; r < n; ++r) t += (sub[a + 1][r] - sub[0][r]) * (y[r] - sub[0][r]);
        rhs[a] = t;
      }
      auto sol = solve_linear(gram, rhs, m);
      if (!sol) continue;
      double total = 0.0;
      bool feasible = true;
      for (double v : *sol) {
        if (v < 0.0) feasible = false;
        total += v;
      }
      if (!feasible || total > 1.0) continue;
      mu = *sol;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double p = sub[0][r];
      for (std::size_t a = 0; a < m; ++a) p += mu[a] * (sub[a + 1][r] - sub[0][r]);
      s += (p - y[r]) * (p - y[r]);
    }
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

}  // namespace

std::size_t preimage_count(const SampledMap& f, const Point& y, double tol) {
  if (y.size() != f.out_dim() || f.out_dim() != f.dim()) throw PreconditionError("preimage count needs a square map");
  std::size_t count = 0;
  const auto& simplices = f.simplices();
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    auto bary = f.preimage_barycentric(s, y);
    if (!bary) {
      if (image_box_contains(f, simplices[s], y, tol)) throw AmbiguousPreimage("y meets a degenerate piece");
      continue;
    }
    double lo = *std::min_element(bary->begin(), bary->end());
    if (lo > tol) ++count;
    else if (lo >= -tol) throw AmbiguousPreimage("y lies on the image of a piece boundary");
  }
  return count;
}

int topological_degree(const SampledMap& f, const Box& U, const Point& y) {
  const std::size_t d = f.dim();
  if (f.out_dim() != d || y.size() != d || U.lower.size() != d) throw PreconditionError("degree needs a square map");
  const auto& simplices = f.simplices();
  std::vector<std::size_t> inside;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    bool ok = true;
    for (auto v : simplices[s])
      for (std::size_t k = 0; k < d && ok; ++k) {
        double x = f.vertex_ptr(v)[k];
        double slack = 1e-12 * std::max(1.0, U.upper[k] - U.lower[k]);
        ok = x >= U.lower[k] - slack && x <= U.upper[k] + slack;
      }
    if (ok) inside.push_back(s);
  }
  if (inside.empty()) throw PreconditionError("no piece of the map lies inside U");

  // Boundary facets are those used by exactly one simplex inside U.
  std::map<std::vector<std::size_t>, int> facet_uses;
  for (auto s : inside) {
    const Simplex& simplex = simplices[s];
    for (std::size_t drop = 0; drop < simplex.size(); ++drop) {
      std::vector<std::size_t> facet;
      for (std::size_t j = 0; j < simplex.size(); ++j)
        if (j != drop) facet.push_back(simplex[j]);
      std::sort(facet.begin(), facet.end());
      ++facet_uses[facet];
    }
  }
  std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
  for (auto s : inside)
    for (auto v : simplices[s])
      for (std::size_t r = 0; r < d; ++r) {
        lo[r] = std::min(lo[r], f.value_ptr(v)[r]);
        hi[r] = std::max(hi[r], f.value_ptr(v)[r]);
      }
  double diameter = 0.0;
  for (std::size_t r = 0; r < d; ++r) diameter += (hi[r] - lo[r]) * (hi[r] - lo[r]);
  diameter = std::sqrt(diameter);
  const double margin = 1e-9 * std::max(diameter, 1e-300);
  for (const auto& [facet, uses] : facet_uses) {
    if (uses != 1) continue;
    std::vector<const double*> pts;
    for (auto v : facet) pts.push_back(f.value_ptr(v));
    if (distance_to_hull(y, pts, d) <= margin) throw PreconditionError("y lies on or too close to the image of the boundary");
  }

  int degree = 0;
  for (auto s : inside) {
    auto bary = f.preimage_barycentric(s, y);
    if (!bary) {
      if (image_box_contains(f, simplices[s], y, margin)) throw PreconditionError("y meets a singular piece");
      continue;
    }
    double low = *std::min_element(bary->begin(), bary->end());
    if (low > kBarycentricTol) {
      double det = f.jacobian_determinant(s);
      if (det == 0.0) throw PreconditionError("y meets a singular piece");
      degree += det > 0.0 ? 1 : -1;
    } else if (low >= -kBarycentricTol) {
      throw AmbiguousPreimage("y lies on the image of a piece boundary");
    }
  }
  return degree;
}

}  // namespace lipgrid
