#include "lipgrid/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipgrid/errors.hpp"

namespace lipgrid {

std::vector<Point> mcshane_extend(const std::vector<Point>& points, const std::vector<Point>& values, double L,
                                  const std::vector<Point>& queries) {
  if (points.empty() || points.size() != values.size()) throw PreconditionError("need one value per sample point");
  if (!(L > 0.0)) throw PreconditionError("Lipschitz constant must be positive");
  const std::size_t d = points.front().size();
  const std::size_t n = values.front().size();
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].size() != d || values[i].size() != n) throw PreconditionError("inconsistent sample dimensions");
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      double dx = distance(points[a], points[b]);
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(values[a][j] - values[b][j]) > L * dx * (1.0 + 1e-12))
          throw PreconditionError("coordinate " + std::to_string(j) + " is not L-Lipschitz on samples " +
                                  std::to_string(a) + " and " + std::to_string(b));
    }
  std::vector<Point> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    if (q.size() != d) throw PreconditionError("query has the wrong dimension");
    auto hit = std::find(points.begin(), points.end(), q);
    if (hit != points.end()) {
      out.push_back(values[static_cast<std::size_t>(hit - points.begin())]);
      continue;
    }
    Point f(n, std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < points.size(); ++s) {
      double reach = L * distance(q, points[s]);
      for (std::size_t j = 0; j < n; ++j) f[j] = std::min(f[j], values[s][j] + reach);
    }
    out.push_back(std::move(f));
  }
  return out;
}

double empirical_lipschitz(const std::vector<Point>& inputs, const std::vector<Point>& outputs) {
  if (inputs.size() != outputs.size()) throw PreconditionError("inputs and outputs differ in length");
  double worst = 0.0;
  for (std::size_t a = 0; a < inputs.size(); ++a)
    for (std::size_t b = a + 1; b < inputs.size(); ++b) {
      double dx = distance(inputs[a], inputs[b]);
      double dy = distance(outputs[a], outputs[b]);
      if (dx == 0.0) {
        if (dy > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      worst = std::max(worst, dy / dx);
    }
  return worst;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lower.size(); ++k) v *= std::max(0.0, upper[k] - lower[k]);
  return v;
}

PushforwardReport pushforward_check(const SampledMap& map, const GridDensity& rho, const std::vector<Box>& boxes) {
  const GridSpec& g = map.grid();
  if (!g.cell_centered) throw PreconditionError("push-forward check needs cell-centred samples");
  const std::size_t d = map.dim();
  if (map.out_dim() != d || static_cast<int>(d) != rho.dim()) throw PreconditionError("dimensions do not match");
  for (std::size_t k = 0; k < d; ++k)
    if (g.lower[k] != 0.0 || g.upper[k] != 1.0) throw PreconditionError("samples must cover the unit cube");

  PushforwardReport report;
  report.mapped_hull.lower.assign(d, std::numeric_limits<double>::infinity());
  report.mapped_hull.upper.assign(d, -std::numeric_limits<double>::infinity());
  std::vector<double> mass(map.vertex_count());
  const double vol = map.sample_volume();
  for (std::size_t i = 0; i < map.vertex_count(); ++i) {
    mass[i] = rho.value_at(map.vertex(i)) * vol;
    for (std::size_t k = 0; k < d; ++k) {
      report.mapped_hull.lower[k] = std::min(report.mapped_hull.lower[k], map.value_ptr(i)[k]);
      report.mapped_hull.upper[k] = std::max(report.mapped_hull.upper[k], map.value_ptr(i)[k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    report.mapped_hull.lower[k] -= g.spacing(k) / 2.0;
    report.mapped_hull.upper[k] += g.spacing(k) / 2.0;
  }
  for (const auto& box : boxes) {
    if (box.lower.size() != d || box.upper.size() != d) throw PreconditionError("test box has the wrong dimension");
    double pushed = 0.0;
    for (std::size_t i = 0; i < map.vertex_count(); ++i) {
      const double* y = map.value_ptr(i);
      bool inside = true;
      for (std::size_t k = 0; k < d && inside; ++k) inside = y[k] >= box.lower[k] && y[k] < box.upper[k];
      if (inside) pushed += mass[i];
    }
    Box clipped = box;
    for (std::size_t k = 0; k < d; ++k) {
      clipped.lower[k] = std::max(box.lower[k], report.mapped_hull.lower[k]);
      clipped.upper[k] = std::min(box.upper[k], report.mapped_hull.upper[k]);
    }
    double dev = std::abs(pushed - clipped.volume());
    report.deviation.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

}  // namespace lipgrid
