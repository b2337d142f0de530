#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lipgrid/pipeline.hpp"

namespace lipgrid {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_plot(const std::string& csv_text) {
  std::vector<BoundsRow> rows = parse_bounds_csv(csv_text);
  std::stable_sort(rows.begin(), rows.end(), [](const BoundsRow& a, const BoundsRow& b) { return a.n < b.n; });

  double xmin = static_cast<double>(rows.front().n), xmax = static_cast<double>(rows.back().n);
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  double ymax = 0.0;
  for (const auto& r : rows) {
    ymax = std::max({ymax, r.lower, r.upper, r.exact.value_or(0.0)});
  }
  ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double n) { return kLeft + (n - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return kTop + ph - v / ymax * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(kLeft + pw) << "\" y2=\""
      << fixed(kTop + ph) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
      << fixed(kTop + ph) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = ymax * k / 4.0;
    out << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(v) + 4) << "\" font-size=\"12\" text-anchor=\"end\">"
        << format_number(v) << "</text>\n";
  }
  for (const auto& r : rows)
    out << "<text x=\"" << fixed(px(static_cast<double>(r.n))) << "\" y=\"" << fixed(kTop + ph + 18)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << r.n << "</text>\n";
  out << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 15)
      << "\" font-size=\"14\" text-anchor=\"middle\">n</text>\n";
  out << "<text x=\"18\" y=\"" << fixed(kTop + ph / 2) << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fixed(kTop + ph / 2) << ")\">Lipschitz constant</text>\n";

  struct Series {
    const char* name;
    const char* colour;
    std::optional<double> (*get)(const BoundsRow&);
  };
  const Series series[] = {
      {"lower", "#1f77b4", [](const BoundsRow& r) -> std::optional<double> { return r.lower; }},
      {"upper", "#d62728", [](const BoundsRow& r) -> std::optional<double> { return r.upper; }},
      {"exact", "#2ca02c", [](const BoundsRow& r) { return r.exact; }},
  };
  int slot = 0;
  for (const auto& s : series) {
    std::string pts, marks;
    for (const auto& r : rows) {
      auto v = s.get(r);
      if (!v) continue;
      std::string x = fixed(px(static_cast<double>(r.n))), y = fixed(py(*v));
      if (!pts.empty()) pts += ' ';
      pts += x + "," + y;
      marks += "<circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"3\" fill=\"" + s.colour + "\"/>\n";
    }
    out << "<polyline id=\"" << s.name << "\" fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"2\" points=\""
        << pts << "\"/>\n"
        << marks;
    double ly = kTop + 10 + 18 * slot++;
    out << "<line x1=\"" << fixed(kLeft + 15) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(kLeft + 45) << "\" y2=\""
        << fixed(ly) << "\" stroke=\"" << s.colour << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed(kLeft + 52) << "\" y=\"" << fixed(ly + 4) << "\" font-size=\"12\">" << s.name
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace lipgrid
