#include <cmath>
#include <cstdio>

#include "lipgrid/dichotomy.hpp"
#include "lipgrid/errors.hpp"
#include "lipgrid/forge.hpp"
#include "lipgrid/pipeline.hpp"

namespace lipgrid {

bool ValidationReport::all_passed() const {
  for (const auto& l : lines)
    if (!l.passed) return false;
  return true;
}

namespace {

enum class Kind { set, density, families, assignment, piecewise };

Kind detect(const Json& j, const std::string& path) {
  if (j.is_object()) {
    if (j.contains("points") && j.contains("r")) return Kind::set;
    if (j.contains("cells")) return Kind::density;
    if (j.contains("levels")) return Kind::families;
    if (j.contains("permutation")) return Kind::assignment;
    if (j.contains("breakpoints")) return Kind::piecewise;
  }
  throw IoError("unknown artifact kind in '" + path + "'");
}

std::string num(double x) { return format_number(x); }

struct Loaded {
  std::string path;
  Kind kind;
  Json json;
};

class Reporter {
 public:
  explicit Reporter(ValidationReport& r) : report(r) {}
  void add(const std::string& path, const std::string& check, bool ok, const std::string& detail = {}) {
    report.lines.push_back({path, check, ok, detail});
  }
  ValidationReport& report;
};

template <class F>
bool parses(Reporter& rep, const std::string& path, F&& f) {
  try {
    f();
    rep.add(path, "format", true);
    return true;
  } catch (const std::exception& e) {
    rep.add(path, "format", false, e.what());
    return false;
  }
}

void check_set(Reporter& rep, const std::string& path, const SeparatedSet& s) {
  std::size_t expected = 1;
  for (int k = 0; k < s.d; ++k) expected *= static_cast<std::size_t>(s.n);
  rep.add(path, "cardinality n^d", s.points.size() == expected,
          std::to_string(s.points.size()) + " points, n=" + std::to_string(s.n));
  bool dims = true;
  for (const auto& p : s.points) dims = dims && p.size() == static_cast<std::size_t>(s.d);
  rep.add(path, "point dimension", dims);
  if (!dims) return;
  auto bad = separation_violation(s.points, s.r);
  rep.add(path, "separation > r", !bad,
          bad ? "points " + std::to_string(bad->first) + " and " + std::to_string(bad->second) + " closer than " + num(s.r)
              : "r=" + num(s.r));
}

void check_density(Reporter& rep, const std::string& path, const Json& j, const GridDensity& rho) {
  rep.add(path, "density positive", rho.inf_value() > 0.0, "inf=" + num(rho.inf_value()));
  bool bounds = true;
  if (j.contains("inf")) bounds = bounds && j.at("inf").get<double>() == rho.inf_value();
  if (j.contains("sup")) bounds = bounds && j.at("sup").get<double>() == rho.sup_value();
  rep.add(path, "recorded inf/sup", bounds);
}

void check_families(Reporter& rep, const std::string& path, const FamilyFile& f) {
  NestedSpec spec;
  spec.d = f.d;
  spec.N = f.N;
  spec.M = f.M;
  spec.c = f.c;
  for (std::size_t i = 0; i < f.levels.size(); ++i) {
    const auto& fam = f.levels[i];
    std::string tag = "level " + std::to_string(i + 1);
    bool tiled = true;
    std::string why;
    try {
      fam.validate();
    } catch (const std::exception& e) {
      tiled = false;
      why = e.what();
    }
    rep.add(path, tag + " tiling", tiled, why);
    Rational want = level_scale(spec, static_cast<int>(i + 1)) / f.N;
    rep.add(path, tag + " side", fam.side() == want, to_string(fam.side()) + " vs " + to_string(want));
    bool inside = true;
    for (const auto& c : fam.cubes) inside = inside && inside_unit_cube(c);
    rep.add(path, tag + " inside [0,1]^d", inside);
    if (i + 1 < f.levels.size()) {
      std::vector<TiledFamily> finer(f.levels.begin() + static_cast<std::ptrdiff_t>(i) + 1, f.levels.end());
      Rational worst(0);
      for (const auto& c : fam.cubes) {
        Rational frac = overlap_fraction(c, finer);
        if (frac > worst) worst = frac;
      }
      rep.add(path, tag + " overlap with finer levels <= 1/9", worst <= Rational(1, 9), "max " + to_string(worst));
    }
  }
}

void check_assignment(Reporter& rep, const std::string& path, const Assignment& a, std::size_t cells) {
  std::vector<bool> hit(cells, false);
  bool ok = a.permutation.size() == cells;
  for (std::size_t g : a.permutation) {
    if (g >= cells || hit[g]) {
      ok = false;
      break;
    }
    hit[g] = true;
  }
  rep.add(path, "bijection onto grid", ok, std::to_string(a.permutation.size()) + " of " + std::to_string(cells));
}

}  // namespace

ValidationReport validate_artifacts(const std::vector<std::string>& paths, std::optional<double> eps) {
  ValidationReport report;
  Reporter rep(report);
  std::vector<Loaded> files;
  for (const auto& p : paths) {
    Json j = read_json_file(p);
    Kind k = detect(j, p);
    files.push_back({p, k, std::move(j)});
  }

  std::optional<SeparatedSet> last_set;
  std::string last_set_path;
  std::optional<GridDensity> density;
  std::string density_path;
  std::optional<double> density_eps = eps;
  std::optional<FamilyFile> families;

  for (const auto& f : files) {
    switch (f.kind) {
      case Kind::set: {
        SeparatedSet s;
        if (!parses(rep, f.path, [&] { s = separated_set_from_json(f.json); })) break;
        check_set(rep, f.path, s);
        last_set = std::move(s);
        last_set_path = f.path;
        break;
      }
      case Kind::density: {
        GridDensity rho;
        if (!parses(rep, f.path, [&] { rho = density_from_json(f.json); })) break;
        check_density(rep, f.path, f.json, rho);
        if (!density_eps && f.json.contains("eps")) density_eps = f.json.at("eps").get<double>();
        density = std::move(rho);
        density_path = f.path;
        break;
      }
      case Kind::families: {
        FamilyFile fam;
        if (!parses(rep, f.path, [&] { fam = families_from_json(f.json); })) break;
        check_families(rep, f.path, fam);
        families = std::move(fam);
        break;
      }
      case Kind::assignment: {
        Assignment a;
        if (!parses(rep, f.path, [&] { a = assignment_from_json(f.json); })) break;
        std::size_t cells = 1;
        if (last_set) {
          for (int k = 0; k < last_set->d; ++k) cells *= static_cast<std::size_t>(a.grid_n);
        } else {
          while (a.grid_n > 1 && cells < a.permutation.size()) cells *= static_cast<std::size_t>(a.grid_n);
        }
        check_assignment(rep, f.path, a, cells);
        if (last_set && a.permutation.size() == last_set->points.size() && report.lines.back().passed) {
          double L = lipschitz_constant(last_set->points, a);
          bool ok = std::abs(L - a.bottleneck) <= 1e-9 * std::max(1.0, L);
          rep.add(f.path, "Lipschitz audit against " + last_set_path, ok,
                  "recomputed " + num(L) + ", recorded " + num(a.bottleneck));
        }
        break;
      }
      case Kind::piecewise: {
        PiecewiseLinear1D pl;
        if (!parses(rep, f.path, [&] { pl = piecewise_linear_from_json(f.json); })) break;
        bool ok = true;
        std::string why;
        try {
          pl.validate();
        } catch (const std::exception& e) {
          ok = false;
          why = e.what();
        }
        rep.add(f.path, "breakpoints on [0,1]", ok, why);
        if (ok) rep.add(f.path, "1-Lipschitz", pl.is_lipschitz(Rational(1)));
        break;
      }
    }
  }

  if (density && families && density_eps) {
    for (std::size_t i = 0; i < families->levels.size(); ++i) {
      bool ok = true;
      std::string detail;
      try {
        double gap = adjacent_average_gap(*density, families->levels[i]);
        ok = gap >= *density_eps;
        detail = "min gap " + num(gap) + ", eps " + num(*density_eps);
      } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
      }
      rep.add(density_path, "level " + std::to_string(i + 1) + " adjacent gap >= eps", ok, detail);
    }
  }
  return report;
}

}  // namespace lipgrid
