#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "lipgrid/assign.hpp"
#include "lipgrid/dichotomy.hpp"
#include "lipgrid/encoder.hpp"
#include "lipgrid/errors.hpp"
#include "lipgrid/extension.hpp"
#include "lipgrid/forge.hpp"
#include "lipgrid/io.hpp"
#include "lipgrid/pipeline.hpp"
#include "lipgrid/regularity.hpp"

using namespace lipgrid;

namespace {

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kIo = 2;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw IoError("bad number '" + item + "' in list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

// forge

struct ForgeArgs {
  int d = 2;
  std::int64_t N = 3;
  std::int64_t M = 2;
  int levels = 2;
  std::string c = "1";
  double eps = 0.9;
  std::string taper = "1/10";
  std::int64_t resolution = 0;
  std::string input;
  std::string families_in;
  int level = 1;
  std::string out_density = "density.json";
  std::string out_families;
};

int run_forge(const ForgeArgs& a) {
  if (!a.input.empty()) {
    if (a.families_in.empty()) throw IoError("--input needs --families");
    GridDensity rho = density_from_json(read_json_file(a.input));
    FamilyFile fam = families_from_json(read_json_file(a.families_in));
    if (a.level < 1 || a.level > static_cast<int>(fam.levels.size()))
      throw IoError("--level out of range for '" + a.families_in + "'");
    const TiledFamily& family = fam.levels[static_cast<std::size_t>(a.level - 1)];
    GridDensity psi = linf_chessboard(family, rho, a.eps);
    write_json_file(a.out_density, to_json(psi, a.eps));
    double gap = adjacent_average_gap(psi, family);
    print({{"density", a.out_density}, {"min_gap", gap}});
    return gap >= a.eps ? kOk : kInvariant;
  }
  ExperimentConfig cfg;
  cfg.d = a.d;
  cfg.N = a.N;
  cfg.M = a.M;
  cfg.levels = a.levels;
  cfg.c = a.c;
  cfg.eps = a.eps;
  cfg.taper = a.taper;
  cfg.density_resolution = a.resolution;
  ForgedDensity forged = forge_density(cfg);
  write_json_file(a.out_density, to_json(forged.rho, forged.eps));
  std::vector<std::string> written{a.out_density};
  if (!a.out_families.empty()) {
    write_json_file(a.out_families, to_json(*forged.families));
    written.push_back(a.out_families);
  }
  Json gaps = Json::array();
  for (const auto& fam : forged.families->levels) gaps.push_back(adjacent_average_gap(forged.rho, fam));
  print({{"density", a.out_density}, {"resolution", forged.rho.resolution()}, {"level_gaps", gaps}});
  for (const auto& fam : forged.families->levels)
    if (adjacent_average_gap(forged.rho, fam) < a.eps) return kInvariant;
  return kOk;
}

// encode

struct EncodeArgs {
  std::string density;
  std::int64_t m = 4;
  double p = 0.5;
  double l = 0.0;
  bool normalize = true;
  std::string out = "set.json";
};

int run_encode(const EncodeArgs& a) {
  GridDensity rho = density_from_json(read_json_file(a.density));
  if (a.normalize) rho = normalize_density(rho);
  std::optional<double> l;
  if (a.l > 0.0) l = a.l;
  StagePlan plan = plan_stage(rho, a.m, a.p, l);
  SeparatedSet set = encode_stage(plan);
  write_json_file(a.out, to_json(set));
  MeasureDeviation dev = discrete_measure_deviation(plan, set, rho);
  bool separated = !separation_violation(set.points, set.r);
  bool within = true;
  for (std::size_t k = 0; k < dev.per_cell.size(); ++k) within = within && dev.per_cell[k] <= dev.bound[k] * (1 + 1e-12);
  print({{"set", a.out},
         {"n", set.n},
         {"points", set.points.size()},
         {"r", set.r},
         {"l", plan.l},
         {"separated", separated},
         {"measure_deviation", dev.max_deviation},
         {"deviation_within_bound", within}});
  return separated && within ? kOk : kInvariant;
}

// solve

struct SolveArgs {
  std::string set;
  std::string method = "both";
  std::uint64_t seed = 1;
  std::uint64_t node_budget = 2'000'000;
  std::uint64_t proposals = 0;
  int restarts = 4;
  std::string out;
};

Json report_json(const BoundsReport& r) {
  return Json{{"lower", r.lower},
              {"upper", r.upper},
              {"exact", r.exact ? Json(*r.exact) : Json(nullptr)},
              {"seed", r.seed},
              {"nodes", r.nodes},
              {"budget_exhausted", r.budget_exhausted},
              {"wall_time_ms", r.wall_time_ms}};
}

int run_solve(const SolveArgs& a) {
  SeparatedSet set = separated_set_from_json(read_json_file(a.set));
  if (a.method != "exact" && a.method != "heuristic" && a.method != "both")
    throw IoError("--method must be exact, heuristic or both");
  Json out;
  std::optional<BoundsReport> heuristic, exact;
  if (a.method != "exact") {
    AnnealSchedule schedule;
    schedule.proposals = a.proposals;
    schedule.restarts = a.restarts;
    heuristic = solve_heuristic(set.points, set.n, a.seed, schedule);
    out["heuristic"] = report_json(*heuristic);
  }
  if (a.method != "heuristic") {
    exact = solve_exact(set.points, set.n, a.node_budget);
    out["exact"] = report_json(*exact);
  }
  const BoundsReport& best = exact && exact->exact ? *exact : heuristic ? *heuristic : *exact;
  if (!a.out.empty()) write_json_file(a.out, to_json(best.best));
  print(out);
  bool ok = best.lower <= best.upper * (1 + 1e-12);
  if (heuristic && exact && exact->exact) ok = ok && *exact->exact <= heuristic->upper * (1 + 1e-12);
  return ok ? kOk : kInvariant;
}

// degree

struct DegreeArgs {
  std::string kind = "identity";
  std::int64_t cells = 7;
  std::string y = "0.5,0";
};

int run_degree(const DegreeArgs& a) {
  SampledMap::Function f;
  if (a.kind == "identity")
    f = [](const Point& x) { return x; };
  else if (a.kind == "reflection")
    f = [](const Point& x) { return Point{-x[0], x[1]}; };
  else if (a.kind == "fold")
    f = [](const Point& x) { return Point{std::abs(x[0]), x[1]}; };
  else
    throw IoError("unknown map kind '" + a.kind + "' (identity, reflection, fold)");
  GridSpec grid{{-1.0, -1.0}, {1.0, 1.0}, {a.cells + 1, a.cells + 1}, false};
  SampledMap map = SampledMap::on_grid(grid, 2, f);
  Point y = parse_list(a.y);
  Box U{{-1.0, -1.0}, {1.0, 1.0}};
  int deg = topological_degree(map, U, y);
  print({{"kind", a.kind}, {"y", y}, {"degree", deg}});
  return kOk;
}

// regularity

struct RegularityArgs {
  std::string eps = "1/2";
  std::size_t n_max = 3;
  std::string scales = "4,7,10,13";
  std::int64_t c_max = 8;
  std::string out;
};

int run_regularity(const RegularityArgs& a) {
  FatCantorSpec spec{parse_rational(a.eps)};
  IteratedFold fold = iterated_fold(spec, a.n_max);
  std::vector<unsigned> scales;
  for (double s : parse_list(a.scales)) {
    if (s < 0 || s != std::floor(s)) throw IoError("scales must be non-negative integers");
    scales.push_back(static_cast<unsigned>(s));
  }
  auto probes = dyadic_probes(fold.map, scales);
  std::int64_t C = covering_regularity(fold.map, probes, a.c_max);
  std::size_t witness = 0;
  Json steps = Json::array();
  for (const auto& s : fold.steps) {
    Rational y = s.image_a + s.width / 2;
    std::size_t count = 0;
    try {
      count = preimage_count(fold.map, y);
    } catch (const AmbiguousPreimage&) {
    }
    witness = std::max(witness, count);
    steps.push_back({{"gap", {to_string(s.gap.lo), to_string(s.gap.hi)}},
                     {"anchor", to_string(s.anchor)},
                     {"width", to_string(s.width)}});
  }
  if (!a.out.empty()) write_json_file(a.out, to_json(fold.map));
  bool lip = fold.map.is_lipschitz(Rational(1));
  print({{"pieces", fold.map.pieces()},
         {"one_lipschitz", lip},
         {"sup_distance_to_identity", to_double(fold.map.sup_distance_to_identity())},
         {"probes", probes.size()},
         {"covering_regularity", C},
         {"max_preimage_count", witness},
         {"steps", steps}});
  return lip && static_cast<std::int64_t>(witness) <= C ? kOk : kInvariant;
}

// bound

int run_counting(const std::string& path) {
  SeparatedSet set = separated_set_from_json(read_json_file(path));
  print({{"counting_lower_bound", counting_lower_bound(set.points)}});
  return kOk;
}

int run_params(int d, double L, double eps) {
  DichotomyParams p = d == 1 ? params_1d(L, eps) : params_nd(d, L, eps);
  auto bad = params_violations(p);
  Json lower = Json::array();
  for (const auto& lp : p.lower)
    lower.push_back({{"d", lp.d}, {"eps", lp.eps}, {"M", lp.M.get_str()}, {"phi", lp.phi}, {"N0", lp.N0.get_str()}});
  print({{"d", p.d},
         {"L", p.L},
         {"eps", p.eps},
         {"t", p.t},
         {"M", p.M.get_str()},
         {"phi", p.phi},
         {"N0", p.N0.get_str()},
         {"theta_chain", p.theta_chain},
         {"lower", lower},
         {"iteration_bound", iteration_bound(L, p.phi).get_str()},
         {"violations", bad}});
  return bad.empty() ? kOk : kInvariant;
}

// pipeline

int run_pipeline_cmd(const std::string& config_path, const std::map<std::string, std::string>& overrides) {
  Json j = config_path.empty() ? Json::object() : read_json_file(config_path);
  if (!j.is_object()) throw IoError("configuration in '" + config_path + "' must be a JSON object");
  const Json defaults = to_json(ExperimentConfig{});
  for (const auto& [key, raw] : overrides) {
    const Json& def = defaults.at(key);
    try {
      if (def.is_string())
        j[key] = raw;
      else if (def.is_array())
        j[key] = Json::parse(raw.front() == '[' ? raw : "[" + raw + "]");
      else
        j[key] = Json::parse(raw);
    } catch (const Json::parse_error&) {
      throw IoError("bad value '" + raw + "' for --" + key);
    }
  }
  ExperimentConfig cfg = config_from_json(j);
  PipelineResult result = run_pipeline(cfg);
  std::cout << bounds_csv(result.rows);
  for (const auto& f : result.failures) std::cerr << "lipgrid: invariant failure: " << f << "\n";
  return result.ok() ? kOk : kInvariant;
}

int run_validate(const std::vector<std::string>& paths, std::optional<double> eps) {
  ValidationReport report = validate_artifacts(paths, eps);
  for (const auto& l : report.lines) {
    std::cout << (l.passed ? "PASS " : "FAIL ") << l.path << ": " << l.check;
    if (!l.detail.empty()) std::cout << " (" << l.detail << ")";
    std::cout << "\n";
  }
  return report.all_passed() ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chessboard densities, separated nets and grid bijections"};
  app.require_subcommand(1);

  ForgeArgs forge;
  auto* c_forge = app.add_subcommand("forge", "build a chessboard density (or an L-infinity chessboard of --input)");
  c_forge->add_option("--d", forge.d);
  c_forge->add_option("--N", forge.N);
  c_forge->add_option("--M", forge.M);
  c_forge->add_option("--levels", forge.levels);
  c_forge->add_option("--c", forge.c, "first-level scale, rational");
  c_forge->add_option("--eps", forge.eps);
  c_forge->add_option("--taper", forge.taper);
  c_forge->add_option("--resolution", forge.resolution, "grid cells per axis; 0 picks the smallest admissible");
  c_forge->add_option("--input", forge.input, "density to correct instead of forging");
  c_forge->add_option("--families", forge.families_in);
  c_forge->add_option("--level", forge.level);
  c_forge->add_option("--out", forge.out_density);
  c_forge->add_option("--out-families", forge.out_families);

  EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "encode a density into a separated set");
  c_encode->add_option("--density", encode.density)->required();
  c_encode->add_option("--m", encode.m);
  c_encode->add_option("--p", encode.p);
  c_encode->add_option("--l", encode.l, "override the target side length");
  c_encode->add_flag("!--raw", encode.normalize, "skip normalisation");
  c_encode->add_option("--out", encode.out);

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "bound the best Lipschitz constant of a bijection onto the grid");
  c_solve->add_option("--set", solve.set)->required();
  c_solve->add_option("--method", solve.method, "exact, heuristic or both");
  c_solve->add_option("--seed", solve.seed);
  c_solve->add_option("--node-budget", solve.node_budget);
  c_solve->add_option("--proposals", solve.proposals);
  c_solve->add_option("--restarts", solve.restarts);
  c_solve->add_option("--out", solve.out, "write the best assignment");

  auto* c_bound = app.add_subcommand("bound", "closed-form bounds and parameters");
  c_bound->require_subcommand(1);
  std::string counting_set;
  auto* c_counting = c_bound->add_subcommand("counting", "ball-counting lower bound for a set");
  c_counting->add_option("--set", counting_set)->required();
  double por_eps = 0.5, por_C = 2.0, por_phi = 1.0, por_L = 1.0;
  int por_d = 2;
  auto* c_por = c_bound->add_subcommand("porosity-radius", "radius of a porosity ball");
  c_por->add_option("--eps", por_eps);
  c_por->add_option("--C", por_C);
  c_por->add_option("--phi-sup", por_phi);
  c_por->add_option("--L", por_L);
  c_por->add_option("--d", por_d);
  int par_d = 1;
  double par_L = 2.0, par_eps = 0.5;
  auto* c_params = c_bound->add_subcommand("params", "dichotomy parameters");
  c_params->add_option("--d", par_d);
  c_params->add_option("--L", par_L);
  c_params->add_option("--eps", par_eps);
  double it_L = 2.0, it_phi = 0.1;
  auto* c_iter = c_bound->add_subcommand("iterations", "smallest r with (1+phi)^r > L^2");
  c_iter->add_option("--L", it_L);
  c_iter->add_option("--phi", it_phi);

  DegreeArgs degree;
  auto* c_degree = app.add_subcommand("degree", "degree of a built-in planar map on (-1,1)^2");
  c_degree->add_option("--kind", degree.kind, "identity, reflection or fold");
  c_degree->add_option("--cells", degree.cells);
  c_degree->add_option("--y", degree.y, "comma separated point");

  RegularityArgs reg;
  auto* c_reg = app.add_subcommand("regularity", "iterated folds over a fat Cantor set");
  c_reg->add_option("--eps", reg.eps);
  c_reg->add_option("--n-max", reg.n_max);
  c_reg->add_option("--scales", reg.scales, "dyadic probe exponents, comma separated");
  c_reg->add_option("--c-max", reg.c_max);
  c_reg->add_option("--out", reg.out);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  auto* c_pipe = app.add_subcommand("pipeline", "run the full experiment");
  c_pipe->add_option("--config", config_path);
  std::map<std::string, std::string> raw;
  const Json config_fields = to_json(ExperimentConfig{});
  for (const auto& [key, value] : config_fields.items()) {
    c_pipe->add_option("--" + key, raw[key]);
  }

  std::string csv_path, svg_path;
  auto* c_plot = app.add_subcommand("plot", "render bounds.csv as SVG");
  c_plot->add_option("--csv", csv_path)->required();
  c_plot->add_option("--out", svg_path)->required();

  std::vector<std::string> paths;
  double val_eps = -1.0;
  auto* c_val = app.add_subcommand("validate", "check artifacts");
  c_val->add_option("paths", paths)->required();
  c_val->add_option("--eps", val_eps, "required gap for a density and its families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kIo;
  }

  try {
    if (c_forge->parsed()) return run_forge(forge);
    if (c_encode->parsed()) return run_encode(encode);
    if (c_solve->parsed()) return run_solve(solve);
    if (c_counting->parsed()) return run_counting(counting_set);
    if (c_por->parsed()) {
      print({{"porosity_radius", porosity_radius(por_eps, por_C, por_phi, por_L, por_d)}});
      return kOk;
    }
    if (c_params->parsed()) return run_params(par_d, par_L, par_eps);
    if (c_iter->parsed()) {
      print({{"iterations", iteration_bound(it_L, it_phi).get_str()}});
      return kOk;
    }
    if (c_degree->parsed()) return run_degree(degree);
    if (c_reg->parsed()) return run_regularity(reg);
    if (c_pipe->parsed()) {
      for (const auto& [key, value] : raw)
        if (c_pipe->get_option("--" + key)->count() > 0) overrides[key] = value;
      return run_pipeline_cmd(config_path, overrides);
    }
    if (c_plot->parsed()) {
      write_text_file(svg_path, render_plot(read_text_file(csv_path)));
      return kOk;
    }
    if (c_val->parsed()) return run_validate(paths, val_eps >= 0 ? std::optional<double>(val_eps) : std::nullopt);
  } catch (const IoError& e) {
    std::cerr << "lipgrid: error: " << e.what() << "\n";
    return kIo;
  } catch (const PreconditionError& e) {
    std::cerr << "lipgrid: error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "lipgrid: failure: " << e.what() << "\n";
    return kInvariant;
  }
  return kOk;
}
