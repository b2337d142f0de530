#include "lipgrid/pipeline.hpp"

#include <algorithm>
#include <filesystem>

#include "lipgrid/dichotomy.hpp"
#include "lipgrid/errors.hpp"
#include "lipgrid/forge.hpp"

namespace lipgrid {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExperimentConfig, density, density_file, d, density_resolution, eps, N,
                                                M, levels, c, taper, p, m_sequence, seed, node_budget,
                                                exact_max_points, proposals, max_proposals, restarts, output_dir,
                                                record_timing)

Json to_json(const ExperimentConfig& config) {
  Json j = config;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw IoError("configuration must be a JSON object");
  Json known = ExperimentConfig{};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw IoError("unknown configuration field '" + key + "'");
  try {
    return j.get<ExperimentConfig>();
  } catch (const Json::exception& e) {
    throw IoError(std::string("invalid configuration: ") + e.what());
  }
}

ForgedDensity forge_density(const ExperimentConfig& config) {
  ForgedDensity out;
  if (config.density == "file") {
    if (config.density_file.empty()) throw IoError("density 'file' needs density_file");
    out.rho = density_from_json(read_json_file(config.density_file));
    return out;
  }
  if (config.density == "constant") {
    std::int64_t m = config.density_resolution > 0 ? config.density_resolution : 16;
    out.rho = GridDensity::constant(config.d, m, 1.0);
    return out;
  }
  if (config.density != "chessboard") throw IoError("unknown density kind '" + config.density + "'");
  NestedSpec spec;
  spec.d = config.d;
  spec.N = config.N;
  spec.M = config.M;
  spec.levels = config.levels;
  spec.c = parse_rational(config.c);
  FamilyFile families{config.d, config.N, config.M, spec.c, build_nested_families(spec)};
  ChessboardSpec board;
  board.families = families.levels;
  board.eps = config.eps;
  board.taper = parse_rational(config.taper);
  std::int64_t res = config.density_resolution > 0 ? config.density_resolution : chessboard_min_resolution(board.families);
  GridDensity psi = chessboard(board, res);
  out.rho = perturb_density(GridDensity::constant(config.d, res, 1.0), psi);
  out.families = std::move(families);
  out.eps = config.eps;
  return out;
}

namespace {

double total_ms(const BoundsReport& r) {
  double t = 0.0;
  for (const auto& [phase, ms] : r.wall_time_ms) t += ms;
  return t;
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& config) {
  if (config.m_sequence.empty()) throw IoError("m_sequence is empty");
  if (!(config.p > 0.0) || (config.d > 1 && config.p >= 1.0 / (config.d - 1)))
    throw IoError("p must lie in (0, 1/(d-1))");
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + config.output_dir + "': " + ec.message());
  const std::filesystem::path dir(config.output_dir);

  PipelineResult result;
  ForgedDensity forged = forge_density(config);
  std::vector<std::string> artifacts;
  write_json_file((dir / "density.json").string(), to_json(forged.rho, forged.eps));
  artifacts.push_back((dir / "density.json").string());
  if (forged.families) {
    write_json_file((dir / "families.json").string(), to_json(*forged.families));
    artifacts.push_back((dir / "families.json").string());
  }
  GridDensity rho = normalize_density(forged.rho);

  Json stages = Json::array();
  for (std::int64_t m : config.m_sequence) {
    StageOutcome stage;
    stage.m = m;
    StagePlan plan = plan_stage(rho, m, config.p);
    SeparatedSet set = encode_stage(plan);
    stage.n = set.n;
    stage.points = set.points.size();
    stage.separation = set.r;
    MeasureDeviation dev = discrete_measure_deviation(plan, set, rho);
    stage.measure_deviation = dev.max_deviation;
    for (std::size_t k = 0; k < dev.per_cell.size(); ++k)
      if (dev.per_cell[k] > dev.bound[k] * (1.0 + 1e-12)) {
        result.failures.push_back("stage m=" + std::to_string(m) + ": measure deviation above the per-cell bound");
        break;
      }

    AnnealSchedule schedule;
    schedule.restarts = config.restarts;
    const std::uint64_t N = set.points.size();
    schedule.proposals = config.proposals ? config.proposals : std::min<std::uint64_t>(200 * N * N, config.max_proposals);
    stage.bounds = solve_heuristic(set.points, set.n, config.seed, schedule);
    Assignment best = stage.bounds.best;
    if (static_cast<std::int64_t>(N) <= config.exact_max_points) {
      BoundsReport exact = solve_exact(set.points, set.n, config.node_budget);
      for (const auto& [phase, ms] : exact.wall_time_ms) stage.bounds.wall_time_ms["exact_" + phase] = ms;
      if (exact.exact) {
        stage.bounds.exact = exact.exact;
        best = exact.best;
      }
    }
    const BoundsReport& b = stage.bounds;
    if (b.lower > b.upper * (1.0 + 1e-12)) result.failures.push_back("stage m=" + std::to_string(m) + ": lower > upper");
    if (b.exact && (*b.exact < b.lower * (1.0 - 1e-12) || *b.exact > b.upper * (1.0 + 1e-12)))
      result.failures.push_back("stage m=" + std::to_string(m) + ": exact value outside [lower, upper]");

    BoundsRow row{set.n, b.lower, b.upper, b.exact, config.seed, config.record_timing ? total_ms(b) : 0.0};
    result.rows.push_back(row);

    std::string stem = "stage_m" + std::to_string(m);
    write_json_file((dir / (stem + "_set.json")).string(), to_json(set));
    write_json_file((dir / (stem + "_assignment.json")).string(), to_json(best));
    artifacts.push_back((dir / (stem + "_set.json")).string());
    artifacts.push_back((dir / (stem + "_assignment.json")).string());

    Json sj{{"m", m},
            {"n", set.n},
            {"points", set.points.size()},
            {"r", set.r},
            {"l", plan.l},
            {"measure_deviation", dev.max_deviation},
            {"lower", b.lower},
            {"upper", b.upper},
            {"exact", b.exact ? Json(*b.exact) : Json(nullptr)}};
    if (config.record_timing) sj["wall_time_ms"] = b.wall_time_ms;
    stages.push_back(sj);
    result.stages.push_back(std::move(stage));
  }
  write_text_file((dir / "bounds.csv").string(), bounds_csv(result.rows));

  ValidationReport report = validate_artifacts(artifacts, forged.eps);
  Json checks = Json::array();
  for (const auto& line : report.lines) {
    checks.push_back({{"path", line.path}, {"check", line.check}, {"passed", line.passed}, {"detail", line.detail}});
    if (!line.passed) result.failures.push_back(line.path + ": " + line.check + " failed (" + line.detail + ")");
  }
  result.summary = Json{{"config", to_json(config)}, {"stages", stages}, {"checks", checks},
                        {"failures", result.failures}, {"ok", result.ok()}};
  write_json_file((dir / "summary.json").string(), result.summary);
  return result;
}

}  // namespace lipgrid
