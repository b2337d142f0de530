#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipgrid/io.hpp"

namespace lipgrid {

// Flat experiment configuration; every field can be given in a JSON file and
// overridden by a command-line flag of the same name.
struct ExperimentConfig {
  std::string density = "chessboard";  // chessboard | constant | file
  std::string density_file;
  int d = 2;
  std::int64_t density_resolution = 0;  // 0: smallest admissible
  double eps = 0.9;
  std::int64_t N = 3;
  std::int64_t M = 2;
  int levels = 2;
  std::string c = "1";
  std::string taper = "1/10";
  double p = 0.5;
  std::vector<std::int64_t> m_sequence{4, 8, 16};
  std::uint64_t seed = 1;
  std::uint64_t node_budget = 2'000'000;
  std::int64_t exact_max_points = 12;
  std::uint64_t proposals = 0;  // 0: 200 |S|^2, capped by max_proposals
  std::uint64_t max_proposals = 20000;
  int restarts = 4;
  std::string output_dir = "lipgrid_out";
  bool record_timing = true;
};

Json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);  // unknown keys are rejected

struct StageOutcome {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::size_t points = 0;
  double separation = 0.0;
  double measure_deviation = 0.0;
  BoundsReport bounds;
};

struct PipelineResult {
  std::vector<BoundsRow> rows;
  std::vector<StageOutcome> stages;
  std::vector<std::string> failures;  // invariant failures; empty on success
  Json summary;
  bool ok() const { return failures.empty(); }
};

// Builds or loads the density, normalises it, encodes every stage, bounds the
// bottleneck, writes artifacts to output_dir and validates them.
PipelineResult run_pipeline(const ExperimentConfig& config);

// Density used by the pipeline, together with its families when forged.
struct ForgedDensity {
  GridDensity rho;
  std::optional<FamilyFile> families;
  std::optional<double> eps;
};
ForgedDensity forge_density(const ExperimentConfig& config);

// Deterministic 800x600 SVG with one polyline per series (lower, upper, exact).
std::string render_plot(const std::string& csv_text);

struct CheckLine {
  std::string path;
  std::string check;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckLine> lines;
  bool all_passed() const;
};

// Checks each artifact by its kind (separated set, density, families,
// assignment, piecewise-linear map). Cross-file checks run when a density and
// its families, or an assignment and its set, are validated together.
ValidationReport validate_artifacts(const std::vector<std::string>& paths, std::optional<double> eps = std::nullopt);

}  // namespace lipgrid
