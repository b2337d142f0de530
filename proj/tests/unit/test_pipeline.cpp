#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lipgrid/errors.hpp"
#include "lipgrid/pipeline.hpp"

using namespace lipgrid;

namespace {

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "lipgrid_pipeline_test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

ExperimentConfig small_constant(const std::string& dir) {
  ExperimentConfig c;
  c.density = "constant";
  c.m_sequence = {2};
  c.output_dir = dir;
  c.record_timing = false;
  c.proposals = 500;
  c.restarts = 1;
  return c;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("constant density, one stage") {
    ExperimentConfig c = small_constant(scratch("constant"));
    PipelineResult res = run_pipeline(c);
    CHECK(res.ok());
    REQUIRE(res.rows.size() == 1);
    REQUIRE(res.stages.size() == 1);
    auto n = res.stages[0].n;
    CHECK(res.stages[0].points == static_cast<std::size_t>(n * n));
    CHECK(res.rows[0].lower <= res.rows[0].upper);
    if (res.rows[0].exact) {
      CHECK(res.rows[0].lower <= *res.rows[0].exact);
      CHECK(*res.rows[0].exact <= res.rows[0].upper);
    }
    CHECK(std::filesystem::exists(c.output_dir + "/bounds.csv"));
    CHECK(std::filesystem::exists(c.output_dir + "/summary.json"));
    CHECK(read_json_file(c.output_dir + "/summary.json")["ok"] == true);
  }

  TEST_CASE("identical config gives identical csv") {
    ExperimentConfig a = small_constant(scratch("det_a"));
    a.m_sequence = {2, 3};
    ExperimentConfig b = a;
    b.output_dir = scratch("det_b");
    run_pipeline(a);
    run_pipeline(b);
    std::string ta = read_text_file(a.output_dir + "/bounds.csv");
    CHECK(ta == read_text_file(b.output_dir + "/bounds.csv"));
    CHECK(parse_bounds_csv(ta).size() == 2);
  }

  TEST_CASE("configuration errors") {
    ExperimentConfig c = small_constant(scratch("missing"));
    c.density = "file";
    c.density_file = c.output_dir + "/nowhere.json";
    try {
      run_pipeline(c);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("nowhere.json") != std::string::npos);
    }
    Json j = to_json(small_constant("x"));
    CHECK(config_from_json(j).density == "constant");
    j["colour"] = "blue";
    CHECK_THROWS_AS(config_from_json(j), IoError);
    ExperimentConfig bad_p = small_constant(scratch("bad_p"));
    bad_p.p = 1.5;
    CHECK_THROWS_AS(run_pipeline(bad_p), IoError);
  }

  TEST_CASE("density from file") {
    std::string dir = scratch("file");
    GridDensity rho = GridDensity::constant(2, 4, 2.0);
    rho.set(5, 3.0);
    write_json_file(dir + "/rho.json", to_json(rho));
    ExperimentConfig c = small_constant(dir + "/out");
    c.density = "file";
    c.density_file = dir + "/rho.json";
    ForgedDensity f = forge_density(c);
    CHECK(f.rho.resolution() == 4);
    CHECK(f.rho.at(5) == 3.0);
    CHECK_FALSE(f.families.has_value());
  }

  TEST_CASE("plot") {
    std::string csv = std::string(kBoundsHeader) + "\n9,0.5,1.5,1,1,0\n";
    std::string svg = render_plot(csv);
    CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
    std::size_t polylines = 0, circles = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) ++polylines;
    for (std::size_t at = svg.find("<circle"); at != std::string::npos; at = svg.find("<circle", at + 1)) ++circles;
    CHECK(polylines == 3);
    CHECK(circles == 3);
    CHECK(render_plot(csv) == svg);
    CHECK_THROWS_AS(render_plot(std::string(kBoundsHeader) + "\n"), IoError);
  }

  TEST_CASE("validate") {
    std::string dir = scratch("validate");
    SeparatedSet s{2, 0.25, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    write_json_file(dir + "/set.json", to_json(s));
    CHECK(validate_artifacts({dir + "/set.json"}).all_passed());
    SeparatedSet dup = s;
    dup.points[3] = dup.points[0];
    write_json_file(dir + "/dup.json", to_json(dup));
    CHECK_FALSE(validate_artifacts({dir + "/dup.json"}).all_passed());

    ExperimentConfig c;
    c.eps = 0.9;
    ForgedDensity f = forge_density(c);
    REQUIRE(f.families.has_value());
    write_json_file(dir + "/rho.json", to_json(f.rho, f.eps));
    write_json_file(dir + "/fam.json", to_json(*f.families));
    ValidationReport rep = validate_artifacts({dir + "/rho.json", dir + "/fam.json"});
    CHECK(rep.all_passed());
    bool has_gap = false;
    for (const auto& line : rep.lines) has_gap = has_gap || line.check.find("gap") != std::string::npos;
    CHECK(has_gap);

    write_json_file(dir + "/odd.json", Json{{"something", 1}});
    CHECK_THROWS_AS(validate_artifacts({dir + "/odd.json"}), IoError);
  }
}
