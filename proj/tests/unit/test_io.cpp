#include <doctest.h>

#include <filesystem>

#include "lipgrid/errors.hpp"
#include "lipgrid/io.hpp"

using namespace lipgrid;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "lipgrid_io_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("density round trip") {
    GridDensity rho = GridDensity::constant(2, 3, 1.0);
    for (std::size_t i = 0; i < 9; ++i) rho.set(i, 0.5 + 0.1 * static_cast<double>(i));
    GridDensity back = density_from_json(to_json(rho, 0.25));
    CHECK(back.dim() == 2);
    CHECK(back.resolution() == 3);
    for (std::size_t i = 0; i < 9; ++i) CHECK(back.at(i) == rho.at(i));
    CHECK(to_json(rho, 0.25)["eps"].get<double>() == 0.25);
  }

  TEST_CASE("set and assignment round trip") {
    SeparatedSet s{2, 0.5, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    SeparatedSet back = separated_set_from_json(to_json(s));
    CHECK(back.d == 2);
    CHECK(back.r == 0.5);
    CHECK(back.n == 2);
    CHECK(back.points == s.points);
    Assignment a;
    a.grid_n = 2;
    a.permutation = {3, 1, 2, 0};
    a.bottleneck = 1.5;
    Assignment ab = assignment_from_json(to_json(a));
    CHECK(ab.permutation == a.permutation);
    CHECK(ab.bottleneck == a.bottleneck);
  }

  TEST_CASE("piecewise map round trip") {
    PiecewiseLinear1D f = fold_map(make_rational(1, 5), make_rational(1, 10));
    PiecewiseLinear1D back = piecewise_linear_from_json(to_json(f));
    CHECK(back.breakpoints == f.breakpoints);
    CHECK(back.values == f.values);
  }

  TEST_CASE("bounds csv") {
    std::vector<BoundsRow> rows{{9, 0.5, 1.25, 1.0, 3, 0.0}, {16, 1.0 / 3.0, 2.0, std::nullopt, 3, 12.5}};
    std::string text = bounds_csv(rows);
    CHECK(text.rfind(std::string(kBoundsHeader) + "\n", 0) == 0);
    CHECK(text.find("9,0.5,1.25,1,3,0\n") != std::string::npos);
    CHECK(text.find("16,0.333333333333,2,,3,12.5\n") != std::string::npos);
    auto back = parse_bounds_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].exact == 1.0);
    CHECK_FALSE(back[1].exact.has_value());
    CHECK(back[1].lower == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(format_number(0.1) == "0.1");
  }

  TEST_CASE("malformed csv names the row") {
    std::string bad = std::string(kBoundsHeader) + "\n9,0.5,1,1,1,0\n16,abc,1,,1,0\n";
    try {
      parse_bounds_csv(bad);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_bounds_csv(std::string(kBoundsHeader) + "\n9,0.5\n"), IoError);
    CHECK_THROWS_AS(parse_bounds_csv("n,lower\n"), IoError);
  }

  TEST_CASE("file errors name the path") {
    std::string missing = temp_path("does_not_exist.json");
    std::filesystem::remove(missing);
    try {
      read_json_file(missing);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find(missing) != std::string::npos);
    }
    std::string junk = temp_path("junk.json");
    write_text_file(junk, "{not json");
    CHECK_THROWS_AS(read_json_file(junk), IoError);
    std::string good = temp_path("good.json");
    write_json_file(good, Json{{"k", 1}});
    CHECK(read_json_file(good)["k"] == 1);
  }
}
