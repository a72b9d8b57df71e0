#include <catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cirm/errors.hpp"
#include "cirm/serialization.hpp"
#include "fixtures.hpp"

using namespace cirm;

namespace {

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cirm_ser_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("full-precision formatting round-trips doubles") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.00017, -0.0}) {
    CHECK(std::stod(format_full(v)) == v);
  }
  CHECK(format_sig3(0.000123456) == "0.000123");
  CHECK(format_sig3(1234.5) == "1.23e+03");
}

TEST_CASE("parameters round-trip exactly through JSON") {
  const auto pi = testing::calibrated_tenor5();
  write_params(pi, tmp("params.json"));
  CHECK(load_params(tmp("params.json")).vector() == pi.vector());
}

TEST_CASE("calibration result files carry parameters and omit timings by default") {
  CalibrationResult r;
  r.params = testing::calibrated_tenor1();
  r.objective = 1.25e-3;
  r.orders = {3, 5};
  r.wall_seconds = 12.5;
  r.fits.push_back({5.0, 5.0, 0.02, {0.0201, 0.0199}, {0.005, -0.005}});
  CalibrationTarget t;
  write_calibration_result(r, t, tmp("result.json"), false);
  const auto text = slurp(tmp("result.json"));
  CHECK(text.find("wall_seconds") == std::string::npos);
  CHECK(text.find("\"objective\": 0.00125") != std::string::npos);
  CHECK(load_params(tmp("result.json")).vector() == r.params.vector());
  write_calibration_result(r, t, tmp("result_t.json"), true);
  CHECK(slurp(tmp("result_t.json")).find("wall_seconds") != std::string::npos);

  write_quote_fits_csv(r.fits, r.orders, tmp("fits.csv"));
  CHECK(slurp(tmp("fits.csv")).rfind(
            "maturity_years,tenor_years,market,model_gc3,model_gc5,rel_error_gc3,rel_error_gc5\n", 0) == 0);
}

TEST_CASE("malformed or inadmissible parameter files are rejected") {
  std::ofstream(tmp("bad.json")) << "{\"pi\": [1, 2, 3]}";
  CHECK_THROWS_AS(load_params(tmp("bad.json")), ParseError);
  std::ofstream(tmp("garbage.json")) << "not json";
  CHECK_THROWS_AS(load_params(tmp("garbage.json")), ParseError);
  std::ofstream(tmp("inadmissible.json")) << "{\"pi\": [0.1, 0.2, 1.5, 0.1, 0.2, 1.5, 0, 0]}";
  CHECK_THROWS_AS(load_params(tmp("inadmissible.json")), DomainError);
  CHECK_THROWS_AS(load_params(tmp("missing.json")), ParseError);
}
