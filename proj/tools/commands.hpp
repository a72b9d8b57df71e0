#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cirm::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNotConverged = 3 };

struct CommonOptions {
  std::filesystem::path config;
  std::filesystem::path curve;
  std::filesystem::path surface;
  std::string type = "payer";
  std::filesystem::path params;
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool timings = false;
  bool quiet = false;
};

struct CalibrationCliOptions {
  double tenor = 5.0;
  double min_maturity = 0.0;
  double max_maturity = 1e9;
  std::vector<int> orders{3, 5, 7};
  std::string initial = "I1";
  int max_evaluations = 5000;
  int restarts = 2;
  int perturbed_starts = 2;
  bool drop_last_maturity = false;
};

struct SimulationCliOptions {
  std::size_t paths = 10000;
  int mesh = 256;
};

struct PriceOptions {
  bool mc = false;
  bool all_quotes = false;
};

struct CmsOptions {
  std::filesystem::path reference;
};

struct BermudanOptions {
  std::filesystem::path strikes;
  int zeta = 1;
  int degree = 3;
  bool regress_all = false;
};

struct SimulateOptions {
  double horizon = 10.0;
  bool dump_paths = false;
};

int run_calibrate(const CommonOptions&, const CalibrationCliOptions&);
int run_price(const CommonOptions&, const CalibrationCliOptions&, const SimulationCliOptions&,
              const PriceOptions&);
int run_cms(const CommonOptions&, const CalibrationCliOptions&, const SimulationCliOptions&,
            const CmsOptions&);
int run_bermudan(const CommonOptions&, const CalibrationCliOptions&, const SimulationCliOptions&,
                 const BermudanOptions&);
int run_simulate(const CommonOptions&, const CalibrationCliOptions&, const SimulationCliOptions&,
                 const SimulateOptions&);

}  // namespace cirm::cli
