#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cirm/errors.hpp"
#include "commands.hpp"
#include "json_config.hpp"

using namespace cirm::cli;

namespace {

void add_common(CLI::App* app, CommonOptions& c) {
  // Expanded by expand_config before parsing; declared here for --help.
  app->add_option("--config", c.config, "JSON config file; command-line flags take precedence");
  app->add_option("--curve", c.curve, "Discount curve (CSV or JSON)");
  app->add_option("--surface", c.surface, "Swaption surface (CSV or JSON)");
  app->add_option("--type", c.type, "Swap type of the surface quotes: payer or receiver");
  app->add_option("--params", c.params, "Parameter file from a previous calibrate run");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--timings", c.timings, "Record wall-clock time in result files");
  app->add_flag("--quiet", c.quiet, "Suppress progress logging");
}

void add_calibration(CLI::App* app, CalibrationCliOptions& o) {
  app->add_option("--tenor", o.tenor, "Surface column (swap tenor in years) to calibrate");
  app->add_option("--min-maturity", o.min_maturity, "Smallest option maturity in the target");
  app->add_option("--max-maturity", o.max_maturity, "Largest option maturity in the target");
  app->add_option("--orders", o.orders, "Expansion orders, e.g. 3,5,7")
      ->delimiter(',')
      ->check(CLI::Range(2, 7));
  app->add_option("--initial", o.initial, "I1, I2, or a parameter file");
  app->add_option("--max-evals", o.max_evaluations, "Objective evaluation budget per start")
      ->check(CLI::PositiveNumber);
  app->add_option("--restarts", o.restarts, "Nelder-Mead restarts per start")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--perturbed-starts", o.perturbed_starts, "Extra randomized starting points")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--drop-last-maturity", o.drop_last_maturity,
                "Exclude the largest maturity from the target");
}

void add_simulation(CLI::App* app, SimulationCliOptions& o) {
  app->add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  app->add_option("--mesh", o.mesh, "Time steps per year")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-factor CIR short-rate model: calibration and pricing", "cirm"};
  app.require_subcommand(1);

  CommonOptions common;
  CalibrationCliOptions calib;
  SimulationCliOptions sim;
  PriceOptions price;
  CmsOptions cms;
  BermudanOptions bermudan;
  SimulateOptions simulate;

  auto* c_cal = app.add_subcommand("calibrate", "Fit model parameters to a surface column");
  add_common(c_cal, common);
  add_calibration(c_cal, calib);

  auto* c_price = app.add_subcommand("price", "Expansion (and optional Monte Carlo) swaption prices");
  add_common(c_price, common);
  add_calibration(c_price, calib);
  add_simulation(c_price, sim);
  c_price->add_flag("--mc", price.mc, "Add a Monte Carlo column with standard errors");
  c_price->add_flag("--all-quotes", price.all_quotes, "Price every surface quote");

  auto* c_cms = app.add_subcommand("cms", "Par CMS rates by Monte Carlo");
  add_common(c_cms, common);
  add_calibration(c_cms, calib);
  add_simulation(c_cms, sim);
  c_cms->add_option("--reference", cms.reference,
                    "CSV: effective_years,tenor_years,index_years,reference");

  auto* c_berm = app.add_subcommand("bermudan", "Bermudan swaptions by least-squares Monte Carlo");
  add_common(c_berm, common);
  add_calibration(c_berm, calib);
  add_simulation(c_berm, sim);
  c_berm->add_option("--strikes", bermudan.strikes,
                     "CSV: maturity_years,tenor_years,strike,reference");
  c_berm->add_option("--zeta", bermudan.zeta,
                     "Sign in the exercise payoff (zeta*(K-R))^+; -1 is payer-style");
  c_berm->add_option("--degree", bermudan.degree, "Polynomial regression degree")
      ->check(CLI::PositiveNumber);
  c_berm->add_flag("--regress-all", bermudan.regress_all,
                   "Regress on all paths instead of in-the-money paths only");

  auto* c_sim = app.add_subcommand("simulate", "Simulate factor paths and summarize them");
  add_common(c_sim, common);
  add_calibration(c_sim, calib);
  add_simulation(c_sim, sim);
  c_sim->add_option("--horizon", simulate.horizon, "Simulation horizon in years")
      ->check(CLI::PositiveNumber);
  c_sim->add_flag("--dump-paths", simulate.dump_paths, "Write full path matrices as CSV");

  try {
    auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const cirm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*c_cal) return run_calibrate(common, calib);
    if (*c_price) return run_price(common, calib, sim, price);
    if (*c_cms) return run_cms(common, calib, sim, cms);
    if (*c_berm) return run_bermudan(common, calib, sim, bermudan);
    if (*c_sim) return run_simulate(common, calib, sim, simulate);
  } catch (const cirm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
