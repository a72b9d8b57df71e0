#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>

#include "cirm/calibration.hpp"
#include "cirm/errors.hpp"
#include "cirm/market_data.hpp"
#include "cirm/products.hpp"
#include "cirm/serialization.hpp"
#include "cirm/simulation.hpp"
#include "json.hpp"
#include "tables.hpp"

namespace cirm::cli {

namespace {

using nlohmann::ordered_json;

void log(const CommonOptions& common, const std::string& msg) {
  if (!common.quiet) std::cerr << "[cirm] " << msg << '\n';
}

std::string sig3(double v) { return format_sig3(v); }

struct Inputs {
  DiscountCurve curve;
  std::optional<SwaptionSurface> surface;
};

Inputs load_inputs(const CommonOptions& common, bool need_surface) {
  if (common.curve.empty()) throw ValidationError("--curve is required");
  Inputs in{load_curve(common.curve), std::nullopt};
  if (need_surface) {
    if (common.surface.empty()) throw ValidationError("--surface is required");
    in.surface = load_surface(common.surface, parse_swap_type(common.type), &in.curve);
  }
  return in;
}

CalibrationTarget make_target(const SwaptionSurface& surface, const CalibrationCliOptions& opts) {
  auto target = select_column(surface, opts.tenor, opts.min_maturity, opts.max_maturity,
                              opts.orders, opts.drop_last_maturity);
  if (target.quotes.empty()) {
    throw ValidationError("calibration target selection is empty (tenor " +
                          format_full(opts.tenor) + ")");
  }
  return target;
}

ModelParams::Vector initial_vector(const CalibrationCliOptions& opts) {
  if (opts.initial == "I1" || opts.initial == "I2" || opts.initial == "i1" || opts.initial == "i2") {
    return initial_point(parse_initial_preset(opts.initial));
  }
  return load_params(opts.initial).vector();
}

CalibrationOptions optimizer_options(const CommonOptions& common,
                                     const CalibrationCliOptions& opts) {
  CalibrationOptions o;
  o.max_evaluations = opts.max_evaluations;
  o.restarts = opts.restarts;
  o.perturbed_starts = opts.perturbed_starts;
  o.seed = common.seed;
  o.threads = common.threads;
  return o;
}

struct CalibrationOutcome {
  CalibrationResult result;
  CalibrationTarget target;
};

CalibrationOutcome run_calibration(const CommonOptions& common, const CalibrationCliOptions& opts,
                                   const Inputs& in) {
  auto target = make_target(*in.surface, opts);
  log(common, "calibrating to " + std::to_string(target.quotes.size()) + " quotes, tenor " +
                  format_full(opts.tenor));
  auto result = calibrate(target, in.curve, initial_vector(opts), optimizer_options(common, opts));
  log(common, "objective " + sig3(result.objective) + " after " +
                  std::to_string(result.evaluations) + " evaluations" +
                  (result.converged ? "" : " (not converged)"));
  write_calibration_result(result, target, common.out / "calibration.json", common.timings);
  write_quote_fits_csv(result.fits, target.orders, common.out / "calibration_quotes.csv");
  write_params(result.params, common.out / "params.json");
  return {std::move(result), std::move(target)};
}

// Π from --params, or an inline calibration when absent.
struct ResolvedParams {
  ModelParams params;
  bool converged = true;
};

ResolvedParams resolve_params(const CommonOptions& common, const CalibrationCliOptions& opts,
                              const Inputs& in) {
  if (!common.params.empty()) {
    log(common, "using parameters from " + common.params.string());
    return {load_params(common.params), true};
  }
  if (!in.surface) throw ValidationError("--params or --surface is required");
  auto outcome = run_calibration(common, opts, in);
  return {outcome.result.params, outcome.result.converged};
}

SimulationConfig sim_config(const CommonOptions& common, const SimulationCliOptions& sim,
                            std::vector<double> times) {
  SimulationConfig cfg;
  cfg.paths = sim.paths;
  cfg.steps_per_year = sim.mesh;
  cfg.seed = common.seed;
  cfg.threads = common.threads;
  double horizon = 0.0;
  for (double t : times) horizon = std::max(horizon, t);
  cfg.horizon = std::max(horizon, 1.0);
  cfg.observation_times = std::move(times);
  return cfg;
}

ordered_json params_array(const ModelParams& p) { return p.vector(); }

}  // namespace

int run_calibrate(const CommonOptions& common, const CalibrationCliOptions& opts) {
  const auto in = load_inputs(common, true);
  const auto outcome = run_calibration(common, opts, in);

  std::vector<std::string> head{"maturity", "tenor", "market"};
  for (int l : outcome.target.orders) head.push_back("GC" + std::to_string(l));
  for (int l : outcome.target.orders) head.push_back("relerr" + std::to_string(l));
  TextTable t(head);
  for (const auto& f : outcome.result.fits) {
    std::vector<std::string> row{sig3(f.maturity), sig3(f.tenor), sig3(f.market)};
    for (double m : f.model) row.push_back(sig3(m));
    for (double e : f.relative_error) row.push_back(sig3(e));
    t.add(row);
  }
  std::cout << "objective " << sig3(outcome.result.objective)
            << (outcome.result.converged ? "" : "  (not converged)") << '\n';
  t.print(std::cout);
  return outcome.result.converged ? kOk : kNotConverged;
}

int run_price(const CommonOptions& common, const CalibrationCliOptions& opts,
              const SimulationCliOptions& sim, const PriceOptions& popts) {
  const auto in = load_inputs(common, true);
  const auto resolved = resolve_params(common, opts, in);
  const ShiftedModel model(resolved.params, in.curve);

  std::vector<SwaptionQuote> quotes;
  if (popts.all_quotes) {
    quotes.assign(in.surface->quotes().begin(), in.surface->quotes().end());
  } else {
    quotes = make_target(*in.surface, opts).quotes;
  }
  const auto& orders = opts.orders;
  std::vector<int> all_orders{2};
  for (int l : orders) {
    if (l != 2) all_orders.push_back(l);
  }

  std::optional<PathSet> paths;
  if (popts.mc) {
    std::vector<double> times;
    for (const auto& q : quotes) times.push_back(q.maturity);
    log(common, "simulating " + std::to_string(sim.paths) + " paths");
    paths = simulate(model, sim_config(common, sim, times));
  }

  std::vector<std::string> header{"maturity_years", "tenor_years", "strike", "market"};
  for (int l : all_orders) header.push_back("gc" + std::to_string(l));
  if (popts.mc) {
    header.insert(header.end(), {"mc", "mc_se"});
    for (int l : all_orders) header.push_back("abs_mc_gc" + std::to_string(l));
    header.push_back("abs_mc_market");
  }
  CsvWriter csv(header);
  std::vector<std::string> human{"T0", "tenor", "market"};
  for (int l : all_orders) human.push_back("GC" + std::to_string(l));
  if (popts.mc) human.insert(human.end(), {"MC", "SE"});
  TextTable table(human);

  std::map<std::string, std::pair<double, int>> averages;
  for (const auto& q : quotes) {
    const SwapSpec spec{Schedule::annual(q.maturity, q.tenor), q.strike, in.surface->type()};
    std::vector<std::optional<double>> gc(all_orders.size());
    try {
      const auto res = gc_price(model, spec, all_orders);
      for (std::size_t i = 0; i < all_orders.size(); ++i) gc[i] = res.price(all_orders[i]);
    } catch (const ExpansionError& e) {
      log(common, std::string("expansion failed: ") + e.what());
    } catch (const SingularityError& e) {
      log(common, std::string("expansion failed: ") + e.what());
    }
    csv.cell(q.maturity).cell(q.tenor).cell(q.strike).cell(q.price);
    std::vector<std::string> row{sig3(q.maturity), sig3(q.tenor), sig3(q.price)};
    for (const auto& g : gc) {
      csv.cell(g);
      row.push_back(g ? sig3(*g) : "-");
    }
    if (paths) {
      const auto est = mc_swaption(*paths, model, spec);
      csv.cell(est.mean).cell(est.std_error);
      for (std::size_t i = 0; i < gc.size(); ++i) {
        std::optional<double> d;
        if (gc[i]) {
          d = std::abs(est.mean - *gc[i]);
          auto& a = averages["avg_abs_mc_gc" + std::to_string(all_orders[i])];
          a.first += *d;
          a.second += 1;
        }
        csv.cell(d);
      }
      const double dm = std::abs(est.mean - q.price);
      csv.cell(dm);
      auto& a = averages["avg_abs_mc_market"];
      a.first += dm;
      a.second += 1;
      row.push_back(sig3(est.mean));
      row.push_back(sig3(est.std_error));
    }
    for (std::size_t i = 0; i < gc.size(); ++i) {
      if (!gc[i]) continue;
      auto& a = averages["avg_abs_gc" + std::to_string(all_orders[i]) + "_market"];
      a.first += std::abs(*gc[i] - q.price);
      a.second += 1;
    }
    csv.end_row();
    table.add(row);
  }
  csv.save(common.out / "prices.csv");

  CsvWriter summary({"metric", "value"});
  for (const auto& [name, acc] : averages) {
    summary.cell(name).cell(acc.first / acc.second);
    summary.end_row();
  }
  summary.save(common.out / "price_summary.csv");

  table.print(std::cout);
  for (const auto& [name, acc] : averages) {
    std::cout << name << ' ' << sig3(acc.first / acc.second) << '\n';
  }
  return resolved.converged ? kOk : kNotConverged;
}

int run_cms(const CommonOptions& common, const CalibrationCliOptions& opts,
            const SimulationCliOptions& sim, const CmsOptions& copts) {
  if (copts.reference.empty()) throw ValidationError("--reference (CMS request table) is required");
  const auto rows = read_table(copts.reference,
                               {"effective_years", "tenor_years", "index_years", "reference"});
  struct Request {
    CmsSpec spec;
    std::optional<double> reference;
  };
  std::vector<Request> requests;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Request req;
    req.spec.effective = to_number(rows[r][0], copts.reference, r);
    const double tenor = to_number(rows[r][1], copts.reference, r);
    const double index = to_number(rows[r][2], copts.reference, r);
    if (tenor != std::round(tenor) || index != std::round(index)) {
      throw ValidationError("CMS tenor and index must be whole years");
    }
    req.spec.tenor = static_cast<int>(tenor);
    req.spec.index = static_cast<int>(index);
    req.spec.validate();
    req.reference = to_optional(rows[r][3], copts.reference, r);
    requests.push_back(req);
  }
  if (requests.empty()) throw ValidationError("CMS request table is empty");

  const auto in = load_inputs(common, common.params.empty());
  const auto resolved = resolve_params(common, opts, in);
  const ShiftedModel model(resolved.params, in.curve);

  std::vector<double> times;
  for (const auto& r : requests) {
    for (double t : r.spec.reset_dates()) times.push_back(t);
  }
  log(common, "simulating " + std::to_string(sim.paths) + " paths");
  const auto paths = simulate(model, sim_config(common, sim, times));

  CsvWriter csv({"effective_years", "tenor_years", "index_years", "model", "std_error",
                 "reference", "abs_error"});
  TextTable table({"effective", "tenor", "index", "reference", "model", "SE", "abs err"});
  ordered_json records = ordered_json::array();
  for (const auto& r : requests) {
    const auto res = cms_par_rate(model, paths, r.spec);
    std::optional<double> err;
    if (r.reference) err = std::abs(res.rate - *r.reference);
    csv.cell(r.spec.effective).cell(static_cast<double>(r.spec.tenor))
        .cell(static_cast<double>(r.spec.index)).cell(res.rate).cell(res.std_error)
        .cell(r.reference).cell(err);
    csv.end_row();
    table.add({sig3(r.spec.effective), std::to_string(r.spec.tenor), std::to_string(r.spec.index),
               r.reference ? sig3(*r.reference) : "-", sig3(res.rate), sig3(res.std_error),
               err ? sig3(*err) : "-"});
    ordered_json rec;
    rec["spec"] = {{"effective_years", r.spec.effective}, {"tenor_years", r.spec.tenor},
                   {"index_years", r.spec.index}};
    rec["rate"] = res.rate;
    rec["std_error"] = res.std_error;
    rec["denominator"] = res.denominator;
    rec["reference"] = r.reference ? ordered_json(*r.reference) : ordered_json(nullptr);
    records.push_back(std::move(rec));
  }
  csv.save(common.out / "cms.csv");
  ordered_json doc;
  doc["params"] = params_array(resolved.params);
  doc["paths"] = sim.paths;
  doc["steps_per_year"] = sim.mesh;
  doc["seed"] = common.seed;
  doc["results"] = std::move(records);
  write_text(common.out / "cms.json", doc.dump(2) + "\n");
  table.print(std::cout);
  return resolved.converged ? kOk : kNotConverged;
}

int run_bermudan(const CommonOptions& common, const CalibrationCliOptions& opts,
                 const SimulationCliOptions& sim, const BermudanOptions& bopts) {
  if (bopts.strikes.empty()) throw ValidationError("--strikes is required");
  if (bopts.zeta != 1 && bopts.zeta != -1) throw ValidationError("--zeta must be 1 or -1");
  const SwapType zeta_type = bopts.zeta == 1 ? SwapType::Payer : SwapType::Receiver;
  const auto rows =
      read_table(bopts.strikes, {"maturity_years", "tenor_years", "strike", "reference"});
  struct Request {
    BermudanSpec spec;
    std::optional<double> reference;
  };
  std::vector<Request> requests;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Request req;
    req.spec.first_exercise = to_number(rows[r][0], bopts.strikes, r);
    req.spec.last_payment = req.spec.first_exercise + to_number(rows[r][1], bopts.strikes, r);
    req.spec.strike = to_number(rows[r][2], bopts.strikes, r);
    req.spec.type = zeta_type;
    req.spec.validate();
    req.reference = to_optional(rows[r][3], bopts.strikes, r);
    requests.push_back(req);
  }
  if (requests.empty()) throw ValidationError("Bermudan strike table is empty");

  const auto in = load_inputs(common, common.params.empty());
  const auto resolved = resolve_params(common, opts, in);
  const ShiftedModel model(resolved.params, in.curve);

  std::vector<double> times;
  for (const auto& r : requests) {
    for (double t : r.spec.exercise_dates()) times.push_back(t);
  }
  log(common, "simulating " + std::to_string(sim.paths) + " paths");
  const auto paths = simulate(model, sim_config(common, sim, times));

  const RegressionBasis basis{bopts.degree};
  LsmcOptions lsmc;
  lsmc.in_the_money_only = !bopts.regress_all;
  // The exercise payoff (ζ(K - R))^+ is a market receiver for ζ = +1.
  const SwapType market_style = opposite(zeta_type);

  CsvWriter csv({"maturity_years", "tenor_years", "strike", "zeta", "market_style", "bermudan",
                 "bermudan_se", "european", "european_se", "reference", "abs_error",
                 "rank_deficient"});
  TextTable table({"T0", "tenor", "strike", "Bermudan", "SE", "European", "reference", "abs err"});
  ordered_json records = ordered_json::array();
  for (const auto& r : requests) {
    const auto res = lsmc_bermudan(model, paths, r.spec, basis, lsmc);
    const SwapSpec euro{r.spec.schedule(), r.spec.strike, market_style};
    const auto eu = mc_swaption(paths, model, euro);
    std::optional<double> err;
    if (r.reference) err = std::abs(res.price - *r.reference);
    const double tenor = r.spec.last_payment - r.spec.first_exercise;
    csv.cell(r.spec.first_exercise).cell(tenor).cell(r.spec.strike)
        .cell(std::to_string(bopts.zeta)).cell(to_string(market_style)).cell(res.price)
        .cell(res.std_error).cell(eu.mean).cell(eu.std_error).cell(r.reference).cell(err)
        .cell(std::string(res.rank_deficient ? "true" : "false"));
    csv.end_row();
    table.add({sig3(r.spec.first_exercise), sig3(tenor), sig3(r.spec.strike), sig3(res.price),
               sig3(res.std_error), sig3(eu.mean), r.reference ? sig3(*r.reference) : "-",
               err ? sig3(*err) : "-"});
    ordered_json rec;
    rec["spec"] = {{"first_exercise", r.spec.first_exercise},
                   {"last_payment", r.spec.last_payment},
                   {"strike", r.spec.strike},
                   {"zeta", bopts.zeta}};
    rec["price"] = res.price;
    rec["std_error"] = res.std_error;
    rec["european"] = eu.mean;
    rec["european_std_error"] = eu.std_error;
    rec["flags"] = {{"rank_deficient", res.rank_deficient},
                    {"regress_all", bopts.regress_all},
                    {"basis_degree", bopts.degree}};
    rec["reference"] = r.reference ? ordered_json(*r.reference) : ordered_json(nullptr);
    records.push_back(std::move(rec));
  }
  csv.save(common.out / "bermudan.csv");
  ordered_json doc;
  doc["payoff_convention"] = kBermudanPayoffConvention;
  doc["market_style"] = to_string(market_style);
  doc["params"] = params_array(resolved.params);
  doc["paths"] = sim.paths;
  doc["steps_per_year"] = sim.mesh;
  doc["seed"] = common.seed;
  doc["results"] = std::move(records);
  write_text(common.out / "bermudan.json", doc.dump(2) + "\n");

  std::cout << kBermudanPayoffConvention << " (market " << to_string(market_style)
            << ")\n";
  table.print(std::cout);
  return resolved.converged ? kOk : kNotConverged;
}

int run_simulate(const CommonOptions& common, const CalibrationCliOptions& opts,
                 const SimulationCliOptions& sim, const SimulateOptions& sopts) {
  const auto in = load_inputs(common, common.params.empty());
  const auto resolved = resolve_params(common, opts, in);
  const ShiftedModel model(resolved.params, in.curve);

  std::vector<double> times;
  for (int i = 1; i <= static_cast<int>(std::floor(sopts.horizon + 1e-12)); ++i) times.push_back(i);
  auto cfg = sim_config(common, sim, times);
  cfg.horizon = sopts.horizon;
  if (sopts.dump_paths) cfg.observation_times.clear();
  log(common, "simulating " + std::to_string(sim.paths) + " paths to " + format_full(cfg.horizon));
  const auto paths = simulate(model, cfg);

  CsvWriter csv({"time", "mean_x", "se_x", "mean_y", "se_y", "mc_zcb", "mc_zcb_se",
                 "model_zcb", "market_discount"});
  TextTable table({"t", "E[x]", "E[y]", "MC P(0,t)", "SE", "P^M(0,t)"});
  for (double t : times) {
    const std::size_t k = paths.time_index(t);
    std::vector<double> xs(paths.path_count()), ys(paths.path_count());
    for (std::size_t p = 0; p < xs.size(); ++p) {
      xs[p] = paths.state(p, k).x;
      ys[p] = paths.state(p, k).y;
    }
    const auto ex = mean_and_error(xs);
    const auto ey = mean_and_error(ys);
    const auto zcb = mc_zcb(paths, model, t);
    const double closed = model.zcb(model.params().initial_state(), 0.0, t);
    const double market = in.curve.discount(t);
    csv.cell(t).cell(ex.mean).cell(ex.std_error).cell(ey.mean).cell(ey.std_error)
        .cell(zcb.mean).cell(zcb.std_error).cell(closed).cell(market);
    csv.end_row();
    table.add({sig3(t), sig3(ex.mean), sig3(ey.mean), sig3(zcb.mean), sig3(zcb.std_error),
               sig3(market)});
  }
  csv.save(common.out / "simulation.csv");
  if (sopts.dump_paths) write_paths_csv(paths, common.out / "paths");
  table.print(std::cout);
  return resolved.converged ? kOk : kNotConverged;
}

}  // namespace cirm::cli
