#include "cirm/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cirm/errors.hpp"
#include "json.hpp"

namespace cirm {

using nlohmann::ordered_json;

std::string format_full(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_sig3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

namespace {

ordered_json params_object(const ModelParams& params) {
  ordered_json j;
  j["pi"] = params.vector();
  const auto& p = params.vector();
  j["phi_x"] = {{"phi1", p[0]}, {"phi2", p[1]}, {"phi3", p[2]}};
  j["phi_y"] = {{"phi1", p[3]}, {"phi2", p[4]}, {"phi3", p[5]}};
  j["x0"] = p[6];
  j["y0"] = p[7];
  try {
    const auto f = ksigma_from_phi(params);
    j["x"] = {{"k", f.x.k}, {"theta", f.x.theta}, {"sigma", f.x.sigma}};
    j["y"] = {{"k", f.y.k}, {"theta", f.y.theta}, {"sigma", f.y.sigma}};
  } catch (const Error&) {
    j["x"] = nullptr;
    j["y"] = nullptr;
  }
  return j;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << content;
  if (!f) throw ValidationError("write failed for " + path.string());
}

std::string params_json(const ModelParams& params) { return params_object(params).dump(2) + "\n"; }

void write_params(const ModelParams& params, const std::filesystem::path& path) {
  write_text(path, params_json(params));
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open params file " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed params JSON in " + path.string() + ": " + e.what());
  }
  const ordered_json* node = &j;
  if (j.contains("params")) node = &j["params"];
  if (!node->contains("pi") || !(*node)["pi"].is_array() || (*node)["pi"].size() != 8) {
    throw ParseError("params file " + path.string() + " needs an 8-element \"pi\" array");
  }
  ModelParams::Vector pi{};
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& v = (*node)["pi"][i];
    if (!v.is_number()) throw ParseError("pi entries must be numbers");
    pi[i] = v.get<double>();
  }
  return ModelParams(pi);
}

std::string calibration_result_json(const CalibrationResult& result,
                                    const CalibrationTarget& target, bool include_timings) {
  ordered_json j;
  j["params"] = params_object(result.params);
  j["objective"] = result.objective;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["evaluations"] = result.evaluations;
  j["total_evaluations"] = result.total_evaluations;
  j["start_index"] = result.start_index;
  if (include_timings) j["wall_seconds"] = result.wall_seconds;
  j["swap_type"] = to_string(target.type);
  j["orders"] = result.orders;
  ordered_json quotes = ordered_json::array();
  for (const auto& f : result.fits) {
    ordered_json q;
    q["maturity_years"] = f.maturity;
    q["tenor_years"] = f.tenor;
    q["market"] = f.market;
    q["model"] = f.model;
    q["relative_error"] = f.relative_error;
    quotes.push_back(std::move(q));
  }
  j["quotes"] = std::move(quotes);
  return j.dump(2) + "\n";
}

void write_calibration_result(const CalibrationResult& result, const CalibrationTarget& target,
                              const std::filesystem::path& path, bool include_timings) {
  write_text(path, calibration_result_json(result, target, include_timings));
}

void write_quote_fits_csv(const std::vector<QuoteFit>& fits, const std::vector<int>& orders,
                          const std::filesystem::path& path) {
  std::ostringstream out;
  out << "maturity_years,tenor_years,market";
  for (int l : orders) out << ",model_gc" << l;
  for (int l : orders) out << ",rel_error_gc" << l;
  out << '\n';
  for (const auto& f : fits) {
    out << format_full(f.maturity) << ',' << format_full(f.tenor) << ',' << format_full(f.market);
    for (std::size_t i = 0; i < orders.size(); ++i) {
      out << ',' << (i < f.model.size() ? format_full(f.model[i]) : "nan");
    }
    for (std::size_t i = 0; i < orders.size(); ++i) {
      out << ',' << (i < f.relative_error.size() ? format_full(f.relative_error[i]) : "nan");
    }
    out << '\n';
  }
  write_text(path, out.str());
}

}  // namespace cirm
