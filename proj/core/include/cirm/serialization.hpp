#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cirm/calibration.hpp"
#include "cirm/products.hpp"

namespace cirm {

/// Shortest text that round-trips the double exactly.
std::string format_full(double v);
/// Three significant digits, for human-readable tables.
std::string format_sig3(double v);

/// {"pi": [...8 values...]} plus derived (k, θ, σ) where defined.
std::string params_json(const ModelParams& params);
void write_params(const ModelParams& params, const std::filesystem::path& path);

/// Reads Π from a params file or a calibration result file (both carry "pi").
/// Throws ParseError on malformed JSON, DomainError on inadmissible values.
ModelParams load_params(const std::filesystem::path& path);

/// Every CalibrationResult field. Wall time is written only when
/// `include_timings` is set so that repeated runs produce identical files.
std::string calibration_result_json(const CalibrationResult& result,
                                    const CalibrationTarget& target, bool include_timings);
void write_calibration_result(const CalibrationResult& result, const CalibrationTarget& target,
                              const std::filesystem::path& path, bool include_timings);

/// maturity_years,tenor_years,market,model_L...,rel_error_L... per quote.
void write_quote_fits_csv(const std::vector<QuoteFit>& fits, const std::vector<int>& orders,
                          const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace cirm
