#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cirm/cir_model.hpp"
#include "cirm/market_data.hpp"

namespace cirm {

/// Quotes to fit, the expansion orders ℒ ⊆ {3,...,7} summed in the
/// objective, and the swap type shared by every quote.
struct CalibrationTarget {
  std::vector<SwaptionQuote> quotes;
  std::vector<int> orders{3, 5, 7};
  SwapType type = SwapType::Payer;

  /// Throws ValidationError when empty, when a price is not positive, when an
  /// order lies outside {3,...,7} or when a quote has a different type.
  void validate() const;
};

/// Column of `surface` at `tenor` restricted to maturities in
/// [min_maturity, max_maturity]. `drop_last_maturity` removes the largest one.
CalibrationTarget select_column(const SwaptionSurface& surface, double tenor,
                                double min_maturity, double max_maturity,
                                std::vector<int> orders, bool drop_last_maturity = false);

/// A Π ≤ 0 together with Π ≥ 0, Π3 ≥ 1, Π6 ≥ 1.
struct AdmissibleSet {
  static constexpr std::array<std::array<int, 8>, 4> A{{
      {-1, 1, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 1, -1, 0, 0, 0},
      {1, -2, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 1, -2, 0, 0, 0},
  }};

  static bool contains(const ModelParams::Vector& pi);
};

/// Clips to the bounds, then repairs each (φ1, φ2) pair by moving the
/// offending coordinate onto the active face. Identity on admissible input.
ModelParams::Vector project_admissible(ModelParams::Vector pi);

enum class InitialPreset { I1, I2 };

ModelParams::Vector initial_point(InitialPreset preset);
InitialPreset parse_initial_preset(std::string_view text);

inline constexpr double kPricingPenalty = 1e6;

/// Model prices of one quote at each requested order, or empty on a soft
/// pricing failure.
std::vector<double> quote_model_prices(const ShiftedModel& model, const SwaptionQuote& quote,
                                       SwapType type, const std::vector<int>& orders);

/// Σ_l Σ_quotes (market / GC_l - 1)². Each quote whose expansion fails or is
/// not positive contributes kPricingPenalty instead. Requires admissible Π.
double objective(const ModelParams::Vector& pi, const CalibrationTarget& target,
                 const DiscountCurve& curve);

struct CalibrationOptions {
  int max_evaluations = 5000;
  int stall_iterations = 50;
  double stall_tolerance = 1e-10;
  /// Nelder-Mead restarts from the incumbent after a stall.
  int restarts = 2;
  /// Extra multi-start seeds drawn around the initial point.
  int perturbed_starts = 2;
  double perturbation = 0.25;
  double initial_step = 0.1;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct QuoteFit {
  double maturity = 0.0;
  double tenor = 0.0;
  double market = 0.0;
  std::vector<double> model;           // per order, aligned with target.orders
  std::vector<double> relative_error;  // model / market - 1
};

struct CalibrationResult {
  ModelParams params{project_admissible(initial_point(InitialPreset::I1))};
  double objective = 0.0;
  int iterations = 0;
  int evaluations = 0;        // winning start
  int total_evaluations = 0;  // all starts
  bool converged = false;
  int start_index = 0;        // 0 = supplied initial point
  double wall_seconds = 0.0;
  std::vector<int> orders;
  std::vector<QuoteFit> fits;
};

std::vector<QuoteFit> quote_fits(const ModelParams& params, const CalibrationTarget& target,
                                 const DiscountCurve& curve);

/// Multi-start projected Nelder-Mead. Deterministic for fixed options.
CalibrationResult calibrate(const CalibrationTarget& target, const DiscountCurve& curve,
                            const ModelParams::Vector& initial,
                            const CalibrationOptions& options = {});

}  // namespace cirm
