#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "cirm/types.hpp"

namespace cirm {

struct CurvePoint {
  double maturity = 0.0;   // years
  double zero_rate = 0.0;  // continuously compounded
  double discount = 1.0;
};

/// Market zero-coupon curve P^M(0, t).
///
/// Continuously compounded zero rates are interpolated with a natural cubic
/// spline on the knot maturities; discount factors follow as exp(-R(t) t).
/// Queries at a knot return the input discount factor unchanged. Between
/// t = 0 and the first positive knot the rate is held flat. Queries beyond
/// the last knot throw ExtrapolationError.
class DiscountCurve {
 public:
  /// Throws ValidationError on non-increasing maturities, non-positive
  /// discounts, or discount/zero-rate mismatch above 1e-6.
  explicit DiscountCurve(std::vector<CurvePoint> points);

  double discount(double t) const;
  double zero_rate(double t) const;

  double last_maturity() const { return points_.back().maturity; }
  std::span<const CurvePoint> points() const { return points_; }

 private:
  std::vector<CurvePoint> points_;
  std::vector<double> second_derivs_;  // spline M_i = R''(t_i)
};

struct SwaptionQuote {
  double maturity = 0.0;    // T0, years
  double tenor = 0.0;       // T_N - T0, years
  double strike = 0.0;
  double normal_vol = 0.0;  // decimal (loader converts from bps)
  double price = 0.0;       // per unit notional
  SwapType type = SwapType::Payer;
};

/// Grid of swaption quotes sharing one swap type; annual fixed payments.
class SwaptionSurface {
 public:
  SwaptionSurface(std::vector<SwaptionQuote> quotes, SwapType type);

  SwapType type() const { return type_; }
  std::span<const SwaptionQuote> quotes() const { return quotes_; }
  std::optional<SwaptionQuote> find(double maturity, double tenor) const;
  std::vector<double> maturities() const;
  std::vector<double> tenors() const;

 private:
  std::vector<SwaptionQuote> quotes_;
  SwapType type_;
};

/// Bachelier price of a swaption given the forward swap rate and annuity.
/// Zero volatility returns the intrinsic value annuity * (ζ(f-K))^+.
double bachelier_price(double forward_swap_rate, double strike, double normal_vol,
                       double expiry, double annuity, SwapType type);

/// Forward par rate and annuity of an annual swap from the market curve.
struct ForwardSwap {
  double rate = 0.0;
  double annuity = 0.0;
};
ForwardSwap market_forward_swap(const DiscountCurve& curve, double maturity, double tenor);

// CSV (or JSON, detected by a leading '{') loaders and writers.
// Curve header:   maturity_years,zero_rate,discount
// Surface header: maturity_years,tenor_years,strike,normal_vol_bps,price
// An empty price field is filled in with the Bachelier price on `curve`.
DiscountCurve load_curve(const std::filesystem::path& path);
void write_curve(const DiscountCurve& curve, const std::filesystem::path& path);

SwaptionSurface load_surface(const std::filesystem::path& path, SwapType type,
                             const DiscountCurve* curve = nullptr);
void write_surface(const SwaptionSurface& surface, const std::filesystem::path& path);

}  // namespace cirm
