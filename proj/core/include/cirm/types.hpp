#pragma once

#include <string>
#include <string_view>

namespace cirm {

/// Swap/swaption direction. The underlying value is the sign ζ used in all
/// payoff formulas: +1 pays fixed, -1 receives fixed.
enum class SwapType : int { Payer = 1, Receiver = -1 };

constexpr double sign(SwapType type) { return static_cast<double>(static_cast<int>(type)); }

constexpr SwapType opposite(SwapType type) {
  return type == SwapType::Payer ? SwapType::Receiver : SwapType::Payer;
}

inline std::string to_string(SwapType type) {
  return type == SwapType::Payer ? "payer" : "receiver";
}

/// Accepts "payer"/"receiver" (any case) or "+1"/"1"/"-1".
SwapType parse_swap_type(std::string_view text);

/// Factor state (x, y) of the two CIR processes.
struct FactorState {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace cirm
