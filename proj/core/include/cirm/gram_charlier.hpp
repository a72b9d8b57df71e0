#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cirm/cir_model.hpp"
#include "cirm/types.hpp"

namespace cirm {

/// Reset/payment dates T0 < T1 < ... < TN with year fractions αi = Ti - Ti-1.
class Schedule {
 public:
  Schedule(double start, std::vector<double> payment_dates);

  /// Annual schedule T0, T0+1, ..., T0+tenor. `tenor` must be a whole number of years.
  static Schedule annual(double start, double tenor);

  double start() const { return dates_.front(); }
  double end() const { return dates_.back(); }
  /// All dates including T0 (size N+1).
  std::span<const double> dates() const { return dates_; }
  /// αi for i = 1..N; accrual(0) is unused and returns 0.
  double accrual(std::size_t i) const { return i == 0 ? 0.0 : dates_[i] - dates_[i - 1]; }
  std::size_t payment_count() const { return dates_.size() - 1; }

 private:
  std::vector<double> dates_;
};

struct SwapSpec {
  Schedule schedule;
  double strike = 0.0;
  SwapType type = SwapType::Payer;
};

/// Weights ai with Swap(t) = Σ ai P(t,Ti), and the starred weights
/// a*i = ai P^M(0,Ti) / P^CIR-(0,Ti) that absorb the deterministic shift.
struct SwapCoefficients {
  std::vector<double> a;
  std::vector<double> a_star;
};

SwapCoefficients swap_coefficients(const ShiftedModel& model, const SwapSpec& spec);

/// All (k0, ..., kN) with Σ kj = m, stored flat; multiplicity m!/(k0!...kN!).
class MultiIndexTable {
 public:
  MultiIndexTable(int order, int positions);

  int order() const { return order_; }
  int positions() const { return positions_; }
  std::size_t size() const { return multiplicity_.size(); }
  std::span<const std::uint8_t> counts(std::size_t i) const {
    return {counts_.data() + i * static_cast<std::size_t>(positions_),
            static_cast<std::size_t>(positions_)};
  }
  std::uint64_t multiplicity(std::size_t i) const { return multiplicity_[i]; }

 private:
  int order_;
  int positions_;
  std::vector<std::uint8_t> counts_;
  std::vector<std::uint64_t> multiplicity_;
};

/// Compositions of `order` into payment_count + 1 non-negative parts. Results
/// are cached per (order, payment_count) and shared across threads.
/// Requires order ≤ 7 and payment_count ≤ 30.
const MultiIndexTable& enumerate_multiindices(int order, int payment_count);

/// Probabilist's Hermite polynomial He_n(x), 0 ≤ n ≤ 7.
double hermite(int n, double x);

/// Cumulants c1..cL from raw moments μ1..μL (L ≤ 7).
std::vector<double> cumulants_from_moments(std::span<const double> moments);

/// Gram-Charlier coefficient q_n for standardized cumulants (c_l / c2^{l/2}),
/// n ≤ 7. q0 = 1, q1 = q2 = 0.
double gram_charlier_q(int n, std::span<const double> cumulants);

/// Solution (M_z, N_z) at t of the factor's bond Riccati system with terminal
/// values (a, b) at T0. Throws SingularityError when the denominator
/// φ1 + φ2 (e^{φ1 τ} - 1)(1 + b(φ1 - φ2)) is not positive.
struct RiccatiSolution {
  double m = 1.0;
  double n = 0.0;
};
RiccatiSolution riccati_terminal(const PhiTriple& phi, double a, double b, double t, double T0);

/// Same solution with log M returned; `log_a` = log a.
RiccatiSolution riccati_terminal_log(const PhiTriple& phi, double log_a, double b, double tau);

/// E^{Q^{T0}}[ Π_j P^CIR-(T0,Tj)^{kj} | x(t)=x, y(t)=y ].
double bond_moment(const ShiftedModel& model, std::span<const std::uint8_t> counts,
                   FactorState state, double t, const Schedule& schedule);

/// Swap moments M^1..M^L of Swap(T0) under the T0-forward measure.
std::vector<double> swap_moments(const ShiftedModel& model, const SwapSpec& spec, double t,
                                 FactorState state, int max_order);

/// Swap cumulants c_l and the discounted cumulants C_l = c_l P(t,T0)^l.
struct CumulantSet {
  std::vector<double> c;
  std::vector<double> scaled;
};

struct GcResult {
  CumulantSet cumulants;
  double discount_t0 = 1.0;                   // P(t,T0)
  std::vector<std::pair<int, double>> prices;  // (order, price), ascending order

  double price(int order) const;
};

/// Truncated expansion from already computed cumulants. `orders` ⊆ {2,...,7}.
/// Throws ExpansionError when c2 ≤ 0 or a cumulant is not finite.
GcResult gc_price_from_cumulants(std::span<const double> cumulants, double discount_t0,
                                 std::span<const int> orders);

/// Gram-Charlier swaption price at orders 2 (always) and each of `orders`
/// (subset of {3,...,7}).
GcResult gc_price(const ShiftedModel& model, const SwapSpec& spec, double t, FactorState state,
                  std::span<const int> orders);

inline GcResult gc_price(const ShiftedModel& model, const SwapSpec& spec,
                         std::span<const int> orders) {
  return gc_price(model, spec, 0.0, model.params().initial_state(), orders);
}

}  // namespace cirm
