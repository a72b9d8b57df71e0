#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cirm/cir_model.hpp"
#include "cirm/gram_charlier.hpp"
#include "cirm/numerics.hpp"

namespace cirm {

/// Philox4x32-10 counter-based generator (Salmon et al.).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter counter) const;

  /// Two uniforms in (0,1) with 53 random bits each.
  std::array<double, 2> uniforms(std::uint64_t step, std::uint64_t path) const;

 private:
  Key key_;
};

struct SimulationConfig {
  std::size_t paths = 10000;
  int steps_per_year = 256;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Grid times kept in the PathSet; empty keeps every grid point.
  std::vector<double> observation_times;

  double mesh() const { return 1.0 / steps_per_year; }
  /// horizon * steps_per_year; throws ValidationError unless it is a positive integer.
  std::size_t steps() const;
};

/// Simulated factor paths at the observed grid times. The short rate of the
/// unshifted model is x - y; the shift enters through `discount`.
class PathSet {
 public:
  PathSet(std::vector<double> times, std::size_t paths);

  std::size_t path_count() const { return paths_; }
  const std::vector<double>& times() const { return times_; }
  /// Index of grid time t. Throws DomainError when t was not observed.
  std::size_t time_index(double t) const;

  FactorState state(std::size_t path, std::size_t k) const {
    return {x_[k * paths_ + path], y_[k * paths_ + path]};
  }
  /// ∫_0^{t_k} (x - y) ds by the trapezoidal rule.
  double integral(std::size_t path, std::size_t k) const { return integral_[k * paths_ + path]; }
  /// D(t_k) = exp(-∫_0^{t_k} r ds) with the shift folded in through the curve ratio.
  double discount(const ShiftedModel& model, std::size_t path, std::size_t k) const;

  double* x_row(std::size_t k) { return x_.data() + k * paths_; }
  double* y_row(std::size_t k) { return y_.data() + k * paths_; }
  double* integral_row(std::size_t k) { return integral_.data() + k * paths_; }

  bool operator==(const PathSet&) const = default;

 private:
  std::vector<double> times_;
  std::size_t paths_;
  std::vector<double> x_, y_, integral_;
};

/// Drift and diffusion coefficients of a factor recovered from its φ triple:
/// k = 2φ2 - φ1, σ² = 2φ2|φ1 - φ2|, kθ = φ3 σ² / 2.
struct EulerCoefficients {
  double k = 0.0;
  double k_theta = 0.0;
  double sigma = 0.0;
};
EulerCoefficients euler_coefficients(const PhiTriple& phi, Factor factor);

/// Truncated Euler scheme: z += (kθ - k z)Δ + σ √max(z,0) ΔW. Deterministic
/// in (model, config); independent of config.threads.
PathSet simulate(const ShiftedModel& model, const SimulationConfig& config);

/// (z (1 - P(t,TN) - K Σ αi P(t,Ti)))^+ at time t = dates[0] for the annual
/// swap paying on dates[1..]. Shared by the European and Bermudan estimators.
double swap_exercise_value(const ShiftedModel& model, FactorState state,
                           std::span<const double> dates, double strike, double z);

/// Monte Carlo P(0,T) with standard error.
MeanEstimate mc_zcb(const PathSet& paths, const ShiftedModel& model, double T);

/// Per-path discounted payoffs D(T0) (ζ(R - K))^+ S(T0).
std::vector<double> mc_swaption_payoffs(const PathSet& paths, const ShiftedModel& model,
                                        const SwapSpec& spec);
MeanEstimate mc_swaption(const PathSet& paths, const ShiftedModel& model, const SwapSpec& spec);

/// Writes x.csv, y.csv and r.csv (x - y) under `dir`, one row per path.
void write_paths_csv(const PathSet& paths, const std::filesystem::path& dir);

}  // namespace cirm
