#pragma once

#include <array>
#include <string>

#include "cirm/market_data.hpp"
#include "cirm/types.hpp"

namespace cirm {

enum class Factor { X, Y };

/// CIR factor dz = k(θ - z)dt + σ√z dW. The x factor enters the short rate
/// with sign +1, the y factor with sign -1.
struct FactorParams {
  double k = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double z0 = 0.0;
  Factor factor = Factor::X;
};

/// (φ1, φ2, φ3) of one factor; every closed form below is written in these.
struct PhiTriple {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
};

/// The calibration vector Π = (φ1ˣ, φ2ˣ, φ3ˣ, φ1ʸ, φ2ʸ, φ3ʸ, x0, y0).
///
/// Construction enforces the admissible polytope: all entries ≥ 0,
/// φ3 ≥ 1 for both factors (Feller), φ1ˣ ≥ φ2ˣ, φ2ʸ ≥ φ1ʸ and 2φ2 ≥ φ1.
class ModelParams {
 public:
  using Vector = std::array<double, 8>;

  explicit ModelParams(const Vector& pi);

  /// Returns an empty string when `pi` is admissible, else the first violation.
  static std::string admissibility_violation(const Vector& pi);
  static bool is_admissible(const Vector& pi) { return admissibility_violation(pi).empty(); }

  const Vector& vector() const { return pi_; }
  PhiTriple phi(Factor f) const {
    return f == Factor::X ? PhiTriple{pi_[0], pi_[1], pi_[2]} : PhiTriple{pi_[3], pi_[4], pi_[5]};
  }
  double x0() const { return pi_[6]; }
  double y0() const { return pi_[7]; }
  FactorState initial_state() const { return {pi_[6], pi_[7]}; }

 private:
  Vector pi_;
};

struct FactorPair {
  FactorParams x;
  FactorParams y;
};

/// (k, θ, σ) → Π. Throws DomainError when k_y² < 2σ_y², when σ = 0
/// (φ3 unbounded) or when a factor's Feller condition fails.
ModelParams phi_from_ksigma(const FactorParams& x, const FactorParams& y);

/// Π → (k, θ, σ). Throws SingularityError when φ1 = 2φ2 for a factor.
FactorPair ksigma_from_phi(const ModelParams& params);

struct BondAB {
  double a = 1.0;
  double b = 0.0;
};

/// A_z(t,T), B_z(t,T) of the CIR bond price; identical expressions for both
/// factors in terms of their φ triple. Requires t ≤ T.
BondAB bond_ab(const PhiTriple& phi, double t, double T);

/// log A_z(t,T); stays finite where A_z itself would under/overflow.
double bond_log_a(const PhiTriple& phi, double tau);

/// Zero-coupon price of the unshifted model r = x - y:
/// A_x e^{-B_x x} A_y e^{B_y y}.
double zcb_cirminus(const ModelParams& params, FactorState state, double t, double T);

/// Instantaneous forward rate f(0,t) of the unshifted model from the
/// closed-form T-derivatives of A_z and B_z.
double forward_rate_model(const ModelParams& params, double t);

/// ∂_T B_z(t,T) and -∂_T A_z(t,T) / A_z(t,T).
double bond_b_derivative(const PhiTriple& phi, double tau);
double bond_neg_log_a_derivative(const PhiTriple& phi, double tau);

/// CIR- model plus the deterministic shift that reproduces the market curve.
///
/// The shift is never materialized; bond prices use the curve ratio
/// P(t,T) = [P^M(0,T)/P^M(0,t)] [P^CIR-(0,t)/P^CIR-(0,T)] P^CIR-(t,T).
class ShiftedModel {
 public:
  ShiftedModel(ModelParams params, DiscountCurve curve)
      : params_(params), curve_(std::move(curve)) {}

  const ModelParams& params() const { return params_; }
  const DiscountCurve& curve() const { return curve_; }

  /// exp(-∫_t^T ψ(s) ds). Throws ExtrapolationError past the last knot.
  double shift_factor(double t, double T) const;

  /// Shifted zero-coupon price P(t,T) at factor state (x, y).
  double zcb(FactorState state, double t, double T) const;

  /// P^CIR-(0,T) at the initial state.
  double zcb_cirminus_initial(double T) const {
    return zcb_cirminus(params_, params_.initial_state(), 0.0, T);
  }

 private:
  ModelParams params_;
  DiscountCurve curve_;
};

inline double zcb_shifted(const ShiftedModel& model, FactorState state, double t, double T) {
  return model.zcb(state, t, T);
}

}  // namespace cirm
