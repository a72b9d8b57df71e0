#include "cirm/cir_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cirm/errors.hpp"

namespace cirm {

namespace {

// Slack admitted on the linear constraints so that round-trips through
// (k, θ, σ) do not reject boundary points by a few ulps.
constexpr double kAdmissibleSlack = 1e-12;

// Beyond this φ1·τ the expm1-based forms are replaced by their e^{-φ1 τ} duals.
constexpr double kLargeExponent = 30.0;

// expm1(φ1 τ) / φ1, continuous at φ1 = 0.
double growth(double phi1, double tau) {
  const double u = phi1 * tau;
  if (std::abs(u) < 1e-8) return tau * (1.0 + 0.5 * u);
  return std::expm1(u) / phi1;
}

}  // namespace

ModelParams::ModelParams(const Vector& pi) : pi_(pi) {
  if (auto why = admissibility_violation(pi); !why.empty()) {
    throw DomainError("inadmissible parameters: " + why);
  }
}

std::string ModelParams::admissibility_violation(const Vector& pi) {
  static constexpr const char* names[8] = {"phi1_x", "phi2_x", "phi3_x", "phi1_y",
                                           "phi2_y", "phi3_y", "x0",     "y0"};
  for (int i = 0; i < 8; ++i) {
    if (!std::isfinite(pi[i])) return std::string(names[i]) + " is not finite";
    if (pi[i] < 0.0) return std::string(names[i]) + " < 0";
  }
  if (pi[2] < 1.0 - kAdmissibleSlack) return "phi3_x < 1 (Feller)";
  if (pi[5] < 1.0 - kAdmissibleSlack) return "phi3_y < 1 (Feller)";
  if (pi[1] - pi[0] > kAdmissibleSlack) return "phi2_x > phi1_x (sigma_x imaginary)";
  if (pi[3] - pi[4] > kAdmissibleSlack) return "phi1_y > phi2_y (sigma_y imaginary)";
  if (pi[0] - 2.0 * pi[1] > kAdmissibleSlack) return "phi1_x > 2 phi2_x (k_x < 0)";
  if (pi[3] - 2.0 * pi[4] > kAdmissibleSlack) return "phi1_y > 2 phi2_y (k_y < 0)";
  return {};
}

ModelParams phi_from_ksigma(const FactorParams& x, const FactorParams& y) {
  auto check = [](const FactorParams& f, const char* name) {
    if (f.k < 0.0 || f.theta < 0.0 || f.sigma < 0.0 || f.z0 < 0.0) {
      throw DomainError(std::string(name) + ": parameters must be non-negative");
    }
    if (f.sigma == 0.0) throw DomainError(std::string(name) + ": sigma = 0 makes phi3 unbounded");
    if (2.0 * f.k * f.theta < f.sigma * f.sigma * (1.0 - kAdmissibleSlack)) {
      throw DomainError(std::string(name) + ": Feller condition 2 k theta >= sigma^2 violated");
    }
  };
  check(x, "x");
  check(y, "y");
  const double disc_y = y.k * y.k - 2.0 * y.sigma * y.sigma;
  if (disc_y < 0.0) throw DomainError("k_y^2 < 2 sigma_y^2: phi1_y is imaginary");

  const double p1x = std::sqrt(x.k * x.k + 2.0 * x.sigma * x.sigma);
  const double p1y = std::sqrt(disc_y);
  return ModelParams({p1x, 0.5 * (x.k + p1x), 2.0 * x.k * x.theta / (x.sigma * x.sigma), p1y,
                      0.5 * (y.k + p1y), 2.0 * y.k * y.theta / (y.sigma * y.sigma), x.z0, y.z0});
}

FactorPair ksigma_from_phi(const ModelParams& params) {
  const auto px = params.phi(Factor::X);
  const auto py = params.phi(Factor::Y);
  const double den_x = px.phi1 - 2.0 * px.phi2;
  const double den_y = py.phi1 - 2.0 * py.phi2;
  if (den_x == 0.0) throw SingularityError("phi1_x = 2 phi2_x: theta_x undefined (k_x = 0)");
  if (den_y == 0.0) throw SingularityError("phi1_y = 2 phi2_y: theta_y undefined (k_y = 0)");

  FactorPair out;
  out.x.factor = Factor::X;
  out.x.k = 2.0 * px.phi2 - px.phi1;
  out.x.sigma = std::sqrt(std::max(0.0, 2.0 * (px.phi2 * px.phi1 - px.phi2 * px.phi2)));
  out.x.theta = -px.phi2 * px.phi3 * (px.phi1 - px.phi2) / den_x;
  out.x.z0 = params.x0();

  out.y.factor = Factor::Y;
  out.y.k = 2.0 * py.phi2 - py.phi1;
  out.y.sigma = std::sqrt(std::max(0.0, -2.0 * (py.phi2 * py.phi1 - py.phi2 * py.phi2)));
  out.y.theta = py.phi2 * py.phi3 * (py.phi1 - py.phi2) / den_y;
  out.y.z0 = params.y0();
  return out;
}

double bond_log_a(const PhiTriple& phi, double tau) {
  if (tau == 0.0) return 0.0;
  const double u = phi.phi1 * tau;
  if (u > kLargeExponent) {
    // log(1 + φ2 (e^{u}-1)/φ1) = u + log(φ2/φ1 + (1 - φ2/φ1) e^{-u})
    const double ratio = phi.phi2 / phi.phi1;
    return phi.phi3 * ((phi.phi2 - phi.phi1) * tau - std::log(ratio + (1.0 - ratio) * std::exp(-u)));
  }
  return phi.phi3 * (phi.phi2 * tau - std::log1p(phi.phi2 * growth(phi.phi1, tau)));
}

static double bond_b(const PhiTriple& phi, double tau) {
  if (tau == 0.0) return 0.0;
  const double u = phi.phi1 * tau;
  if (u > kLargeExponent) {
    const double w = std::exp(-u);
    return (1.0 - w) / (phi.phi1 * w + phi.phi2 * (1.0 - w));
  }
  const double r = growth(phi.phi1, tau);
  return r / (1.0 + phi.phi2 * r);
}

BondAB bond_ab(const PhiTriple& phi, double t, double T) {
  if (t > T) throw DomainError("bond_ab requires t <= T");
  const double tau = T - t;
  return {std::exp(bond_log_a(phi, tau)), bond_b(phi, tau)};
}

double bond_b_derivative(const PhiTriple& phi, double tau) {
  const double u = phi.phi1 * tau;
  if (u > kLargeExponent) {
    const double w = std::exp(-u);
    const double d = w + phi.phi2 * (1.0 - w) / phi.phi1;
    return w / (d * d);
  }
  const double d = 1.0 + phi.phi2 * growth(phi.phi1, tau);
  return std::exp(u) / (d * d);
}

double bond_neg_log_a_derivative(const PhiTriple& phi, double tau) {
  return phi.phi3 * phi.phi2 * (phi.phi1 - phi.phi2) * bond_b(phi, tau);
}

double zcb_cirminus(const ModelParams& params, FactorState state, double t, double T) {
  if (t > T) throw DomainError("zcb_cirminus requires t <= T");
  const double tau = T - t;
  const auto px = params.phi(Factor::X);
  const auto py = params.phi(Factor::Y);
  const double log_p = bond_log_a(px, tau) - bond_b(px, tau) * state.x + bond_log_a(py, tau) +
                       bond_b(py, tau) * state.y;
  return std::exp(log_p);
}

double forward_rate_model(const ModelParams& params, double t) {
  const auto px = params.phi(Factor::X);
  const auto py = params.phi(Factor::Y);
  return bond_neg_log_a_derivative(px, t) + bond_b_derivative(px, t) * params.x0() +
         bond_neg_log_a_derivative(py, t) - bond_b_derivative(py, t) * params.y0();
}

double ShiftedModel::shift_factor(double t, double T) const {
  return (curve_.discount(T) / curve_.discount(t)) *
         (zcb_cirminus_initial(t) / zcb_cirminus_initial(T));
}

double ShiftedModel::zcb(FactorState state, double t, double T) const {
  if (t > T) throw DomainError("zcb requires t <= T");
  if (t == T) return 1.0;
  return shift_factor(t, T) * zcb_cirminus(params_, state, t, T);
}

}  // namespace cirm
