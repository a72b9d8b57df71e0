#include "cirm/gram_charlier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cirm/errors.hpp"
#include "cirm/numerics.hpp"

namespace cirm {

namespace {

constexpr int kMaxOrder = 7;
constexpr int kMaxPayments = 30;
constexpr double kLargeExponent = 30.0;

double growth(double phi1, double tau) {
  const double u = phi1 * tau;
  if (std::abs(u) < 1e-8) return tau * (1.0 + 0.5 * u);
  return std::expm1(u) / phi1;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

double int_power(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

// Per-date log A_z(T0,Tj) and B_z(T0,Tj) for both factors.
struct DateTerms {
  std::vector<double> log_ax, bx, log_ay, by;
};

DateTerms date_terms(const ModelParams& params, const Schedule& schedule) {
  const auto px = params.phi(Factor::X);
  const auto py = params.phi(Factor::Y);
  DateTerms d;
  const double t0 = schedule.start();
  for (double tj : schedule.dates()) {
    const auto abx = bond_ab(px, t0, tj);
    const auto aby = bond_ab(py, t0, tj);
    d.log_ax.push_back(bond_log_a(px, tj - t0));
    d.bx.push_back(abx.b);
    d.log_ay.push_back(bond_log_a(py, tj - t0));
    d.by.push_back(aby.b);
  }
  return d;
}

// M_x e^{-N_x x} M_y e^{N_y y} / P^CIR-(t,T0), for one multi-index.
double forward_bond_moment(const ModelParams& params, const DateTerms& terms,
                           std::span<const std::uint8_t> counts, FactorState state, double tau0,
                           double log_p_t0) {
  double log_ax = 0.0, bx = 0.0, log_ay = 0.0, by = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    const double k = counts[j];
    log_ax += k * terms.log_ax[j];
    bx += k * terms.bx[j];
    log_ay += k * terms.log_ay[j];
    by += k * terms.by[j];
  }
  const auto rx = riccati_terminal_log(params.phi(Factor::X), log_ax, bx, tau0);
  const auto ry = riccati_terminal_log(params.phi(Factor::Y), log_ay, by, tau0);
  return std::exp(rx.m - rx.n * state.x + ry.m + ry.n * state.y - log_p_t0);
}

void compositions(int remaining, int min_part, std::vector<int>& parts,
                  std::span<const double> standardized, double& acc) {
  if (remaining == 0) {
    double term = 1.0;
    for (int p : parts) term *= standardized[p] / static_cast<double>(factorial(p));
    acc += term / static_cast<double>(factorial(static_cast<int>(parts.size())));
    return;
  }
  for (int p = min_part; p <= remaining; ++p) {
    if (remaining - p != 0 && remaining - p < min_part) continue;
    parts.push_back(p);
    compositions(remaining - p, min_part, parts, standardized, acc);
    parts.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Schedule

Schedule::Schedule(double start, std::vector<double> payment_dates) {
  if (payment_dates.empty()) throw ValidationError("schedule needs at least one payment date");
  dates_.reserve(payment_dates.size() + 1);
  dates_.push_back(start);
  for (double d : payment_dates) {
    if (!(d > dates_.back())) throw ValidationError("schedule dates must be strictly increasing");
    dates_.push_back(d);
  }
  if (start < 0.0) throw ValidationError("schedule start must be non-negative");
}

Schedule Schedule::annual(double start, double tenor) {
  const long n = std::lround(tenor);
  if (n < 1 || std::abs(tenor - static_cast<double>(n)) > 1e-12) {
    throw ValidationError("annual schedule needs a positive whole-year tenor");
  }
  std::vector<double> dates;
  for (long i = 1; i <= n; ++i) dates.push_back(start + static_cast<double>(i));
  return Schedule(start, std::move(dates));
}

SwapCoefficients swap_coefficients(const ShiftedModel& model, const SwapSpec& spec) {
  const auto dates = spec.schedule.dates();
  const std::size_t n = dates.size() - 1;
  const double z = sign(spec.type);
  SwapCoefficients out;
  out.a.resize(n + 1);
  out.a_star.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double a;
    if (i == 0) {
      a = z;
    } else if (i == n) {
      a = -z * (1.0 + spec.strike * spec.schedule.accrual(i));
    } else {
      a = -z * spec.strike * spec.schedule.accrual(i);
    }
    out.a[i] = a;
    out.a_star[i] = a * model.curve().discount(dates[i]) / model.zcb_cirminus_initial(dates[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multi-indices

MultiIndexTable::MultiIndexTable(int order, int positions) : order_(order), positions_(positions) {
  if (order < 0 || positions < 1) throw DomainError("invalid multi-index dimensions");
  std::vector<std::uint8_t> current(static_cast<std::size_t>(positions), 0);
  const std::uint64_t m_fact = factorial(order);
  // Stars and bars: place the remaining mass at position `pos` and recurse.
  auto recurse = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == positions - 1) {
      current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(remaining);
      std::uint64_t denom = 1;
      for (auto k : current) denom *= factorial(k);
      counts_.insert(counts_.end(), current.begin(), current.end());
      multiplicity_.push_back(m_fact / denom);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(k);
      self(self, pos + 1, remaining - k);
    }
  };
  recurse(recurse, 0, order);
}

const MultiIndexTable& enumerate_multiindices(int order, int payment_count) {
  if (order < 0 || order > kMaxOrder) throw DomainError("multi-index order must be in [0, 7]");
  if (payment_count < 1 || payment_count > kMaxPayments) {
    throw DomainError("payment count must be in [1, 30]");
  }
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<MultiIndexTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{order, payment_count}];
  if (!slot) slot = std::make_unique<MultiIndexTable>(order, payment_count + 1);
  return *slot;
}

// ---------------------------------------------------------------------------
// Hermite, cumulants, q coefficients

double hermite(int n, double x) {
  if (n < 0) throw DomainError("hermite order must be non-negative");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> cumulants_from_moments(std::span<const double> mu_in) {
  const std::size_t L = mu_in.size();
  if (L > static_cast<std::size_t>(kMaxOrder)) throw DomainError("at most 7 moments supported");
  double mu[8] = {1.0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < L; ++i) mu[i + 1] = mu_in[i];
  const double m1 = mu[1], m2 = mu[2], m3 = mu[3], m4 = mu[4], m5 = mu[5], m6 = mu[6], m7 = mu[7];
  const double p2 = m1 * m1, p3 = p2 * m1, p4 = p3 * m1, p5 = p4 * m1, p6 = p5 * m1, p7 = p6 * m1;

  std::vector<double> c(L);
  if (L >= 1) c[0] = m1;
  if (L >= 2) c[1] = m2 - p2;
  if (L >= 3) c[2] = 2 * p3 - 3 * m2 * m1 + m3;
  if (L >= 4) c[3] = -6 * p4 + 12 * m2 * p2 - 4 * m3 * m1 - 3 * m2 * m2 + m4;
  if (L >= 5) {
    c[4] = 24 * p5 - 60 * m2 * p3 + 20 * m3 * p2 + 30 * m2 * m2 * m1 - 5 * m4 * m1 -
           10 * m2 * m3 + m5;
  }
  if (L >= 6) {
    c[5] = -120 * p6 + 360 * m2 * p4 - 120 * m3 * p3 - 270 * m2 * m2 * p2 + 30 * m4 * p2 +
           120 * m2 * m3 * m1 - 6 * m5 * m1 + 30 * m2 * m2 * m2 - 10 * m3 * m3 - 15 * m2 * m4 +
           m6;
  }
  if (L >= 7) {
    c[6] = 720 * p7 - 2520 * m2 * p5 + 840 * m3 * p4 + 2520 * m2 * m2 * p3 - 210 * m4 * p3 -
           1260 * m2 * m3 * p2 + 42 * m5 * p2 - 630 * m2 * m2 * m2 * m1 + 140 * m3 * m3 * m1 +
           210 * m2 * m4 * m1 - 7 * m6 * m1 + 210 * m2 * m2 * m3 - 35 * m3 * m4 - 21 * m2 * m5 +
           m7;
  }
  return c;
}

double gram_charlier_q(int n, std::span<const double> cumulants) {
  if (n < 0 || n > kMaxOrder) throw DomainError("q_n supported for n in [0, 7]");
  if (n == 0) return 1.0;
  if (n < 3) return 0.0;
  if (cumulants.size() < static_cast<std::size_t>(n)) {
    throw DomainError("q_n needs the first n cumulants");
  }
  const double c2 = cumulants[1];
  if (!(c2 > 0.0)) throw ExpansionError("q_n undefined for c2 <= 0");
  // standardized[l] = c_l / c2^{l/2}, indexed by l.
  std::vector<double> standardized(static_cast<std::size_t>(n) + 1, 0.0);
  for (int l = 3; l <= n; ++l) {
    standardized[static_cast<std::size_t>(l)] =
        cumulants[static_cast<std::size_t>(l - 1)] / std::pow(c2, 0.5 * l);
  }
  std::vector<int> parts;
  double acc = 0.0;
  compositions(n, 3, parts, standardized, acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Riccati terminal-value solutions and moments

RiccatiSolution riccati_terminal_log(const PhiTriple& phi, double log_a, double b, double tau) {
  if (tau < 0.0) throw DomainError("riccati_terminal requires t <= T0");
  if (tau == 0.0) return {log_a, b};
  const double g = 1.0 + b * (phi.phi1 - phi.phi2);
  const double u = phi.phi1 * tau;
  if (u > kLargeExponent) {
    const double w = std::exp(-u);
    const double den = phi.phi1 * w + phi.phi2 * (1.0 - w) * g;
    if (!(den > 0.0)) throw SingularityError("Riccati terminal solution: denominator <= 0");
    const double n = (b * phi.phi1 * w + (1.0 - w) * g) / den;
    const double log_m =
        log_a + phi.phi3 * (phi.phi2 * tau - u - std::log(den) + std::log(phi.phi1));
    return {log_m, n};
  }
  const double r = growth(phi.phi1, tau);
  const double x = phi.phi2 * r * g;
  if (!(1.0 + x > 0.0)) throw SingularityError("Riccati terminal solution: denominator <= 0");
  return {log_a + phi.phi3 * (phi.phi2 * tau - std::log1p(x)), (b + r * g) / (1.0 + x)};
}

RiccatiSolution riccati_terminal(const PhiTriple& phi, double a, double b, double t, double T0) {
  if (!(a > 0.0)) throw DomainError("riccati_terminal requires a > 0");
  if (b < 0.0) throw DomainError("riccati_terminal requires b >= 0");
  auto s = riccati_terminal_log(phi, std::log(a), b, T0 - t);
  return {std::exp(s.m), s.n};
}

double bond_moment(const ShiftedModel& model, std::span<const std::uint8_t> counts,
                   FactorState state, double t, const Schedule& schedule) {
  if (counts.size() != schedule.dates().size()) {
    throw DomainError("multi-index length must equal the number of schedule dates");
  }
  const double t0 = schedule.start();
  if (t > t0) throw DomainError("bond_moment requires t <= T0");
  const auto terms = date_terms(model.params(), schedule);
  const double log_p_t0 = std::log(zcb_cirminus(model.params(), state, t, t0));
  return forward_bond_moment(model.params(), terms, counts, state, t0 - t, log_p_t0);
}

std::vector<double> swap_moments(const ShiftedModel& model, const SwapSpec& spec, double t,
                                 FactorState state, int max_order) {
  if (max_order < 1 || max_order > kMaxOrder) throw DomainError("moment order must be in [1, 7]");
  const auto& schedule = spec.schedule;
  const double t0 = schedule.start();
  if (t > t0) throw DomainError("swap_moments requires t <= T0");
  const int n = static_cast<int>(schedule.payment_count());

  const auto coeffs = swap_coefficients(model, spec);
  const double prefactor = model.zcb_cirminus_initial(t0) / model.curve().discount(t0);
  std::vector<double> weights(coeffs.a_star.size());
  for (std::size_t j = 0; j < weights.size(); ++j) weights[j] = coeffs.a_star[j] * prefactor;

  const auto terms = date_terms(model.params(), schedule);
  const double log_p_t0 = std::log(zcb_cirminus(model.params(), state, t, t0));
  const double tau0 = t0 - t;

  std::vector<double> moments(static_cast<std::size_t>(max_order));
  for (int m = 1; m <= max_order; ++m) {
    const auto& table = enumerate_multiindices(m, n);
    CompensatedSum sum;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto counts = table.counts(i);
      double coef = static_cast<double>(table.multiplicity(i));
      for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j]) coef *= int_power(weights[j], counts[j]);
      }
      sum.add(coef * forward_bond_moment(model.params(), terms, counts, state, tau0, log_p_t0));
    }
    moments[static_cast<std::size_t>(m - 1)] = sum.value();
  }
  return moments;
}

// ---------------------------------------------------------------------------
// Expansion

double GcResult::price(int order) const {
  for (const auto& [o, p] : prices) {
    if (o == order) return p;
  }
  throw DomainError("order " + std::to_string(order) + " was not priced");
}

GcResult gc_price_from_cumulants(std::span<const double> cumulants, double discount_t0,
                                 std::span<const int> orders) {
  std::vector<int> wanted{2};
  for (int o : orders) {
    if (o < 2 || o > kMaxOrder) throw DomainError("expansion orders must lie in [2, 7]");
    wanted.push_back(o);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  const int max_order = wanted.back();
  if (cumulants.size() < static_cast<std::size_t>(std::max(2, max_order))) {
    throw DomainError("not enough cumulants for the requested order");
  }
  for (int l = 0; l < max_order; ++l) {
    if (!std::isfinite(cumulants[static_cast<std::size_t>(l)])) {
      throw ExpansionError("non-finite swap cumulant");
    }
  }
  const double c1 = cumulants[0];
  const double c2 = cumulants[1];
  if (!(c2 > 0.0)) throw ExpansionError("swap variance c2 <= 0: expansion undefined");

  GcResult out;
  out.discount_t0 = discount_t0;
  out.cumulants.c.assign(cumulants.begin(), cumulants.begin() + std::max(2, max_order));
  out.cumulants.scaled.resize(out.cumulants.c.size());
  for (std::size_t l = 0; l < out.cumulants.c.size(); ++l) {
    out.cumulants.scaled[l] = out.cumulants.c[l] * std::pow(discount_t0, static_cast<double>(l + 1));
  }

  const double sd = std::sqrt(c2);
  const double d = c1 / sd;
  const double pdf = normal_pdf(d);
  const double base_drift = c1 * normal_cdf(d);
  double correction = 0.0;
  int next = 3;
  for (int order : wanted) {
    for (; next <= order; ++next) {
      const double sgn = (next % 2 == 0) ? 1.0 : -1.0;
      correction += sgn * gram_charlier_q(next, cumulants) * hermite(next - 2, d);
    }
    out.prices.emplace_back(order, discount_t0 * (base_drift + sd * pdf * (1.0 + correction)));
  }
  return out;
}

GcResult gc_price(const ShiftedModel& model, const SwapSpec& spec, double t, FactorState state,
                  std::span<const int> orders) {
  int max_order = 2;
  for (int o : orders) max_order = std::max(max_order, o);
  const auto moments = swap_moments(model, spec, t, state, max_order);
  const auto cumulants = cumulants_from_moments(moments);
  return gc_price_from_cumulants(cumulants, model.zcb(state, t, spec.schedule.start()), orders);
}

}  // namespace cirm
