#include "cirm/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "cirm/errors.hpp"
#include "cirm/gram_charlier.hpp"
#include "cirm/numerics.hpp"

namespace cirm {

namespace {

using Vector = ModelParams::Vector;

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct StartOutcome {
  Vector best{};
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

class NelderMead {
 public:
  NelderMead(const CalibrationTarget& target, const DiscountCurve& curve,
             const CalibrationOptions& options)
      : target_(target), curve_(curve), options_(options) {}

  StartOutcome run(const Vector& start) {
    StartOutcome out;
    out.best = project_admissible(start);
    out.value = eval(out.best);
    bool stalled = false;
    for (int round = 0; round <= options_.restarts; ++round) {
      const double before = out.value;
      stalled = minimize(out);
      if (!stalled) break;
      if (before - out.value < options_.stall_tolerance && round > 0) break;
    }
    out.evaluations = evaluations_;
    out.converged = stalled && evaluations_ < options_.max_evaluations;
    return out;
  }

 private:
  double eval(const Vector& p) {
    ++evaluations_;
    return objective(p, target_, curve_);
  }

  bool budget_left() const { return evaluations_ < options_.max_evaluations; }

  // One Nelder-Mead pass from out.best. Returns true when it stopped on the
  // stall criterion, false when the evaluation budget ran out.
  bool minimize(StartOutcome& out) {
    constexpr int n = 8;
    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;

    std::array<Vector, n + 1> simplex;
    std::array<double, n + 1> values;
    simplex[0] = out.best;
    values[0] = out.value;
    for (int i = 0; i < n; ++i) {
      Vector v = out.best;
      const double step = v[i] != 0.0 ? options_.initial_step * v[i] : 2.5e-4;
      v[i] += step;
      v = project_admissible(v);
      if (v == out.best) {
        v[i] -= 2.0 * step;
        v = project_admissible(v);
      }
      simplex[i + 1] = v;
      values[i + 1] = eval(v);
    }

    std::vector<double> history;
    std::array<int, n + 1> order;
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return values[a] < values[b]; });
      const int best = order[0], worst = order[n], second = order[n - 1];
      if (values[best] < out.value) {
        out.value = values[best];
        out.best = simplex[best];
      }
      history.push_back(out.value);
      ++out.iterations;
      const auto h = history.size();
      if (h > static_cast<std::size_t>(options_.stall_iterations) &&
          history[h - 1 - options_.stall_iterations] - history[h - 1] < options_.stall_tolerance) {
        return true;
      }
      if (!budget_left()) return false;

      Vector centroid{};
      for (int k = 0; k < n; ++k) {
        const int idx = order[k];
        for (int i = 0; i < n; ++i) centroid[i] += simplex[idx][i] / n;
      }
      auto along = [&](double coeff) {
        Vector v;
        for (int i = 0; i < n; ++i) v[i] = centroid[i] + coeff * (simplex[worst][i] - centroid[i]);
        return project_admissible(v);
      };

      const Vector xr = along(-alpha);
      const double fr = eval(xr);
      if (fr < values[best]) {
        const Vector xe = along(-alpha * gamma);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[worst] = xe;
          values[worst] = fe;
        } else {
          simplex[worst] = xr;
          values[worst] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[worst] = xr;
        values[worst] = fr;
        continue;
      }
      const bool outside = fr < values[worst];
      const Vector xc = along(outside ? -rho * alpha : rho);
      const double fc = eval(xc);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = xc;
        values[worst] = fc;
        continue;
      }
      for (int k = 1; k <= n; ++k) {
        const int idx = order[k];
        Vector v;
        for (int i = 0; i < n; ++i) {
          v[i] = simplex[best][i] + shrink * (simplex[idx][i] - simplex[best][i]);
        }
        simplex[idx] = project_admissible(v);
        values[idx] = eval(simplex[idx]);
      }
    }
  }

  const CalibrationTarget& target_;
  const DiscountCurve& curve_;
  const CalibrationOptions& options_;
  int evaluations_ = 0;
};

}  // namespace

void CalibrationTarget::validate() const {
  if (quotes.empty()) throw ValidationError("calibration target has no quotes");
  if (orders.empty()) throw ValidationError("calibration target has no expansion orders");
  for (int l : orders) {
    if (l < 3 || l > 7) throw ValidationError("calibration orders must lie in {3,...,7}");
  }
  for (const auto& q : quotes) {
    if (!(q.price > 0.0)) throw ValidationError("calibration quotes need positive prices");
    if (q.type != type) throw ValidationError("calibration quotes must share one swap type");
  }
}

CalibrationTarget select_column(const SwaptionSurface& surface, double tenor,
                                double min_maturity, double max_maturity,
                                std::vector<int> orders, bool drop_last_maturity) {
  CalibrationTarget target;
  target.type = surface.type();
  target.orders = std::move(orders);
  for (const auto& q : surface.quotes()) {
    if (std::abs(q.tenor - tenor) < 1e-9 && q.maturity >= min_maturity - 1e-9 &&
        q.maturity <= max_maturity + 1e-9) {
      target.quotes.push_back(q);
    }
  }
  if (drop_last_maturity && !target.quotes.empty()) target.quotes.pop_back();
  return target;
}

bool AdmissibleSet::contains(const Vector& pi) {
  for (double v : pi) {
    if (!(v >= 0.0)) return false;
  }
  if (pi[2] < 1.0 || pi[5] < 1.0) return false;
  for (const auto& row : A) {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += row[i] * pi[i];
    if (s > 0.0) return false;
  }
  return true;
}

Vector project_admissible(Vector pi) {
  for (double& v : pi) {
    if (!(v >= 0.0)) v = 0.0;  // also maps NaN to 0
  }
  pi[2] = std::max(pi[2], 1.0);
  pi[5] = std::max(pi[5], 1.0);
  // x pair: φ2 ≤ φ1 ≤ 2 φ2.
  if (pi[1] > pi[0]) pi[1] = pi[0];
  if (pi[0] > 2.0 * pi[1]) pi[0] = 2.0 * pi[1];
  // y pair: φ1 ≤ φ2 (which implies φ1 ≤ 2 φ2).
  if (pi[3] > pi[4]) pi[3] = pi[4];
  return pi;
}

Vector initial_point(InitialPreset preset) {
  Vector i1{0.1, 0.095, 0.3, 0.095, 0.1, 0.3, 0.01, 0.01};
  if (preset == InitialPreset::I2) {
    for (double& v : i1) v /= 2.0;
  }
  return i1;
}

InitialPreset parse_initial_preset(std::string_view text) {
  if (text == "I1" || text == "i1") return InitialPreset::I1;
  if (text == "I2" || text == "i2") return InitialPreset::I2;
  throw ValidationError("unknown initial preset '" + std::string(text) + "' (expected I1 or I2)");
}

std::vector<double> quote_model_prices(const ShiftedModel& model, const SwaptionQuote& quote,
                                       SwapType type, const std::vector<int>& orders) {
  const SwapSpec spec{Schedule::annual(quote.maturity, quote.tenor), quote.strike, type};
  try {
    const auto gc = gc_price(model, spec, orders);
    std::vector<double> out;
    out.reserve(orders.size());
    for (int l : orders) {
      const double p = gc.price(l);
      if (!(p > 0.0) || !std::isfinite(p)) return {};
      out.push_back(p);
    }
    return out;
  } catch (const ExpansionError&) {
    return {};
  } catch (const SingularityError&) {
    return {};
  }
}

double objective(const Vector& pi, const CalibrationTarget& target, const DiscountCurve& curve) {
  const ShiftedModel model(ModelParams(pi), curve);
  double total = 0.0;
  for (const auto& q : target.quotes) {
    const auto prices = quote_model_prices(model, q, target.type, target.orders);
    if (prices.empty()) {
      total += kPricingPenalty;
      continue;
    }
    for (double p : prices) {
      const double e = q.price / p - 1.0;
      total += e * e;
    }
  }
  return total;
}

std::vector<QuoteFit> quote_fits(const ModelParams& params, const CalibrationTarget& target,
                                 const DiscountCurve& curve) {
  const ShiftedModel model(params, curve);
  std::vector<QuoteFit> fits;
  for (const auto& q : target.quotes) {
    QuoteFit f{q.maturity, q.tenor, q.price, {}, {}};
    f.model = quote_model_prices(model, q, target.type, target.orders);
    for (double p : f.model) f.relative_error.push_back(p / q.price - 1.0);
    fits.push_back(std::move(f));
  }
  return fits;
}

CalibrationResult calibrate(const CalibrationTarget& target, const DiscountCurve& curve,
                            const Vector& initial, const CalibrationOptions& options) {
  target.validate();
  if (options.max_evaluations < 1 || options.stall_iterations < 1) {
    throw ValidationError("calibration budget must be positive");
  }
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<Vector> starts{project_admissible(initial)};
  std::mt19937_64 rng(options.seed);
  for (int s = 0; s < options.perturbed_starts; ++s) {
    Vector v = starts.front();
    for (double& x : v) {
      const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      x *= std::exp(options.perturbation * normal_quantile(u));
    }
    starts.push_back(project_admissible(v));
  }

  std::vector<StartOutcome> outcomes(starts.size());
  const int workers =
      std::max(1, std::min<int>(options.threads, static_cast<int>(starts.size())));
  if (workers == 1) {
    for (std::size_t s = 0; s < starts.size(); ++s) {
      outcomes[s] = NelderMead(target, curve, options).run(starts[s]);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = static_cast<std::size_t>(w); s < starts.size();
             s += static_cast<std::size_t>(workers)) {
          outcomes[s] = NelderMead(target, curve, options).run(starts[s]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::size_t winner = 0;
  int total_evals = 0;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    total_evals += outcomes[s].evaluations;
    const auto& a = outcomes[s];
    const auto& b = outcomes[winner];
    if (a.value < b.value - 1e-12 ||
        (std::abs(a.value - b.value) <= 1e-12 && norm2(a.best) < norm2(b.best))) {
      winner = s;
    }
  }

  const auto& best = outcomes[winner];
  if (!AdmissibleSet::contains(best.best)) {
    throw DomainError("optimizer returned an inadmissible point");
  }
  CalibrationResult result;
  result.params = ModelParams(best.best);
  result.objective = objective(best.best, target, curve);
  result.iterations = best.iterations;
  result.evaluations = best.evaluations;
  result.total_evaluations = total_evals;
  result.converged = best.converged;
  result.start_index = static_cast<int>(winner);
  result.orders = target.orders;
  result.fits = quote_fits(result.params, target, curve);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace cirm
