#pragma once

#include <string>
#include <vector>

#include "cirm/cir_model.hpp"
#include "cirm/gram_charlier.hpp"
#include "cirm/simulation.hpp"

namespace cirm {

/// ζ (P(t,T0) - P(t,TN) - K Σ αi P(t,Ti)) with shifted bonds. Requires t ≤ T0.
double swap_value(const ShiftedModel& model, const SwapSpec& spec, FactorState state, double t);

/// S_n^N(t) = Σ_{i=n+1}^{N} αi P(t,Ti) over the schedule dates. Requires t ≤ T_n.
double annuity(const ShiftedModel& model, const Schedule& schedule, std::size_t n,
               std::size_t N, FactorState state, double t);

/// R_n^N(t) = (P(t,T_n) - P(t,T_N)) / S_n^N(t).
double par_rate(const ShiftedModel& model, const Schedule& schedule, std::size_t n,
                std::size_t N, FactorState state, double t);

/// CMS swap with annual resets T0, ..., T_{N-1}; each period pays the
/// `index`-year par rate fixed at its start.
struct CmsSpec {
  double effective = 0.0;
  int tenor = 1;
  int index = 1;
  SwapType type = SwapType::Payer;

  void validate() const;
  /// Reset dates T0, ..., T_{N-1}.
  std::vector<double> reset_dates() const;
};

struct CmsResult {
  double rate = 0.0;
  double std_error = 0.0;
  double denominator = 0.0;  // Σ αi P^M(0,T_{i-1})
};

/// Par CMS rate E[Σ αi D(T_{i-1}) R(T_{i-1})] / Σ αi P^M(0,T_{i-1}).
CmsResult cms_par_rate(const ShiftedModel& model, const PathSet& paths, const CmsSpec& spec);

/// Bermudan with annual exercise dates T0, ..., T_{N-1} into the swap ending
/// at T_N. Payoff at exercise (ζ(K - R)) S, so ζ = +1 is receiver-style.
struct BermudanSpec {
  double first_exercise = 1.0;
  double last_payment = 2.0;
  double strike = 0.0;
  SwapType type = SwapType::Payer;

  void validate() const;
  Schedule schedule() const { return Schedule::annual(first_exercise, last_payment - first_exercise); }
  std::vector<double> exercise_dates() const;
};

struct RegressionBasis {
  int degree = 3;
};

struct LsmcOptions {
  /// Regress only on paths where immediate exercise is positive.
  bool in_the_money_only = true;
};

struct BermudanResult {
  double price = 0.0;
  double std_error = 0.0;
  bool rank_deficient = false;
  std::size_t exercise_dates = 0;
};

inline constexpr const char* kBermudanPayoffConvention =
    "payoff (zeta*(K-R))^+ * annuity; zeta=+1 is receiver-style, zeta=-1 payer-style";

/// Longstaff-Schwartz style backward induction. Continuation values are
/// regressed on the standardized par rate of the remaining swap.
BermudanResult lsmc_bermudan(const ShiftedModel& model, const PathSet& paths,
                             const BermudanSpec& spec, const RegressionBasis& basis = {},
                             const LsmcOptions& options = {});

}  // namespace cirm
