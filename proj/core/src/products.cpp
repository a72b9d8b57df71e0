#include "cirm/products.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cirm/errors.hpp"
#include "cirm/numerics.hpp"

namespace cirm {

namespace {

std::vector<double> annual_dates(double start, int count) {
  std::vector<double> d;
  for (int i = 0; i <= count; ++i) d.push_back(start + i);
  return d;
}

// Par rate of the annual swap on `dates` at time dates[0] for state `s`.
double par_rate_at(const ShiftedModel& model, FactorState s, std::span<const double> dates) {
  const double t = dates[0];
  double ann = 0.0;
  for (std::size_t i = 1; i < dates.size(); ++i) {
    ann += (dates[i] - dates[i - 1]) * model.zcb(s, t, dates[i]);
  }
  return (1.0 - model.zcb(s, t, dates.back())) / ann;
}

}  // namespace

double swap_value(const ShiftedModel& model, const SwapSpec& spec, FactorState state, double t) {
  const auto dates = spec.schedule.dates();
  if (t > dates[0]) throw DomainError("swap_value requires t <= T0");
  double fixed = 0.0;
  for (std::size_t i = 1; i < dates.size(); ++i) {
    fixed += spec.schedule.accrual(i) * model.zcb(state, t, dates[i]);
  }
  return sign(spec.type) *
         (model.zcb(state, t, dates[0]) - model.zcb(state, t, dates.back()) - spec.strike * fixed);
}

double annuity(const ShiftedModel& model, const Schedule& schedule, std::size_t n,
               std::size_t N, FactorState state, double t) {
  const auto dates = schedule.dates();
  if (n >= N || N >= dates.size()) throw DomainError("annuity requires n < N <= payment count");
  if (t > dates[n]) throw DomainError("annuity requires t <= T_n");
  double s = 0.0;
  for (std::size_t i = n + 1; i <= N; ++i) s += schedule.accrual(i) * model.zcb(state, t, dates[i]);
  return s;
}

double par_rate(const ShiftedModel& model, const Schedule& schedule, std::size_t n,
                std::size_t N, FactorState state, double t) {
  const auto dates = schedule.dates();
  const double s = annuity(model, schedule, n, N, state, t);
  return (model.zcb(state, t, dates[n]) - model.zcb(state, t, dates[N])) / s;
}

// ---------------------------------------------------------------------------
// CMS

void CmsSpec::validate() const {
  if (effective < 0.0) throw ValidationError("CMS effective date must be non-negative");
  if (tenor < 1) throw ValidationError("CMS tenor must be at least one year");
  if (index < 1) throw ValidationError("CMS index must be at least one year");
}

std::vector<double> CmsSpec::reset_dates() const {
  std::vector<double> d;
  for (int i = 0; i < tenor; ++i) d.push_back(effective + i);
  return d;
}

CmsResult cms_par_rate(const ShiftedModel& model, const PathSet& paths, const CmsSpec& spec) {
  spec.validate();
  const auto resets = spec.reset_dates();
  CmsResult out;
  CompensatedSum denom;
  for (double t : resets) denom.add(model.curve().discount(t));  // αi = 1
  out.denominator = denom.value();

  std::vector<std::size_t> idx;
  std::vector<double> ratio;
  for (double t : resets) {
    idx.push_back(paths.time_index(t));
    ratio.push_back(t == 0.0 ? 1.0 : model.curve().discount(t) / model.zcb_cirminus_initial(t));
  }
  std::vector<double> numer(paths.path_count());
  for (std::size_t p = 0; p < numer.size(); ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < resets.size(); ++i) {
      const auto dates = annual_dates(resets[i], spec.index);
      const double d = std::exp(-paths.integral(p, idx[i])) * ratio[i];
      acc += d * par_rate_at(model, paths.state(p, idx[i]), dates);
    }
    numer[p] = acc / out.denominator;
  }
  const auto est = mean_and_error(numer);
  out.rate = est.mean;
  out.std_error = est.std_error;
  return out;
}

// ---------------------------------------------------------------------------
// Bermudan

void BermudanSpec::validate() const {
  if (first_exercise < 0.0) throw ValidationError("Bermudan first exercise must be non-negative");
  const double n = last_payment - first_exercise;
  if (n < 1.0 - 1e-12 || std::abs(n - std::round(n)) > 1e-12) {
    throw ValidationError("Bermudan swap must span a positive whole number of years");
  }
}

std::vector<double> BermudanSpec::exercise_dates() const {
  validate();
  const int n = static_cast<int>(std::lround(last_payment - first_exercise));
  std::vector<double> d;
  for (int i = 0; i < n; ++i) d.push_back(first_exercise + i);
  return d;
}

BermudanResult lsmc_bermudan(const ShiftedModel& model, const PathSet& paths,
                             const BermudanSpec& spec, const RegressionBasis& basis,
                             const LsmcOptions& options) {
  if (basis.degree < 1) throw ValidationError("regression degree must be at least 1");
  const auto exercise = spec.exercise_dates();
  const auto schedule = spec.schedule();
  const auto all_dates = schedule.dates();
  const std::size_t n_ex = exercise.size();
  const std::size_t m = paths.path_count();
  const double z = sign(spec.type);
  // (ζ(K - R))^+ S equals the swap exercise value with sign -ζ.
  const double exercise_sign = -z;

  std::vector<std::size_t> idx(n_ex);
  std::vector<double> ratio(n_ex);
  for (std::size_t j = 0; j < n_ex; ++j) {
    idx[j] = paths.time_index(exercise[j]);
    const double t = exercise[j];
    ratio[j] = t == 0.0 ? 1.0 : model.curve().discount(t) / model.zcb_cirminus_initial(t);
  }
  auto discount = [&](std::size_t p, std::size_t j) {
    return std::exp(-paths.integral(p, idx[j])) * ratio[j];
  };

  BermudanResult out;
  out.exercise_dates = n_ex;

  // Value at the current exercise date, per path, in units of that date.
  std::vector<double> value(m);
  {
    const std::size_t j = n_ex - 1;
    const auto dates = all_dates.subspan(j);
    for (std::size_t p = 0; p < m; ++p) {
      value[p] = swap_exercise_value(model, paths.state(p, idx[j]), dates, spec.strike, exercise_sign);
    }
  }

  const int cols = basis.degree + 1;
  std::vector<double> exercise_now(m), rate(m);
  for (std::size_t jj = n_ex - 1; jj-- > 0;) {
    const std::size_t j = jj;
    const auto dates = all_dates.subspan(j);
    std::vector<double> held(m);
    for (std::size_t p = 0; p < m; ++p) {
      const auto s = paths.state(p, idx[j]);
      held[p] = value[p] * discount(p, j + 1) / discount(p, j);
      exercise_now[p] = swap_exercise_value(model, s, dates, spec.strike, exercise_sign);
      rate[p] = par_rate_at(model, s, dates);
    }

    std::vector<std::size_t> sample;
    for (std::size_t p = 0; p < m; ++p) {
      if (!options.in_the_money_only || exercise_now[p] > 0.0) sample.push_back(p);
    }

    if (sample.empty()) {
      value = held;
      continue;
    }

    double mean = 0.0;
    for (auto p : sample) mean += rate[p];
    mean /= static_cast<double>(sample.size());
    double var = 0.0;
    for (auto p : sample) var += (rate[p] - mean) * (rate[p] - mean);
    const double sd = sample.size() > 1 ? std::sqrt(var / static_cast<double>(sample.size() - 1)) : 0.0;
    const double scale = sd > 0.0 ? sd : 1.0;

    auto features = [&](double r, Eigen::VectorXd& f) {
      const double x = (r - mean) / scale;
      double v = 1.0;
      for (int c = 0; c < cols; ++c) {
        f[c] = v;
        v *= x;
      }
    };

    Eigen::MatrixXd btb = Eigen::MatrixXd::Zero(cols, cols);
    Eigen::VectorXd bty = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd f(cols);
    for (auto p : sample) {
      features(rate[p], f);
      btb.noalias() += f * f.transpose();
      bty.noalias() += f * held[p];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(btb);
    cod.setThreshold(1e-12);
    Eigen::VectorXd lambda;
    if (cod.rank() < cols) {
      out.rank_deficient = true;
      lambda = cod.solve(bty);
    } else {
      lambda = btb.llt().solve(bty);
    }

    value = held;
    for (auto p : sample) {
      features(rate[p], f);
      const double continuation = f.dot(lambda);
      value[p] = std::max(exercise_now[p], continuation);
    }
    for (std::size_t p = 0; p < m; ++p) {
      if (value[p] < exercise_now[p]) throw DomainError("backward induction lost exercise dominance");
    }
  }

  std::vector<double> pv(m);
  for (std::size_t p = 0; p < m; ++p) pv[p] = discount(p, 0) * value[p];
  const auto est = mean_and_error(pv);
  out.price = est.mean;
  out.std_error = est.std_error;
  return out;
}

}  // namespace cirm
