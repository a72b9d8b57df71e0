#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace cirm {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse of the standard normal cdf (Wichura AS241, ~1e-16 relative accuracy).
/// Requires 0 < p < 1.
double normal_quantile(double p);

/// Neumaier-compensated accumulator. Summation order is the call order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Sample mean and standard error of the mean, reduced in index order.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanEstimate mean_and_error(std::span<const double> values);

}  // namespace cirm
